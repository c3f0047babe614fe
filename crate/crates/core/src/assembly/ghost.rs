//! Ghost-penalty face terms: jumps of normal derivatives across the faces
//! next to the interface.

use crate::fem::{normal_derivative, DofMap, FieldView};
use crate::geometry::Side;
use crate::mesh::Mesh;
use crate::quadrature::face_rule;
use crate::sparse::SparseMatrix;
use crate::topology::CutTopology;

use super::weight::{face_weight, GhostWeight};

/// Scaling family of a ghost penalty. `Value` controls the field itself and
/// `Gradient` its first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhostKind {
    Value,
    Gradient,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Face coefficient multiplying the product of `j`-th normal-derivative jumps:
/// `h^(2j+1) / (j!)^2` for `Value`, `h^(2j-1) / ((j-1)!)^2` for `Gradient`.
pub fn ghost_coefficient(h: f64, j: usize, kind: GhostKind) -> f64 {
    match kind {
        GhostKind::Value => h.powi(2 * j as i32 + 1) / factorial(j).powi(2),
        GhostKind::Gradient => h.powi(2 * j as i32 - 1) / factorial(j - 1).powi(2),
    }
}

/// Local penalty matrix of one interior face over the union of the scalar
/// dofs of its two cells, summing jump orders `1..=order` of the space.
/// Excludes `gamma` and the face weight.
pub fn ghost_face_local(mesh: &Mesh, dofmap: &DofMap, face: usize, kind: GhostKind, npts: usize) -> (Vec<usize>, Vec<f64>) {
    let f = mesh.face(face);
    let (Some(minus), Some(plus)) = (f.cells[0], f.cells[1]) else {
        panic!("ghost penalty on boundary face {face}");
    };
    let nloc = dofmap.dofs_per_cell();
    let mut dofs: Vec<usize> = dofmap.cell_dofs(minus).iter().map(|&d| d as usize).collect();
    let mut plus_slot = Vec::with_capacity(nloc);
    for &d in dofmap.cell_dofs(plus) {
        let d = d as usize;
        let slot = dofs.iter().position(|&e| e == d).unwrap_or_else(|| {
            dofs.push(d);
            dofs.len() - 1
        });
        plus_slot.push(slot);
    }
    let m = dofs.len();
    let mut local = vec![0.0; m * m];
    let rule = face_rule(mesh, face, npts);
    let basis = dofmap.basis();
    let h = mesh.h();
    let mut jump = vec![0.0; m];
    for (x, w) in rule.points.iter().zip(&rule.weights) {
        let tm = {
            let map = dofmap.cell_map(minus);
            basis.tabulate(map.to_reference(*x), map.h)
        };
        let tp = {
            let map = dofmap.cell_map(plus);
            basis.tabulate(map.to_reference(*x), map.h)
        };
        for j in 1..=basis.order() {
            jump.iter_mut().for_each(|v| *v = 0.0);
            for l in 0..nloc {
                jump[l] -= normal_derivative(&tm, l, f.axis, j);
                jump[plus_slot[l]] += normal_derivative(&tp, l, f.axis, j);
            }
            let c = w * ghost_coefficient(h, j, kind);
            for a in 0..m {
                if jump[a] == 0.0 {
                    continue;
                }
                for b in 0..m {
                    // grouping keeps the local matrix bitwise symmetric
                    local[a * m + b] += c * (jump[a] * jump[b]);
                }
            }
        }
    }
    (dofs, local)
}

/// Scalar ghost matrix `gamma * sum_F w_F g_F` over the ghost faces of `side`,
/// on the dofs of `dofmap`.
pub fn assemble_ghost_matrix(
    mesh: &Mesh,
    topology: &CutTopology,
    dofmap: &DofMap,
    side: Side,
    kind: GhostKind,
    gamma: f64,
    weight: &dyn GhostWeight,
    npts: usize,
) -> SparseMatrix {
    let mut trip = Vec::new();
    for &face in topology.ghost_faces(side) {
        let (dofs, local) = ghost_face_local(mesh, dofmap, face, kind, npts);
        let scale = gamma * face_weight(mesh, topology, face, side, weight);
        let m = dofs.len();
        for a in 0..m {
            for b in 0..m {
                trip.push((dofs[a], dofs[b], scale * local[a * m + b]));
            }
        }
    }
    SparseMatrix::from_triplets(dofmap.n_dofs(), dofmap.n_dofs(), &trip)
}

/// `gamma * sum_F w_F g_F(v, v)` of a scalar field evaluated from its jumps
/// on each face rather than through the assembled matrix, so that fields in
/// the kernel give values at the level of squared rounding errors.
#[allow(clippy::too_many_arguments)]
pub fn ghost_energy(
    mesh: &Mesh,
    topology: &CutTopology,
    dofmap: &DofMap,
    side: Side,
    kind: GhostKind,
    gamma: f64,
    weight: &dyn GhostWeight,
    npts: usize,
    coeffs: &[f64],
) -> f64 {
    let view = FieldView::new(dofmap, coeffs, 1);
    let h = mesh.h();
    let mut total = 0.0;
    for &face in topology.ghost_faces(side) {
        let rule = face_rule(mesh, face, npts);
        let mut sum = 0.0;
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            for j in 1..=dofmap.order() {
                sum += w * ghost_coefficient(h, j, kind) * view.normal_derivative_jump(mesh, face, 0, j, *x).powi(2);
            }
        }
        total += gamma * face_weight(mesh, topology, face, side, weight) * sum;
    }
    total
}
