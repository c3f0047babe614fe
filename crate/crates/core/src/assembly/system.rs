//! The monolithic time-step matrix, Dirichlet elimination and right-hand sides.

use crate::fem::{DofMap, FieldRole};
use crate::geometry::{Point, Side};
use crate::sparse::SparseMatrix;

use super::forms::{FormRegistry, TimeScaling};
use super::{Discretization, Region};

/// Volumetric loads `f_f` and `f_s` at time `t`.
pub trait BodyForce: Send + Sync {
    fn fluid(&self, t: f64, x: Point) -> [f64; 2];
    fn solid(&self, t: f64, x: Point) -> [f64; 2];
}

/// Dofs of every field active on each cell, plus the unknowns of both cells
/// next to each ghost face. Each group couples all of its members.
fn coupling_groups(disc: &Discretization) -> Vec<Vec<usize>> {
    let topo = disc.topology();
    let mesh = disc.mesh();
    let side_roles = |side: Side| match side {
        Side::Fluid => [FieldRole::FluidVelocity, FieldRole::Pressure],
        Side::Solid => [FieldRole::SolidVelocity, FieldRole::Displacement],
    };
    let mut groups = Vec::with_capacity(mesh.n_cells() + mesh.faces().len() / 4);
    for cell in 0..mesh.n_cells() {
        let mut g = Vec::new();
        for side in Side::BOTH {
            if topo.is_active(cell, side) {
                for role in side_roles(side) {
                    g.extend(disc.global_dofs(cell, role));
                }
            }
        }
        groups.push(g);
    }
    for side in Side::BOTH {
        for &face in topo.ghost_faces(side) {
            let f = mesh.face(face);
            let mut g = Vec::new();
            for cell in f.cells.iter().flatten() {
                for role in side_roles(side) {
                    g.extend(disc.global_dofs(*cell, role));
                }
            }
            groups.push(g);
        }
    }
    groups
}

/// Structurally symmetric pattern of the monolithic matrix.
pub fn system_pattern(disc: &Discretization) -> SparseMatrix {
    let n = disc.layout().total();
    let groups = coupling_groups(disc);
    let mut incidence: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (gi, g) in groups.iter().enumerate() {
        for &d in g {
            incidence[d].push(gi as u32);
        }
    }
    let mut rows = Vec::with_capacity(n);
    for inc in incidence {
        let mut cols: Vec<u32> = Vec::new();
        for gi in inc {
            cols.extend(groups[gi as usize].iter().map(|&c| c as u32));
        }
        cols.sort_unstable();
        cols.dedup();
        rows.push(cols);
    }
    SparseMatrix::from_pattern(n, rows)
}

/// Assembled time-step system `A = H + k B` with Dirichlet rows replaced by
/// identity rows and Dirichlet columns moved to the right-hand side.
#[derive(Debug, Clone)]
pub struct System {
    /// The eliminated matrix that gets factorized.
    pub matrix: SparseMatrix,
    /// `H`: forms multiplying the previous state, without Dirichlet changes.
    pub history: SparseMatrix,
    lift: SparseMatrix,
    dirichlet: Vec<usize>,
    is_dirichlet: Vec<bool>,
}

impl System {
    /// Assembles all forms of `registry` with step `k`, and eliminates the
    /// Dirichlet unknowns given as global indices.
    pub fn assemble(disc: &Discretization, registry: &FormRegistry, k: f64, dirichlet: Vec<usize>) -> Self {
        let pattern = system_pattern(disc);
        let mut history = pattern.zeros_like();
        let mut step = pattern;
        for form in registry.iter() {
            match form.scaling() {
                TimeScaling::Unit => form.assemble(disc, &mut history),
                TimeScaling::Step => form.assemble(disc, &mut step),
            }
        }
        let mut matrix = step;
        matrix.scale(k);
        matrix.add_scaled(&history, 1.0);
        Self::eliminate(matrix, history, dirichlet)
    }

    /// Builds a system from an already assembled `A` and `H`.
    pub fn eliminate(mut matrix: SparseMatrix, history: SparseMatrix, mut dirichlet: Vec<usize>) -> Self {
        dirichlet.sort_unstable();
        dirichlet.dedup();
        let n = matrix.nrows();
        let mut is_dirichlet = vec![false; n];
        for &d in &dirichlet {
            is_dirichlet[d] = true;
        }
        let mut lift_trip = Vec::new();
        let row_ptr = matrix.row_ptr().to_vec();
        let cols = matrix.col_idx().to_vec();
        let vals = matrix.values_mut();
        for r in 0..n {
            for p in row_ptr[r]..row_ptr[r + 1] {
                let c = cols[p] as usize;
                if is_dirichlet[r] {
                    vals[p] = if c == r { 1.0 } else { 0.0 };
                } else if is_dirichlet[c] {
                    if vals[p] != 0.0 {
                        lift_trip.push((r, c, vals[p]));
                    }
                    vals[p] = 0.0;
                }
            }
        }
        Self {
            matrix,
            history,
            lift: SparseMatrix::from_triplets(n, n, &lift_trip),
            dirichlet,
            is_dirichlet,
        }
    }

    pub fn dirichlet(&self) -> &[usize] {
        &self.dirichlet
    }

    pub fn is_dirichlet(&self, i: usize) -> bool {
        self.is_dirichlet[i]
    }

    /// `H prev + load`, with the lift of the Dirichlet values subtracted and
    /// Dirichlet rows set to their values. `values` is indexed like
    /// `dirichlet()`, and `load` must already include the factor `k`.
    pub fn rhs(&self, prev: &[f64], load: Option<&[f64]>, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.dirichlet.len());
        let mut b = self.history.matvec(prev);
        if let Some(f) = load {
            for (bi, fi) in b.iter_mut().zip(f) {
                *bi += fi;
            }
        }
        let mut g = vec![0.0; b.len()];
        for (&d, &v) in self.dirichlet.iter().zip(values) {
            g[d] = v;
        }
        let lifted = self.lift.matvec(&g);
        for (i, bi) in b.iter_mut().enumerate() {
            if self.is_dirichlet[i] {
                *bi = g[i];
            } else {
                *bi -= lifted[i];
            }
        }
        b
    }
}

/// Nodal interpolation of a vector function at the boundary nodes of a
/// velocity dof map, as `(field index, value)` pairs with component-major
/// field indices.
pub fn interpolate_boundary(dofmap: &DofMap, f: impl Fn(Point) -> [f64; 2]) -> Vec<(usize, f64)> {
    let n = dofmap.n_dofs();
    let coords = dofmap.coordinates();
    let mut out = Vec::with_capacity(2 * dofmap.boundary_dofs().len());
    for c in 0..2 {
        for &d in dofmap.boundary_dofs() {
            out.push((c * n + d, f(coords[d])[c]));
        }
    }
    out
}

/// `rho_f (f_f, phi_f)_{Omega_f} + rho_s (f_s, phi_s)_{Omega_s}` as a global vector.
pub fn assemble_load(disc: &Discretization, force: &dyn BodyForce, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; disc.layout().total()];
    let mat = disc.config().material;
    for (role, rho) in [(FieldRole::FluidVelocity, mat.rho_f), (FieldRole::SolidVelocity, mat.rho_s)] {
        let side = role.side();
        let region = Region::Physical(side);
        let dm = disc.dofmap(role);
        for cell in disc.region_cells(region) {
            let rule = disc.bulk_rule(cell, region);
            let map = dm.cell_map(cell);
            let dofs = disc.global_dofs(cell, role);
            let nloc = dm.dofs_per_cell();
            for (x, w) in rule.points.iter().zip(&rule.weights) {
                let val = match side {
                    Side::Fluid => force.fluid(t, *x),
                    Side::Solid => force.solid(t, *x),
                };
                let tab = dm.basis().tabulate(map.to_reference(*x), map.h);
                for c in 0..2 {
                    for a in 0..nloc {
                        out[dofs[c * nloc + a]] += rho * w * val[c] * tab.values[a];
                    }
                }
            }
        }
    }
    out
}
