use std::collections::HashSet;

use cutfsi::fem::{DofMap, FieldView, ReferenceBasis};
use cutfsi::geometry::{LevelSet, Side};
use cutfsi::mesh::Mesh;
use cutfsi::quadrature::tensor_rule;
use cutfsi::timestepper::InflowProfile;
use cutfsi::topology::{build_cut_topology, CutTopology};
use proptest::prelude::*;

/// Mesh and topology where every cell is fluid.
fn full_mesh(n: usize) -> (Mesh, CutTopology) {
    let mesh = Mesh::new(n).unwrap();
    let topo = build_cut_topology(&mesh, &LevelSet::circle([5.0, 5.0], 0.25).unwrap()).unwrap();
    (mesh, topo)
}

#[test]
fn q1_center_values() {
    let t = ReferenceBasis::new(1).tabulate([0.5, 0.5], 1.0);
    assert!(t.values.iter().all(|&v| (v - 0.25).abs() < 1e-16));
}

#[test]
fn kronecker_at_nodes() {
    for order in [1, 2] {
        let b = ReferenceBasis::new(order);
        for i in 0..b.n_dofs() {
            let t = b.tabulate(b.node(i), 1.0);
            for (j, v) in t.values.iter().enumerate() {
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn gradients_scale_with_cell_size() {
    let b = ReferenceBasis::new(1);
    let reference = b.tabulate([0.5, 0.5], 1.0);
    let scaled = b.tabulate([0.5, 0.5], 0.25);
    for (r, s) in reference.grads.iter().zip(&scaled.grads) {
        assert!((s[0] - r[0] / 0.25).abs() < 1e-14 && (s[1] - r[1] / 0.25).abs() < 1e-14);
    }
}

proptest! {
    #[test]
    fn partition_of_unity(x in 0.0f64..1.0, y in 0.0f64..1.0, order in 1usize..3) {
        let t = ReferenceBasis::new(order).tabulate([x, y], 0.5);
        prop_assert!((t.values.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        let gx: f64 = t.grads.iter().map(|g| g[0]).sum();
        let gy: f64 = t.grads.iter().map(|g| g[1]).sum();
        prop_assert!(gx.abs() < 1e-12 && gy.abs() < 1e-12);
    }
}

#[test]
fn dof_counts_on_full_mesh() {
    let (mesh, topo) = full_mesh(8);
    assert_eq!(DofMap::new(&mesh, &topo, Side::Fluid, 1).n_dofs(), 81);
    assert_eq!(DofMap::new(&mesh, &topo, Side::Fluid, 2).n_dofs(), 289);
}

#[test]
fn dof_count_on_solid_mesh_matches_enumeration() {
    let mesh = Mesh::new(8).unwrap();
    let topo = build_cut_topology(&mesh, &LevelSet::circle([0.0, 0.0], 0.75).unwrap()).unwrap();
    for order in [1, 2] {
        let mut nodes = HashSet::new();
        for c in topo.active_cells(Side::Solid) {
            let (i, j) = mesh.cell_ij(c);
            for a in 0..=order {
                for b in 0..=order {
                    nodes.insert((i * order + a, j * order + b));
                }
            }
        }
        assert_eq!(DofMap::new(&mesh, &topo, Side::Solid, order).n_dofs(), nodes.len());
    }
}

fn interpolate(dm: &DofMap, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    dm.coordinates().iter().map(|&x| f(x)).collect()
}

#[test]
fn jumps_vanish_for_global_polynomials() {
    let (mesh, topo) = full_mesh(4);
    let q1 = DofMap::new(&mesh, &topo, Side::Fluid, 1);
    let q2 = DofMap::new(&mesh, &topo, Side::Fluid, 2);
    let lin = interpolate(&q1, |x| 1.0 + 2.0 * x[0] - 3.0 * x[1]);
    let quad = interpolate(&q2, |x| x[0] * x[0] - 2.0 * x[0] * x[1] + 0.5 * x[1] * x[1] + x[0]);
    for (f, face) in mesh.faces().iter().enumerate() {
        if !face.is_interior() {
            continue;
        }
        let a = mesh.vertex(face.vertices[0]);
        let b = mesh.vertex(face.vertices[1]);
        let x = [0.3 * a[0] + 0.7 * b[0], 0.3 * a[1] + 0.7 * b[1]];
        assert!(FieldView::new(&q1, &lin, 1).normal_derivative_jump(&mesh, f, 0, 1, x).abs() < 1e-12);
        for j in 1..=2 {
            assert!(FieldView::new(&q2, &quad, 1).normal_derivative_jump(&mesh, f, 0, j, x).abs() < 1e-11);
        }
    }
}

#[test]
fn hat_function_jump() {
    let (mesh, topo) = full_mesh(8);
    let h = mesh.h();
    let q1 = DofMap::new(&mesh, &topo, Side::Fluid, 1);
    let node = q1.coordinates().iter().position(|&x| x == [0.0, 0.0]).unwrap();
    let mut hat = vec![0.0; q1.n_dofs()];
    hat[node] = 1.0;
    // vertical face through the node: slope +1/h on the left, -1/h on the right
    let face = (0..mesh.faces().len())
        .find(|&f| {
            let fc = mesh.face(f);
            fc.axis == 0 && mesh.vertex(fc.vertices[0]) == [0.0, 0.0] && mesh.vertex(fc.vertices[1]) == [0.0, h]
        })
        .unwrap();
    for y in [0.0, 0.1, 0.2] {
        let jump = FieldView::new(&q1, &hat, 1).normal_derivative_jump(&mesh, face, 0, 1, [0.0, y]);
        assert!((jump + 2.0 / h * (1.0 - y / h)).abs() < 1e-12, "y = {y}: {jump}");
    }
}

/// Nodal interpolation errors of `sin(pi x) cos(pi y)` in L2 and H1.
fn interpolation_errors(n: usize, order: usize) -> (f64, f64) {
    use std::f64::consts::PI;
    let (mesh, topo) = full_mesh(n);
    let dm = DofMap::new(&mesh, &topo, Side::Fluid, order);
    let u = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).cos();
    let du = |x: [f64; 2]| [PI * (PI * x[0]).cos() * (PI * x[1]).cos(), -PI * (PI * x[0]).sin() * (PI * x[1]).sin()];
    let coeffs = interpolate(&dm, u);
    let view = FieldView::new(&dm, &coeffs, 1);
    let (mut l2, mut h1) = (0.0, 0.0);
    for c in 0..mesh.n_cells() {
        let (lo, hi) = mesh.cell_bounds(c);
        let rule = tensor_rule(lo, hi, 5);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let e = view.eval(c, *x);
            let g = du(*x);
            l2 += w * (e.value[0] - u(*x)).powi(2);
            h1 += w * ((e.grad[0][0] - g[0]).powi(2) + (e.grad[0][1] - g[1]).powi(2));
        }
    }
    (l2.sqrt(), h1.sqrt())
}

#[test]
fn interpolation_orders() {
    for order in [1, 2] {
        let errs: Vec<(f64, f64)> = [8, 16, 32].iter().map(|&n| interpolation_errors(n, order)).collect();
        for w in errs.windows(2) {
            let l2 = (w[0].0 / w[1].0).log2();
            let h1 = (w[0].1 / w[1].1).log2();
            assert!((l2 - (order + 1) as f64).abs() < 0.15, "order {order}: L2 rate {l2}");
            assert!((h1 - order as f64).abs() < 0.15, "order {order}: H1 rate {h1}");
        }
    }
}

#[test]
fn lid_profile() {
    let p = InflowProfile::default();
    assert_eq!(p.velocity(5.0, [-1.0, 1.0]), [0.0, 0.0]);
    assert!((p.velocity(2.0, [0.0, 1.0])[0] - 0.2).abs() < 1e-15);
    assert!((p.velocity(3.0, [-0.7, 1.0])[0] - 0.2).abs() < 1e-15);
    assert_eq!(p.velocity(0.0, [0.0, 1.0]), [0.0, 0.0]);
    assert!((p.velocity(1.0, [0.0, 1.0])[0] - 0.1).abs() < 1e-15);
    assert_eq!(p.velocity(3.0, [0.0, 0.5]), [0.0, 0.0]);
}
