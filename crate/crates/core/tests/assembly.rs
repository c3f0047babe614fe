use std::f64::consts::PI;

use cutfsi::analysis::checks::{q1_mass_defect, random_polynomial_interpolant};
use cutfsi::assembly::{
    assemble_ghost_matrix, ghost_coefficient, ghost_energy, ghost_face_local, system_pattern, weight_strategy,
    Discretization, FluidBulk, Form, FormRegistry, FractionWeight, GhostKind, GhostWeight, Mass, Nitsche, SolidBulk,
    UnweightedGhost,
};
use cutfsi::fem::FieldRole;
use cutfsi::geometry::Side;
use cutfsi::sparse::SparseMatrix;
use cutfsi::SimulationConfig;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disc_with(cfg: SimulationConfig) -> Discretization {
    Discretization::new(&cfg).unwrap()
}

fn disc() -> Discretization {
    disc_with(SimulationConfig::default())
}

/// Monolithic vector with `f` interpolated into the vector field `role`.
fn vector_field(d: &Discretization, role: FieldRole, f: impl Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
    let layout = d.layout();
    let mut x = vec![0.0; layout.total()];
    for (i, &p) in d.dofmap(role).coordinates().iter().enumerate() {
        let v = f(p);
        x[layout.index(role, 0, i)] = v[0];
        x[layout.index(role, 1, i)] = v[1];
    }
    x
}

fn form_matrix(d: &Discretization, form: &dyn Form) -> SparseMatrix {
    let mut m = system_pattern(d);
    form.assemble(d, &mut m);
    m
}

#[test]
fn weight_examples() {
    for w_max in [1.0, 2.0, 4.0, 10.0] {
        assert!((FractionWeight { w_max }.weight(0.5) - 0.5).abs() < 1e-16);
    }
    assert_eq!(FractionWeight { w_max: 4.0 }.weight(0.0), 2.0);
    for kappa in [0.0, 0.1, 0.7, 1.0] {
        assert_eq!(FractionWeight { w_max: 1.0 }.weight(kappa), 0.5);
        assert_eq!(UnweightedGhost.weight(kappa), 0.5);
    }
    assert!(weight_strategy("nonsense", 1.0).is_err());
}

proptest! {
    #[test]
    fn fraction_weight_stays_in_range(kappa in 0.0f64..=1.0, w_max in 1.0f64..16.0) {
        let w = FractionWeight { w_max }.weight(kappa);
        prop_assert!(w >= 0.5 / w_max - 1e-15 && w <= 0.5 * w_max + 1e-15);
    }
}

#[test]
fn ghost_coefficients() {
    let h: f64 = 0.25;
    assert_eq!(ghost_coefficient(h, 1, GhostKind::Gradient), h);
    assert_eq!(ghost_coefficient(h, 2, GhostKind::Gradient), h.powi(3));
    assert_eq!(ghost_coefficient(h, 1, GhostKind::Value), h.powi(3));
    assert_eq!(ghost_coefficient(h, 2, GhostKind::Value), h.powi(5) / 4.0);
}

#[test]
fn single_face_pressure_penalty_matches_hand_computation() {
    let d = disc();
    let mesh = d.mesh();
    let h = mesh.h();
    let dm = d.dofmap(FieldRole::Pressure);
    // any interior vertical face whose lower vertex carries a pressure dof
    let (face, node) = mesh
        .faces()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.axis == 0 && f.is_interior())
        .find_map(|(i, f)| {
            let lower = mesh.vertex(f.vertices[0]);
            let node = dm.coordinates().iter().position(|&x| x == lower)?;
            (f.cells.iter().all(|c| dm.is_active(c.unwrap())) && lower[1] > -1.0).then_some((i, node))
        })
        .unwrap();
    let (dofs, local) = ghost_face_local(mesh, dm, face, GhostKind::Value, 3);
    let slot = dofs.iter().position(|&d| d == node).unwrap();
    // jump of the normal derivative of the hat is -2/h (1 - s/h) along the face
    // and h^3 int_0^h 4/h^2 (1 - s/h)^2 ds = 4 h^2 / 3
    let m = dofs.len();
    assert!((local[slot * m + slot] - 4.0 * h * h / 3.0).abs() < 1e-15);
}

#[test]
fn dimension_formula() {
    let d = disc_with(SimulationConfig { m_s: 1, ..Default::default() });
    let n = |r| d.dofmap(r).n_dofs();
    assert_eq!(
        d.layout().total(),
        2 * n(FieldRole::FluidVelocity) + n(FieldRole::Pressure) + 4 * n(FieldRole::SolidVelocity)
    );
    assert_eq!(n(FieldRole::SolidVelocity), n(FieldRole::Displacement));
}

#[test]
fn q1_mass_matrix_matches_closed_form() {
    for h in [1.0, 0.25, 0.0625] {
        assert!(q1_mass_defect(h) <= 1e-14, "h = {h}");
    }
}

#[test]
fn mass_of_constant_field_is_fluid_area() {
    let d = disc();
    let m = form_matrix(&d, &Mass);
    let ones = vector_field(&d, FieldRole::FluidVelocity, |_| [1.0, 0.0]);
    let area = m.bilinear(&ones, &ones);
    assert!((area - (4.0 - 0.75 * PI)).abs() < 1e-8, "{area}");
}

#[test]
fn viscous_form_vanishes_on_rigid_motions() {
    let d = disc();
    let a = form_matrix(&d, &FluidBulk);
    for f in [|_: [f64; 2]| [0.3, -1.2], |x: [f64; 2]| [-x[1], x[0]]] {
        let v = vector_field(&d, FieldRole::FluidVelocity, f);
        assert!(a.bilinear(&v, &v).abs() < 1e-14);
    }
}

#[test]
fn divergence_of_linear_field() {
    let d = disc();
    let a = form_matrix(&d, &FluidBulk);
    let v = vector_field(&d, FieldRole::FluidVelocity, |x| [x[0], 0.0]);
    let mut p = vec![0.0; d.layout().total()];
    p[d.layout().range(FieldRole::Pressure)].iter_mut().for_each(|x| *x = 1.0);
    let div = a.bilinear(&p, &v);
    assert!((div.abs() - (4.0 - 0.75 * PI)).abs() < 1e-8, "{div}");
}

#[test]
fn elastic_energy_of_linear_displacement() {
    let d = disc();
    let a = form_matrix(&d, &SolidBulk);
    let mat = d.config().material;
    let shift = vector_field(&d, FieldRole::Displacement, |_| [0.7, 0.2]);
    let all = vector_field(&d, FieldRole::SolidVelocity, |x| [x[1], -x[0]]);
    assert!(a.bilinear(&all, &shift).abs() < 1e-14);
    // rows are tested with the solid velocity field
    let u = vector_field(&d, FieldRole::Displacement, |x| [x[0], 0.0]);
    let w = vector_field(&d, FieldRole::SolidVelocity, |x| [x[0], 0.0]);
    let e = a.bilinear(&w, &u);
    assert!((e - (2.0 * mat.mu_s + mat.lambda_s) * 0.75 * PI).abs() < 1e-9, "{e}");
}

#[test]
fn nitsche_vanishes_without_interface_jump() {
    let d = disc();
    let a = form_matrix(&d, &Nitsche);
    let f = |x: [f64; 2]| [x[0] * x[1] + 0.5, x[0] - x[1] * x[1]];
    let mut x = vector_field(&d, FieldRole::FluidVelocity, f);
    let s = vector_field(&d, FieldRole::SolidVelocity, f);
    for (a, b) in x.iter_mut().zip(&s) {
        *a += b;
    }
    assert!(a.bilinear(&x, &x).abs() < 1e-9);
}

fn ghost(d: &Discretization, role: FieldRole, kind: GhostKind, weight: &dyn GhostWeight) -> SparseMatrix {
    assemble_ghost_matrix(d.mesh(), d.topology(), d.dofmap(role), role.side(), kind, 1.0, weight, 3)
}

const GHOSTS: [(FieldRole, GhostKind); 4] = [
    (FieldRole::FluidVelocity, GhostKind::Gradient),
    (FieldRole::Pressure, GhostKind::Value),
    (FieldRole::SolidVelocity, GhostKind::Value),
    (FieldRole::Displacement, GhostKind::Gradient),
];

#[test]
fn ghost_forms_are_symmetric_psd_with_polynomial_kernels() {
    for w_max in [1.0, 4.0] {
        let d = disc_with(SimulationConfig::default().with_overrides([format!("w_max={w_max}").as_str()]).unwrap());
        let weight = weight_strategy(d.config().resolved_ghost_weight(), w_max).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (role, kind) in GHOSTS {
            let g = ghost(&d, role, kind, weight.as_ref());
            assert_eq!(g.symmetry_defect(), 0.0);
            for _ in 0..100 {
                let x: Vec<f64> = (0..g.nrows()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let xx: f64 = x.iter().map(|v| v * v).sum();
                assert!(g.bilinear(&x, &x) >= -1e-12 * xx);
            }
            let p = random_polynomial_interpolant(&d, role, &mut rng);
            let e = ghost_energy(d.mesh(), d.topology(), d.dofmap(role), role.side(), kind, 1.0, weight.as_ref(), 3, &p);
            assert!(e.abs() <= 1e-13, "{role:?}: {e}");
        }
    }
}

#[test]
fn ghost_energy_agrees_with_matrix() {
    let d = disc();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (role, kind) in GHOSTS {
        let g = ghost(&d, role, kind, &FractionWeight { w_max: 3.0 });
        let x: Vec<f64> = (0..g.nrows()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let e = ghost_energy(d.mesh(), d.topology(), d.dofmap(role), role.side(), kind, 1.0, &FractionWeight { w_max: 3.0 }, 3, &x);
        let m = g.bilinear(&x, &x);
        assert!((e - m).abs() <= 1e-12 * m.abs(), "{e} vs {m}");
    }
}

#[test]
fn unit_fraction_weight_is_bit_identical_to_unweighted() {
    let d = disc();
    for (role, kind) in GHOSTS {
        assert_eq!(
            ghost(&d, role, kind, &UnweightedGhost),
            ghost(&d, role, kind, &FractionWeight { w_max: 1.0 })
        );
    }
}

#[test]
fn face_weights_sum_cell_weights() {
    let d = disc();
    let w = FractionWeight { w_max: 4.0 };
    for side in Side::BOTH {
        for &f in d.topology().ghost_faces(side) {
            let expected: f64 = d
                .mesh()
                .face(f)
                .cells
                .iter()
                .map(|c| w.weight(d.topology().cut_fraction(c.unwrap(), side)))
                .sum();
            assert_eq!(cutfsi::assembly::face_weight(d.mesh(), d.topology(), f, side, &w), expected);
        }
    }
}

#[test]
fn system_pattern_is_structurally_symmetric() {
    let d = disc();
    let reg = FormRegistry::standard(&d).unwrap();
    let mut a = system_pattern(&d);
    for form in reg.iter() {
        form.assemble(&d, &mut a);
    }
    let t = a.transpose();
    for r in 0..a.nrows() {
        assert_eq!(a.row(r).0, t.row(r).0);
    }
    assert!(a.symmetry_defect() > 0.0);
}

#[test]
fn registry_holds_every_form() {
    let d = disc();
    let reg = FormRegistry::standard(&d).unwrap();
    let names = reg.names();
    for n in ["mass", "fluid bulk", "solid bulk", "nitsche"] {
        assert!(names.iter().any(|m| m.contains(n.split(' ').next().unwrap())), "{n} missing from {names:?}");
    }
    assert!(reg.get("no such form").is_none());
}
