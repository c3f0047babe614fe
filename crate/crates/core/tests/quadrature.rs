use std::f64::consts::PI;

use cutfsi::assembly::{Discretization, Region};
use cutfsi::geometry::Side;
use cutfsi::mesh::Mesh;
use cutfsi::quadrature::{face_rule, gauss_1d, interface_rule, tensor_rule};
use cutfsi::SimulationConfig;
use proptest::prelude::*;

#[test]
fn gauss_points() {
    let (x, w) = gauss_1d(1);
    assert_eq!((x[0], w[0]), (0.5, 1.0));
    let (x, _) = gauss_1d(2);
    let d = 1.0 / (2.0 * 3f64.sqrt());
    assert!((x[0] - (0.5 - d)).abs() < 1e-15 && (x[1] - (0.5 + d)).abs() < 1e-15);
    let (x, w) = gauss_1d(2);
    let cube: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(3)).sum();
    assert!((cube - 0.25).abs() < 1e-16);
}

#[test]
fn tensor_rule_examples() {
    for npts in 1..=5 {
        let r = tensor_rule([0.0, 0.0], [0.25, 0.25], npts);
        assert!((r.measure() - 0.0625).abs() < 1e-16);
    }
    let r = tensor_rule([0.0, 0.0], [0.25, 0.25], 2);
    assert!((r.integrate(|x| x[0] * x[1]) - 9.765625e-4).abs() < 1e-18);
}

proptest! {
    /// Random polynomials of total degree `2 npts - 1` integrate exactly.
    #[test]
    fn tensor_rule_is_exact(npts in 1usize..5, coeffs in proptest::collection::vec(-1.0f64..1.0, 64), lo in -1.0f64..0.5) {
        let deg = 2 * npts - 1;
        let hi = lo + 0.25;
        let rule = tensor_rule([lo, lo], [hi, hi], npts);
        let mut approx = 0.0;
        let mut exact = 0.0;
        let mut scale = 0.0;
        let mut idx = 0;
        for a in 0..=deg {
            for b in 0..=(deg - a) {
                let c = coeffs[idx % coeffs.len()];
                idx += 1;
                approx += c * rule.integrate(|x| x[0].powi(a as i32) * x[1].powi(b as i32));
                let ia = (hi.powi(a as i32 + 1) - lo.powi(a as i32 + 1)) / (a + 1) as f64;
                let ib = (hi.powi(b as i32 + 1) - lo.powi(b as i32 + 1)) / (b + 1) as f64;
                exact += c * ia * ib;
                scale += (c * ia * ib).abs();
            }
        }
        prop_assert!((approx - exact).abs() <= 1e-13 * scale.max(1e-300));
    }
}

fn disc(n: usize) -> Discretization {
    Discretization::new(&SimulationConfig { n, ..Default::default() }).unwrap()
}

#[test]
fn cut_rules_recover_area_and_circumference() {
    let r = 0.75f64.sqrt();
    for n in [8, 16, 32] {
        let d = disc(n);
        let total = |side| -> f64 {
            let region = Region::Physical(side);
            d.region_cells(region).into_iter().map(|c| d.bulk_rule(c, region).measure()).sum()
        };
        let solid = total(Side::Solid);
        let fluid = total(Side::Fluid);
        assert!((solid - PI * 0.75).abs() < 1e-8, "n = {n}");
        assert!((solid + fluid - 4.0).abs() < 1e-10);
        let length: f64 = d.topology().cut_cells().filter_map(|c| d.interface_rule(c)).map(|r| r.measure()).sum();
        assert!((length - 2.0 * PI * r).abs() < 1e-10, "n = {n}: {length}");
    }
}

fn interface_integral(d: &Discretization, f: impl Fn([f64; 2]) -> f64) -> f64 {
    d.topology()
        .cut_cells()
        .filter_map(|c| d.interface_rule(c))
        .map(|r| r.points.iter().zip(&r.weights).map(|(x, w)| w * f(*x)).sum::<f64>())
        .sum()
}

#[test]
fn interface_moments() {
    let d = disc(8);
    assert!(interface_integral(&d, |x| x[0]).abs() < 1e-14);
    let r2 = interface_integral(&d, |x| x[0] * x[0] + x[1] * x[1]);
    assert!((r2 - 0.75 * 2.0 * PI * 0.75f64.sqrt()).abs() < 1e-12);
}

#[test]
fn interface_normals_point_into_the_solid() {
    let d = disc(8);
    for c in d.topology().cut_cells() {
        let rule = d.interface_rule(c).unwrap();
        for (x, n) in rule.points.iter().zip(&rule.normals) {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            assert!((n[0] + x[0] / r).abs() < 1e-14 && (n[1] + x[1] / r).abs() < 1e-14);
        }
    }
}

#[test]
fn interface_rule_converges() {
    let f = |x: [f64; 2]| (2.0 * x[0]).sin() * x[1].exp();
    let d = disc(8);
    let integral = |npts: usize| -> f64 {
        d.topology()
            .cut_cells()
            .map(|c| {
                let r = interface_rule(d.topology().polar(c).unwrap(), npts);
                r.points.iter().zip(&r.weights).map(|(x, w)| w * f(*x)).sum::<f64>()
            })
            .sum()
    };
    let (a, b) = (integral(8), integral(16));
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
}

#[test]
fn face_rules() {
    let mesh = Mesh::new(8).unwrap();
    for f in 0..mesh.faces().len() {
        assert!((face_rule(&mesh, f, 3).measure() - 0.25).abs() < 1e-15);
    }
    // the vertical face x = 0 from y = 0 to y = 0.25
    let face = (0..mesh.faces().len())
        .find(|&f| {
            let r = face_rule(&mesh, f, 1);
            mesh.face(f).axis == 0 && r.points[0] == [0.0, 0.125]
        })
        .unwrap();
    let integral = face_rule(&mesh, face, 2).integrate(|x| x[1] * x[1]);
    assert!((integral - 0.25f64.powi(3) / 3.0).abs() < 1e-16);
}
