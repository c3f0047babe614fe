use std::f64::consts::PI;

use cutfsi::geometry::{LevelSet, PointClass, Side};
use cutfsi::mesh::Mesh;
use cutfsi::topology::{build_cut_topology, CellClass};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle() -> LevelSet {
    LevelSet::circle([0.0, 0.0], 0.75).unwrap()
}

#[test]
fn level_set_values() {
    let ls = circle();
    assert_eq!(ls.eval([0.0, 0.0]), -0.75);
    assert!(ls.eval([0.75f64.sqrt(), 0.0]).abs() < 1e-15);
    assert!((ls.eval([1.0, 1.0]) - 1.25).abs() < 1e-15);
}

#[test]
fn rejects_nonpositive_radius() {
    assert!(LevelSet::circle([0.0, 0.0], 0.0).is_err());
    assert!(LevelSet::circle([0.0, 0.0], -1.0).is_err());
}

#[test]
fn crossing_examples() {
    let ls = circle();
    let r = 0.75f64.sqrt();
    let c = ls.edge_zero_crossings([0.75, 0.0], [1.0, 0.0]);
    assert_eq!(c.len(), 1);
    assert!((c[0].point[0] - r).abs() < 1e-15 && c[0].point[1] == 0.0);
    assert!(ls.edge_zero_crossings([0.0, 0.0], [0.25, 0.0]).is_empty());
    let c = ls.edge_zero_crossings([-1.0, 0.0], [1.0, 0.0]);
    assert_eq!(c.len(), 2);
    assert!((c[0].point[0] + r).abs() < 1e-15);
    assert!((c[1].point[0] - r).abs() < 1e-15);
}

#[test]
fn point_classes() {
    let ls = circle();
    assert_eq!(ls.classify([0.0, 0.0]), PointClass::Solid);
    assert_eq!(ls.classify([0.9, 0.9]), PointClass::Fluid);
    assert_eq!(ls.classify([0.75f64.sqrt(), 0.0]), PointClass::Interface);
}

/// Roots of `phi(a + t (b - a))` by bisection on the sign changes of a fine
/// sampling, independent of the closed-form solver.
fn bisection_roots(ls: &LevelSet, a: [f64; 2], b: [f64; 2]) -> Vec<f64> {
    let f = |t: f64| ls.eval([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    let samples = 2000;
    let mut roots = Vec::new();
    for i in 0..samples {
        let (mut lo, mut hi) = (i as f64 / samples as f64, (i + 1) as f64 / samples as f64);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if flo * fhi >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * f(lo) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if f(1.0) == 0.0 {
        roots.push(1.0);
    }
    roots
}

#[test]
fn crossings_match_bisection_on_random_segments() {
    let ls = circle();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut compared = 0;
    for _ in 0..1000 {
        let a = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let b = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let exact: Vec<f64> = ls.edge_zero_crossings(a, b).iter().map(|c| c.t).collect();
        let oracle = bisection_roots(&ls, a, b);
        // tangential double roots have no sign change; random segments miss them
        assert_eq!(exact.len(), oracle.len(), "segment {a:?} {b:?}");
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        for (t, s) in exact.iter().zip(&oracle) {
            assert!((t - s).abs() * len <= 1e-12, "{t} vs {s}");
        }
        compared += exact.len();
    }
    assert!(compared > 500);
}

proptest! {
    #[test]
    fn classification_is_point_symmetric(x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let ls = circle();
        prop_assert_eq!(ls.classify([x, y]), ls.classify([-x, -y]));
    }

    #[test]
    fn crossings_lie_on_the_circle(ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in -1.0f64..1.0, by in -1.0f64..1.0) {
        let ls = circle();
        for c in ls.edge_zero_crossings([ax, ay], [bx, by]) {
            prop_assert!((0.0..=1.0).contains(&c.t));
            prop_assert!(ls.eval(c.point).abs() < 1e-14);
        }
    }
}

#[test]
fn mesh_counts() {
    let m = Mesh::new(8).unwrap();
    assert_eq!(m.n_cells(), 64);
    assert_eq!(m.n_vertices(), 81);
    assert_eq!(m.h(), 0.25);
    let m = Mesh::new(16).unwrap();
    assert_eq!(m.n_cells(), 256);
    assert_eq!(m.h(), 0.125);
    let m = Mesh::new(3).unwrap();
    assert!((m.h() - 2.0 / 3.0).abs() < 1e-15);
    assert!(Mesh::new(1).is_err());
}

#[test]
fn refinement_is_nested() {
    let coarse = Mesh::new(8).unwrap();
    let fine = Mesh::new(16).unwrap();
    for c in 0..coarse.n_cells() {
        let kids = coarse.children(c, 2);
        assert_eq!(kids.len(), 4);
        let (lo, hi) = coarse.cell_bounds(c);
        let mut distinct = kids.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), 4);
        for &k in &kids {
            let (klo, khi) = fine.cell_bounds(k);
            assert!(klo[0] >= lo[0] - 1e-15 && klo[1] >= lo[1] - 1e-15);
            assert!(khi[0] <= hi[0] + 1e-15 && khi[1] <= hi[1] + 1e-15);
        }
    }
}

#[test]
fn cell_classes_at_n8() {
    let mesh = Mesh::new(8).unwrap();
    let topo = build_cut_topology(&mesh, &circle()).unwrap();
    let cell_at = |x: f64, y: f64| mesh.locate([x + 1e-3, y + 1e-3]).unwrap();
    assert_eq!(topo.class(cell_at(0.0, 0.0)), CellClass::SolidOnly);
    let cut = cell_at(0.75, 0.0);
    assert_eq!(topo.class(cut), CellClass::Cut);
    assert_eq!(topo.class(cell_at(-1.0, -1.0)), CellClass::FluidOnly);
    let f = cell_at(-1.0, -1.0);
    assert_eq!((topo.cut_fraction(f, Side::Fluid), topo.cut_fraction(f, Side::Solid)), (1.0, 0.0));
    let s = cell_at(0.0, 0.0);
    assert_eq!((topo.cut_fraction(s, Side::Fluid), topo.cut_fraction(s, Side::Solid)), (0.0, 1.0));
}

#[test]
fn cut_fraction_matches_monte_carlo() {
    let mesh = Mesh::new(8).unwrap();
    let ls = circle();
    let topo = build_cut_topology(&mesh, &ls).unwrap();
    let cell = mesh.locate([0.8, 0.1]).unwrap();
    let (lo, hi) = mesh.cell_bounds(cell);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples = 1_000_000;
    let inside = (0..samples)
        .filter(|_| {
            let x = [rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1])];
            ls.eval(x) < 0.0
        })
        .count();
    let p = inside as f64 / samples as f64;
    let sigma = (p * (1.0 - p) / samples as f64).sqrt();
    let kappa = topo.cut_fraction(cell, Side::Solid);
    assert!((kappa - p).abs() <= 3.0 * sigma, "kappa {kappa}, monte carlo {p} +- {sigma}");
}

#[test]
fn cut_fractions_sum_to_domain_area() {
    for n in [8, 16, 32] {
        let mesh = Mesh::new(n).unwrap();
        let topo = build_cut_topology(&mesh, &circle()).unwrap();
        let h2 = mesh.h() * mesh.h();
        let solid: f64 = (0..mesh.n_cells()).map(|c| topo.cut_fraction(c, Side::Solid) * h2).sum();
        let fluid: f64 = (0..mesh.n_cells()).map(|c| topo.cut_fraction(c, Side::Fluid) * h2).sum();
        assert!((solid - PI * 0.75).abs() < 1e-12, "n = {n}: {solid}");
        assert!((solid + fluid - 4.0).abs() < 1e-12);
    }
}

#[test]
fn active_meshes_cover_and_overlap_on_cut_cells() {
    let mesh = Mesh::new(16).unwrap();
    let topo = build_cut_topology(&mesh, &circle()).unwrap();
    for c in 0..mesh.n_cells() {
        let (f, s) = (topo.is_active(c, Side::Fluid), topo.is_active(c, Side::Solid));
        assert!(f || s);
        assert_eq!(f && s, topo.class(c) == CellClass::Cut);
    }
}

#[test]
fn ghost_faces_match_brute_force_scan() {
    for n in [8, 16] {
        let mesh = Mesh::new(n).unwrap();
        let ls = circle();
        let topo = build_cut_topology(&mesh, &ls).unwrap();
        for side in Side::BOTH {
            // sampled sign tests, independent of the classification code
            let active = |c: usize| active_on(&ls, &mesh, c, side);
            let cut = |c: usize| active_on(&ls, &mesh, c, Side::Fluid) && active_on(&ls, &mesh, c, Side::Solid);
            let mut expected: Vec<usize> = mesh
                .faces()
                .iter()
                .enumerate()
                .filter_map(|(i, f)| match f.cells {
                    [Some(a), Some(b)] if (cut(a) || cut(b)) && active(a) && active(b) => Some(i),
                    _ => None,
                })
                .collect();
            expected.sort_unstable();
            let mut got = topo.ghost_faces(side).to_vec();
            got.sort_unstable();
            assert_eq!(got, expected, "n = {n}, side {}", side.label());
        }
    }
}

fn active_on(ls: &LevelSet, mesh: &Mesh, c: usize, side: Side) -> bool {
    let (lo, hi) = mesh.cell_bounds(c);
    (0..=20).any(|a| {
        (0..=20).any(|b| {
            let v = ls.eval([lo[0] + (hi[0] - lo[0]) * a as f64 / 20.0, lo[1] + (hi[1] - lo[1]) * b as f64 / 20.0]);
            match side {
                Side::Solid => v < -1e-12,
                Side::Fluid => v > 1e-12,
            }
        })
    })
}

#[test]
fn ghost_paths_stay_short_under_refinement() {
    let mut longest = Vec::new();
    for n in [8, 16, 32] {
        let mesh = Mesh::new(n).unwrap();
        let topo = build_cut_topology(&mesh, &circle()).unwrap();
        for side in Side::BOTH {
            let r = topo.path_report(&mesh, side).unwrap();
            assert!(r.max_faces <= 3, "n = {n}: {r:?}");
            longest.push(r.max_faces);
        }
    }
    let coarse = longest[..2].iter().copied().max().unwrap();
    let fine = longest[4..].iter().copied().max().unwrap();
    assert!(fine <= coarse.max(2), "path lengths {longest:?}");
}

#[test]
fn circle_outside_domain_has_no_ghost_faces() {
    let mesh = Mesh::new(8).unwrap();
    let ls = LevelSet::circle([5.0, 5.0], 0.25).unwrap();
    let topo = build_cut_topology(&mesh, &ls).unwrap();
    assert!(topo.ghost_faces(Side::Fluid).is_empty());
    assert!(topo.ghost_faces(Side::Solid).is_empty());
    assert_eq!(topo.path_report(&mesh, Side::Fluid).unwrap().max_faces, 0);
}
