use cutfsi::assembly::{Condensation, Discretization, FormRegistry, System};
use cutfsi::fem::FieldRole;
use cutfsi::sparse::{relative_residual, SolverRegistry, SparseMatrix};
use cutfsi::SimulationConfig;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn solve(name: &str, a: &SparseMatrix, b: &[f64]) -> Vec<f64> {
    let reg = SolverRegistry::default();
    reg.get(name).unwrap().factor(a).unwrap().solve(b)
}

#[test]
fn registry_lists_backends() {
    let reg = SolverRegistry::default();
    let names = reg.names();
    for n in ["amd-lu", "faer-lu", "faer-ldlt"] {
        assert!(names.contains(&n), "{names:?}");
    }
    assert!(reg.get("umfpack").is_err());
}

#[test]
fn two_by_two() {
    let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]);
    for name in ["amd-lu", "faer-lu", "faer-ldlt"] {
        let x = solve(name, &a, &[3.0, 4.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14, "{name}: {x:?}");
    }
}

#[test]
fn identity_returns_input() {
    let a = SparseMatrix::identity(5);
    let b = [1.0, -2.0, 3.0, 0.5, 0.0];
    for name in ["amd-lu", "faer-lu", "faer-ldlt"] {
        assert_eq!(solve(name, &a, &b), b.to_vec());
    }
}

#[test]
fn ldlt_rejects_unsymmetric_input() {
    let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 3.0)]);
    assert!(SolverRegistry::default().get("faer-ldlt").unwrap().factor(&a).is_err());
}

fn random_spd(n: usize, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut trip = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v: f64 = (0..n).map(|k| b[k][i] * b[k][j]).sum::<f64>() + if i == j { 1.0 } else { 0.0 };
            trip.push((i, j, v));
        }
    }
    SparseMatrix::from_triplets(n, n, &trip)
}

#[test]
fn random_spd_residual() {
    let a = random_spd(50, 11);
    let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
    for name in ["amd-lu", "faer-lu", "faer-ldlt"] {
        let x = solve(name, &a, &b);
        assert!(relative_residual(&a, &x, &b) <= 1e-12, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Sparse diagonally dominant matrices with random pattern.
    #[test]
    fn own_lu_matches_faer_lu(seed in 0u64..1000, n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 10.0 + rng.random_range(0.0..1.0)));
            for _ in 0..3 {
                trip.push((i, rng.random_range(0..n), rng.random_range(-1.0..1.0)));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &trip);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x1 = solve("amd-lu", &a, &b);
        let x2 = solve("faer-lu", &a, &b);
        prop_assert!(relative_residual(&a, &x1, &b) <= 1e-13);
        for (p, q) in x1.iter().zip(&x2) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn matvec_is_linear(seed in 0u64..1000, s in -3.0f64..3.0) {
        let a = random_spd(8, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        let x: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + s * q).collect();
        let (ax, ay, az) = (a.matvec(&x), a.matvec(&y), a.matvec(&z));
        for i in 0..8 {
            prop_assert!((az[i] - ax[i] - s * ay[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_matrix_gives_zero_product() {
    let a = SparseMatrix::from_triplets(3, 3, &[(0, 1, 0.0)]);
    assert_eq!(a.matvec(&[1.0, 2.0, 3.0]), vec![0.0; 3]);
}

#[test]
fn backends_agree_on_an_assembled_system() {
    let cfg = SimulationConfig::default();
    let disc = Discretization::new(&cfg).unwrap();
    let system = System::assemble(&disc, &FormRegistry::standard(&disc).unwrap(), cfg.k, Vec::new());
    let n = system.matrix.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x1 = solve("amd-lu", &system.matrix, &b);
    let x2 = solve("faer-lu", &system.matrix, &b);
    assert!(relative_residual(&system.matrix, &x1, &b) <= 1e-10);
    assert!(relative_residual(&system.matrix, &x2, &b) <= 1e-10);

    // the condensed symmetric system reproduces the monolithic solution
    // whenever the constraint rows hold exactly
    let layout = *disc.layout();
    let cond = Condensation::new(&layout, &system.matrix, cfg.k);
    assert!(cond.matrix.symmetry_defect() <= 1e-14);
    let u_prev: Vec<f64> = layout.slice(FieldRole::Displacement, &x1).iter().map(|v| v * 0.5).collect();
    let mut target = x1.clone();
    let vs: Vec<f64> = layout.slice(FieldRole::SolidVelocity, &target).to_vec();
    for (i, u) in layout.slice_mut(FieldRole::Displacement, &mut target).iter_mut().enumerate() {
        *u = u_prev[i] + cfg.k * vs[i];
    }
    let b = system.matrix.matvec(&target);
    let y = solve("faer-ldlt", &cond.matrix, &cond.rhs(&b, &u_prev));
    let x3 = cond.expand(&y, &u_prev);
    let scale = target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (p, q) in x3.iter().zip(&target) {
        assert!((p - q).abs() <= 1e-8 * scale, "{p} vs {q}");
    }
}
