use cutfsi::config::{ConstraintDomain, SimulationConfig};
use cutfsi::Error;
use proptest::prelude::*;

#[test]
fn empty_file_gives_defaults() {
    let cfg = SimulationConfig::parse("").unwrap();
    assert_eq!(cfg, SimulationConfig::default());
    let m = cfg.material;
    assert_eq!((m.rho_f, m.rho_s, m.nu_f, m.mu_s, m.lambda_s), (1.0, 1.0, 1e-3, 5e-3, 1e-2));
    let s = cfg.stab;
    assert_eq!((s.gamma_vf, s.gamma_p, s.gamma_vs, s.gamma_u), (1e-3, 1e-3, 1e-3, 1e-3));
    assert_eq!((s.gamma_nitsche, s.w_max), (100.0, 1.0));
    assert_eq!((cfg.m_f, cfg.m_s, cfg.n, cfg.k, cfg.t_final), (2, 2, 8, 1.0, 8.0));
    assert_eq!(cfg.h(), 0.25);
    assert_eq!(cfg.radius_squared, 0.75);
    assert_eq!(cfg.constraint_domain, ConstraintDomain::Physical);
}

#[test]
fn negative_nitsche_parameter_is_rejected() {
    assert!(matches!(
        SimulationConfig::parse("gamma_N = -1"),
        Err(Error::InvalidParameter { .. })
    ));
}

#[test]
fn unit_weight_selects_the_unweighted_penalty() {
    let cfg = SimulationConfig::parse("w_max = 1").unwrap();
    assert_eq!(cfg.resolved_ghost_weight(), "unweighted");
    let cfg = SimulationConfig::parse("w_max = 4").unwrap();
    assert_eq!(cfg.resolved_ghost_weight(), "fraction");
}

#[test]
fn errors_carry_line_numbers() {
    match SimulationConfig::parse("# comment\nn = 16\nbogus = 3\n") {
        Err(Error::Config { line, message }) => {
            assert_eq!(line, 3);
            assert!(message.contains("bogus"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        SimulationConfig::parse("k = fast"),
        Err(Error::Config { line: 1, .. })
    ));
    assert!(matches!(SimulationConfig::parse("just words"), Err(Error::Config { .. })));
}

#[test]
fn parameter_ranges() {
    for text in ["m_s = 3", "m_f = 1", "n = 1", "w_max = 0.5", "gamma_vf = -1", "ghost_weight = magic"] {
        assert!(SimulationConfig::parse(text).is_err(), "{text}");
    }
    assert!(SimulationConfig::parse("gamma_vf = 0").is_ok());
    assert!(SimulationConfig::parse("m_s = 1").is_ok());
}

#[test]
fn step_counts() {
    let cfg = SimulationConfig::default();
    assert_eq!(cfg.n_steps().unwrap(), 8);
    let cfg = SimulationConfig { k: 0.3, ..Default::default() };
    assert!(matches!(cfg.n_steps(), Err(Error::NonIntegerSteps { .. })));
    let cfg = SimulationConfig { k: 0.125, ..Default::default() };
    assert_eq!(cfg.n_steps().unwrap(), 64);
}

#[test]
fn overrides_apply_after_defaults() {
    let cfg = SimulationConfig::default().with_overrides(["n=16", "m_s = 1"]).unwrap();
    assert_eq!((cfg.n, cfg.m_s), (16, 1));
    assert!(SimulationConfig::default().with_overrides(["n"]).is_err());
}

proptest! {
    #[test]
    fn text_round_trip(n in 2usize..200, k in 0.01f64..2.0, gamma in 0.0f64..10.0, w in 1.0f64..8.0, ms in 1usize..3) {
        let mut cfg = SimulationConfig { n, k, m_s: ms, ..Default::default() };
        cfg.stab.gamma_p = gamma;
        cfg.stab.w_max = w;
        let back = SimulationConfig::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
