//! Energy decay of unforced runs from random smooth initial data.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::SimulationConfig;
use crate::error::Result;
use crate::fem::FieldRole;
use crate::timestepper::{Simulation, State};

use super::energy::{decay_functional, GhostMatrices};

/// Relative slack allowed for `Q^n <= Q^{n-1}`.
pub const DECAY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub seed: u64,
    /// `Q` after the projection step, then after every further step.
    pub q: Vec<f64>,
    /// First `n` with `Q^n > Q^{n-1} + tol Q^0`.
    pub first_violation: Option<usize>,
    pub max_residual: f64,
    pub max_constraint_residual: f64,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Random combination of `sin(i pi (x+1)/2) sin(j pi (y+1)/2)` for
/// `i, j <= 3`, which vanishes on the boundary of the square.
struct SmoothField {
    amps: [[[f64; 3]; 3]; 2],
}

impl SmoothField {
    fn random(rng: &mut ChaCha8Rng, scale: f64) -> Self {
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let mut amps = [[[0.0; 3]; 3]; 2];
        for comp in amps.iter_mut() {
            for (i, row) in comp.iter_mut().enumerate() {
                for (j, a) in row.iter_mut().enumerate() {
                    *a = scale * normal.sample(rng) / ((i + 1) * (j + 1)) as f64;
                }
            }
        }
        Self { amps }
    }

    fn eval(&self, x: [f64; 2], comp: usize) -> f64 {
        let mut v = 0.0;
        for i in 0..3 {
            let sx = ((i + 1) as f64 * PI * (x[0] + 1.0) / 2.0).sin();
            for j in 0..3 {
                let sy = ((j + 1) as f64 * PI * (x[1] + 1.0) / 2.0).sin();
                v += self.amps[comp][i][j] * sx * sy;
            }
        }
        v
    }
}

/// Nodal interpolants of random smooth velocity and displacement fields,
/// with zero pressure and zero fluid velocity on the outer boundary.
pub fn random_initial_state(sim: &Simulation, seed: u64) -> State {
    let disc = sim.discretization();
    let layout = disc.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![0.0; layout.total()];
    for role in [FieldRole::FluidVelocity, FieldRole::SolidVelocity, FieldRole::Displacement] {
        let field = SmoothField::random(&mut rng, 0.1);
        let dm = disc.dofmap(role);
        for (d, &x) in dm.coordinates().iter().enumerate() {
            for c in 0..2 {
                coeffs[layout.index(role, c, d)] = field.eval(x, c);
            }
        }
    }
    let vf = disc.dofmap(FieldRole::FluidVelocity);
    for &d in vf.boundary_dofs() {
        for c in 0..2 {
            coeffs[layout.index(FieldRole::FluidVelocity, c, d)] = 0.0;
        }
    }
    State { step: 0, t: 0.0, coeffs }
}

/// Runs `steps` unforced steps without inflow after one projection step
/// from random data, and checks that `Q` never grows.
pub fn verify_energy_decay(base: &SimulationConfig, seed: u64, steps: usize) -> Result<DecayReport> {
    let mut cfg = base.clone();
    cfg.inflow = "none".into();
    cfg.t_final = (steps + 1) as f64 * cfg.k;
    let sim = Simulation::new(&cfg)?;
    let ghosts = GhostMatrices::assemble(sim.discretization())?;
    let (mut state, first) = sim.step(&random_initial_state(&sim, seed))?;
    let mut max_residual = first.residual;
    let mut max_constraint = first.constraint_residual;
    let mut q = vec![decay_functional(sim.discretization(), &ghosts, &state.coeffs)];
    for _ in 0..steps {
        let (next, report) = sim.step(&state)?;
        max_residual = max_residual.max(report.residual);
        max_constraint = max_constraint.max(report.constraint_residual);
        q.push(decay_functional(sim.discretization(), &ghosts, &next.coeffs));
        state = next;
    }
    let q0 = q[0];
    let first_violation = (1..q.len()).find(|&n| q[n] > q[n - 1] + DECAY_TOLERANCE * q0);
    Ok(DecayReport {
        seed,
        q,
        first_violation,
        max_residual,
        max_constraint_residual: max_constraint,
    })
}
