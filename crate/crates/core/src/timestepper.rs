//! Backward Euler time stepping of the assembled system.

use std::f64::consts::PI;

use crate::assembly::{
    assemble_load, interpolate_boundary, BodyForce, Condensation, Discretization, FormRegistry, System,
};
use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::fem::FieldRole;
use crate::geometry::Point;
use crate::sparse::{norm_inf, relative_residual, solve_refined, Factorization, SolverRegistry};

/// Lid velocity profile: plateau of height `peak` on `|x| <= 0.7`, `sin^2`
/// flanks reaching zero at the corners, ramped in by `(1 - cos(pi t / T_r)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflowProfile {
    pub peak: f64,
    pub ramp_time: f64,
}

impl Default for InflowProfile {
    fn default() -> Self {
        Self {
            peak: 0.2,
            ramp_time: 2.0,
        }
    }
}

impl InflowProfile {
    pub fn ramp(&self, t: f64) -> f64 {
        if t >= self.ramp_time {
            1.0
        } else {
            0.5 * (1.0 - (PI * t / self.ramp_time).cos())
        }
    }

    /// Horizontal lid speed at abscissa `x`, before ramping.
    pub fn profile(&self, x: f64) -> f64 {
        if x <= -0.7 {
            self.peak * ((x + 1.0) * PI / 0.6).sin().powi(2)
        } else if x >= 0.7 {
            self.peak * ((x - 1.0) * PI / 0.6).sin().powi(2)
        } else {
            self.peak
        }
    }

    /// Boundary velocity: the profile on the lid `y = 1`, zero elsewhere.
    pub fn velocity(&self, t: f64, x: Point) -> [f64; 2] {
        if (x[1] - 1.0).abs() <= 1e-12 {
            [self.ramp(t) * self.profile(x[0]), 0.0]
        } else {
            [0.0, 0.0]
        }
    }
}

/// Prescribed fluid velocity on the outer boundary.
pub trait BoundaryData: Send + Sync {
    fn name(&self) -> &'static str;
    fn velocity(&self, t: f64, x: Point) -> [f64; 2];
}

/// Lid-driven cavity inflow.
#[derive(Debug, Clone, Copy, Default)]
pub struct LidInflow(pub InflowProfile);

impl BoundaryData for LidInflow {
    fn name(&self) -> &'static str {
        "lid"
    }

    fn velocity(&self, t: f64, x: Point) -> [f64; 2] {
        self.0.velocity(t, x)
    }
}

/// Homogeneous Dirichlet data everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoInflow;

impl BoundaryData for NoInflow {
    fn name(&self) -> &'static str {
        "none"
    }

    fn velocity(&self, _t: f64, _x: Point) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// Boundary data selected by the `inflow` key.
pub fn boundary_data(config: &SimulationConfig) -> Result<Box<dyn BoundaryData>> {
    match config.inflow.as_str() {
        "lid" => Ok(Box::new(LidInflow(InflowProfile {
            peak: config.inflow_peak,
            ramp_time: config.ramp_time,
        }))),
        "none" => Ok(Box::new(NoInflow)),
        other => Err(Error::UnknownStrategy {
            kind: "inflow",
            name: other.to_string(),
            known: "lid, none".into(),
        }),
    }
}

/// Coefficients of all four fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub step: usize,
    pub t: f64,
    pub coeffs: Vec<f64>,
}

/// Diagnostics of one solved step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub t: f64,
    /// `|A x - b| / |b|` of the solved system.
    pub residual: f64,
    /// `max |u^n - u^{n-1} - k v_s^n|` over coefficients.
    pub constraint_residual: f64,
}

/// Receives every state of a run, starting with the initial one.
pub trait StepObserver {
    fn observe(&mut self, disc: &Discretization, state: &State, report: Option<&StepReport>) -> Result<()>;
}

/// Keeps every state and step report.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub reports: Vec<StepReport>,
}

impl StepObserver for Trajectory {
    fn observe(&mut self, _disc: &Discretization, state: &State, report: Option<&StepReport>) -> Result<()> {
        self.states.push(state.clone());
        if let Some(r) = report {
            self.reports.push(*r);
        }
        Ok(())
    }
}

/// Outcome of [`Simulation::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub max_residual: f64,
    pub max_constraint_residual: f64,
    pub final_state: State,
}

/// Factorized time-step system for one configuration.
pub struct Simulation {
    disc: Discretization,
    system: System,
    factor: Box<dyn Factorization>,
    /// Present when the backend solves the condensed symmetric system.
    condensation: Option<Condensation>,
    boundary: Box<dyn BoundaryData>,
    force: Option<Box<dyn BodyForce>>,
    boundary_dofs: Vec<(usize, Point, usize)>,
}

impl Simulation {
    pub fn new(config: &SimulationConfig) -> Result<Self> {
        let disc = Discretization::new(config)?;
        let boundary = boundary_data(config)?;
        Self::from_parts(disc, boundary, None)
    }

    pub fn from_parts(
        disc: Discretization,
        boundary: Box<dyn BoundaryData>,
        force: Option<Box<dyn BodyForce>>,
    ) -> Result<Self> {
        let cfg = disc.config().clone();
        let registry = FormRegistry::standard(&disc)?;
        let layout = *disc.layout();
        let vel = disc.dofmap(FieldRole::FluidVelocity);
        let coords = vel.coordinates();
        let mut boundary_dofs = Vec::new();
        for c in 0..2 {
            for &d in vel.boundary_dofs() {
                boundary_dofs.push((layout.index(FieldRole::FluidVelocity, c, d), coords[d], c));
            }
        }
        let dirichlet = boundary_dofs.iter().map(|b| b.0).collect();
        let system = System::assemble(&disc, &registry, cfg.k, dirichlet);
        let solvers = SolverRegistry::default();
        let solver = solvers.get(&cfg.solver)?;
        let started = std::time::Instant::now();
        let condensation = solver
            .requires_symmetric()
            .then(|| Condensation::new(&layout, &system.matrix, cfg.k));
        let target = condensation.as_ref().map_or(&system.matrix, |c| &c.matrix);
        let factor = solver.factor(target)?;
        log::info!(
            "factorized {} unknowns ({} nonzeros, fill {:?}) with {} in {:.2?}",
            target.nrows(),
            target.nnz(),
            factor.fill(),
            solver.name(),
            started.elapsed()
        );
        // the Dirichlet list of the system is sorted; keep values aligned with it
        boundary_dofs.sort_by_key(|b| b.0);
        Ok(Self {
            disc,
            system,
            factor,
            condensation,
            boundary,
            force,
            boundary_dofs,
        })
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn into_discretization(self) -> Discretization {
        self.disc
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn config(&self) -> &SimulationConfig {
        self.disc.config()
    }

    /// The zero state at `t = 0`.
    pub fn initial_state(&self) -> State {
        State {
            step: 0,
            t: 0.0,
            coeffs: vec![0.0; self.disc.layout().total()],
        }
    }

    fn dirichlet_values(&self, t: f64) -> Vec<f64> {
        self.boundary_dofs
            .iter()
            .map(|&(_, x, c)| self.boundary.velocity(t, x)[c])
            .collect()
    }

    /// Advances `prev` by one step of size `k`.
    pub fn step(&self, prev: &State) -> Result<(State, StepReport)> {
        let k = self.config().k;
        let n = prev.step + 1;
        let t = n as f64 * k;
        let load = self.force.as_ref().map(|f| {
            let mut l = assemble_load(&self.disc, f.as_ref(), t);
            l.iter_mut().for_each(|v| *v *= k);
            l
        });
        let values = self.dirichlet_values(t);
        let b = self.system.rhs(&prev.coeffs, load.as_deref(), &values);
        let tol = self.config().residual_tol;
        let mut x = match &self.condensation {
            None => solve_refined(&self.system.matrix, self.factor.as_ref(), &b, tol, 3).0,
            Some(cond) => {
                let u_prev = self.disc.layout().slice(FieldRole::Displacement, &prev.coeffs);
                let (y, _) = solve_refined(&cond.matrix, self.factor.as_ref(), &cond.rhs(&b, u_prev), tol, 3);
                cond.expand(&y, u_prev)
            }
        };
        for (&(d, _, _), &v) in self.boundary_dofs.iter().zip(&values) {
            x[d] = v;
        }
        // always reported for the full coupled system, whichever was factorized
        let residual = relative_residual(&self.system.matrix, &x, &b);
        let constraint_residual = constraint_residual(&self.disc, &prev.coeffs, &x, k);
        let state = State { step: n, t, coeffs: x };
        Ok((
            state,
            StepReport {
                step: n,
                t,
                residual,
                constraint_residual,
            },
        ))
    }

    /// Runs all steps from `initial`, passing each state to `observer`.
    pub fn run(&self, initial: State, observer: &mut dyn StepObserver) -> Result<RunSummary> {
        let steps = self.config().n_steps()?;
        observer.observe(&self.disc, &initial, None)?;
        let mut state = initial;
        let mut max_residual = 0.0f64;
        let mut max_constraint = 0.0f64;
        for _ in 0..steps {
            let (next, report) = self.step(&state)?;
            max_residual = max_residual.max(report.residual);
            max_constraint = max_constraint.max(report.constraint_residual);
            log::debug!(
                "step {} t = {:.4}: residual {:.3e}, constraint {:.3e}",
                report.step,
                report.t,
                report.residual,
                report.constraint_residual
            );
            observer.observe(&self.disc, &next, Some(&report))?;
            state = next;
        }
        Ok(RunSummary {
            steps,
            max_residual,
            max_constraint_residual: max_constraint,
            final_state: state,
        })
    }
}

/// `max |u^n - u^{n-1} - k v_s^n|` over the displacement coefficients.
pub fn constraint_residual(disc: &Discretization, prev: &[f64], next: &[f64], k: f64) -> f64 {
    let layout = disc.layout();
    let u0 = layout.slice(FieldRole::Displacement, prev);
    let u1 = layout.slice(FieldRole::Displacement, next);
    let vs = layout.slice(FieldRole::SolidVelocity, next);
    let diff: Vec<f64> = (0..u1.len()).map(|i| u1[i] - u0[i] - k * vs[i]).collect();
    norm_inf(&diff)
}

/// Boundary values of the fluid velocity at time `t`, as field-local pairs.
pub fn boundary_values(disc: &Discretization, data: &dyn BoundaryData, t: f64) -> Vec<(usize, f64)> {
    interpolate_boundary(disc.dofmap(FieldRole::FluidVelocity), |x| data.velocity(t, x))
}
