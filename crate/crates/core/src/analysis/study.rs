//! Convergence studies in space or time against a finer reference run.

use std::str::FromStr;

use crate::assembly::Discretization;
use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::timestepper::{Simulation, Trajectory};

use super::error::{error_vs_reference, ErrorReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyMode {
    /// Levels are mesh widths `h`, the step stays fixed.
    Space,
    /// Levels are time steps `k`, the mesh stays fixed.
    Time,
}

impl FromStr for StudyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "space" => Ok(Self::Space),
            "time" => Ok(Self::Time),
            other => Err(Error::UnknownStrategy {
                kind: "study mode",
                name: other.into(),
                known: "space, time".into(),
            }),
        }
    }
}

impl StudyMode {
    pub fn label(self) -> &'static str {
        match self {
            Self::Space => "space",
            Self::Time => "time",
        }
    }

    /// `base` with the refined parameter set to `level`.
    pub fn configure(self, base: &SimulationConfig, level: f64) -> Result<SimulationConfig> {
        let mut cfg = base.clone();
        match self {
            Self::Space => {
                let n = (2.0 / level).round();
                if n < 2.0 || (2.0 / n - level).abs() > 1e-12 * level {
                    return Err(Error::InvalidParameter {
                        name: "h".into(),
                        message: format!("{level} is not 2/n for an integer n"),
                    });
                }
                cfg.n = n as usize;
            }
            Self::Time => cfg.k = level,
        }
        cfg.validate()?;
        cfg.n_steps()?;
        Ok(cfg)
    }
}

/// Solver diagnostics of one run of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDiagnostics {
    pub h: f64,
    pub k: f64,
    pub unknowns: usize,
    pub steps: usize,
    pub max_residual: f64,
    pub max_constraint_residual: f64,
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub mode: StudyMode,
    pub report: ErrorReport,
    /// The tested levels in order, then the reference run.
    pub runs: Vec<RunDiagnostics>,
}

impl StudyResult {
    pub fn max_residual(&self) -> f64 {
        self.runs.iter().fold(0.0, |m, r| m.max(r.max_residual))
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.runs.iter().fold(0.0, |m, r| m.max(r.max_constraint_residual))
    }
}

fn run_level(cfg: &SimulationConfig, reference: bool) -> Result<(Discretization, Trajectory, RunDiagnostics)> {
    let started = std::time::Instant::now();
    let sim = Simulation::new(cfg)?;
    let mut traj = Trajectory::default();
    let summary = sim.run(sim.initial_state(), &mut traj)?;
    let diag = RunDiagnostics {
        h: cfg.h(),
        k: cfg.k,
        unknowns: sim.discretization().layout().total(),
        steps: summary.steps,
        max_residual: summary.max_residual,
        max_constraint_residual: summary.max_constraint_residual,
        reference,
    };
    log::info!(
        "run h = {}, k = {}: {} unknowns, {} steps in {:.2?}",
        diag.h,
        diag.k,
        diag.unknowns,
        diag.steps,
        started.elapsed()
    );
    Ok((sim.into_discretization(), traj, diag))
}

/// Runs `reference` first, then every level from coarse to fine, and
/// compares each level with the reference.
pub fn run_study(base: &SimulationConfig, mode: StudyMode, levels: &[f64], reference: f64) -> Result<StudyResult> {
    if levels.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "levels".into(),
            message: "a study needs at least two levels".into(),
        });
    }
    if levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter {
            name: "levels".into(),
            message: "levels must decrease strictly".into(),
        });
    }
    let ref_cfg = mode.configure(base, reference)?;
    let level_cfgs = levels
        .iter()
        .map(|&l| mode.configure(base, l))
        .collect::<Result<Vec<_>>>()?;
    for cfg in &level_cfgs {
        let nested = match mode {
            StudyMode::Space => ref_cfg.n > cfg.n && ref_cfg.n % cfg.n == 0,
            StudyMode::Time => {
                let r = cfg.k / ref_cfg.k;
                r > 1.5 && (r - r.round()).abs() <= 1e-9 * r
            }
        };
        if !nested {
            return Err(Error::NonNestedLevels(format!(
                "reference {reference} is not a strict nested refinement of level h = {}, k = {}",
                cfg.h(),
                cfg.k
            )));
        }
    }
    let (ref_disc, ref_traj, ref_diag) = run_level(&ref_cfg, true)?;
    let mut runs = Vec::with_capacity(levels.len() + 1);
    let mut errors = Vec::with_capacity(levels.len());
    for cfg in &level_cfgs {
        let (disc, traj, diag) = run_level(cfg, false)?;
        errors.push(error_vs_reference(&disc, &traj.states, &ref_disc, &ref_traj.states)?);
        runs.push(diag);
    }
    runs.push(ref_diag);
    Ok(StudyResult {
        mode,
        report: ErrorReport::new(levels.to_vec(), errors),
        runs,
    })
}
