use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use cutfsi::analysis::{run_study, CheckContext, CheckRegistry, StudyMode, ERROR_LABELS};
use cutfsi::timestepper::{RunSummary, Simulation};
use cutfsi::SimulationConfig;

use crate::output::{comment_header, metadata, RunWriter, StepLog};

/// Writes `steps.csv`, `config.txt` and the requested VTU dumps into `dir`.
pub fn run(config: &SimulationConfig, dir: &Path, dump_every: Option<usize>) -> Result<RunSummary> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let sim = Simulation::new(config)?;
    let mut writer = RunWriter {
        log: StepLog::new(sim.discretization())?,
        dir,
        dump_every,
        dumps: Vec::new(),
    };
    let summary = sim.run(sim.initial_state(), &mut writer)?;
    std::fs::write(dir.join("steps.csv"), writer.log.into_csv())?;
    std::fs::write(dir.join("config.txt"), metadata(config))?;
    log::info!("wrote {} VTU files to {}", writer.dumps.len(), dir.display());
    Ok(summary)
}

pub struct StudyRequest {
    pub mode: StudyMode,
    pub levels: Vec<f64>,
    pub reference: f64,
    pub fixed: Option<f64>,
}

/// Error table of a study as CSV, with the config and run diagnostics as
/// comment lines.
pub fn convergence(config: &SimulationConfig, req: &StudyRequest) -> Result<String> {
    let mut base = config.clone();
    match req.mode {
        StudyMode::Space => base.k = req.fixed.unwrap_or(1.0),
        StudyMode::Time => base = StudyMode::Space.configure(&base, req.fixed.unwrap_or(0.0625))?,
    }
    let study = run_study(&base, req.mode, &req.levels, req.reference)?;
    let mut header = String::new();
    let _ = writeln!(header, "study: {} levels {:?} reference {}", req.mode.label(), req.levels, req.reference);
    for (i, label) in ERROR_LABELS.iter().enumerate() {
        let _ = writeln!(header, "err{}: {label}", i + 1);
    }
    for r in &study.runs {
        let _ = writeln!(
            header,
            "run h={} k={}{}: {} unknowns, {} steps, max residual {:.3e}, max constraint residual {:.3e}",
            r.h,
            r.k,
            if r.reference { " (reference)" } else { "" },
            r.unknowns,
            r.steps,
            r.max_residual,
            r.max_constraint_residual
        );
    }
    let mut out = comment_header(&base);
    let mut table = Vec::new();
    study.report.write_csv(&mut table, &header)?;
    out.push_str(&String::from_utf8(table)?);
    Ok(out)
}

/// Runs every registered check; returns whether all passed and the report.
pub fn verify(config: &SimulationConfig, seed: u64) -> Result<(bool, String)> {
    let ctx = CheckContext {
        config: config.clone(),
        seed,
    };
    let mut report = comment_header(config);
    let mut all = true;
    for check in CheckRegistry::default().iter() {
        let (passed, detail) = match check.run(&ctx) {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= passed;
        let _ = writeln!(report, "{} {}: {detail}", if passed { "PASS" } else { "FAIL" }, check.name());
    }
    let _ = writeln!(report, "{}", if all { "all checks passed" } else { "some checks failed" });
    Ok((all, report))
}
