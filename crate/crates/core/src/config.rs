//! Simulation parameters and the flat `key = value` configuration format.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub rho_f: f64,
    pub nu_f: f64,
    pub rho_s: f64,
    pub mu_s: f64,
    pub lambda_s: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self {
            rho_f: 1.0,
            nu_f: 1e-3,
            rho_s: 1.0,
            mu_s: 5e-3,
            lambda_s: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationParams {
    pub gamma_vf: f64,
    pub gamma_p: f64,
    pub gamma_vs: f64,
    pub gamma_u: f64,
    pub gamma_nitsche: f64,
    pub w_max: f64,
}

impl Default for StabilizationParams {
    fn default() -> Self {
        Self {
            gamma_vf: 1e-3,
            gamma_p: 1e-3,
            gamma_vs: 1e-3,
            gamma_u: 1e-3,
            gamma_nitsche: 100.0,
            w_max: 1.0,
        }
    }
}

/// Which cells carry the mass matrix of the displacement/velocity constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintDomain {
    /// The physical solid `Omega_s`, using cut quadrature.
    Physical,
    /// All active solid cells in full.
    Computational,
}

impl ConstraintDomain {
    pub fn label(self) -> &'static str {
        match self {
            ConstraintDomain::Physical => "physical",
            ConstraintDomain::Computational => "computational",
        }
    }
}

impl FromStr for ConstraintDomain {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "physical" => Ok(Self::Physical),
            "computational" => Ok(Self::Computational),
            _ => Err(format!("expected `physical` or `computational`, got `{s}`")),
        }
    }
}

/// Every parameter of a run. `to_text` writes a file that `parse` reads back
/// to an identical value.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub radius_squared: f64,
    pub center: [f64; 2],
    pub n: usize,
    pub m_f: usize,
    pub m_s: usize,
    pub k: f64,
    pub t_final: f64,
    pub material: MaterialParams,
    pub stab: StabilizationParams,
    /// `auto` picks `unweighted` when `w_max = 1` and `fraction` otherwise.
    pub ghost_weight: String,
    pub quad_points: usize,
    pub quad_points_cut: usize,
    pub quad_points_error: usize,
    pub inflow: String,
    pub inflow_peak: f64,
    pub ramp_time: f64,
    pub solver: String,
    pub residual_tol: f64,
    pub constraint_domain: ConstraintDomain,
    pub allow_large: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            radius_squared: 0.75,
            center: [0.0, 0.0],
            n: 8,
            m_f: 2,
            m_s: 2,
            k: 1.0,
            t_final: 8.0,
            material: MaterialParams::default(),
            stab: StabilizationParams::default(),
            ghost_weight: "auto".into(),
            quad_points: 3,
            quad_points_cut: 4,
            quad_points_error: 4,
            inflow: "lid".into(),
            inflow_peak: 0.2,
            ramp_time: 2.0,
            solver: "faer-ldlt".into(),
            residual_tol: 1e-10,
            constraint_domain: ConstraintDomain::Physical,
            allow_large: false,
        }
    }
}

/// Finest mesh width accepted without `allow_large`.
pub const MIN_MESH_WIDTH: f64 = 0.0078125;
/// Largest system accepted without `allow_large`.
pub const MAX_DOFS: usize = 3_000_000;

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        message: format!("cannot parse `{value}` as the value of `{key}`"),
    })
}

impl SimulationConfig {
    /// Cell size of the background mesh.
    pub fn h(&self) -> f64 {
        2.0 / self.n as f64
    }

    /// Number of time steps, rejecting a final time that is not a multiple
    /// of the step.
    pub fn n_steps(&self) -> Result<usize> {
        let ratio = self.t_final / self.k;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::NonIntegerSteps {
                t_final: self.t_final,
                k: self.k,
            });
        }
        Ok(steps as usize)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            cfg.set(line, key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies `key=value` overrides, reported with line number 0.
    pub fn with_overrides<'a>(mut self, overrides: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        for o in overrides {
            let Some((key, value)) = o.split_once('=') else {
                return Err(Error::Config {
                    line: 0,
                    message: format!("expected `key=value`, got `{o}`"),
                });
            };
            self.set(0, key.trim(), value.trim())?;
        }
        self.validate()?;
        Ok(self)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let v = value;
        match key {
            "radius_squared" => self.radius_squared = parse_value(line, key, v)?,
            "center_x" => self.center[0] = parse_value(line, key, v)?,
            "center_y" => self.center[1] = parse_value(line, key, v)?,
            "n" => self.n = parse_value(line, key, v)?,
            "m_f" => self.m_f = parse_value(line, key, v)?,
            "m_s" => self.m_s = parse_value(line, key, v)?,
            "k" => self.k = parse_value(line, key, v)?,
            "T" => self.t_final = parse_value(line, key, v)?,
            "rho_f" => self.material.rho_f = parse_value(line, key, v)?,
            "nu_f" => self.material.nu_f = parse_value(line, key, v)?,
            "rho_s" => self.material.rho_s = parse_value(line, key, v)?,
            "mu_s" => self.material.mu_s = parse_value(line, key, v)?,
            "lambda_s" => self.material.lambda_s = parse_value(line, key, v)?,
            "gamma_vf" => self.stab.gamma_vf = parse_value(line, key, v)?,
            "gamma_p" => self.stab.gamma_p = parse_value(line, key, v)?,
            "gamma_vs" => self.stab.gamma_vs = parse_value(line, key, v)?,
            "gamma_u" => self.stab.gamma_u = parse_value(line, key, v)?,
            "gamma_N" => self.stab.gamma_nitsche = parse_value(line, key, v)?,
            "w_max" => self.stab.w_max = parse_value(line, key, v)?,
            "ghost_weight" => self.ghost_weight = v.to_string(),
            "quad_points" => self.quad_points = parse_value(line, key, v)?,
            "quad_points_cut" => self.quad_points_cut = parse_value(line, key, v)?,
            "quad_points_error" => self.quad_points_error = parse_value(line, key, v)?,
            "inflow" => self.inflow = v.to_string(),
            "inflow_peak" => self.inflow_peak = parse_value(line, key, v)?,
            "ramp_time" => self.ramp_time = parse_value(line, key, v)?,
            "solver" => self.solver = v.to_string(),
            "residual_tol" => self.residual_tol = parse_value(line, key, v)?,
            "constraint_domain" => {
                self.constraint_domain = v.parse().map_err(|message| Error::Config { line, message })?
            }
            "allow_large" => self.allow_large = parse_value(line, key, v)?,
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, message: &str| {
            Err(Error::InvalidParameter {
                name: name.to_string(),
                message: message.to_string(),
            })
        };
        let positive = [
            ("radius_squared", self.radius_squared),
            ("k", self.k),
            ("T", self.t_final),
            ("rho_f", self.material.rho_f),
            ("nu_f", self.material.nu_f),
            ("rho_s", self.material.rho_s),
            ("mu_s", self.material.mu_s),
            ("lambda_s", self.material.lambda_s),
            ("gamma_N", self.stab.gamma_nitsche),
            ("residual_tol", self.residual_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(name, "must be positive and finite");
            }
        }
        let nonnegative = [
            ("gamma_vf", self.stab.gamma_vf),
            ("gamma_p", self.stab.gamma_p),
            ("gamma_vs", self.stab.gamma_vs),
            ("gamma_u", self.stab.gamma_u),
            ("inflow_peak", self.inflow_peak),
            ("ramp_time", self.ramp_time),
        ];
        for (name, v) in nonnegative {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(name, "must be nonnegative and finite");
            }
        }
        if !(self.stab.w_max >= 1.0 && self.stab.w_max.is_finite()) {
            return bad("w_max", "must be at least 1");
        }
        if self.n < 2 {
            return bad("n", "must be at least 2");
        }
        if self.m_f != 2 {
            return bad("m_f", "only Taylor-Hood Q2/Q1 (m_f = 2) is supported");
        }
        if !(1..=2).contains(&self.m_s) {
            return bad("m_s", "must be 1 or 2");
        }
        for (name, v) in [
            ("quad_points", self.quad_points),
            ("quad_points_cut", self.quad_points_cut),
            ("quad_points_error", self.quad_points_error),
        ] {
            if !(1..=10).contains(&v) {
                return bad(name, "must be between 1 and 10");
            }
        }
        if !matches!(self.ghost_weight.as_str(), "auto" | "unweighted" | "fraction") {
            return bad("ghost_weight", "expected auto, unweighted or fraction");
        }
        if self.ghost_weight == "unweighted" && self.stab.w_max != 1.0 {
            return bad("ghost_weight", "the unweighted penalty requires w_max = 1");
        }
        Ok(())
    }

    /// Name of the ghost weight strategy after resolving `auto`.
    pub fn resolved_ghost_weight(&self) -> &str {
        match self.ghost_weight.as_str() {
            "auto" if self.stab.w_max == 1.0 => "unweighted",
            "auto" => "fraction",
            other => other,
        }
    }

    /// All keys with their values, one per line, in a form `parse` accepts.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let m = &self.material;
        let g = &self.stab;
        vec![
            ("radius_squared", self.radius_squared.to_string()),
            ("center_x", self.center[0].to_string()),
            ("center_y", self.center[1].to_string()),
            ("n", self.n.to_string()),
            ("m_f", self.m_f.to_string()),
            ("m_s", self.m_s.to_string()),
            ("k", self.k.to_string()),
            ("T", self.t_final.to_string()),
            ("rho_f", m.rho_f.to_string()),
            ("nu_f", m.nu_f.to_string()),
            ("rho_s", m.rho_s.to_string()),
            ("mu_s", m.mu_s.to_string()),
            ("lambda_s", m.lambda_s.to_string()),
            ("gamma_vf", g.gamma_vf.to_string()),
            ("gamma_p", g.gamma_p.to_string()),
            ("gamma_vs", g.gamma_vs.to_string()),
            ("gamma_u", g.gamma_u.to_string()),
            ("gamma_N", g.gamma_nitsche.to_string()),
            ("w_max", g.w_max.to_string()),
            ("ghost_weight", self.ghost_weight.clone()),
            ("quad_points", self.quad_points.to_string()),
            ("quad_points_cut", self.quad_points_cut.to_string()),
            ("quad_points_error", self.quad_points_error.to_string()),
            ("inflow", self.inflow.clone()),
            ("inflow_peak", self.inflow_peak.to_string()),
            ("ramp_time", self.ramp_time.to_string()),
            ("solver", self.solver.clone()),
            ("residual_tol", self.residual_tol.to_string()),
            ("constraint_domain", self.constraint_domain.label().to_string()),
            ("allow_large", self.allow_large.to_string()),
        ]
    }
}
