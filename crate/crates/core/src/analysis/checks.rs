//! Property checks run by the `verify` command.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{
    assemble_ghost_matrix, ghost_energy, system_pattern, Discretization, FluidBulk, Form, FractionWeight, GhostForm, GhostKind,
    Nitsche, Region, UnweightedGhost,
};
use crate::config::SimulationConfig;
use crate::error::Result;
use crate::fem::{FieldRole, ReferenceBasis};
use crate::geometry::Side;
use crate::quadrature::tensor_rule;
use crate::sparse::SparseMatrix;
use crate::timestepper::{Simulation, Trajectory};

use super::decay::verify_energy_decay;
use super::extension::{verify_ghost_extension, ExtensionBase, ExtensionParams};
use super::norms::{field_norm_squared, interface_jump_squared, NormKind};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

/// Inputs shared by all checks.
#[derive(Debug, Clone)]
pub struct CheckContext {
    pub config: SimulationConfig,
    pub seed: u64,
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome>;
}

/// Mesh levels used by the checks that refine: the configured one and two
/// uniform refinements.
fn levels(config: &SimulationConfig) -> [usize; 3] {
    [config.n, 2 * config.n, 4 * config.n]
}

/// Solid area and interface length of the cut quadrature against the circle.
pub struct GeometryCheck;

impl Check for GeometryCheck {
    fn name(&self) -> &'static str {
        "geometry"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let r2 = ctx.config.radius_squared;
        let mut worst = (0.0f64, 0.0f64);
        for n in levels(&ctx.config) {
            let mut cfg = ctx.config.clone();
            cfg.n = n;
            let disc = Discretization::new(&cfg)?;
            let (area, length) = measure_interface(&disc);
            worst.0 = worst.0.max((area - PI * r2).abs());
            worst.1 = worst.1.max((length - 2.0 * PI * r2.sqrt()).abs());
        }
        Ok(CheckOutcome::new(
            worst.0 <= 1e-8 && worst.1 <= 1e-10,
            format!("area error {:.2e}, length error {:.2e}", worst.0, worst.1),
        ))
    }
}

/// Solid area from the bulk quadrature and interface length from the arc
/// quadrature.
pub fn measure_interface(disc: &Discretization) -> (f64, f64) {
    let region = Region::Physical(Side::Solid);
    let area = disc
        .region_cells(region)
        .into_iter()
        .map(|c| disc.bulk_rule(c, region).measure())
        .sum();
    let length = disc
        .topology()
        .cut_cells()
        .filter_map(|c| disc.interface_rule(c))
        .map(|r| r.measure())
        .sum();
    (area, length)
}

/// Every cut cell reaches an uncut cell through ghost faces.
pub struct PathCheck;

impl Check for PathCheck {
    fn name(&self) -> &'static str {
        "ghost paths"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let disc = Discretization::new(&ctx.config)?;
        let mut detail = Vec::new();
        for side in Side::BOTH {
            match disc.topology().path_report(disc.mesh(), side) {
                Ok(r) => detail.push(format!("{}: {} faces, reuse {}", side.label(), r.max_faces, r.max_reuse)),
                Err(e) => return Ok(CheckOutcome::new(false, e.to_string())),
            }
        }
        Ok(CheckOutcome::new(true, detail.join("; ")))
    }
}

fn ghost_matrices(disc: &Discretization) -> Result<Vec<(FieldRole, GhostKind, SparseMatrix)>> {
    let cfg = disc.config();
    let weight = crate::assembly::weight_strategy(cfg.resolved_ghost_weight(), cfg.stab.w_max)?;
    Ok([
        (FieldRole::FluidVelocity, GhostKind::Gradient),
        (FieldRole::Pressure, GhostKind::Value),
        (FieldRole::SolidVelocity, GhostKind::Value),
        (FieldRole::Displacement, GhostKind::Gradient),
    ]
    .into_iter()
    .map(|(role, kind)| {
        let m = assemble_ghost_matrix(
            disc.mesh(),
            disc.topology(),
            disc.dofmap(role),
            role.side(),
            kind,
            1.0,
            weight.as_ref(),
            cfg.quad_points,
        );
        (role, kind, m)
    })
    .collect())
}

/// Nodal interpolant of a random polynomial of degree `order` per variable.
pub fn random_polynomial_interpolant(disc: &Discretization, role: FieldRole, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let order = disc.dofmap(role).order();
    let coeffs: Vec<f64> = (0..(order + 1) * (order + 1)).map(|_| rng.random_range(-1.0..1.0)).collect();
    disc.dofmap(role)
        .coordinates()
        .iter()
        .map(|x| {
            let mut v = 0.0;
            for a in 0..=order {
                for b in 0..=order {
                    v += coeffs[a * (order + 1) + b] * x[0].powi(a as i32) * x[1].powi(b as i32);
                }
            }
            v
        })
        .collect()
}

fn unit_random(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.into_iter().map(|v| v / norm).collect()
}

/// Ghost forms are symmetric, positive semidefinite and vanish on global
/// polynomials of the space's order.
///
/// Random vectors have unit length. The kernel energy is summed from squared
/// face jumps, since a matrix-vector product of a kernel vector only cancels
/// to rounding level.
pub struct GhostFormCheck;

impl Check for GhostFormCheck {
    fn name(&self) -> &'static str {
        "ghost forms"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let disc = Discretization::new(&ctx.config)?;
        let cfg = disc.config();
        let weight = crate::assembly::weight_strategy(cfg.resolved_ghost_weight(), cfg.stab.w_max)?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let (mut min_q, mut asym, mut kernel) = (f64::INFINITY, 0.0f64, 0.0f64);
        let mut exact_symmetry = true;
        for (role, kind, g) in ghost_matrices(&disc)? {
            exact_symmetry &= g.symmetry_defect() == 0.0;
            let n = g.nrows();
            for _ in 0..100 {
                let x = unit_random(n, &mut rng);
                let y = unit_random(n, &mut rng);
                min_q = min_q.min(g.bilinear(&x, &x));
                asym = asym.max((g.bilinear(&x, &y) - g.bilinear(&y, &x)).abs());
            }
            let p = random_polynomial_interpolant(&disc, role, &mut rng);
            let e = ghost_energy(
                disc.mesh(),
                disc.topology(),
                disc.dofmap(role),
                role.side(),
                kind,
                1.0,
                weight.as_ref(),
                cfg.quad_points,
                &p,
            );
            kernel = kernel.max(e.abs());
        }
        Ok(CheckOutcome::new(
            exact_symmetry && min_q >= -1e-12 && asym <= 1e-12 && kernel <= 1e-13,
            format!(
                "bitwise symmetric {exact_symmetry}, min x.Gx {min_q:.2e}, asymmetry {asym:.2e}, polynomial energy {kernel:.2e}"
            ),
        ))
    }
}

/// Bilinear mass matrix of one cell against `h^2/36 (1 + [x_a = x_b])(1 + [y_a = y_b])`.
pub struct MassCheck;

/// Largest deviation of the quadrature `Q1` mass matrix of a cell of width
/// `h` from its closed form.
pub fn q1_mass_defect(h: f64) -> f64 {
    let basis = ReferenceBasis::new(1);
    let rule = tensor_rule([0.0, 0.0], [h, h], 2);
    let mut worst = 0.0f64;
    for a in 0..4 {
        for b in 0..4 {
            let m: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| {
                    let t = basis.tabulate([x[0] / h, x[1] / h], h);
                    w * t.values[a] * t.values[b]
                })
                .sum();
            let same_x = (a % 2 == b % 2) as u8 as f64;
            let same_y = (a / 2 == b / 2) as u8 as f64;
            worst = worst.max((m - h * h / 36.0 * (1.0 + same_x) * (1.0 + same_y)).abs());
        }
    }
    worst
}

impl Check for MassCheck {
    fn name(&self) -> &'static str {
        "Q1 mass"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let d = q1_mass_defect(ctx.config.h());
        Ok(CheckOutcome::new(d <= 1e-14, format!("max deviation {d:.2e}")))
    }
}

/// `w_max = 1` in the fraction weight reproduces the unweighted penalty bit
/// for bit.
pub struct WeightIdentityCheck;

impl Check for WeightIdentityCheck {
    fn name(&self) -> &'static str {
        "unit weight identity"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let disc = Discretization::new(&ctx.config)?;
        let mut identical = true;
        for role in [FieldRole::FluidVelocity, FieldRole::Pressure, FieldRole::SolidVelocity] {
            for kind in [GhostKind::Value, GhostKind::Gradient] {
                let build = |w: &dyn crate::assembly::GhostWeight| {
                    assemble_ghost_matrix(
                        disc.mesh(),
                        disc.topology(),
                        disc.dofmap(role),
                        role.side(),
                        kind,
                        ctx.config.stab.gamma_vf.max(1e-3),
                        w,
                        ctx.config.quad_points,
                    )
                };
                identical &= build(&UnweightedGhost) == build(&FractionWeight { w_max: 1.0 });
            }
        }
        Ok(CheckOutcome::new(
            identical,
            if identical { "identical".into() } else { "matrices differ".into() },
        ))
    }
}

/// Viscous, fluid ghost and Nitsche forms together control the fluid
/// gradient and the interface jump.
pub struct CoercivityCheck;

impl Check for CoercivityCheck {
    fn name(&self) -> &'static str {
        "fluid coercivity"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let disc = Discretization::new(&ctx.config)?;
        let cfg = disc.config();
        let mut b = system_pattern(&disc);
        let weight = crate::assembly::weight_strategy(cfg.resolved_ghost_weight(), cfg.stab.w_max)?;
        FluidBulk.assemble(&disc, &mut b);
        Nitsche.assemble(&disc, &mut b);
        GhostForm::fluid_velocity(&disc, weight).assemble(&disc, &mut b);
        let layout = disc.layout();
        let visc = cfg.material.rho_f * cfg.material.nu_f;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut worst = f64::INFINITY;
        for _ in 0..100 {
            let mut x = vec![0.0; layout.total()];
            for role in [FieldRole::FluidVelocity, FieldRole::SolidVelocity] {
                for v in layout.slice_mut(role, &mut x) {
                    *v = rng.random_range(-1.0..1.0);
                }
            }
            let form = b.bilinear(&x, &x);
            let grad = field_norm_squared(
                &disc,
                FieldRole::FluidVelocity,
                layout.slice(FieldRole::FluidVelocity, &x),
                Region::Computational(Side::Fluid),
                NormKind::Gradient,
            );
            let jump = interface_jump_squared(&disc, &x);
            let norm = visc * (grad + cfg.stab.gamma_nitsche / disc.h() * jump);
            worst = worst.min(form / norm);
        }
        Ok(CheckOutcome::new(worst >= 0.1, format!("min ratio {worst:.3}")))
    }
}

/// Ghost extension estimate is uniform in `h` for each field, with the
/// configured penalty parameters and weights.
pub struct ExtensionCheck;

impl Check for ExtensionCheck {
    fn name(&self) -> &'static str {
        "ghost extension"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let cfg = &ctx.config;
        let stab = cfg.stab;
        let cases = [
            (Side::Fluid, cfg.m_f, 1, stab.gamma_vf),
            (Side::Fluid, cfg.m_f - 1, 0, stab.gamma_p),
            (Side::Solid, cfg.m_s, 0, stab.gamma_vs),
            (Side::Solid, cfg.m_s, 1, stab.gamma_u),
        ];
        let levels = [16, 32, 64];
        let mut passed = true;
        let mut detail = Vec::new();
        for (side, order, l, gamma) in cases {
            let params = ExtensionParams {
                side,
                order,
                l,
                gamma,
                w_max: stab.w_max,
                base: ExtensionBase::Interior,
                seed: ctx.seed,
                ..Default::default()
            };
            let report = verify_ghost_extension(cfg, &levels, &params)?;
            let spread = report.spread();
            passed &= spread.is_finite() && spread <= 2.0;
            detail.push(format!("{} Q{order} l={l}: spread {spread:.3}", side.label()));
        }
        Ok(CheckOutcome::new(passed, detail.join("; ")))
    }
}

/// Unforced runs from random data never gain energy.
pub struct DecayCheck;

impl Check for DecayCheck {
    fn name(&self) -> &'static str {
        "energy decay"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let report = verify_energy_decay(&ctx.config, ctx.seed, 20)?;
        let detail = match report.first_violation {
            Some(n) => format!("Q grows at step {n}"),
            None => format!(
                "Q from {:.3e} to {:.3e}",
                report.q[0],
                report.q.last().copied().unwrap_or(f64::NAN)
            ),
        };
        Ok(CheckOutcome::new(report.passed(), detail))
    }
}

/// Every step of the configured run solves to tolerance and keeps
/// `u^n = u^{n-1} + k v_s^n`.
pub struct SolveCheck;

impl Check for SolveCheck {
    fn name(&self) -> &'static str {
        "solve and constraint"
    }

    fn run(&self, ctx: &CheckContext) -> Result<CheckOutcome> {
        let sim = Simulation::new(&ctx.config)?;
        let summary = sim.run(sim.initial_state(), &mut Trajectory::default())?;
        Ok(CheckOutcome::new(
            summary.max_residual <= 1e-10 && summary.max_constraint_residual <= 1e-9,
            format!(
                "max residual {:.2e}, max constraint residual {:.2e}",
                summary.max_residual, summary.max_constraint_residual
            ),
        ))
    }
}

/// Checks run by name in registration order.
pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self { checks: Vec::new() };
        r.register(Box::new(GeometryCheck));
        r.register(Box::new(PathCheck));
        r.register(Box::new(MassCheck));
        r.register(Box::new(GhostFormCheck));
        r.register(Box::new(WeightIdentityCheck));
        r.register(Box::new(CoercivityCheck));
        r.register(Box::new(ExtensionCheck));
        r.register(Box::new(DecayCheck));
        r.register(Box::new(SolveCheck));
        r
    }
}

impl CheckRegistry {
    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Check> {
        self.checks.iter().map(|c| c.as_ref())
    }
}
