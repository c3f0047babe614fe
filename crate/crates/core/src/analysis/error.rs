//! Errors against a reference run on a nested finer mesh or time grid, and
//! convergence orders.

use std::io::Write;

use crate::assembly::{Discretization, Region};
use crate::error::{Error, Result};
use crate::fem::{FieldRole, FieldView, PointEval};
use crate::geometry::{Point, Side};
use crate::timestepper::State;

/// Number of error columns.
pub const N_ERRORS: usize = 5;

/// Column labels of the five errors.
pub const ERROR_LABELS: [&str; N_ERRORS] = [
    "v_f(T) on Omega_f",
    "v_s(T) on Omega_s",
    "grad u(T) on Omega_s",
    "grad v_f in l2(Omega_f)",
    "h grad p in l2(Omega_f)",
];

/// C-style `%.8e`: eight fraction digits and a signed exponent of at least
/// two digits, e.g. `1.50000000e-03`.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}").to_lowercase();
    }
    let s = format!("{v:.8e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// `log2(e_h / e_{h/2})`.
pub fn convergence_order(coarse: f64, fine: f64) -> Result<f64> {
    if !(coarse > 0.0) || !(fine > 0.0) {
        return Err(Error::InvalidParameter {
            name: "error".into(),
            message: format!("orders need positive errors, got {coarse} and {fine}"),
        });
    }
    Ok((coarse / fine).log2())
}

/// Errors of a level sequence and the orders between consecutive levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// `h` or `k` of each level.
    pub levels: Vec<f64>,
    pub errors: Vec<[f64; N_ERRORS]>,
    /// `orders[i]` compares level `i` with level `i + 1`. `NaN` where an error
    /// vanished.
    pub orders: Vec<[f64; N_ERRORS]>,
}

impl ErrorReport {
    pub fn new(levels: Vec<f64>, errors: Vec<[f64; N_ERRORS]>) -> Self {
        let orders = errors
            .windows(2)
            .map(|w| std::array::from_fn(|j| convergence_order(w[0][j], w[1][j]).unwrap_or(f64::NAN)))
            .collect();
        Self { levels, errors, orders }
    }

    /// Orders between the two finest levels.
    pub fn last_orders(&self) -> Option<[f64; N_ERRORS]> {
        self.orders.last().copied()
    }

    /// One row per level with columns `h_or_k, err1..err5, ord1..ord5`; the
    /// first row has empty order cells. Lines of `header` are written first as
    /// `#` comments.
    pub fn write_csv(&self, out: &mut impl Write, header: &str) -> std::io::Result<()> {
        for line in header.lines() {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "h_or_k,err1,err2,err3,err4,err5,ord1,ord2,ord3,ord4,ord5")?;
        for (i, (level, errs)) in self.levels.iter().zip(&self.errors).enumerate() {
            let mut cells = vec![format_sci(*level)];
            cells.extend(errs.iter().map(|&e| format_sci(e)));
            match i.checked_sub(1).map(|j| self.orders[j]) {
                Some(ords) => cells.extend(ords.iter().map(|&o| format_sci(o))),
                None => cells.extend(std::iter::repeat_n(String::new(), N_ERRORS)),
            }
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Cell of the reference mesh that holds `x` and is active on `side`; falls
/// back to an active neighbor when `x` lies in a cell whose share of `side`
/// rounded to zero.
fn reference_cell(reference: &Discretization, side: Side, x: Point) -> Result<usize> {
    let mesh = reference.mesh();
    let topo = reference.topology();
    let cell = mesh
        .locate(x)
        .ok_or_else(|| Error::InvalidGeometry(format!("point {x:?} outside the reference mesh")))?;
    if topo.is_active(cell, side) {
        return Ok(cell);
    }
    mesh.cell_neighbors(cell)
        .map(|(_, c)| c)
        .find(|&c| topo.is_active(c, side))
        .ok_or_else(|| Error::InvalidGeometry(format!("no active {} cell near {x:?}", side.label())))
}

fn eval_at(disc: &Discretization, role: FieldRole, state: &[f64], cell: usize, x: Point) -> PointEval {
    let field = disc.layout().slice(role, state);
    FieldView::new(disc.dofmap(role), field, role.components()).eval(cell, x)
}

/// `(||d||^2, ||grad d||^2)` of `d = reference - coarse` for field `role` over
/// the physical domain of its side, using the coarse cut quadrature with
/// `quad_points_error` points.
fn difference_norms(
    coarse: &Discretization,
    coarse_state: &[f64],
    reference: &Discretization,
    reference_state: &[f64],
    role: FieldRole,
) -> Result<(f64, f64)> {
    let side = role.side();
    let region = Region::Physical(side);
    let npts = coarse.config().quad_points_error;
    let (mut value, mut grad) = (0.0, 0.0);
    for cell in coarse.region_cells(region) {
        let rule = coarse.cell_rule(cell, region, npts);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let c = eval_at(coarse, role, coarse_state, cell, *x);
            let rc = reference_cell(reference, side, *x)?;
            let r = eval_at(reference, role, reference_state, rc, *x);
            for comp in 0..role.components() {
                value += w * (r.value[comp] - c.value[comp]).powi(2);
                grad += w * ((r.grad[comp][0] - c.grad[comp][0]).powi(2) + (r.grad[comp][1] - c.grad[comp][1]).powi(2));
            }
        }
    }
    Ok((value, grad))
}

/// The five errors of a coarse trajectory against a reference trajectory.
///
/// The reference mesh must be a uniform refinement of the coarse one and its
/// step must divide the coarse step; both runs must reach the same final
/// time. Space-time norms sum `k ||.||^2` over the coarse time levels
/// `1..=N`, and the pressure term is scaled by the coarse `h`.
pub fn error_vs_reference(
    coarse: &Discretization,
    coarse_states: &[State],
    reference: &Discretization,
    reference_states: &[State],
) -> Result<[f64; N_ERRORS]> {
    let (cc, rc) = (coarse.config(), reference.config());
    if rc.n % cc.n != 0 {
        return Err(Error::NonNestedLevels(format!(
            "reference n = {} is not a multiple of n = {}",
            rc.n, cc.n
        )));
    }
    if cc.radius_squared != rc.radius_squared || cc.center != rc.center {
        return Err(Error::NonNestedLevels("runs use different interfaces".into()));
    }
    let ratio = cc.k / rc.k;
    let stride = ratio.round() as usize;
    if stride == 0 || (ratio - stride as f64).abs() > 1e-9 * ratio {
        return Err(Error::NonNestedLevels(format!(
            "reference step {} does not divide {}",
            rc.k, cc.k
        )));
    }
    let (Some(last_c), Some(last_r)) = (coarse_states.last(), reference_states.last()) else {
        return Err(Error::NonNestedLevels("empty trajectory".into()));
    };
    if (last_c.t - last_r.t).abs() > 1e-9 * last_c.t.max(1.0) || last_r.step != last_c.step * stride {
        return Err(Error::NonNestedLevels(format!(
            "final times differ: {} vs {}",
            last_c.t, last_r.t
        )));
    }
    let mut errs = [0.0; N_ERRORS];
    let (vf, _) = difference_norms(coarse, &last_c.coeffs, reference, &last_r.coeffs, FieldRole::FluidVelocity)?;
    let (vs, _) = difference_norms(coarse, &last_c.coeffs, reference, &last_r.coeffs, FieldRole::SolidVelocity)?;
    let (_, gu) = difference_norms(coarse, &last_c.coeffs, reference, &last_r.coeffs, FieldRole::Displacement)?;
    errs[0] = vf.sqrt();
    errs[1] = vs.sqrt();
    errs[2] = gu.sqrt();
    let (mut gv, mut gp) = (0.0, 0.0);
    for state in coarse_states.iter().filter(|s| s.step > 0) {
        let r = reference_states
            .get(state.step * stride)
            .filter(|r| r.step == state.step * stride)
            .ok_or_else(|| Error::NonNestedLevels(format!("reference lacks step {}", state.step * stride)))?;
        gv += cc.k * difference_norms(coarse, &state.coeffs, reference, &r.coeffs, FieldRole::FluidVelocity)?.1;
        gp += cc.k * difference_norms(coarse, &state.coeffs, reference, &r.coeffs, FieldRole::Pressure)?.1;
    }
    errs[3] = gv.sqrt();
    errs[4] = coarse.h() * gp.sqrt();
    Ok(errs)
}
