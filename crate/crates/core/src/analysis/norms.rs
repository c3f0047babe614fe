//! L2 norms of discrete fields over bulk regions and the interface.

use crate::assembly::{Discretization, Region};
use crate::fem::{FieldRole, FieldView, PointEval};

/// What a norm measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Value,
    Gradient,
}

/// Integral of `f(point value)` over `region` for the field `role`, where
/// `field` holds only that field's coefficients.
pub fn field_integral(
    disc: &Discretization,
    role: FieldRole,
    field: &[f64],
    region: Region,
    f: impl Fn(&PointEval) -> f64,
) -> f64 {
    let dm = disc.dofmap(role);
    let view = FieldView::new(dm, field, role.components());
    let mut sum = 0.0;
    for cell in disc.region_cells(region) {
        let rule = disc.bulk_rule(cell, region);
        let map = dm.cell_map(cell);
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let table = dm.basis().tabulate(map.to_reference(*x), map.h);
            sum += w * f(&view.eval_table(cell, &table));
        }
    }
    sum
}

/// `||v||^2` or `||grad v||^2` over `region`.
pub fn field_norm_squared(disc: &Discretization, role: FieldRole, field: &[f64], region: Region, kind: NormKind) -> f64 {
    let nc = role.components();
    field_integral(disc, role, field, region, |e| {
        (0..nc)
            .map(|c| match kind {
                NormKind::Value => e.value[c] * e.value[c],
                NormKind::Gradient => e.grad[c][0] * e.grad[c][0] + e.grad[c][1] * e.grad[c][1],
            })
            .sum()
    })
}

/// `mu |eps(u)|^2 + lambda / 2 (div u)^2` at one point of a vector field.
pub fn elastic_density(e: &PointEval, mu: f64, lambda: f64) -> f64 {
    let g = &e.grad;
    let off = 0.5 * (g[0][1] + g[1][0]);
    let div = g[0][0] + g[1][1];
    mu * (g[0][0] * g[0][0] + g[1][1] * g[1][1] + 2.0 * off * off) + 0.5 * lambda * div * div
}

/// `||v_f - v_s||^2` on the interface.
pub fn interface_jump_squared(disc: &Discretization, state: &[f64]) -> f64 {
    let layout = disc.layout();
    let vf = FieldView::new(
        disc.dofmap(FieldRole::FluidVelocity),
        layout.slice(FieldRole::FluidVelocity, state),
        2,
    );
    let vs = FieldView::new(
        disc.dofmap(FieldRole::SolidVelocity),
        layout.slice(FieldRole::SolidVelocity, state),
        2,
    );
    let mut sum = 0.0;
    for cell in disc.topology().cut_cells() {
        let Some(rule) = disc.interface_rule(cell) else { continue };
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let a = vf.eval(cell, *x).value;
            let b = vs.eval(cell, *x).value;
            sum += w * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2));
        }
    }
    sum
}
