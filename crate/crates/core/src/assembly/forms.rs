//! The bilinear forms of the coupled problem. Each form adds its entries to a
//! matrix sharing the monolithic sparsity pattern.

use crate::config::ConstraintDomain;
use crate::fem::{BasisTable, FieldRole};
use crate::geometry::{Point, Side};
use crate::sparse::SparseMatrix;

use super::ghost::{ghost_face_local, GhostKind};
use super::weight::{face_weight, GhostWeight};
use super::{Discretization, Region};

/// How a form enters the time-step matrix `H + k B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScaling {
    /// Part of `H`, which also multiplies the previous state on the right-hand side.
    Unit,
    /// Part of `B`, scaled by the time step.
    Step,
}

/// One bilinear form on the monolithic space.
pub trait Form: Send + Sync {
    fn name(&self) -> &'static str;
    fn scaling(&self) -> TimeScaling;
    /// Adds the form to `target`, whose pattern covers every coupling.
    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix);
}

fn tables(disc: &Discretization, role: FieldRole, cell: usize, points: &[Point]) -> Vec<BasisTable> {
    let dm = disc.dofmap(role);
    let map = dm.cell_map(cell);
    points
        .iter()
        .map(|x| dm.basis().tabulate(map.to_reference(*x), map.h))
        .collect()
}

/// Row-major dense block with row/column index lists.
struct Local {
    rows: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl Local {
    fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        let values = vec![0.0; rows.len() * cols.len()];
        Self { rows, cols, values }
    }

    fn add(&mut self, r: usize, c: usize, v: f64) {
        let nc = self.cols.len();
        self.values[r * nc + c] += v;
    }

    fn flush(&self, target: &mut SparseMatrix) {
        target.add_block(&self.rows, &self.cols, &self.values, 1.0);
    }
}

/// `rho_f (v_f, phi_f)_{Omega_f} + rho_s (v_s, phi_s)_{Omega_s}`.
pub struct Mass;

impl Form for Mass {
    fn name(&self) -> &'static str {
        "mass"
    }

    fn scaling(&self) -> TimeScaling {
        TimeScaling::Unit
    }

    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix) {
        let mat = disc.config().material;
        for (role, rho) in [(FieldRole::FluidVelocity, mat.rho_f), (FieldRole::SolidVelocity, mat.rho_s)] {
            let region = Region::Physical(role.side());
            for cell in disc.region_cells(region) {
                let rule = disc.bulk_rule(cell, region);
                block_mass(disc, cell, &rule.points, &rule.weights, role, role, rho, target);
            }
        }
    }
}

/// Adds `scale (a, b)` between the scalar bases of two fields that share the
/// same dof map, component by component.
#[allow(clippy::too_many_arguments)]
fn block_mass(
    disc: &Discretization,
    cell: usize,
    points: &[Point],
    weights: &[f64],
    row_role: FieldRole,
    col_role: FieldRole,
    scale: f64,
    target: &mut SparseMatrix,
) {
    if points.is_empty() {
        return;
    }
    let tabs = tables(disc, col_role, cell, points);
    let nloc = tabs[0].values.len();
    let mut m = vec![0.0; nloc * nloc];
    for (t, w) in tabs.iter().zip(weights) {
        for a in 0..nloc {
            let wa = scale * w * t.values[a];
            for b in 0..nloc {
                m[a * nloc + b] += wa * t.values[b];
            }
        }
    }
    let rows = disc.global_dofs(cell, row_role);
    let cols = disc.global_dofs(cell, col_role);
    for c in 0..row_role.components() {
        target.add_block(
            &rows[c * nloc..(c + 1) * nloc],
            &cols[c * nloc..(c + 1) * nloc],
            &m,
            1.0,
        );
    }
}

/// `2 rho_f nu_f (eps(v), eps(phi)) - (p, div phi) + (div v, xi)` on `Omega_f`.
pub struct FluidBulk;

impl Form for FluidBulk {
    fn name(&self) -> &'static str {
        "fluid_bulk"
    }

    fn scaling(&self) -> TimeScaling {
        TimeScaling::Step
    }

    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix) {
        let mat = disc.config().material;
        let visc = mat.rho_f * mat.nu_f;
        let region = Region::Physical(Side::Fluid);
        for cell in disc.region_cells(region) {
            let rule = disc.bulk_rule(cell, region);
            if rule.is_empty() {
                continue;
            }
            let tv = tables(disc, FieldRole::FluidVelocity, cell, &rule.points);
            let tp = tables(disc, FieldRole::Pressure, cell, &rule.points);
            let nv = tv[0].values.len();
            let np = tp[0].values.len();
            let mut dofs = disc.global_dofs(cell, FieldRole::FluidVelocity);
            dofs.extend(disc.global_dofs(cell, FieldRole::Pressure));
            let mut local = Local::new(dofs.clone(), dofs);
            for q in 0..rule.len() {
                let w = rule.weights[q];
                let (gv, gp) = (&tv[q].grads, &tp[q].values);
                for d in 0..2 {
                    for b in 0..nv {
                        let row = d * nv + b;
                        for c in 0..2 {
                            for a in 0..nv {
                                let mut v = gv[a][d] * gv[b][c];
                                if c == d {
                                    v += gv[a][0] * gv[b][0] + gv[a][1] * gv[b][1];
                                }
                                local.add(row, c * nv + a, w * visc * v);
                            }
                        }
                        for a in 0..np {
                            local.add(row, 2 * nv + a, -w * gp[a] * gv[b][d]);
                            local.add(2 * nv + a, row, w * gp[a] * gv[b][d]);
                        }
                    }
                }
            }
            local.flush(target);
        }
    }
}

/// `(sigma_s(u), grad phi_s)` on `Omega_s`, tested with the solid velocity.
pub struct SolidBulk;

impl Form for SolidBulk {
    fn name(&self) -> &'static str {
        "solid_bulk"
    }

    fn scaling(&self) -> TimeScaling {
        TimeScaling::Step
    }

    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix) {
        let mat = disc.config().material;
        let region = Region::Physical(Side::Solid);
        for cell in disc.region_cells(region) {
            let rule = disc.bulk_rule(cell, region);
            if rule.is_empty() {
                continue;
            }
            let ts = tables(disc, FieldRole::Displacement, cell, &rule.points);
            let ns = ts[0].values.len();
            let rows = disc.global_dofs(cell, FieldRole::SolidVelocity);
            let cols = disc.global_dofs(cell, FieldRole::Displacement);
            let mut local = Local::new(rows, cols);
            for q in 0..rule.len() {
                let w = rule.weights[q];
                let g = &ts[q].grads;
                for d in 0..2 {
                    for b in 0..ns {
                        for c in 0..2 {
                            for a in 0..ns {
                                let mut v = mat.mu_s * g[a][d] * g[b][c] + mat.lambda_s * g[a][c] * g[b][d];
                                if c == d {
                                    v += mat.mu_s * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                                }
                                local.add(d * ns + b, c * ns + a, w * v);
                            }
                        }
                    }
                }
            }
            local.flush(target);
        }
    }
}

/// Nitsche coupling of fluid and solid velocities on the interface:
/// penalty, consistency and adjoint-consistency terms.
pub struct Nitsche;

impl Form for Nitsche {
    fn name(&self) -> &'static str {
        "nitsche"
    }

    fn scaling(&self) -> TimeScaling {
        TimeScaling::Step
    }

    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix) {
        let cfg = disc.config();
        let visc = cfg.material.rho_f * cfg.material.nu_f;
        let beta = cfg.stab.gamma_nitsche * visc / disc.h();
        for cell in disc.topology().cut_cells() {
            let rule = disc.interface_rule(cell).expect("cut cell without interface rule");
            if rule.is_empty() {
                continue;
            }
            let tv = tables(disc, FieldRole::FluidVelocity, cell, &rule.points);
            let tp = tables(disc, FieldRole::Pressure, cell, &rule.points);
            let ts = tables(disc, FieldRole::SolidVelocity, cell, &rule.points);
            let (nv, np, ns) = (tv[0].values.len(), tp[0].values.len(), ts[0].values.len());
            let (ov, op, os) = (0, 2 * nv, 2 * nv + np);
            let mut dofs = disc.global_dofs(cell, FieldRole::FluidVelocity);
            dofs.extend(disc.global_dofs(cell, FieldRole::Pressure));
            dofs.extend(disc.global_dofs(cell, FieldRole::SolidVelocity));
            let mut local = Local::new(dofs.clone(), dofs);
            for q in 0..rule.len() {
                let w = rule.weights[q];
                let n = rule.normals[q];
                let (phi, gphi) = (&tv[q].values, &tv[q].grads);
                let psi = &tp[q].values;
                let chi = &ts[q].values;
                let dn: Vec<f64> = gphi.iter().map(|g| g[0] * n[0] + g[1] * n[1]).collect();
                // viscous traction component d of the fluid basis (c, a)
                let traction = |c: usize, a: usize, d: usize| -> f64 {
                    let mut t = n[c] * gphi[a][d];
                    if c == d {
                        t += dn[a];
                    }
                    visc * t
                };
                for d in 0..2 {
                    for b in 0..nv {
                        let row_f = ov + d * nv + b;
                        for a in 0..nv {
                            let col_f = ov + d * nv + a;
                            local.add(row_f, col_f, w * beta * phi[a] * phi[b]);
                            for c in 0..2 {
                                let col = ov + c * nv + a;
                                local.add(row_f, col, -w * traction(c, a, d) * phi[b]);
                                local.add(row_f, col, -w * phi[a] * traction(d, b, c));
                            }
                        }
                        for a in 0..ns {
                            local.add(row_f, os + d * ns + a, -w * beta * chi[a] * phi[b]);
                            for c in 0..2 {
                                local.add(row_f, os + c * ns + a, w * chi[a] * traction(d, b, c));
                            }
                        }
                        for a in 0..np {
                            local.add(row_f, op + a, w * psi[a] * n[d] * phi[b]);
                        }
                    }
                    for b in 0..ns {
                        let row_s = os + d * ns + b;
                        for a in 0..nv {
                            local.add(row_s, ov + d * nv + a, -w * beta * phi[a] * chi[b]);
                            for c in 0..2 {
                                local.add(row_s, ov + c * nv + a, w * traction(c, a, d) * chi[b]);
                            }
                        }
                        for a in 0..ns {
                            local.add(row_s, os + d * ns + a, w * beta * chi[a] * chi[b]);
                        }
                        for a in 0..np {
                            local.add(row_s, op + a, -w * psi[a] * n[d] * chi[b]);
                        }
                    }
                }
                for b in 0..np {
                    let row_p = op + b;
                    for c in 0..2 {
                        for a in 0..nv {
                            local.add(row_p, ov + c * nv + a, -w * phi[a] * n[c] * psi[b]);
                        }
                        for a in 0..ns {
                            local.add(row_p, os + c * ns + a, w * chi[a] * n[c] * psi[b]);
                        }
                    }
                }
            }
            local.flush(target);
        }
    }
}

/// One of the four ghost penalties, added to `rows x cols` of the monolithic
/// matrix with a material prefactor.
pub struct GhostForm {
    pub name: &'static str,
    pub row_role: FieldRole,
    pub col_role: FieldRole,
    pub kind: GhostKind,
    pub scaling: TimeScaling,
    pub gamma: f64,
    pub prefactor: f64,
    pub weight: Box<dyn GhostWeight>,
}

impl GhostForm {
    /// `rho_s g_vs(v_s, phi_s)`, part of the mass form.
    pub fn solid_velocity(disc: &Discretization, weight: Box<dyn GhostWeight>) -> Self {
        let cfg = disc.config();
        Self {
            name: "ghost_vs",
            row_role: FieldRole::SolidVelocity,
            col_role: FieldRole::SolidVelocity,
            kind: GhostKind::Value,
            scaling: TimeScaling::Unit,
            gamma: cfg.stab.gamma_vs,
            prefactor: cfg.material.rho_s,
            weight,
        }
    }

    /// `2 rho_f nu_f g_vf(v_f, phi_f)`.
    pub fn fluid_velocity(disc: &Discretization, weight: Box<dyn GhostWeight>) -> Self {
        let cfg = disc.config();
        Self {
            name: "ghost_vf",
            row_role: FieldRole::FluidVelocity,
            col_role: FieldRole::FluidVelocity,
            kind: GhostKind::Gradient,
            scaling: TimeScaling::Step,
            gamma: cfg.stab.gamma_vf,
            prefactor: 2.0 * cfg.material.rho_f * cfg.material.nu_f,
            weight,
        }
    }

    /// `g_p(p, xi)`.
    pub fn pressure(disc: &Discretization, weight: Box<dyn GhostWeight>) -> Self {
        Self {
            name: "ghost_p",
            row_role: FieldRole::Pressure,
            col_role: FieldRole::Pressure,
            kind: GhostKind::Value,
            scaling: TimeScaling::Step,
            gamma: disc.config().stab.gamma_p,
            prefactor: 1.0,
            weight,
        }
    }

    /// `2 mu_s g_u(u, phi_s)`.
    pub fn displacement(disc: &Discretization, weight: Box<dyn GhostWeight>) -> Self {
        let cfg = disc.config();
        Self {
            name: "ghost_u",
            row_role: FieldRole::SolidVelocity,
            col_role: FieldRole::Displacement,
            kind: GhostKind::Gradient,
            scaling: TimeScaling::Step,
            gamma: cfg.stab.gamma_u,
            prefactor: 2.0 * cfg.material.mu_s,
            weight,
        }
    }
}

impl Form for GhostForm {
    fn name(&self) -> &'static str {
        self.name
    }

    fn scaling(&self) -> TimeScaling {
        self.scaling
    }

    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix) {
        if self.gamma == 0.0 {
            return;
        }
        let side = self.col_role.side();
        let dm = disc.dofmap(self.col_role);
        let (mesh, topo, layout) = (disc.mesh(), disc.topology(), disc.layout());
        for &face in topo.ghost_faces(side) {
            let (dofs, local) = ghost_face_local(mesh, dm, face, self.kind, disc.config().quad_points);
            let scale = self.prefactor * self.gamma * face_weight(mesh, topo, face, side, self.weight.as_ref());
            for c in 0..self.col_role.components() {
                let rows: Vec<usize> = dofs.iter().map(|&d| layout.index(self.row_role, c, d)).collect();
                let cols: Vec<usize> = dofs.iter().map(|&d| layout.index(self.col_role, c, d)).collect();
                target.add_block(&rows, &cols, &local, scale);
            }
        }
    }
}

fn constraint_region(disc: &Discretization) -> Region {
    match disc.config().constraint_domain {
        ConstraintDomain::Physical => Region::Physical(Side::Solid),
        ConstraintDomain::Computational => Region::Computational(Side::Solid),
    }
}

/// `(u, psi)` in the rows tested with the displacement space.
pub struct ConstraintDisplacement;

impl Form for ConstraintDisplacement {
    fn name(&self) -> &'static str {
        "constraint_displacement"
    }

    fn scaling(&self) -> TimeScaling {
        TimeScaling::Unit
    }

    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix) {
        let region = constraint_region(disc);
        for cell in disc.region_cells(region) {
            let rule = disc.bulk_rule(cell, region);
            block_mass(
                disc,
                cell,
                &rule.points,
                &rule.weights,
                FieldRole::Displacement,
                FieldRole::Displacement,
                1.0,
                target,
            );
        }
    }
}

/// `-(v_s, psi)` in the displacement rows, scaled by the step.
pub struct ConstraintVelocity;

impl Form for ConstraintVelocity {
    fn name(&self) -> &'static str {
        "constraint_velocity"
    }

    fn scaling(&self) -> TimeScaling {
        TimeScaling::Step
    }

    fn assemble(&self, disc: &Discretization, target: &mut SparseMatrix) {
        let region = constraint_region(disc);
        for cell in disc.region_cells(region) {
            let rule = disc.bulk_rule(cell, region);
            block_mass(
                disc,
                cell,
                &rule.points,
                &rule.weights,
                FieldRole::Displacement,
                FieldRole::SolidVelocity,
                -1.0,
                target,
            );
        }
    }
}

/// Forms making up the time-step system, in assembly order.
pub struct FormRegistry {
    forms: Vec<Box<dyn Form>>,
}

impl FormRegistry {
    pub fn empty() -> Self {
        Self { forms: Vec::new() }
    }

    /// Every form of the coupled problem with the configured ghost weight.
    pub fn standard(disc: &Discretization) -> crate::error::Result<Self> {
        let cfg = disc.config();
        let weight = || super::weight_strategy(cfg.resolved_ghost_weight(), cfg.stab.w_max);
        let mut r = Self::empty();
        r.register(Box::new(Mass));
        r.register(Box::new(GhostForm::solid_velocity(disc, weight()?)));
        r.register(Box::new(FluidBulk));
        r.register(Box::new(SolidBulk));
        r.register(Box::new(Nitsche));
        r.register(Box::new(GhostForm::fluid_velocity(disc, weight()?)));
        r.register(Box::new(GhostForm::pressure(disc, weight()?)));
        r.register(Box::new(GhostForm::displacement(disc, weight()?)));
        r.register(Box::new(ConstraintDisplacement));
        r.register(Box::new(ConstraintVelocity));
        Ok(r)
    }

    /// Adds a form, replacing any form with the same name.
    pub fn register(&mut self, form: Box<dyn Form>) {
        self.forms.retain(|f| f.name() != form.name());
        self.forms.push(form);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Form> {
        self.forms.iter().find(|f| f.name() == name).map(|f| f.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.forms.iter().map(|f| f.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Form> {
        self.forms.iter().map(|f| f.as_ref())
    }
}
