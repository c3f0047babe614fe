//! Energy functionals of a state: the stability seminorms and the decaying
//! quantity of the backward Euler scheme.

use crate::assembly::{assemble_ghost_matrix, weight_strategy, Discretization, GhostKind, Region};
use crate::error::Result;
use crate::fem::FieldRole;
use crate::geometry::Side;
use crate::sparse::SparseMatrix;

use super::norms::{elastic_density, field_integral, field_norm_squared, interface_jump_squared, NormKind};

/// Ghost penalty matrices of the four fields, each including its `gamma` and
/// face weights but no material prefactor. Scalar, on field-local indices.
#[derive(Debug, Clone)]
pub struct GhostMatrices {
    pub vf: SparseMatrix,
    pub p: SparseMatrix,
    pub vs: SparseMatrix,
    pub u: SparseMatrix,
}

impl GhostMatrices {
    pub fn assemble(disc: &Discretization) -> Result<Self> {
        let cfg = disc.config();
        let weight = weight_strategy(cfg.resolved_ghost_weight(), cfg.stab.w_max)?;
        let (mesh, topo) = (disc.mesh(), disc.topology());
        let npts = cfg.quad_points;
        let build = |role: FieldRole, kind: GhostKind, gamma: f64| {
            assemble_ghost_matrix(mesh, topo, disc.dofmap(role), role.side(), kind, gamma, weight.as_ref(), npts)
        };
        Ok(Self {
            vf: build(FieldRole::FluidVelocity, GhostKind::Gradient, cfg.stab.gamma_vf),
            p: build(FieldRole::Pressure, GhostKind::Value, cfg.stab.gamma_p),
            vs: build(FieldRole::SolidVelocity, GhostKind::Value, cfg.stab.gamma_vs),
            u: build(FieldRole::Displacement, GhostKind::Gradient, cfg.stab.gamma_u),
        })
    }

    fn matrix(&self, role: FieldRole) -> &SparseMatrix {
        match role {
            FieldRole::FluidVelocity => &self.vf,
            FieldRole::Pressure => &self.p,
            FieldRole::SolidVelocity => &self.vs,
            FieldRole::Displacement => &self.u,
        }
    }

    /// `g(x, x)` summed over the components of `role`.
    pub fn energy(&self, disc: &Discretization, role: FieldRole, state: &[f64]) -> f64 {
        let x = disc.layout().slice(role, state);
        let g = self.matrix(role);
        let n = g.nrows();
        (0..role.components())
            .map(|c| {
                let xc = &x[c * n..(c + 1) * n];
                g.bilinear(xc, xc)
            })
            .sum()
    }
}

/// Squared stability seminorms of one state.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergySnapshot {
    /// `rho_f/2 |v_f|^2 + rho_s/2 |v_s|^2 + mu_s |grad u|^2`, solid terms on the
    /// computational solid domain.
    pub e_t: f64,
    /// `rho_s/2 g_vs(v_s, v_s) + mu_s g_u(u, u)`.
    pub e_g: f64,
    /// `rho_f nu_f |grad v_f|^2 + rho_f nu_f gamma_N trace + g_p(p, p)` with the
    /// gradient on the computational fluid domain.
    pub triple: f64,
    /// `h^-1 |v_f - v_s|^2` on the interface.
    pub trace: f64,
    pub g_vf: f64,
    pub g_p: f64,
    pub g_vs: f64,
    pub g_u: f64,
}

impl EnergySnapshot {
    /// Column names matching [`EnergySnapshot::components`].
    pub const LABELS: [&'static str; 8] = ["E_T", "E_g", "triple", "trace", "g_vf", "g_p", "g_vs", "g_u"];

    pub fn components(&self) -> [f64; 8] {
        [
            self.e_t, self.e_g, self.triple, self.trace, self.g_vf, self.g_p, self.g_vs, self.g_u,
        ]
    }
}

pub fn energy(disc: &Discretization, ghosts: &GhostMatrices, state: &[f64]) -> EnergySnapshot {
    let cfg = disc.config();
    let mat = cfg.material;
    let layout = disc.layout();
    let vf = layout.slice(FieldRole::FluidVelocity, state);
    let vs = layout.slice(FieldRole::SolidVelocity, state);
    let u = layout.slice(FieldRole::Displacement, state);
    let solid_t = Region::Computational(Side::Solid);
    let e_t = 0.5 * mat.rho_f * field_norm_squared(disc, FieldRole::FluidVelocity, vf, Region::Physical(Side::Fluid), NormKind::Value)
        + 0.5 * mat.rho_s * field_norm_squared(disc, FieldRole::SolidVelocity, vs, solid_t, NormKind::Value)
        + mat.mu_s * field_norm_squared(disc, FieldRole::Displacement, u, solid_t, NormKind::Gradient);
    let g_vf = ghosts.energy(disc, FieldRole::FluidVelocity, state);
    let g_p = ghosts.energy(disc, FieldRole::Pressure, state);
    let g_vs = ghosts.energy(disc, FieldRole::SolidVelocity, state);
    let g_u = ghosts.energy(disc, FieldRole::Displacement, state);
    let trace = interface_jump_squared(disc, state) / disc.h();
    let nu = mat.rho_f * mat.nu_f;
    let triple = nu
        * field_norm_squared(disc, FieldRole::FluidVelocity, vf, Region::Computational(Side::Fluid), NormKind::Gradient)
        + nu * cfg.stab.gamma_nitsche * trace
        + g_p;
    EnergySnapshot {
        e_t,
        e_g: 0.5 * mat.rho_s * g_vs + mat.mu_s * g_u,
        triple,
        trace,
        g_vf,
        g_p,
        g_vs,
        g_u,
    }
}

/// The quantity that backward Euler dissipates when there is no forcing:
/// kinetic energy on the physical domains, elastic energy of `u` and the
/// solid ghost energies.
pub fn decay_functional(disc: &Discretization, ghosts: &GhostMatrices, state: &[f64]) -> f64 {
    let mat = disc.config().material;
    let layout = disc.layout();
    let vf = layout.slice(FieldRole::FluidVelocity, state);
    let vs = layout.slice(FieldRole::SolidVelocity, state);
    let u = layout.slice(FieldRole::Displacement, state);
    let solid = Region::Physical(Side::Solid);
    0.5 * mat.rho_f * field_norm_squared(disc, FieldRole::FluidVelocity, vf, Region::Physical(Side::Fluid), NormKind::Value)
        + 0.5 * mat.rho_s * field_norm_squared(disc, FieldRole::SolidVelocity, vs, solid, NormKind::Value)
        + 0.5 * mat.rho_s * ghosts.energy(disc, FieldRole::SolidVelocity, state)
        + field_integral(disc, FieldRole::Displacement, u, solid, |e| elastic_density(e, mat.mu_s, mat.lambda_s))
        + mat.mu_s * ghosts.energy(disc, FieldRole::Displacement, state)
}
