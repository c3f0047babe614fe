//! Discrete spaces on the cut mesh, the bilinear forms of the coupled
//! problem and the monolithic time-step system.

mod condense;
mod forms;
mod ghost;
mod system;
mod weight;

pub use condense::Condensation;
pub use forms::{
    ConstraintDisplacement, ConstraintVelocity, FluidBulk, Form, FormRegistry, GhostForm, Mass, Nitsche, SolidBulk,
    TimeScaling,
};
pub use ghost::{assemble_ghost_matrix, ghost_coefficient, ghost_energy, ghost_face_local, GhostKind};
pub use system::{assemble_load, interpolate_boundary, system_pattern, BodyForce, System};
pub use weight::{face_weight, weight_strategy, FractionWeight, GhostWeight, UnweightedGhost};

use std::ops::Range;

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::fem::{DofMap, FieldRole};
use crate::geometry::{LevelSet, Side};
use crate::mesh::{build_mesh, Mesh};
use crate::quadrature::{cut_cell_rule, interface_rule, tensor_rule, InterfaceRule, QuadratureRule};
use crate::topology::{build_cut_topology, CellClass, CutTopology};

/// Position of the four fields in the monolithic vector. Vector fields are
/// stored component-major inside their block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    offsets: [usize; 4],
    scalar: [usize; 4],
    total: usize,
}

fn role_slot(role: FieldRole) -> usize {
    match role {
        FieldRole::FluidVelocity => 0,
        FieldRole::Pressure => 1,
        FieldRole::SolidVelocity => 2,
        FieldRole::Displacement => 3,
    }
}

impl BlockLayout {
    /// `scalar[i]` is the scalar dof count of field `FieldRole::ALL[i]`.
    pub fn new(scalar: [usize; 4]) -> Self {
        let mut offsets = [0; 4];
        let mut total = 0;
        for (i, role) in FieldRole::ALL.iter().enumerate() {
            offsets[i] = total;
            total += scalar[i] * role.components();
        }
        Self { offsets, scalar, total }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn range(&self, role: FieldRole) -> Range<usize> {
        let s = role_slot(role);
        self.offsets[s]..self.offsets[s] + self.scalar[s] * role.components()
    }

    pub fn scalar_dofs(&self, role: FieldRole) -> usize {
        self.scalar[role_slot(role)]
    }

    pub fn index(&self, role: FieldRole, component: usize, scalar: usize) -> usize {
        let s = role_slot(role);
        debug_assert!(component < role.components() && scalar < self.scalar[s]);
        self.offsets[s] + component * self.scalar[s] + scalar
    }

    /// The field and its component owning a global index.
    pub fn locate(&self, global: usize) -> (FieldRole, usize) {
        for role in FieldRole::ALL.iter().rev() {
            let s = role_slot(*role);
            if global >= self.offsets[s] {
                return (*role, (global - self.offsets[s]) / self.scalar[s].max(1));
            }
        }
        unreachable!()
    }

    pub fn slice<'a>(&self, role: FieldRole, x: &'a [f64]) -> &'a [f64] {
        &x[self.range(role)]
    }

    pub fn slice_mut<'a>(&self, role: FieldRole, x: &'a mut [f64]) -> &'a mut [f64] {
        &mut x[self.range(role)]
    }
}

/// Integration domain for bulk integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// The physical subdomain, with cut cells integrated over their part.
    Physical(Side),
    /// Every active cell of the side in full.
    Computational(Side),
    /// Only the uncut cells of the side.
    Interior(Side),
}

impl Region {
    pub fn side(self) -> Side {
        match self {
            Region::Physical(s) | Region::Computational(s) | Region::Interior(s) => s,
        }
    }
}

#[derive(Debug, Clone)]
struct CutRules {
    fluid: QuadratureRule,
    solid: QuadratureRule,
    interface: InterfaceRule,
}

/// Mesh, cut topology, dof maps and cut-cell quadrature for one configuration.
#[derive(Debug, Clone)]
pub struct Discretization {
    config: SimulationConfig,
    mesh: Mesh,
    topology: CutTopology,
    velocity: DofMap,
    pressure: DofMap,
    solid: DofMap,
    layout: BlockLayout,
    cut_rules: Vec<Option<CutRules>>,
}

impl Discretization {
    pub fn new(config: &SimulationConfig) -> Result<Self> {
        config.validate()?;
        if !config.allow_large && config.h() < crate::config::MIN_MESH_WIDTH {
            return Err(Error::TooLarge(format!(
                "h = {} is below {}",
                config.h(),
                crate::config::MIN_MESH_WIDTH
            )));
        }
        let mesh = build_mesh(config.n)?;
        let level_set = LevelSet::circle(config.center, config.radius_squared)?;
        let topology = build_cut_topology(&mesh, &level_set)?;
        let velocity = DofMap::new(&mesh, &topology, Side::Fluid, config.m_f);
        let pressure = DofMap::new(&mesh, &topology, Side::Fluid, config.m_f - 1);
        let solid = DofMap::new(&mesh, &topology, Side::Solid, config.m_s);
        let layout = BlockLayout::new([velocity.n_dofs(), pressure.n_dofs(), solid.n_dofs(), solid.n_dofs()]);
        if !config.allow_large && layout.total() > crate::config::MAX_DOFS {
            return Err(Error::TooLarge(format!("{} unknowns", layout.total())));
        }
        let npts = config.quad_points_cut;
        let cut_rules = (0..mesh.n_cells())
            .map(|c| {
                topology.polar(c).map(|pc| CutRules {
                    fluid: cut_cell_rule(pc, Side::Fluid, npts),
                    solid: cut_cell_rule(pc, Side::Solid, npts),
                    interface: interface_rule(pc, 2 * npts),
                })
            })
            .collect();
        Ok(Self {
            config: config.clone(),
            mesh,
            topology,
            velocity,
            pressure,
            solid,
            layout,
            cut_rules,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn topology(&self) -> &CutTopology {
        &self.topology
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn h(&self) -> f64 {
        self.mesh.h()
    }

    pub fn dofmap(&self, role: FieldRole) -> &DofMap {
        match role {
            FieldRole::FluidVelocity => &self.velocity,
            FieldRole::Pressure => &self.pressure,
            FieldRole::SolidVelocity | FieldRole::Displacement => &self.solid,
        }
    }

    /// Cells that contribute to integrals over `region`.
    pub fn region_cells(&self, region: Region) -> Vec<usize> {
        let topo = &self.topology;
        (0..self.mesh.n_cells())
            .filter(|&c| match region {
                Region::Physical(s) | Region::Computational(s) => topo.is_active(c, s),
                Region::Interior(s) => topo.class(c).is_uncut_on(s),
            })
            .collect()
    }

    /// Quadrature for `cell` restricted to `region`, with `npts` points per
    /// direction on cells integrated in full.
    pub fn cell_rule(&self, cell: usize, region: Region, npts: usize) -> QuadratureRule {
        let (lo, hi) = self.mesh.cell_bounds(cell);
        match region {
            Region::Physical(side) if self.topology.class(cell) == CellClass::Cut => {
                let rules = self.cut_rules[cell].as_ref().expect("cut cell without rules");
                match side {
                    Side::Fluid => rules.fluid.clone(),
                    Side::Solid => rules.solid.clone(),
                }
            }
            Region::Interior(side) if !self.topology.class(cell).is_uncut_on(side) => QuadratureRule::default(),
            _ if !self.topology.is_active(cell, region.side()) => QuadratureRule::default(),
            _ => tensor_rule(lo, hi, npts),
        }
    }

    /// Bulk rule with the configured number of points.
    pub fn bulk_rule(&self, cell: usize, region: Region) -> QuadratureRule {
        self.cell_rule(cell, region, self.config.quad_points)
    }

    pub fn interface_rule(&self, cell: usize) -> Option<&InterfaceRule> {
        self.cut_rules[cell].as_ref().map(|r| &r.interface)
    }

    /// Global indices of `role` on `cell`, component-major.
    pub fn global_dofs(&self, cell: usize, role: FieldRole) -> Vec<usize> {
        let dm = self.dofmap(role);
        let local = dm.cell_dofs(cell);
        let mut out = Vec::with_capacity(local.len() * role.components());
        for c in 0..role.components() {
            out.extend(local.iter().map(|&d| self.layout.index(role, c, d as usize)));
        }
        out
    }
}
