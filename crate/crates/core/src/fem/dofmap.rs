//! Global numbering of Lagrange nodes on the active cells of one side.

use crate::geometry::{Point, Side};
use crate::mesh::Mesh;
use crate::topology::CutTopology;

use super::basis::{CellMap, ReferenceBasis};

/// The four unknown fields of the coupled problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldRole {
    FluidVelocity,
    Pressure,
    SolidVelocity,
    Displacement,
}

impl FieldRole {
    pub const ALL: [FieldRole; 4] = [
        FieldRole::FluidVelocity,
        FieldRole::Pressure,
        FieldRole::SolidVelocity,
        FieldRole::Displacement,
    ];

    pub fn side(self) -> Side {
        match self {
            FieldRole::FluidVelocity | FieldRole::Pressure => Side::Fluid,
            FieldRole::SolidVelocity | FieldRole::Displacement => Side::Solid,
        }
    }

    pub fn components(self) -> usize {
        match self {
            FieldRole::Pressure => 1,
            _ => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FieldRole::FluidVelocity => "fluid_velocity",
            FieldRole::Pressure => "pressure",
            FieldRole::SolidVelocity => "solid_velocity",
            FieldRole::Displacement => "displacement",
        }
    }
}

/// Scalar node numbering of a continuous `Q_order` space restricted to the
/// active cells of one side. Vector fields reuse it per component.
#[derive(Debug, Clone)]
pub struct DofMap {
    side: Side,
    basis: ReferenceBasis,
    h: f64,
    origins: Vec<Point>,
    cell_dofs: Vec<u32>,
    active: Vec<bool>,
    coords: Vec<Point>,
    boundary: Vec<usize>,
}

const INACTIVE: u32 = u32::MAX;

impl DofMap {
    pub fn new(mesh: &Mesh, topology: &CutTopology, side: Side, order: usize) -> Self {
        let n = mesh.n();
        let lattice = order * n + 1;
        let basis = ReferenceBasis::new(order);
        let nloc = basis.n_dofs();
        let active: Vec<bool> = (0..mesh.n_cells()).map(|c| topology.is_active(c, side)).collect();
        let mut numbering = vec![INACTIVE; lattice * lattice];
        let node_of = |cell: usize, local: usize| {
            let (i, j) = mesh.cell_ij(cell);
            let (a, b) = (local % (order + 1), local / (order + 1));
            (j * order + b) * lattice + i * order + a
        };
        for c in (0..mesh.n_cells()).filter(|&c| active[c]) {
            for l in 0..nloc {
                numbering[node_of(c, l)] = 0;
            }
        }
        let mut coords = Vec::new();
        let mut boundary = Vec::new();
        let spacing = mesh.h() / order as f64;
        for (node, slot) in numbering.iter_mut().enumerate() {
            if *slot == INACTIVE {
                continue;
            }
            let id = coords.len();
            *slot = id as u32;
            let (ii, jj) = (node % lattice, node / lattice);
            coords.push([
                Mesh::LOWER[0] + ii as f64 * spacing,
                Mesh::LOWER[1] + jj as f64 * spacing,
            ]);
            if ii == 0 || jj == 0 || ii == lattice - 1 || jj == lattice - 1 {
                boundary.push(id);
            }
        }
        let mut cell_dofs = vec![INACTIVE; mesh.n_cells() * nloc];
        for c in (0..mesh.n_cells()).filter(|&c| active[c]) {
            for l in 0..nloc {
                cell_dofs[c * nloc + l] = numbering[node_of(c, l)];
            }
        }
        Self {
            side,
            basis,
            h: mesh.h(),
            origins: (0..mesh.n_cells()).map(|c| mesh.cell_origin(c)).collect(),
            cell_dofs,
            active,
            coords,
            boundary,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn n_dofs(&self) -> usize {
        self.coords.len()
    }

    pub fn dofs_per_cell(&self) -> usize {
        self.basis.n_dofs()
    }

    pub fn is_active(&self, cell: usize) -> bool {
        self.active[cell]
    }

    pub fn cell_map(&self, cell: usize) -> CellMap {
        CellMap {
            origin: self.origins[cell],
            h: self.h,
        }
    }

    /// Global scalar dofs of an active cell in local order.
    pub fn cell_dofs(&self, cell: usize) -> &[u32] {
        debug_assert!(self.active[cell], "cell {cell} is not active");
        let nloc = self.basis.n_dofs();
        &self.cell_dofs[cell * nloc..(cell + 1) * nloc]
    }

    pub fn coordinates(&self) -> &[Point] {
        &self.coords
    }

    /// Scalar dofs on the outer boundary of the square.
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary
    }
}
