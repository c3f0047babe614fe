//! Cut classification of background cells, cut fractions, active meshes and
//! ghost-penalty face sets.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::{LevelSet, PointClass, PolarCell, Side};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    FluidOnly,
    SolidOnly,
    Cut,
}

impl CellClass {
    pub fn code(self) -> u8 {
        match self {
            CellClass::FluidOnly => 0,
            CellClass::SolidOnly => 1,
            CellClass::Cut => 2,
        }
    }

    pub fn is_uncut_on(self, side: Side) -> bool {
        matches!(
            (self, side),
            (CellClass::FluidOnly, Side::Fluid) | (CellClass::SolidOnly, Side::Solid)
        )
    }
}

/// Classifies a cell from its corners, the sign changes along its edges and
/// whether the circle center lies inside it.
pub fn classify_cell(level_set: &LevelSet, mesh: &Mesh, cell: usize) -> Result<CellClass> {
    let corners = mesh.cell_corners(cell);
    let classes = corners.map(|p| level_set.classify(p));
    let has_solid = classes.contains(&PointClass::Solid);
    let has_fluid = classes.contains(&PointClass::Fluid);
    let on_interface = classes.contains(&PointClass::Interface);
    let bulge = (0..4).any(|e| level_set.transversal_crossings(corners[e], corners[(e + 1) % 4]) > 0);
    let (lo, hi) = mesh.cell_bounds(cell);
    let c = level_set.center();
    let holds_center = c[0] > lo[0] && c[0] < hi[0] && c[1] > lo[1] && c[1] < hi[1];

    let cut = (has_solid && has_fluid) || bulge || (holds_center && !has_solid);
    if cut && on_interface {
        return Err(Error::DegenerateCut {
            cell,
            reason: "the interface passes through a cell vertex".into(),
        });
    }
    if cut {
        return Ok(CellClass::Cut);
    }
    let solid = if has_solid || has_fluid {
        has_solid
    } else {
        level_set.classify(mesh.cell_center(cell)) == PointClass::Solid
    };
    Ok(if solid {
        CellClass::SolidOnly
    } else {
        CellClass::FluidOnly
    })
}

/// Maximum number of ghost faces crossed from a cut cell to the closest uncut
/// cell of one side, and the largest number of such paths through one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathReport {
    pub side: Side,
    pub max_faces: usize,
    pub max_reuse: usize,
}

/// Everything derived from intersecting the mesh with the interface.
#[derive(Debug, Clone)]
pub struct CutTopology {
    level_set: LevelSet,
    classes: Vec<CellClass>,
    kappa_fluid: Vec<f64>,
    kappa_solid: Vec<f64>,
    polar: Vec<Option<Box<PolarCell>>>,
    ghost_fluid: Vec<usize>,
    ghost_solid: Vec<usize>,
}

/// Classifies every cell and collects the ghost faces of both sides.
pub fn build_cut_topology(mesh: &Mesh, level_set: &LevelSet) -> Result<CutTopology> {
    let nc = mesh.n_cells();
    let h2 = mesh.h() * mesh.h();
    let mut classes = Vec::with_capacity(nc);
    let mut kappa_fluid = vec![0.0; nc];
    let mut kappa_solid = vec![0.0; nc];
    let mut polar = vec![None; nc];
    for cell in 0..nc {
        let class = classify_cell(level_set, mesh, cell)?;
        match class {
            CellClass::FluidOnly => kappa_fluid[cell] = 1.0,
            CellClass::SolidOnly => kappa_solid[cell] = 1.0,
            CellClass::Cut => {
                let (lo, hi) = mesh.cell_bounds(cell);
                let pc = PolarCell::new(level_set, lo, hi);
                let (ks, kf) = (pc.solid_area() / h2, pc.fluid_area() / h2);
                if !(ks > 0.0 && kf > 0.0) || pc.arcs.is_empty() {
                    return Err(Error::DegenerateCut {
                        cell,
                        reason: format!("cut fractions solid {ks:e}, fluid {kf:e}"),
                    });
                }
                if ks <= kf {
                    kappa_solid[cell] = ks;
                    kappa_fluid[cell] = 1.0 - ks;
                } else {
                    kappa_fluid[cell] = kf;
                    kappa_solid[cell] = 1.0 - kf;
                }
                polar[cell] = Some(Box::new(pc));
            }
        }
        classes.push(class);
    }
    let mut topo = CutTopology {
        level_set: *level_set,
        classes,
        kappa_fluid,
        kappa_solid,
        polar,
        ghost_fluid: Vec::new(),
        ghost_solid: Vec::new(),
    };
    for (f, face) in mesh.faces().iter().enumerate() {
        let (Some(a), Some(b)) = (face.cells[0], face.cells[1]) else {
            continue;
        };
        if topo.classes[a] != CellClass::Cut && topo.classes[b] != CellClass::Cut {
            continue;
        }
        if topo.is_active(a, Side::Fluid) && topo.is_active(b, Side::Fluid) {
            topo.ghost_fluid.push(f);
        }
        if topo.is_active(a, Side::Solid) && topo.is_active(b, Side::Solid) {
            topo.ghost_solid.push(f);
        }
    }
    Ok(topo)
}

impl CutTopology {
    pub fn level_set(&self) -> &LevelSet {
        &self.level_set
    }

    pub fn n_cells(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, cell: usize) -> CellClass {
        self.classes[cell]
    }

    pub fn classes(&self) -> &[CellClass] {
        &self.classes
    }

    /// Area fraction of `cell` occupied by `side`.
    pub fn cut_fraction(&self, cell: usize, side: Side) -> f64 {
        match side {
            Side::Fluid => self.kappa_fluid[cell],
            Side::Solid => self.kappa_solid[cell],
        }
    }

    /// Whether the cell belongs to the active mesh of `side`.
    pub fn is_active(&self, cell: usize, side: Side) -> bool {
        self.cut_fraction(cell, side) > 0.0
    }

    pub fn active_cells(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_cells()).filter(move |&c| self.is_active(c, side))
    }

    pub fn cut_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_cells()).filter(move |&c| self.classes[c] == CellClass::Cut)
    }

    pub fn polar(&self, cell: usize) -> Option<&PolarCell> {
        self.polar[cell].as_deref()
    }

    pub fn ghost_faces(&self, side: Side) -> &[usize] {
        match side {
            Side::Fluid => &self.ghost_fluid,
            Side::Solid => &self.ghost_solid,
        }
    }

    /// Smallest nonzero cut fraction of `side` over all cut cells.
    pub fn min_cut_fraction(&self, side: Side) -> Option<f64> {
        self.cut_cells()
            .map(|c| self.cut_fraction(c, side))
            .min_by(|a, b| a.partial_cmp(b).unwrap())
    }

    /// Breadth-first search from the uncut cells of `side` across ghost faces.
    /// Fails if some cut cell cannot reach an uncut cell.
    pub fn path_report(&self, mesh: &Mesh, side: Side) -> Result<PathReport> {
        let nc = self.n_cells();
        let ghost: std::collections::HashSet<usize> = self.ghost_faces(side).iter().copied().collect();
        let mut dist = vec![usize::MAX; nc];
        let mut parent = vec![usize::MAX; nc];
        let mut queue = VecDeque::new();
        for c in 0..nc {
            if self.classes[c].is_uncut_on(side) {
                dist[c] = 0;
                queue.push_back(c);
            }
        }
        while let Some(c) = queue.pop_front() {
            for (f, nb) in mesh.cell_neighbors(c) {
                if ghost.contains(&f) && dist[nb] == usize::MAX {
                    dist[nb] = dist[c] + 1;
                    parent[nb] = c;
                    queue.push_back(nb);
                }
            }
        }
        let mut reuse = vec![0usize; nc];
        let mut max_faces = 0;
        for c in self.cut_cells() {
            if dist[c] == usize::MAX {
                return Err(Error::PathAssumption(format!(
                    "cut cell {c} has no ghost-face path to an uncut {} cell",
                    side.label()
                )));
            }
            max_faces = max_faces.max(dist[c]);
            let mut k = c;
            loop {
                reuse[k] += 1;
                if dist[k] == 0 {
                    break;
                }
                k = parent[k];
            }
        }
        Ok(PathReport {
            side,
            max_faces,
            max_reuse: reuse.into_iter().max().unwrap_or(0),
        })
    }
}
