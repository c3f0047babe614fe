//! Cell weights scaling the ghost penalty on each face.

use crate::error::{Error, Result};
use crate::geometry::Side;
use crate::mesh::Mesh;
use crate::topology::CutTopology;

/// Maps the cut fraction of a cell to its share of the face weight.
pub trait GhostWeight: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn weight(&self, kappa: f64) -> f64;
}

/// The classical unweighted penalty, `w = 1/2` for every cell.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnweightedGhost;

impl GhostWeight for UnweightedGhost {
    fn name(&self) -> &'static str {
        "unweighted"
    }

    fn weight(&self, _kappa: f64) -> f64 {
        0.5
    }
}

/// `w(kappa) = w_max^(1 - 2 kappa) / 2`, which is larger on cells with a small
/// share of the subdomain.
#[derive(Debug, Clone, Copy)]
pub struct FractionWeight {
    pub w_max: f64,
}

impl GhostWeight for FractionWeight {
    fn name(&self) -> &'static str {
        "fraction"
    }

    fn weight(&self, kappa: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&kappa));
        0.5 * self.w_max.powf(1.0 - 2.0 * kappa)
    }
}

/// Builds a weight strategy by name.
pub fn weight_strategy(name: &str, w_max: f64) -> Result<Box<dyn GhostWeight>> {
    match name {
        "unweighted" => Ok(Box::new(UnweightedGhost)),
        "fraction" => Ok(Box::new(FractionWeight { w_max })),
        _ => Err(Error::UnknownStrategy {
            kind: "ghost weight",
            name: name.to_string(),
            known: "unweighted, fraction".into(),
        }),
    }
}

/// `w_F`: sum of the weights of the two cells sharing `face`.
pub fn face_weight(mesh: &Mesh, topology: &CutTopology, face: usize, side: Side, weight: &dyn GhostWeight) -> f64 {
    mesh.face(face)
        .cells
        .iter()
        .flatten()
        .map(|&c| weight.weight(topology.cut_fraction(c, side)))
        .sum()
}
