//! Unfitted finite elements for a linear fluid-structure interaction problem
//! with a fixed circular interface.
//!
//! The fluid uses Taylor-Hood `Q2/Q1` elements and the solid equal-order
//! `Q_m` elements, each on the cells touched by its own subdomain. The two are
//! coupled with Nitsche's method, and ghost penalties on faces next to the
//! interface keep the system well conditioned for arbitrary cut positions.

// dense element kernels index several tables with the same loop variable
#![allow(clippy::needless_range_loop, clippy::too_many_arguments, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod config;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod sparse;
pub mod timestepper;
pub mod topology;

pub use config::SimulationConfig;
pub use error::{Error, Result};
