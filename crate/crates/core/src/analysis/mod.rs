//! Norms, energies, errors and verification checks.

pub mod checks;
pub mod decay;
pub mod energy;
pub mod error;
pub mod extension;
pub mod norms;
pub mod study;

pub use checks::{Check, CheckContext, CheckOutcome, CheckRegistry};
pub use decay::{random_initial_state, verify_energy_decay, DecayReport, DECAY_TOLERANCE};
pub use energy::{decay_functional, energy, EnergySnapshot, GhostMatrices};
pub use error::{convergence_order, format_sci, error_vs_reference, ErrorReport, ERROR_LABELS, N_ERRORS};
pub use extension::{
    gram_matrix, verify_ghost_extension, ExtensionBase, ExtensionParams, ExtensionProblem, ExtensionReport,
};
pub use norms::{elastic_density, field_integral, field_norm_squared, interface_jump_squared, NormKind};
pub use study::{run_study, RunDiagnostics, StudyMode, StudyResult};
