//! Simulation of a tunable two-site single-photon interferometer with
//! polarization-tagged which-path marking and four-detector post-selection.
//!
//! The crate builds the full source → beam-splitter → detector pipeline as
//! explicit state-vector evolution, conditions on detector clicks, and
//! computes the complementarity metrics of the surviving path qubit:
//! predictability `P`, fringe visibility `V`, concurrence `C` with the
//! polarization tag, and distinguishability `D`. Every metric is available
//! through two independent routes (evolved state vs. closed form) so the
//! identities `P² + V² + C² = 1` and `D² = P² + C²` can be checked rather
//! than assumed.
//!
//! Modules:
//! - [`linalg`]: dense complex vectors/matrices for dimensions up to 16,
//!   tensor products, partial traces, Hermitian eigensolver.
//! - [`model`]: apparatus configuration, state evolution, detection.
//! - [`metrics`]: the P/V/C/D metrics and triality reports.
//! - [`screen`]: far-field fringe profiles and Monte Carlo sampling.
//! - [`scenario`]: the sectioned key=value scenario file format.
//! - [`run`]: pipeline entry points used by the CLI and the Python bindings.

pub mod linalg;
pub mod metrics;
pub mod model;
pub mod run;
pub mod scenario;
pub mod screen;

pub use linalg::{prod_spectrum_sqrt, ComplexMat, ComplexVec};
pub use metrics::{
    closed_form_triality, concurrence_mixed, concurrence_pure, distinguishability,
    evolved_triality, predictability, visibility, Route, TrialityReport,
};
pub use model::{
    apply_b1_b2, apply_b3, detect, detect_all, evolve, reduced_gamma_phi, source_state,
    unconditioned_rho_gamma, ApparatusConfig, ConditionalState, DetectionOutcome, Detector,
};
pub use scenario::{parse_scenario, serialize_scenario, Diagnostic, Scenario, SweepParameter};
pub use screen::{estimate_visibility, fringe_profile, sample, FringeProfile, SampleSet};

/// Absolute tolerance for structural invariants (normalization, Hermiticity,
/// unit trace).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Absolute tolerance for derived-quantity comparisons (identities between
/// independently computed values).
pub const DERIVED_TOL: f64 = 1e-10;

/// Eigenvalues in `[EIG_CLAMP_FLOOR, 0)` are treated as roundoff and clamped
/// to zero; anything more negative is a contract violation.
pub const EIG_CLAMP_FLOOR: f64 = -1e-10;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Shapes or register layouts do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A numerical contract was violated (non-Hermitian input, negative
    /// eigenvalue beyond roundoff, identity residual out of tolerance).
    #[error("numerical contract violation: {0}")]
    Contract(String),
    /// An apparatus configuration failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// The requested detector never clicks; the conditional state is
    /// undefined.
    #[error("detector {0} has zero click probability; conditional state undefined")]
    ZeroProbability(model::Detector),
}

pub type Result<T> = std::result::Result<T, Error>;
