//! Wave-particle duality numerics for n-path interference.
//!
//! The crate computes the duality quantities of an n-path quanton state —
//! the l1 coherence C, the path predictability P, the rms visibility V and
//! the detector distinguishability D — checks the duality budget
//! P² + C² ≤ 1 with its pure-state saturation, generates seeded random
//! state ensembles for Monte-Carlo verification, and renders the far-field
//! fringe pattern a state produces.
//!
//! Everything is a pure function over immutable values; states validate at
//! construction (Hermitian, unit trace, positive semi-definite within fixed
//! tolerances) so the measures never see garbage.

pub mod ensembles;
pub mod error;
pub mod interference;
pub mod io;
pub mod measures;
pub mod state;

mod num;

pub use ensembles::{
    family_states, sample_mixed, sample_pure, EnsembleKind, EnsembleSpec, FamilyKind,
    FamilySpec, SampledState, GENERATOR_ID,
};
pub use error::{Error, Result};
pub use interference::{fringe_visibility, pattern, PhasePattern};
pub use measures::{
    coherence, distinguishability, duality_report, duality_sum_forms, durr_visibility,
    fmt_g17, gy_predictability, perturbed_predictability, predictability, three_slit_forms,
    DetectorGram, MeasureReport, RESIDUAL_TOL,
};
pub use state::{
    validate, PureState, QuantonState, ValidationReport, Verdict, SUPPORTED_MAX_PATHS,
    TOL_HERMITIAN, TOL_PSD_SCALE, TOL_TRACE,
};
