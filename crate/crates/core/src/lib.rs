//! Simulator and analysis toolkit for two-state polarization discrimination.
//!
//! The crate models a weak-pulse polarization interferometer at the amplitude
//! level (Jones calculus, 4x4 beam-splitter scattering matrices), evaluates
//! the closed-form discrimination limits it is compared against, and provides
//! brute-force searches over measurement families that certify those limits
//! numerically.
//!
//! Layout:
//! - [`angles`]: degree-based trig with exact quadrant values
//! - [`polarization`]: Jones vectors and the `psi_plus`/`psi_minus` state pair
//! - [`bounds`]: minimum-error and unambiguous-discrimination limits
//! - [`components`]: waveplates, polarizing splitters, calibration handling
//! - [`interferometer`]: mode-resolved propagation, alignment, per-state runs
//! - [`photon`]: pulse-ensemble count statistics and error-rate estimation
//! - [`oracle`]: grid searches over projective and zero-error measurements

pub mod angles;
pub mod bounds;
pub mod components;
pub mod error;
pub mod interferometer;
pub mod oracle;
pub mod photon;
pub mod polarization;

pub use bounds::{best_von_neumann_error, helstrom_bound, idp_bound, BoundsReport};
pub use components::{
    calibrated_pbs, half_waveplate, ideal_pbs, variable_loss_stage, PbsCalibration, PbsKind,
    PbsModel, VariableLossStage, WaveplateModel,
};
pub use error::{CoreError, Result};
pub use interferometer::{
    align, error_rates, orthogonalizing_wp4_angle, propagate, run_pair, DetectionProbabilities,
    InterferometerConfig, Mode, ModeState, PbsSet, Pol,
};
pub use oracle::{
    idp_povm_search, unequal_prior_inconclusive, von_neumann_search, OracleReport,
    ProjectiveStrategy, StrategyParams, ZeroErrorPovm,
};
pub use photon::{
    error_rate_estimate, expected_counts, sample_counts, CountsRecord, Detector, PulseEnsemble,
};
pub use polarization::{make_states, overlap, JonesVector, StatePair};
