//! Sweep runner and self-check suite for the polarization-discrimination
//! simulator.
//!
//! - [`sweep`]: aligned angle sweeps, Monte Carlo counting, CSV rendering
//! - [`verify`]: end-to-end checks with pinned tolerances and budgets
//! - [`fmt`]: nine-significant-digit number formatting for CSV output

pub mod fmt;
pub mod sweep;
pub mod verify;

pub use sweep::{
    alpha_grid, emit_csv, load_calibration, render_csv, run_sweep, summarize, ModelTag,
    RowCounts, RunConfig, SweepRow, SweepSummary,
};
pub use verify::{verify_all, CheckOutcome};
