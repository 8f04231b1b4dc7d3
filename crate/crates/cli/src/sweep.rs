//! Angle sweeps over the aligned circuit, with optional photon counting and
//! deterministic CSV rendering.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use idpsim_core::angles::cos_deg;
use idpsim_core::photon::{DEFAULT_EFFICIENCY, DEFAULT_MEAN_PHOTONS};
use idpsim_core::{
    align, best_von_neumann_error, error_rates, idp_bound, make_states, run_pair, sample_counts,
    CountsRecord, InterferometerConfig, PbsCalibration, PbsSet, PulseEnsemble,
};
use rayon::prelude::*;

use crate::fmt::format_sig9;

/// Grid values within this distance of the stop angle are snapped onto it so
/// accumulated floating-point drift cannot drop or duplicate the final row.
const GRID_SNAP: f64 = 1e-9;

/// Error-rate averages in the summary cover swept angles in this half-open
/// window (low exclusive, high inclusive), in degrees.
pub const ERROR_WINDOW: (f64, f64) = (14.0, 45.0);

/// Which splitter model a sweep runs against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelTag {
    /// Textbook splitters: perfect transmission/reflection separation.
    Ideal,
    /// All four splitters built from a measured power-fraction table.
    Calibrated,
}

impl ModelTag {
    pub fn label(self) -> &'static str {
        match self {
            ModelTag::Ideal => "ideal",
            ModelTag::Calibrated => "calibrated",
        }
    }
}

/// Everything one sweep run depends on. `n_pulses = 0` means analytic
/// probabilities only (no Monte Carlo columns).
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub alpha_start: f64,
    pub alpha_stop: f64,
    pub alpha_step: f64,
    pub model: ModelTag,
    pub calibration_path: Option<PathBuf>,
    pub mean_photons: f64,
    pub n_pulses: u64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha_start: 0.0,
            alpha_stop: 45.0,
            alpha_step: 4.0,
            model: ModelTag::Ideal,
            calibration_path: None,
            mean_photons: DEFAULT_MEAN_PHOTONS,
            n_pulses: 0,
            seed: 0,
            output_path: None,
        }
    }
}

/// Monte Carlo results attached to one row: one counting run per prepared
/// state. The row's printed seed is the one used for the `plus` record; the
/// `minus` record uses a seed derived from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowCounts {
    pub plus: CountsRecord,
    pub minus: CountsRecord,
}

/// One swept angle's outputs. Error rates are conditional on a detection and
/// undefined at `alpha = 0`, where the two prepared states coincide.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub alpha: f64,
    pub ideal_inconclusive: f64,
    pub simulated_inconclusive: f64,
    pub idp_bound_value: f64,
    pub error_rate_plus: Option<f64>,
    pub error_rate_minus: Option<f64>,
    pub best_von_neumann: f64,
    pub wp4_angle: f64,
    pub model_tag: ModelTag,
    pub counts: Option<RowCounts>,
}

/// Whole-sweep statistics. Means are `NaN` when no swept angle falls in the
/// error window.
#[derive(Clone, Copy, Debug)]
pub struct SweepSummary {
    /// sqrt(mean over rows of (simulated - ideal inconclusive)^2), in percent.
    pub rms_inconclusive_deviation_pct: f64,
    pub mean_error_rate_plus: f64,
    pub mean_error_rate_minus: f64,
    pub mean_error_rate_both: f64,
}

/// SplitMix64 finalizer; the standard 64-bit mixing step used to derive
/// independent per-row RNG seeds from the master seed.
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for row `idx`'s `plus` counting run. Depends only on the master seed
/// and the row index, so parallel row evaluation cannot change the draws.
pub(crate) fn row_seed(master: u64, idx: usize) -> u64 {
    splitmix64(master ^ (idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Builds the swept angle list: `start + k * step` while within `stop`,
/// snapping the final point onto `stop` when it lands within [`GRID_SNAP`].
pub fn alpha_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
        bail!("alpha grid bounds must be finite (got start {start}, stop {stop}, step {step})");
    }
    if step <= 0.0 {
        bail!("--alpha-step must be positive, got {step}");
    }
    if start > stop {
        bail!("--alpha-start ({start}) must not exceed --alpha-stop ({stop})");
    }
    if start < 0.0 || stop > 45.0 {
        bail!("alpha range must lie within [0, 45] degrees (got {start}..{stop})");
    }
    let mut grid = Vec::new();
    for k in 0u64.. {
        let alpha = start + k as f64 * step;
        if alpha > stop + GRID_SNAP {
            break;
        }
        grid.push(if (alpha - stop).abs() <= GRID_SNAP {
            stop
        } else {
            alpha
        });
    }
    Ok(grid)
}

/// Reads and parses a splitter calibration file.
pub fn load_calibration(path: &Path) -> Result<PbsCalibration> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read calibration file `{}`", path.display()))?;
    PbsCalibration::parse(&text)
        .with_context(|| format!("invalid calibration file `{}`", path.display()))
}

fn pbs_set_for(config: &RunConfig) -> Result<PbsSet> {
    match config.model {
        ModelTag::Ideal => Ok(PbsSet::ideal()),
        ModelTag::Calibrated => {
            let path = config.calibration_path.as_deref().ok_or_else(|| {
                anyhow::anyhow!("the calibrated model needs a calibration file path")
            })?;
            let cal = load_calibration(path)?;
            Ok(PbsSet::from_calibration(&cal)?)
        }
    }
}

fn compute_row(
    alpha: f64,
    model: ModelTag,
    base: &InterferometerConfig,
    ensemble: Option<PulseEnsemble>,
    seed: u64,
) -> Result<SweepRow> {
    let cfg = align(alpha, base)?;
    let (plus, minus) = run_pair(alpha, &cfg)?;
    let (error_rate_plus, error_rate_minus) = error_rates(&plus, &minus, alpha);
    let pair = make_states(alpha)?;
    let total = plus.total();
    let simulated_inconclusive = if total > 0.0 {
        plus.p_pd3 / total
    } else {
        f64::NAN
    };
    let counts = match ensemble {
        Some(ens) => Some(RowCounts {
            plus: sample_counts(&plus, &ens, seed)?,
            minus: sample_counts(&minus, &ens, splitmix64(seed))?,
        }),
        None => None,
    };
    Ok(SweepRow {
        alpha,
        ideal_inconclusive: cos_deg(2.0 * alpha),
        simulated_inconclusive,
        idp_bound_value: idp_bound(pair.overlap().norm())?,
        error_rate_plus,
        error_rate_minus,
        best_von_neumann: best_von_neumann_error(alpha)?,
        wp4_angle: cfg.wp4_angle,
        model_tag: model,
        counts,
    })
}

/// Runs the full sweep: aligns the circuit at each angle, propagates both
/// prepared states, evaluates the closed-form limits, and (when `n_pulses >
/// 0`) draws one counting run per state. Rows are computed in parallel and
/// returned in ascending-angle order.
pub fn run_sweep(config: &RunConfig) -> Result<(Vec<SweepRow>, SweepSummary)> {
    let grid = alpha_grid(config.alpha_start, config.alpha_stop, config.alpha_step)?;
    let base = InterferometerConfig::new(pbs_set_for(config)?);
    let ensemble = if config.n_pulses > 0 {
        Some(PulseEnsemble::new(
            config.mean_photons,
            config.n_pulses,
            DEFAULT_EFFICIENCY,
        )?)
    } else {
        None
    };
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(idx, &alpha)| {
            compute_row(alpha, config.model, &base, ensemble, row_seed(config.seed, idx))
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&rows);
    Ok((rows, summary))
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Whole-sweep statistics: RMS deviation of the simulated inconclusive
/// fraction from its ideal curve (in percent, over all rows) and mean error
/// rates over the [`ERROR_WINDOW`] angles.
pub fn summarize(rows: &[SweepRow]) -> SweepSummary {
    let rms = if rows.is_empty() {
        f64::NAN
    } else {
        let mean_sq = rows
            .iter()
            .map(|r| {
                let d = r.simulated_inconclusive - r.ideal_inconclusive;
                d * d
            })
            .sum::<f64>()
            / rows.len() as f64;
        mean_sq.sqrt() * 100.0
    };
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for row in rows {
        if row.alpha > ERROR_WINDOW.0 && row.alpha <= ERROR_WINDOW.1 {
            if let Some(v) = row.error_rate_plus {
                plus.push(v);
            }
            if let Some(v) = row.error_rate_minus {
                minus.push(v);
            }
        }
    }
    let both: Vec<f64> = plus.iter().chain(minus.iter()).copied().collect();
    SweepSummary {
        rms_inconclusive_deviation_pct: rms,
        mean_error_rate_plus: mean(&plus),
        mean_error_rate_minus: mean(&minus),
        mean_error_rate_both: mean(&both),
    }
}

/// Column names common to every sweep.
pub const BASE_HEADER: &str = "alpha,ideal_inconclusive,simulated_inconclusive,idp_bound_value,\
error_rate_plus,error_rate_minus,best_von_neumann,wp4_angle,model_tag";

/// Extra columns present when Monte Carlo counting is enabled.
pub const COUNTS_HEADER: &str = "expected_pd1_plus,expected_pd2_plus,expected_pd3_plus,\
sampled_pd1_plus,sampled_pd2_plus,sampled_pd3_plus,expected_pd1_minus,expected_pd2_minus,\
expected_pd3_minus,sampled_pd1_minus,sampled_pd2_minus,sampled_pd3_minus,row_seed";

fn opt_sig9(value: Option<f64>) -> String {
    value.map(format_sig9).unwrap_or_default()
}

/// Renders rows plus summary as UTF-8 CSV text: one header line, one line per
/// angle in the given order, then the summary as `#`-prefixed comment lines.
/// Floats carry nine significant digits; undefined error rates print as empty
/// fields. Output is byte-deterministic for identical inputs.
pub fn render_csv(rows: &[SweepRow], summary: &SweepSummary, with_counts: bool) -> String {
    let mut out = String::new();
    out.push_str(BASE_HEADER);
    if with_counts {
        out.push(',');
        out.push_str(COUNTS_HEADER);
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}",
            format_sig9(row.alpha),
            format_sig9(row.ideal_inconclusive),
            format_sig9(row.simulated_inconclusive),
            format_sig9(row.idp_bound_value),
            opt_sig9(row.error_rate_plus),
            opt_sig9(row.error_rate_minus),
            format_sig9(row.best_von_neumann),
            format_sig9(row.wp4_angle),
            row.model_tag.label(),
        ));
        if with_counts {
            match &row.counts {
                Some(c) => {
                    for rec in [&c.plus, &c.minus] {
                        for expected in rec.expected {
                            out.push(',');
                            out.push_str(&format_sig9(expected));
                        }
                        for sampled in rec.sampled {
                            out.push_str(&format!(",{sampled}"));
                        }
                    }
                    out.push_str(&format!(",{}", c.plus.seed));
                }
                None => out.push_str(&",".repeat(13)),
            }
        }
        out.push('\n');
    }
    out.push_str(&format!(
        "# rms_inconclusive_deviation_pct = {}\n",
        format_sig9(summary.rms_inconclusive_deviation_pct)
    ));
    out.push_str(&format!(
        "# mean_error_rate_plus_over_14_45 = {}\n",
        format_sig9(summary.mean_error_rate_plus)
    ));
    out.push_str(&format!(
        "# mean_error_rate_minus_over_14_45 = {}\n",
        format_sig9(summary.mean_error_rate_minus)
    ));
    out.push_str(&format!(
        "# mean_error_rate_over_14_45 = {}\n",
        format_sig9(summary.mean_error_rate_both)
    ));
    out
}

/// Writes the rendered CSV to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(
    rows: &[SweepRow],
    summary: &SweepSummary,
    with_counts: bool,
    path: Option<&Path>,
) -> Result<()> {
    let text = render_csv(rows, summary, with_counts);
    match path {
        Some(p) => std::fs::write(p, text)
            .with_context(|| format!("cannot write output file `{}`", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
