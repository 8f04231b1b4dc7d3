//! Closed-form discrimination limits for a known pair of pure states.
//!
//! Conventions: `overlap_magnitude` is `|<psi_plus|psi_minus>|`, priors are
//! `(eta_plus, eta_minus)`. All bounds are probabilities in [0, 1].

use crate::angles::cos_deg;
use crate::error::{CoreError, Result};
use crate::polarization::StatePair;

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(CoreError::InvalidProbability { name, value })
    }
}

fn check_priors(prior_plus: f64, prior_minus: f64) -> Result<()> {
    let ok = prior_plus.is_finite()
        && prior_minus.is_finite()
        && prior_plus >= 0.0
        && prior_minus >= 0.0
        && (prior_plus + prior_minus - 1.0).abs() <= 1e-12;
    if ok {
        Ok(())
    } else {
        Err(CoreError::InvalidPriors {
            plus: prior_plus,
            minus: prior_minus,
        })
    }
}

/// Minimum average error probability of any conclusive two-outcome
/// measurement: `(1 - sqrt(1 - 4 eta+ eta- s^2)) / 2`.
pub fn helstrom_bound(overlap_magnitude: f64, prior_plus: f64, prior_minus: f64) -> Result<f64> {
    check_probability("overlap_magnitude", overlap_magnitude)?;
    check_priors(prior_plus, prior_minus)?;
    let radicand =
        1.0 - 4.0 * prior_plus * prior_minus * overlap_magnitude * overlap_magnitude;
    // Rounding can push the radicand a hair below zero at s = 1, eta = 1/2;
    // anything further negative is impossible for validated inputs.
    debug_assert!(radicand >= -1e-12);
    Ok(0.5 * (1.0 - radicand.max(0.0).sqrt()))
}

/// Minimum inconclusive probability of any measurement that never
/// misidentifies either state, at equal priors: the overlap itself.
pub fn idp_bound(overlap_magnitude: f64) -> Result<f64> {
    check_probability("overlap_magnitude", overlap_magnitude)?;
    Ok(overlap_magnitude)
}

/// Error probability of the best projective measurement at equal priors for
/// the symmetric pair with half-angle `alpha_deg`: `(1 - sin 2a) / 2`.
///
/// For pure states at equal priors this coincides with the two-outcome
/// optimum, so it also serves as the reference value the projective grid
/// search must reproduce.
pub fn best_von_neumann_error(alpha_deg: f64) -> Result<f64> {
    if !alpha_deg.is_finite() || !(0.0..=45.0).contains(&alpha_deg) {
        return Err(CoreError::AngleOutOfRange {
            name: "alpha",
            value: alpha_deg,
            min: 0.0,
            max: 45.0,
        });
    }
    helstrom_bound(cos_deg(2.0 * alpha_deg), 0.5, 0.5)
}

/// All closed-form limits for one state pair, evaluated together.
#[derive(Clone, Copy, Debug)]
pub struct BoundsReport {
    pub overlap_magnitude: f64,
    /// Minimum-error limit at the pair's priors.
    pub helstrom_error: f64,
    /// Zero-error inconclusive floor at equal priors.
    pub idp_inconclusive: f64,
    /// Complement of `idp_inconclusive`.
    pub idp_conclusive: f64,
}

impl BoundsReport {
    pub fn for_pair(pair: &StatePair) -> Result<Self> {
        let s = pair.overlap().norm();
        let helstrom_error = helstrom_bound(s, pair.prior_plus, pair.prior_minus)?;
        let idp_inconclusive = idp_bound(s)?;
        Ok(Self {
            overlap_magnitude: s,
            helstrom_error,
            idp_inconclusive,
            idp_conclusive: 1.0 - idp_inconclusive,
        })
    }
}
