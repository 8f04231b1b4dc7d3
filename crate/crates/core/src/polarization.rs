//! Jones vectors and the symmetric two-state ensemble under study.

use num_complex::Complex64;

use crate::angles::{cos_deg, sin_deg};
use crate::error::{CoreError, Result};

/// States handed to physical operations must be normalized to this tolerance.
pub const NORM_TOLERANCE: f64 = 1e-9;

const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

/// Complex field amplitudes on the horizontal/vertical polarization basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesVector {
    pub h: Complex64,
    pub v: Complex64,
}

impl JonesVector {
    pub fn new(h: Complex64, v: Complex64) -> Self {
        Self { h, v }
    }

    pub fn from_real(h: f64, v: f64) -> Self {
        Self::new(Complex64::new(h, 0.0), Complex64::new(v, 0.0))
    }

    pub fn horizontal() -> Self {
        Self::from_real(1.0, 0.0)
    }

    pub fn vertical() -> Self {
        Self::from_real(0.0, 1.0)
    }

    /// Linear polarization at `angle_deg` from horizontal.
    pub fn linear(angle_deg: f64) -> Self {
        Self::from_real(cos_deg(angle_deg), sin_deg(angle_deg))
    }

    pub fn norm_sq(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub(crate) fn check_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(CoreError::NotNormalized {
                norm_sq: self.norm_sq(),
                tolerance: NORM_TOLERANCE,
            })
        }
    }
}

/// Inner product `<a|b>` of two normalized states.
pub fn overlap(a: &JonesVector, b: &JonesVector) -> Result<Complex64> {
    a.check_normalized()?;
    b.check_normalized()?;
    Ok(a.h.conj() * b.h + a.v.conj() * b.v)
}

/// The symmetric pair cos(a)|H> +- sin(a)|V> with its prior probabilities.
#[derive(Clone, Copy, Debug)]
pub struct StatePair {
    pub psi_plus: JonesVector,
    pub psi_minus: JonesVector,
    /// Half-angle between the states, in degrees; 0 = identical, 45 = orthogonal.
    pub alpha: f64,
    pub prior_plus: f64,
    pub prior_minus: f64,
}

/// Builds the equal-prior pair for a half-angle in [0, 45] degrees.
pub fn make_states(alpha_deg: f64) -> Result<StatePair> {
    if !alpha_deg.is_finite() || !(0.0..=45.0).contains(&alpha_deg) {
        return Err(CoreError::AngleOutOfRange {
            name: "alpha",
            value: alpha_deg,
            min: 0.0,
            max: 45.0,
        });
    }
    let (c, s) = (cos_deg(alpha_deg), sin_deg(alpha_deg));
    Ok(StatePair {
        psi_plus: JonesVector::from_real(c, s),
        psi_minus: JonesVector::from_real(c, -s),
        alpha: alpha_deg,
        prior_plus: 0.5,
        prior_minus: 0.5,
    })
}

impl StatePair {
    /// Replaces the priors, which must be nonnegative and sum to 1.
    pub fn with_priors(mut self, prior_plus: f64, prior_minus: f64) -> Result<Self> {
        let ok = prior_plus.is_finite()
            && prior_minus.is_finite()
            && prior_plus >= 0.0
            && prior_minus >= 0.0
            && (prior_plus + prior_minus - 1.0).abs() <= PRIOR_SUM_TOLERANCE;
        if !ok {
            return Err(CoreError::InvalidPriors {
                plus: prior_plus,
                minus: prior_minus,
            });
        }
        self.prior_plus = prior_plus;
        self.prior_minus = prior_minus;
        Ok(self)
    }

    pub fn overlap(&self) -> Complex64 {
        overlap(&self.psi_plus, &self.psi_minus).expect("prepared states are normalized")
    }
}
