//! Weak-pulse counting statistics.
//!
//! A run sends `n_pulses` attenuated pulses with `mean_photons_per_pulse`
//! photons each through the setup. The expected count at a detector is
//! `n_pulses * mean_photons_per_pulse * detector_efficiency * p_detector`;
//! sampled counts draw each detector independently from a Poisson law of
//! that mean (valid in the regime where multi-photon coincidences are
//! negligible).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{CoreError, Result};
use crate::interferometer::DetectionProbabilities;

/// Default source intensity, photons per pulse.
pub const DEFAULT_MEAN_PHOTONS: f64 = 0.2;

/// Default detector quantum efficiency.
pub const DEFAULT_EFFICIENCY: f64 = 0.83;

/// Default fractional noise floor of the analog detection chain, added in
/// quadrature to shot noise by [`error_rate_estimate`].
pub const ANALOG_NOISE_FLOOR: f64 = 0.025;

/// The monitored detectors, in record order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detector {
    Pd1 = 0,
    Pd2 = 1,
    Pd3 = 2,
}

impl Detector {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Source and detection parameters of a counting run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseEnsemble {
    pub mean_photons_per_pulse: f64,
    pub n_pulses: u64,
    pub detector_efficiency: f64,
}

impl PulseEnsemble {
    pub fn new(
        mean_photons_per_pulse: f64,
        n_pulses: u64,
        detector_efficiency: f64,
    ) -> Result<Self> {
        if !mean_photons_per_pulse.is_finite() || mean_photons_per_pulse <= 0.0 {
            return Err(CoreError::InvalidParameter {
                name: "mean_photons_per_pulse",
                value: mean_photons_per_pulse,
            });
        }
        if n_pulses == 0 {
            return Err(CoreError::EmptyEnsemble);
        }
        if !detector_efficiency.is_finite()
            || detector_efficiency <= 0.0
            || detector_efficiency > 1.0
        {
            return Err(CoreError::InvalidParameter {
                name: "detector_efficiency",
                value: detector_efficiency,
            });
        }
        Ok(Self {
            mean_photons_per_pulse,
            n_pulses,
            detector_efficiency,
        })
    }
}

/// Expected and sampled counts of one run, with the seed that produced the
/// sample. Detector order is `[PD1, PD2, PD3]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountsRecord {
    pub expected: [f64; 3],
    pub sampled: [u64; 3],
    pub seed: u64,
}

impl CountsRecord {
    pub fn expected_for(&self, detector: Detector) -> f64 {
        self.expected[detector.index()]
    }

    pub fn sampled_for(&self, detector: Detector) -> u64 {
        self.sampled[detector.index()]
    }

    pub fn total_sampled(&self) -> u64 {
        self.sampled.iter().sum()
    }
}

fn check_probabilities(probs: &DetectionProbabilities) -> Result<()> {
    for (name, p) in [
        ("p_pd1", probs.p_pd1),
        ("p_pd2", probs.p_pd2),
        ("p_pd3", probs.p_pd3),
    ] {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(CoreError::InvalidProbability { name, value: p });
        }
    }
    let total = probs.total();
    if total > 1.0 + 1e-9 {
        return Err(CoreError::InvalidProbability {
            name: "p_total",
            value: total,
        });
    }
    Ok(())
}

/// Expected counts per detector.
pub fn expected_counts(
    probs: &DetectionProbabilities,
    ensemble: &PulseEnsemble,
) -> Result<[f64; 3]> {
    check_probabilities(probs)?;
    let scale =
        ensemble.n_pulses as f64 * ensemble.mean_photons_per_pulse * ensemble.detector_efficiency;
    Ok([
        scale * probs.p_pd1,
        scale * probs.p_pd2,
        scale * probs.p_pd3,
    ])
}

/// Draws one run's counts: independent Poisson per detector, in `[PD1, PD2,
/// PD3]` order from a ChaCha8 stream seeded with `seed`. A detector with
/// zero expected count never fires.
pub fn sample_counts(
    probs: &DetectionProbabilities,
    ensemble: &PulseEnsemble,
    seed: u64,
) -> Result<CountsRecord> {
    let expected = expected_counts(probs, ensemble)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = [0u64; 3];
    for (slot, &mean) in sampled.iter_mut().zip(expected.iter()) {
        if mean > 0.0 {
            let draw: f64 = Poisson::new(mean)
                .expect("positive finite mean")
                .sample(&mut rng);
            *slot = draw as u64;
        }
    }
    Ok(CountsRecord {
        expected,
        sampled,
        seed,
    })
}

/// Estimates the rate of events at `error_port` among all detected events,
/// with a 1-sigma uncertainty combining binomial shot noise and a fractional
/// systematic `noise_floor` in quadrature. Returns `(estimate, uncertainty)`.
pub fn error_rate_estimate(
    counts: &CountsRecord,
    error_port: Detector,
    noise_floor: f64,
) -> Result<(f64, f64)> {
    if !noise_floor.is_finite() || !(0.0..=1.0).contains(&noise_floor) {
        return Err(CoreError::InvalidProbability {
            name: "noise_floor",
            value: noise_floor,
        });
    }
    let total = counts.total_sampled();
    if total == 0 {
        return Err(CoreError::EmptyCounts);
    }
    let total_f = total as f64;
    let estimate = counts.sampled_for(error_port) as f64 / total_f;
    let shot = (estimate * (1.0 - estimate) / total_f).sqrt();
    let uncertainty = shot.hypot(noise_floor);
    Ok((estimate, uncertainty))
}
