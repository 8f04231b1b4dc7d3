//! Mode-resolved propagation through the two-arm discrimination setup.
//!
//! # Topology
//!
//! ```text
//!            WP2(a/2)  [WP3?]          armA: WP4(phi) -> PBS3 -T-> PD3
//! source ->-----------------> PBS2 --<                        \-R-> continues
//!                                      armB: phase e^{i delta}
//!            armA' + armB ->- PBS5 -> WP6(22.5) -> PBS6 -T-> PD1
//!                               \-> (dark, unmonitored)  \-R-> PD2
//! ```
//!
//! The source emits a horizontal field. WP2 at `a/2` prepares the linear
//! state at `+a`; inserting the flip plate WP3 (axis 0) turns it into the
//! mirror state at `-a`. PBS2 splits the state over two arms. Arm A passes a
//! tunable tap (WP4 + PBS3) whose transmitted exit feeds the inconclusive
//! detector PD3; the surviving reflected field re-enters the recombiner with
//! its polarization label swapped (the fold mirror exchanges the plane of
//! H/V relative to PBS5). Arm B picks up the adjustable path phase. The
//! recombined field is analyzed in the diagonal basis by WP6 + PBS6 feeding
//! the conclusive detectors PD1 ("plus") and PD2 ("minus").
//!
//! All elements are lossless, so the total power over every mode (including
//! PBS5's unmonitored second exit) is conserved to [`NORM_CONSERVATION_TOLERANCE`].

use num_complex::Complex64;

use crate::angles::{cos_deg, sin_deg};
use crate::components::{half_waveplate, ideal_pbs, Amp2, PbsCalibration, PbsModel};
use crate::error::{CoreError, Result};
use crate::polarization::{make_states, JonesVector};

/// Power bookkeeping slack allowed across a full propagation.
pub const NORM_CONSERVATION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pol {
    H = 0,
    V = 1,
}

/// Spatial modes tracked through the setup. `Dark` is the unmonitored second
/// exit of the recombining splitter; it exists so power stays accounted for
/// when the splitters are imperfect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Input = 0,
    ArmA = 1,
    ArmB = 2,
    Pd1 = 3,
    Pd2 = 4,
    Pd3 = 5,
    Dark = 6,
}

const MODE_COUNT: usize = 7;

/// Complex field amplitudes for every (mode, polarization) pair.
#[derive(Clone, Debug)]
pub struct ModeState {
    amps: [Complex64; 2 * MODE_COUNT],
}

impl ModeState {
    pub fn from_input(input: &JonesVector) -> Result<Self> {
        input.check_normalized()?;
        let mut amps = [Complex64::new(0.0, 0.0); 2 * MODE_COUNT];
        amps[idx(Mode::Input, Pol::H)] = input.h;
        amps[idx(Mode::Input, Pol::V)] = input.v;
        Ok(Self { amps })
    }

    pub fn amplitude(&self, mode: Mode, pol: Pol) -> Complex64 {
        self.amps[idx(mode, pol)]
    }

    pub fn mode_power(&self, mode: Mode) -> f64 {
        self.amps[idx(mode, Pol::H)].norm_sqr() + self.amps[idx(mode, Pol::V)].norm_sqr()
    }

    pub fn total_power(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn detection_probabilities(&self) -> DetectionProbabilities {
        DetectionProbabilities {
            p_pd1: self.mode_power(Mode::Pd1),
            p_pd2: self.mode_power(Mode::Pd2),
            p_pd3: self.mode_power(Mode::Pd3),
        }
    }

    /// Removes and returns a mode's field pair.
    fn take(&mut self, mode: Mode) -> Amp2 {
        let h = std::mem::take(&mut self.amps[idx(mode, Pol::H)]);
        let v = std::mem::take(&mut self.amps[idx(mode, Pol::V)]);
        Amp2::new(h, v)
    }

    fn add(&mut self, mode: Mode, field: Amp2) {
        self.amps[idx(mode, Pol::H)] += field[0];
        self.amps[idx(mode, Pol::V)] += field[1];
    }
}

fn idx(mode: Mode, pol: Pol) -> usize {
    2 * (mode as usize) + pol as usize
}

/// Probabilities of a detection event at each monitored detector for one
/// input pulse (power reaching the detector; efficiencies are applied by the
/// counting layer).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionProbabilities {
    pub p_pd1: f64,
    pub p_pd2: f64,
    pub p_pd3: f64,
}

impl DetectionProbabilities {
    /// Total monitored power; below 1 when the splitters leak into the dark
    /// port.
    pub fn total(&self) -> f64 {
        self.p_pd1 + self.p_pd2 + self.p_pd3
    }
}

/// The four splitters of the setup. `ideal()` gives textbook elements;
/// `from_calibration` builds all four from one measured table.
#[derive(Clone, Copy, Debug)]
pub struct PbsSet {
    pub pbs2: PbsModel,
    pub pbs3: PbsModel,
    pub pbs5: PbsModel,
    pub pbs6: PbsModel,
}

impl PbsSet {
    pub fn ideal() -> Self {
        Self::uniform(ideal_pbs())
    }

    pub fn uniform(model: PbsModel) -> Self {
        Self {
            pbs2: model,
            pbs3: model,
            pbs5: model,
            pbs6: model,
        }
    }

    pub fn from_calibration(cal: &PbsCalibration) -> Result<Self> {
        Ok(Self::uniform(crate::components::calibrated_pbs(cal)?))
    }
}

/// Every adjustable setting of the setup. Angles are in degrees; the arm-B
/// path phase is in radians.
#[derive(Clone, Copy, Debug)]
pub struct InterferometerConfig {
    /// Preparation plate: `alpha / 2` produces the `+alpha` linear state
    /// from the horizontal source.
    pub wp2_angle: f64,
    /// Whether the flip plate (axis at 0) is in the beam, selecting the
    /// mirror state.
    pub wp3_inserted: bool,
    /// Tap plate controlling how much of arm A exits to PD3.
    pub wp4_angle: f64,
    /// Analysis plate before the final splitter; 22.5 maps the diagonal
    /// basis onto H/V.
    pub wp6_angle: f64,
    /// Relative phase applied to arm B, radians.
    pub path_phase_delta: f64,
    pub pbs: PbsSet,
}

impl InterferometerConfig {
    pub fn new(pbs: PbsSet) -> Self {
        Self {
            wp2_angle: 0.0,
            wp3_inserted: false,
            wp4_angle: 0.0,
            wp6_angle: 22.5,
            path_phase_delta: 0.0,
            pbs,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ArmFilter {
    Both,
    OnlyA,
    OnlyB,
}

fn apply_waveplate(st: &mut ModeState, mode: Mode, plate: &crate::components::WaveplateModel) {
    let field = st.take(mode);
    let m = plate.jones_matrix();
    st.add(mode, m * field);
}

fn apply_phase(st: &mut ModeState, mode: Mode, radians: f64) {
    let field = st.take(mode);
    let z = Complex64::from_polar(1.0, radians);
    st.add(mode, field * z);
}

fn swap_pols(st: &mut ModeState, mode: Mode) {
    let field = st.take(mode);
    st.add(mode, Amp2::new(field[1], field[0]));
}

fn apply_pbs(
    st: &mut ModeState,
    pbs: &PbsModel,
    in_a: Mode,
    in_b: Option<Mode>,
    out_a: Mode,
    out_b: Mode,
) {
    let a = st.take(in_a);
    let b = match in_b {
        Some(mode) => st.take(mode),
        None => Amp2::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    };
    let (fwd_a, fwd_b) = pbs.scatter(&a, &b);
    st.add(out_a, fwd_a);
    st.add(out_b, fwd_b);
}

fn propagate_filtered(
    input: &JonesVector,
    config: &InterferometerConfig,
    filter: ArmFilter,
) -> Result<ModeState> {
    let mut st = ModeState::from_input(input)?;

    // Preparation.
    apply_waveplate(&mut st, Mode::Input, &half_waveplate(config.wp2_angle));
    if config.wp3_inserted {
        apply_waveplate(&mut st, Mode::Input, &half_waveplate(0.0));
    }

    // Split over the two arms.
    apply_pbs(
        &mut st,
        &config.pbs.pbs2,
        Mode::Input,
        None,
        Mode::ArmA,
        Mode::ArmB,
    );
    match filter {
        ArmFilter::Both => {}
        ArmFilter::OnlyA => {
            st.take(Mode::ArmB);
        }
        ArmFilter::OnlyB => {
            st.take(Mode::ArmA);
        }
    }

    // Arm A: tunable tap to the inconclusive detector; the survivor's
    // polarization label swaps at the fold into the recombiner.
    apply_waveplate(&mut st, Mode::ArmA, &half_waveplate(config.wp4_angle));
    apply_pbs(
        &mut st,
        &config.pbs.pbs3,
        Mode::ArmA,
        None,
        Mode::Pd3,
        Mode::ArmA,
    );
    swap_pols(&mut st, Mode::ArmA);

    // Arm B: adjustable path phase.
    apply_phase(&mut st, Mode::ArmB, config.path_phase_delta);

    // Recombination; the second exit is unmonitored but tracked.
    apply_pbs(
        &mut st,
        &config.pbs.pbs5,
        Mode::ArmA,
        Some(Mode::ArmB),
        Mode::ArmA,
        Mode::Dark,
    );

    // Diagonal-basis analysis.
    apply_waveplate(&mut st, Mode::ArmA, &half_waveplate(config.wp6_angle));
    apply_pbs(
        &mut st,
        &config.pbs.pbs6,
        Mode::ArmA,
        None,
        Mode::Pd1,
        Mode::Pd2,
    );

    if filter == ArmFilter::Both {
        debug_assert!(
            (st.total_power() - 1.0).abs() <= NORM_CONSERVATION_TOLERANCE,
            "power bookkeeping broke: total = {}",
            st.total_power()
        );
    }
    Ok(st)
}

/// Full mode-resolved state after propagation.
pub fn propagate_state(input: &JonesVector, config: &InterferometerConfig) -> Result<ModeState> {
    propagate_filtered(input, config, ArmFilter::Both)
}

/// Detection probabilities for one input field.
pub fn propagate(
    input: &JonesVector,
    config: &InterferometerConfig,
) -> Result<DetectionProbabilities> {
    Ok(propagate_state(input, config)?.detection_probabilities())
}

/// Tap-plate angle that sends exactly the protocol's share of arm A to the
/// inconclusive detector: `sin(2 phi) = tan(alpha)`, so the surviving arm-A
/// amplitude matches arm B and the conclusive analysis can null one
/// detector per state.
pub fn orthogonalizing_wp4_angle(alpha_deg: f64) -> Result<f64> {
    if !alpha_deg.is_finite() || !(0.0..=45.0).contains(&alpha_deg) {
        return Err(CoreError::AngleOutOfRange {
            name: "alpha",
            value: alpha_deg,
            min: 0.0,
            max: 45.0,
        });
    }
    if alpha_deg == 45.0 {
        // tan -> 1 exactly: the tap closes fully at 45.
        return Ok(45.0);
    }
    let tan = (sin_deg(alpha_deg) / cos_deg(alpha_deg)).min(1.0);
    Ok(tan.asin().to_degrees() / 2.0)
}

/// Aligns the setup for the pair at `alpha_deg`: preparation plate at
/// `alpha/2`, tap plate at the protocol angle, and the arm-B phase at the
/// exact minimum of the wrong-detector response for the `+` state.
///
/// The final amplitudes are linear in `e^{i delta}` applied to arm B:
/// `PD2 = A + e^{i delta} B` with `A`, `B` the per-arm contributions.
/// `|A + z B|^2` is minimized over the unit circle at
/// `z = -conj(g)/|g|`, `g = <A, B>`, giving the phase in closed form —
/// no iteration, no tolerance. When arm B carries nothing (`|g| = 0`) the
/// phase is irrelevant and set to 0.
pub fn align(alpha_deg: f64, base: &InterferometerConfig) -> Result<InterferometerConfig> {
    let _ = make_states(alpha_deg)?; // validates the angle range
    let mut cfg = *base;
    cfg.wp2_angle = alpha_deg / 2.0;
    cfg.wp3_inserted = false;
    cfg.wp4_angle = orthogonalizing_wp4_angle(alpha_deg)?;
    cfg.path_phase_delta = 0.0;

    let source = JonesVector::horizontal();
    let half_a = propagate_filtered(&source, &cfg, ArmFilter::OnlyA)?;
    let half_b = propagate_filtered(&source, &cfg, ArmFilter::OnlyB)?;
    let g = half_a.amplitude(Mode::Pd2, Pol::H).conj() * half_b.amplitude(Mode::Pd2, Pol::H)
        + half_a.amplitude(Mode::Pd2, Pol::V).conj() * half_b.amplitude(Mode::Pd2, Pol::V);
    cfg.path_phase_delta = if g.norm() == 0.0 { 0.0 } else { (-g.conj()).arg() };
    Ok(cfg)
}

/// Runs both states through one configuration: the `+` state as prepared,
/// the `-` state by inserting the flip plate. Returns their detection
/// probabilities as `(plus, minus)`.
pub fn run_pair(
    alpha_deg: f64,
    config: &InterferometerConfig,
) -> Result<(DetectionProbabilities, DetectionProbabilities)> {
    let _ = make_states(alpha_deg)?;
    let source = JonesVector::horizontal();
    let mut cfg = *config;
    cfg.wp2_angle = alpha_deg / 2.0;

    cfg.wp3_inserted = false;
    let plus = propagate(&source, &cfg)?;
    cfg.wp3_inserted = true;
    let minus = propagate(&source, &cfg)?;
    Ok((plus, minus))
}

/// Conditional wrong-detector rates given a detection anywhere:
/// `PD2` firing on the `+` state and `PD1` firing on the `-` state.
/// At `alpha = 0` the two states coincide and the rates are undefined.
pub fn error_rates(
    plus: &DetectionProbabilities,
    minus: &DetectionProbabilities,
    alpha_deg: f64,
) -> (Option<f64>, Option<f64>) {
    if alpha_deg == 0.0 {
        return (None, None);
    }
    let err_plus = (plus.total() > 0.0).then(|| plus.p_pd2 / plus.total());
    let err_minus = (minus.total() > 0.0).then(|| minus.p_pd1 / minus.total());
    (err_plus, err_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::calibrated_pbs;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn reference_cal() -> PbsCalibration {
        PbsCalibration::new(0.982, 0.009, 0.0045, 0.0045, 0.0045, 0.0045, 0.982, 0.009)
            .unwrap()
    }

    fn calibrated_set() -> PbsSet {
        PbsSet::uniform(calibrated_pbs(&reference_cal()).unwrap())
    }

    #[test]
    fn aligned_ideal_setup_reproduces_the_closed_form_tap_fraction() {
        let base = InterferometerConfig::new(PbsSet::ideal());
        for k in 0..=90 {
            let alpha = k as f64 * 0.5;
            let cfg = align(alpha, &base).unwrap();
            let (plus, minus) = run_pair(alpha, &cfg).unwrap();
            let expected_tap = cos_deg(2.0 * alpha);
            assert_abs_diff_eq!(plus.p_pd3, expected_tap, epsilon = 1e-12);
            assert_abs_diff_eq!(minus.p_pd3, expected_tap, epsilon = 1e-12);
            // Zero wrong-detector response for both states.
            assert!(plus.p_pd2 < 1e-20, "alpha={alpha}: p2={}", plus.p_pd2);
            assert!(minus.p_pd1 < 1e-20, "alpha={alpha}: p1={}", minus.p_pd1);
            // The conclusive detector takes the rest.
            assert_abs_diff_eq!(plus.p_pd1, 1.0 - expected_tap, epsilon = 1e-12);
            assert_abs_diff_eq!(minus.p_pd2, 1.0 - expected_tap, epsilon = 1e-12);
        }
    }

    #[test]
    fn endpoints_are_exact() {
        let base = InterferometerConfig::new(PbsSet::ideal());

        // Identical states: everything is tapped off, nothing reaches the
        // conclusive detectors.
        let cfg0 = align(0.0, &base).unwrap();
        let (plus, _) = run_pair(0.0, &cfg0).unwrap();
        assert_eq!(plus.p_pd3, 1.0);
        assert_eq!(plus.p_pd1, 0.0);
        assert_eq!(plus.p_pd2, 0.0);

        // Orthogonal states: the tap closes exactly; discrimination is
        // deterministic.
        let cfg45 = align(45.0, &base).unwrap();
        assert_eq!(cfg45.wp4_angle, 45.0);
        let (plus, minus) = run_pair(45.0, &cfg45).unwrap();
        assert_eq!(plus.p_pd3, 0.0);
        assert_eq!(minus.p_pd3, 0.0);
        assert_abs_diff_eq!(plus.p_pd1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(minus.p_pd2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn aligned_phase_is_quarter_turn_behind_for_ideal_elements() {
        let base = InterferometerConfig::new(PbsSet::ideal());
        for &alpha in &[5.0, 22.5, 44.0] {
            let cfg = align(alpha, &base).unwrap();
            assert_abs_diff_eq!(cfg.path_phase_delta, -FRAC_PI_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn tap_angle_satisfies_its_defining_relation() {
        for k in 0..=450 {
            let alpha = k as f64 * 0.1;
            let phi = orthogonalizing_wp4_angle(alpha).unwrap();
            let lhs = sin_deg(2.0 * phi) * cos_deg(alpha);
            assert_abs_diff_eq!(lhs, sin_deg(alpha), epsilon = 1e-12);
        }
        assert_eq!(orthogonalizing_wp4_angle(0.0).unwrap(), 0.0);
        assert_eq!(orthogonalizing_wp4_angle(45.0).unwrap(), 45.0);
        assert!(orthogonalizing_wp4_angle(45.1).is_err());
    }

    #[test]
    fn calibrated_setup_matches_frozen_anchors() {
        // Independently computed with an amplitude-level reference
        // implementation of the same signed-root + polar-repair model.
        let base = InterferometerConfig::new(calibrated_set());
        let cases = [
            (4.0, 0.003748457097, 0.030684274441, 0.991584018014),
            (22.5, 0.006952205924, 0.002826198506, 0.738441733393),
            (40.0, 0.012203983141, 0.008327916921, 0.208346743189),
        ];
        for (alpha, want_err_plus, want_err_minus, want_inconclusive) in cases {
            let cfg = align(alpha, &base).unwrap();
            let (plus, minus) = run_pair(alpha, &cfg).unwrap();
            let (err_plus, err_minus) = error_rates(&plus, &minus, alpha);
            assert_abs_diff_eq!(err_plus.unwrap(), want_err_plus, epsilon = 5e-9);
            assert_abs_diff_eq!(err_minus.unwrap(), want_err_minus, epsilon = 5e-9);
            assert_abs_diff_eq!(
                plus.p_pd3 / plus.total(),
                want_inconclusive,
                epsilon = 5e-9
            );
        }
    }

    #[test]
    fn calibrated_setup_leaks_into_the_dark_port_but_conserves_power() {
        let base = InterferometerConfig::new(calibrated_set());
        let cfg = align(20.0, &base).unwrap();
        let mut probe = cfg;
        probe.wp2_angle = 10.0;
        let st = propagate_state(&JonesVector::horizontal(), &probe).unwrap();
        let monitored = st.detection_probabilities().total();
        assert!(monitored < 1.0);
        assert!(st.mode_power(Mode::Dark) > 0.0);
        assert_abs_diff_eq!(st.total_power(), 1.0, epsilon = NORM_CONSERVATION_TOLERANCE);
    }

    #[test]
    fn error_rates_are_undefined_for_identical_states() {
        let base = InterferometerConfig::new(PbsSet::ideal());
        let cfg = align(0.0, &base).unwrap();
        let (plus, minus) = run_pair(0.0, &cfg).unwrap();
        assert_eq!(error_rates(&plus, &minus, 0.0), (None, None));
    }

    proptest! {
        #[test]
        fn power_is_conserved_for_any_settings(
            alpha in 0.0f64..=45.0,
            phi in 0.0f64..=45.0,
            delta in -3.2f64..=3.2,
            calibrated in proptest::bool::ANY,
        ) {
            let pbs = if calibrated { calibrated_set() } else { PbsSet::ideal() };
            let mut cfg = InterferometerConfig::new(pbs);
            cfg.wp2_angle = alpha / 2.0;
            cfg.wp4_angle = phi;
            cfg.path_phase_delta = delta;
            let st = propagate_state(&JonesVector::horizontal(), &cfg).unwrap();
            prop_assert!((st.total_power() - 1.0).abs() < NORM_CONSERVATION_TOLERANCE);
        }

        #[test]
        fn ideal_setup_treats_the_two_states_mirror_symmetrically(
            alpha in 0.0f64..=45.0,
            phi in 0.0f64..=45.0,
            delta in -3.2f64..=3.2,
        ) {
            // Swapping the state (+ <-> -) swaps the conclusive detectors,
            // for every setting of the tap and phase, as long as the
            // elements themselves are symmetric.
            let mut cfg = InterferometerConfig::new(PbsSet::ideal());
            cfg.wp4_angle = phi;
            cfg.path_phase_delta = delta;
            let (plus, minus) = run_pair(alpha, &cfg).unwrap();
            prop_assert!((plus.p_pd1 - minus.p_pd2).abs() < 1e-12);
            prop_assert!((plus.p_pd2 - minus.p_pd1).abs() < 1e-12);
            prop_assert!((plus.p_pd3 - minus.p_pd3).abs() < 1e-12);
        }

        #[test]
        fn alignment_minimizes_the_wrong_detector_over_the_phase(
            alpha in 0.5f64..=45.0,
            probe in -3.15f64..=3.15,
            calibrated in proptest::bool::ANY,
        ) {
            // No phase setting beats the closed-form one.
            let pbs = if calibrated { calibrated_set() } else { PbsSet::ideal() };
            let base = InterferometerConfig::new(pbs);
            let cfg = align(alpha, &base).unwrap();
            let best = run_pair(alpha, &cfg).unwrap().0.p_pd2;
            let mut probed = cfg;
            probed.path_phase_delta = probe;
            let other = run_pair(alpha, &probed).unwrap().0.p_pd2;
            prop_assert!(best <= other + 1e-15);
        }
    }
}
