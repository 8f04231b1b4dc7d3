//! Optical elements: half-waveplates, polarizing beam splitters (ideal and
//! calibrated from measured power fractions), and the waveplate+splitter
//! stage used as a tunable tap.
//!
//! # Splitter conventions
//!
//! A splitter couples two spatial ports, A and B, each carrying an H/V
//! polarization pair. Its action is a 4x4 scattering matrix over
//! `(A_H, A_V, B_H, B_V)` built from two 2x2 polarization blocks:
//!
//! - `transmit` maps a port's field to the straight-through exit,
//! - `reflect` maps it to the other exit and carries the 90-degree
//!   reflection phase (factor `i`) by convention.
//!
//! so `out_a = T in_a + R in_b` and `out_b = R in_a + T in_b`, giving the
//! block structure `[[T, R], [R, T]]`. Energy conservation for a lossless
//! element is exactly unitarity of that matrix.

use nalgebra::{Matrix2, Matrix4, Vector2};
use num_complex::Complex64;

use crate::angles::{cos_deg, sin_deg};
use crate::error::{CoreError, Result};
use crate::polarization::JonesVector;

pub type Mat2 = Matrix2<Complex64>;
pub type Amp2 = Vector2<Complex64>;

/// Largest entry-magnitude change the energy-conservation repair may apply
/// before the calibration table is rejected as unphysical.
pub const REPAIR_MOVE_CAP: f64 = 0.02;

/// Each input row of a calibration table must sum to 1 within this.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// A constructed splitter's scattering matrix must be unitary to this.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Half-wave retarder with its fast axis at `axis_angle` degrees from
/// horizontal. Jones matrix `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`:
/// an involution with determinant -1 (reflection of the polarization plane
/// about the axis).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveplateModel {
    pub axis_angle: f64,
}

pub fn half_waveplate(axis_angle: f64) -> WaveplateModel {
    WaveplateModel { axis_angle }
}

impl WaveplateModel {
    pub fn jones_matrix(&self) -> Mat2 {
        let c = cos_deg(2.0 * self.axis_angle);
        let s = sin_deg(2.0 * self.axis_angle);
        Mat2::new(re(c), re(s), re(s), re(-c))
    }

    pub fn apply(&self, state: &JonesVector) -> JonesVector {
        let m = self.jones_matrix();
        JonesVector::new(
            m[(0, 0)] * state.h + m[(0, 1)] * state.v,
            m[(1, 0)] * state.h + m[(1, 1)] * state.v,
        )
    }

    pub(crate) fn apply_amp(&self, amp: &Amp2) -> Amp2 {
        self.jones_matrix() * amp
    }
}

/// Measured power fractions of a real polarizing splitter.
///
/// Key naming: first letter is the exit (`t` transmitted, `r` reflected),
/// the first subscript is the input polarization, the second the output
/// polarization. `t_hv` is the fraction of H input that exits transmitted
/// with V polarization (cross-talk). Each input row
/// (`t_xh + t_xv + r_xh + r_xv`) must sum to 1 within [`ROW_SUM_TOLERANCE`]:
/// the element redistributes power but does not absorb it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PbsCalibration {
    pub t_hh: f64,
    pub t_hv: f64,
    pub r_hh: f64,
    pub r_hv: f64,
    pub t_vv: f64,
    pub t_vh: f64,
    pub r_vv: f64,
    pub r_vh: f64,
}

const CAL_KEYS: [&str; 8] = [
    "t_hh", "t_hv", "r_hh", "r_hv", "t_vv", "t_vh", "r_vv", "r_vh",
];

impl PbsCalibration {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t_hh: f64,
        t_hv: f64,
        r_hh: f64,
        r_hv: f64,
        t_vv: f64,
        t_vh: f64,
        r_vv: f64,
        r_vh: f64,
    ) -> Result<Self> {
        let cal = Self {
            t_hh,
            t_hv,
            r_hh,
            r_hv,
            t_vv,
            t_vh,
            r_vv,
            r_vh,
        };
        cal.validate()?;
        Ok(cal)
    }

    /// The table of a perfect splitter: H fully transmitted, V fully
    /// reflected, no cross-talk.
    pub fn perfect() -> Self {
        Self {
            t_hh: 1.0,
            t_hv: 0.0,
            r_hh: 0.0,
            r_hv: 0.0,
            t_vv: 0.0,
            t_vh: 0.0,
            r_vv: 1.0,
            r_vh: 0.0,
        }
    }

    fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("t_hh", self.t_hh),
            ("t_hv", self.t_hv),
            ("r_hh", self.r_hh),
            ("r_hv", self.r_hv),
            ("t_vv", self.t_vv),
            ("t_vh", self.t_vh),
            ("r_vv", self.r_vv),
            ("r_vh", self.r_vh),
        ]
    }

    fn validate(&self) -> Result<()> {
        for (key, value) in self.fields() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(CoreError::CalibrationValue {
                    key: key.to_string(),
                    value,
                });
            }
        }
        let h_sum = self.t_hh + self.t_hv + self.r_hh + self.r_hv;
        if (h_sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(CoreError::CalibrationRowSum {
                row: "H-input",
                sum: h_sum,
                tolerance: ROW_SUM_TOLERANCE,
            });
        }
        let v_sum = self.t_vv + self.t_vh + self.r_vv + self.r_vh;
        if (v_sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(CoreError::CalibrationRowSum {
                row: "V-input",
                sum: v_sum,
                tolerance: ROW_SUM_TOLERANCE,
            });
        }
        Ok(())
    }

    /// Parses the `key = value` calibration format. `#` starts a comment
    /// (whole-line or trailing); blank lines are skipped; all eight keys are
    /// required, each exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: [Option<f64>; 8] = [None; 8];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value_text) = line.split_once('=').ok_or_else(|| {
                CoreError::CalibrationSyntax {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                }
            })?;
            let key = key.trim();
            let slot = CAL_KEYS.iter().position(|k| *k == key).ok_or_else(|| {
                CoreError::CalibrationSyntax {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                }
            })?;
            if values[slot].is_some() {
                return Err(CoreError::CalibrationSyntax {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            let value: f64 = value_text.trim().parse().map_err(|_| {
                CoreError::CalibrationSyntax {
                    line: line_no,
                    message: format!("cannot parse `{}` as a number", value_text.trim()),
                }
            })?;
            values[slot] = Some(value);
        }
        for (slot, key) in CAL_KEYS.iter().enumerate() {
            if values[slot].is_none() {
                return Err(CoreError::CalibrationSyntax {
                    line: 0,
                    message: format!("missing key `{key}`"),
                });
            }
        }
        Self::new(
            values[0].unwrap(),
            values[1].unwrap(),
            values[2].unwrap(),
            values[3].unwrap(),
            values[4].unwrap(),
            values[5].unwrap(),
            values[6].unwrap(),
            values[7].unwrap(),
        )
    }
}

/// Whether a splitter is the textbook element or was built from a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbsKind {
    Ideal,
    Calibrated,
}

/// A polarizing splitter's amplitude-level model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PbsModel {
    kind: PbsKind,
    transmit: Mat2,
    reflect: Mat2,
}

impl PbsModel {
    pub fn kind(&self) -> PbsKind {
        self.kind
    }

    /// Polarization block for the straight-through exit.
    pub fn transmit_block(&self) -> &Mat2 {
        &self.transmit
    }

    /// Polarization block for the turned exit (includes the reflection
    /// phase `i`).
    pub fn reflect_block(&self) -> &Mat2 {
        &self.reflect
    }

    /// Full 4x4 scattering matrix over `(A_H, A_V, B_H, B_V)`.
    pub fn scattering_matrix(&self) -> Matrix4<Complex64> {
        let t = &self.transmit;
        let r = &self.reflect;
        Matrix4::new(
            t[(0, 0)], t[(0, 1)], r[(0, 0)], r[(0, 1)],
            t[(1, 0)], t[(1, 1)], r[(1, 0)], r[(1, 1)],
            r[(0, 0)], r[(0, 1)], t[(0, 0)], t[(0, 1)],
            r[(1, 0)], r[(1, 1)], t[(1, 0)], t[(1, 1)],
        )
    }

    /// Scatters the fields at both input ports to the two output ports.
    pub fn scatter(&self, in_a: &Amp2, in_b: &Amp2) -> (Amp2, Amp2) {
        (
            self.transmit * in_a + self.reflect * in_b,
            self.reflect * in_a + self.transmit * in_b,
        )
    }

    /// Largest entry magnitude of `S^dagger S - I`; zero for a lossless
    /// element.
    pub fn unitarity_deviation(&self) -> f64 {
        let s = self.scattering_matrix();
        let d = s.adjoint() * s - Matrix4::identity();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// The textbook splitter: H transmitted unchanged, V reflected with phase
/// `i`, no cross-talk.
pub fn ideal_pbs() -> PbsModel {
    let zero = re(0.0);
    PbsModel {
        kind: PbsKind::Ideal,
        transmit: Mat2::new(re(1.0), zero, zero, zero),
        reflect: Mat2::new(zero, zero, zero, Complex64::new(0.0, 1.0)),
    }
}

/// Builds a splitter from measured power fractions.
///
/// Amplitudes are the square roots of the fractions. Signs follow a
/// rotation-like convention (the input-to-output cross-talk terms enter with
/// opposite signs), under which physically consistent tables are already
/// unitary to rounding; the small residual is removed by projecting each
/// circular component onto the nearest unitary (polar decomposition). If that
/// projection would move any amplitude magnitude by more than
/// [`REPAIR_MOVE_CAP`] the table cannot describe a passive lossless element
/// and is rejected.
pub fn calibrated_pbs(cal: &PbsCalibration) -> Result<PbsModel> {
    cal.validate()?;
    let t0 = Mat2::new(
        re(cal.t_hh.sqrt()),
        re(cal.t_vh.sqrt()),
        re(-cal.t_hv.sqrt()),
        re(cal.t_vv.sqrt()),
    );
    let r0 = Mat2::new(
        re(cal.r_hh.sqrt()),
        re(cal.r_vh.sqrt()),
        re(-cal.r_hv.sqrt()),
        re(cal.r_vv.sqrt()),
    );
    // The +/- circulation components T +- iR decouple: the 4x4 matrix is
    // unitary exactly when both are. Repair each separately.
    let i = Complex64::new(0.0, 1.0);
    let u_plus = polar_unitary(&(t0 + r0 * i))?;
    let u_minus = polar_unitary(&(t0 - r0 * i))?;
    let half = re(0.5);
    let transmit = (u_plus + u_minus) * half;
    let reflect = (u_plus - u_minus) * half;

    let mut max_move = 0.0f64;
    for (repaired, original) in [(&transmit, &t0), (&reflect, &r0)] {
        for k in 0..4 {
            let delta = (repaired[k].norm() - original[k].norm()).abs();
            max_move = max_move.max(delta);
        }
    }
    if max_move > REPAIR_MOVE_CAP {
        return Err(CoreError::CalibrationInconsistent {
            max_move,
            cap: REPAIR_MOVE_CAP,
        });
    }

    let model = PbsModel {
        kind: PbsKind::Calibrated,
        transmit,
        reflect,
    };
    debug_assert!(model.unitarity_deviation() <= UNITARITY_TOLERANCE);
    Ok(model)
}

/// Nearest unitary to `s` in Frobenius norm: `s (s^dagger s)^{-1/2}`, with
/// the Hermitian inverse square root in closed form (2x2 eigenvalues).
fn polar_unitary(s: &Mat2) -> Result<Mat2> {
    let h = s.adjoint() * s;
    let p = h[(0, 0)].re;
    let r = h[(1, 1)].re;
    let q = h[(0, 1)];
    let mean = 0.5 * (p + r);
    let disc = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    let (l_hi, l_lo) = (mean + disc, mean - disc);
    if l_lo <= 1e-12 {
        // Singular component: no nearby unitary exists. Report it as a
        // maximal repair move.
        return Err(CoreError::CalibrationInconsistent {
            max_move: 1.0,
            cap: REPAIR_MOVE_CAP,
        });
    }
    let (a, b) = if disc <= 1e-14 * mean {
        (1.0 / mean.sqrt(), 0.0)
    } else {
        let inv_hi = 1.0 / l_hi.sqrt();
        let inv_lo = 1.0 / l_lo.sqrt();
        let b = (inv_hi - inv_lo) / (l_hi - l_lo);
        (inv_hi - b * l_hi, b)
    };
    let h_inv_sqrt = Mat2::identity() * re(a) + h * re(b);
    Ok(s * h_inv_sqrt)
}

/// Waveplate followed by a splitter whose transmitted exit is tapped off:
/// the rotation angle tunes how much light leaves through the tap.
#[derive(Clone, Copy, Debug)]
pub struct VariableLossStage {
    pub waveplate: WaveplateModel,
    pub splitter: PbsModel,
}

pub fn variable_loss_stage(wp_angle: f64, splitter: PbsModel) -> VariableLossStage {
    VariableLossStage {
        waveplate: half_waveplate(wp_angle),
        splitter,
    }
}

impl VariableLossStage {
    /// Returns `(tapped, retained)`: the transmitted field sent to a monitor
    /// and the reflected field that continues through the setup.
    pub fn split(&self, input: &JonesVector) -> (JonesVector, JonesVector) {
        let rotated = self.waveplate.apply_amp(&Amp2::new(input.h, input.v));
        let tapped = self.splitter.transmit_block() * rotated;
        let retained = self.splitter.reflect_block() * rotated;
        (
            JonesVector::new(tapped[0], tapped[1]),
            JonesVector::new(retained[0], retained[1]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::JonesVector;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn reference_cal() -> PbsCalibration {
        PbsCalibration::new(0.982, 0.009, 0.0045, 0.0045, 0.0045, 0.0045, 0.982, 0.009)
            .unwrap()
    }

    #[test]
    fn waveplate_at_zero_flips_vertical_sign() {
        let wp = half_waveplate(0.0);
        let out = wp.apply(&JonesVector::linear(30.0));
        assert_abs_diff_eq!(out.h.re, cos_deg(30.0), epsilon = 0.0);
        assert_abs_diff_eq!(out.v.re, -sin_deg(30.0), epsilon = 0.0);
    }

    #[test]
    fn waveplate_at_22_5_maps_diagonal_to_axes() {
        let wp = half_waveplate(22.5);
        let plus45 = wp.apply(&JonesVector::linear(45.0));
        let minus45 = wp.apply(&JonesVector::linear(-45.0));
        assert_abs_diff_eq!(plus45.h.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(plus45.v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minus45.h.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(minus45.v.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn waveplate_at_half_angle_prepares_linear_state() {
        // Rotating H by a half-waveplate at a/2 gives linear polarization
        // at angle a: the preparation step for each sweep point.
        let alpha = 17.0;
        let out = half_waveplate(alpha / 2.0).apply(&JonesVector::horizontal());
        assert_abs_diff_eq!(out.h.re, cos_deg(alpha), epsilon = 1e-15);
        assert_abs_diff_eq!(out.v.re, sin_deg(alpha), epsilon = 1e-15);
    }

    #[test]
    fn ideal_splitter_blocks_and_unitarity() {
        let pbs = ideal_pbs();
        assert_eq!(pbs.kind(), PbsKind::Ideal);
        assert_eq!(pbs.transmit_block()[(0, 0)], re(1.0));
        assert_eq!(pbs.reflect_block()[(1, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(pbs.unitarity_deviation(), 0.0);
    }

    #[test]
    fn perfect_table_reproduces_the_ideal_splitter() {
        let built = calibrated_pbs(&PbsCalibration::perfect()).unwrap();
        assert_eq!(built.kind(), PbsKind::Calibrated);
        let ideal = ideal_pbs();
        for k in 0..4 {
            assert_abs_diff_eq!(
                (built.transmit_block()[k] - ideal.transmit_block()[k]).norm(),
                0.0,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                (built.reflect_block()[k] - ideal.reflect_block()[k]).norm(),
                0.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn reference_table_builds_a_unitary_splitter_preserving_magnitudes() {
        let cal = reference_cal();
        let pbs = calibrated_pbs(&cal).unwrap();
        assert!(pbs.unitarity_deviation() < UNITARITY_TOLERANCE);
        // The repair must not noticeably move the measured amplitudes.
        let t = pbs.transmit_block();
        assert_abs_diff_eq!(t[(0, 0)].norm(), 0.982f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(t[(1, 0)].norm(), 0.009f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(t[(0, 1)].norm(), 0.0045f64.sqrt(), epsilon = 1e-12);
        let r = pbs.reflect_block();
        assert_abs_diff_eq!(r[(1, 1)].norm(), 0.982f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r[(0, 0)].norm(), 0.0045f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn lossy_inconsistent_table_is_rejected_by_the_repair_cap() {
        // Row sums pass (power conserved) but the implied columns are far
        // from orthogonal, so no nearby lossless element exists.
        let cal = PbsCalibration::new(1.0, 0.0, 0.0, 0.0, 0.5, 0.25, 0.25, 0.0).unwrap();
        match calibrated_pbs(&cal) {
            Err(CoreError::CalibrationInconsistent { max_move, cap }) => {
                assert!(max_move > cap);
            }
            other => panic!("expected CalibrationInconsistent, got {other:?}"),
        }
    }

    #[test]
    fn row_sum_violations_are_rejected() {
        let bad = PbsCalibration::new(0.9, 0.0, 0.0, 0.0, 0.0045, 0.0045, 0.982, 0.009);
        assert!(matches!(bad, Err(CoreError::CalibrationRowSum { .. })));
        // Just inside the tolerance is accepted.
        let ok = PbsCalibration::new(
            1.0 - 5e-7,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            1.0,
            0.0,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn fractions_outside_unit_interval_are_rejected() {
        assert!(matches!(
            PbsCalibration::new(1.2, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0),
            Err(CoreError::CalibrationValue { .. })
        ));
        assert!(matches!(
            PbsCalibration::new(f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0),
            Err(CoreError::CalibrationValue { .. })
        ));
    }

    #[test]
    fn parser_round_trips_with_comments_and_whitespace() {
        let text = "\
# splitter table
t_hh = 0.982   # transmitted, co-polarized
t_hv = 0.009
r_hh = 0.0045
r_hv = 0.0045

t_vv = 0.0045
t_vh = 0.0045
r_vv = 0.982
r_vh = 0.009
";
        assert_eq!(PbsCalibration::parse(text).unwrap(), reference_cal());
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert!(matches!(
            PbsCalibration::parse("t_hh 0.982"),
            Err(CoreError::CalibrationSyntax { line: 1, .. })
        ));
        assert!(matches!(
            PbsCalibration::parse("t_xx = 0.5"),
            Err(CoreError::CalibrationSyntax { .. })
        ));
        assert!(matches!(
            PbsCalibration::parse("t_hh = 0.5\nt_hh = 0.5"),
            Err(CoreError::CalibrationSyntax { line: 2, .. })
        ));
        assert!(matches!(
            PbsCalibration::parse("t_hh = abc"),
            Err(CoreError::CalibrationSyntax { .. })
        ));
        // All keys required.
        assert!(matches!(
            PbsCalibration::parse("t_hh = 1.0"),
            Err(CoreError::CalibrationSyntax { .. })
        ));
    }

    #[test]
    fn loss_stage_tap_fraction_follows_the_waveplate_angle() {
        // For H input the tapped power is cos^2(2 phi) and the retained
        // power sin^2(2 phi); together they conserve the input.
        let stage = variable_loss_stage(12.0, ideal_pbs());
        let (tapped, retained) = stage.split(&JonesVector::horizontal());
        let c = cos_deg(24.0);
        let s = sin_deg(24.0);
        assert_abs_diff_eq!(tapped.norm_sq(), c * c, epsilon = 1e-15);
        assert_abs_diff_eq!(retained.norm_sq(), s * s, epsilon = 1e-15);
        // The retained field is vertical with the reflection phase.
        assert_abs_diff_eq!(retained.v.im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(retained.h.norm(), 0.0, epsilon = 0.0);
    }

    proptest! {
        #[test]
        fn waveplate_is_an_involution(axis in -90.0f64..=90.0, angle in 0.0f64..=360.0) {
            let wp = half_waveplate(axis);
            let input = JonesVector::linear(angle);
            let twice = wp.apply(&wp.apply(&input));
            prop_assert!((twice.h - input.h).norm() < 1e-14);
            prop_assert!((twice.v - input.v).norm() < 1e-14);
        }

        #[test]
        fn waveplate_determinant_is_minus_one(axis in -90.0f64..=90.0) {
            let m = half_waveplate(axis).jones_matrix();
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            prop_assert!((det + re(1.0)).norm() < 1e-14);
        }

        #[test]
        fn scatter_conserves_energy_for_lossless_splitters(
            theta in 0.0f64..=360.0,
            phase in 0.0f64..=std::f64::consts::TAU,
            which in 0usize..2,
        ) {
            let pbs = if which == 0 {
                ideal_pbs()
            } else {
                calibrated_pbs(&reference_cal()).unwrap()
            };
            let a = Amp2::new(
                re(cos_deg(theta)),
                Complex64::from_polar(sin_deg(theta), phase),
            );
            let b = Amp2::new(re(0.2), re(-0.3));
            let before = a.norm_squared() + b.norm_squared();
            let (out_a, out_b) = pbs.scatter(&a, &b);
            let after = out_a.norm_squared() + out_b.norm_squared();
            prop_assert!((before - after).abs() < 1e-12);
        }

        #[test]
        fn loss_stage_conserves_energy(phi in 0.0f64..=45.0, angle in 0.0f64..=360.0) {
            let stage = variable_loss_stage(phi, ideal_pbs());
            let input = JonesVector::linear(angle);
            let (tapped, retained) = stage.split(&input);
            prop_assert!((tapped.norm_sq() + retained.norm_sq() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tap_fraction_is_monotone_in_the_angle_for_horizontal_input(
            k in 0usize..100,
        ) {
            // On [0, 22.5] the tapped fraction cos^2(2 phi) decreases as the
            // waveplate angle grows: the tap opens monotonically.
            let phi_lo = 22.5 * k as f64 / 100.0;
            let phi_hi = 22.5 * (k + 1) as f64 / 100.0;
            let tap = |phi: f64| {
                let stage = variable_loss_stage(phi, ideal_pbs());
                stage.split(&JonesVector::horizontal()).0.norm_sq()
            };
            prop_assert!(tap(phi_hi) <= tap(phi_lo) + 1e-15);
        }
    }
}
