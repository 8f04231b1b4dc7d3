//! Fixed-significance number formatting for the CSV emitter.

/// Formats a float with nine significant digits.
///
/// Zero prints as `0.000000000`; other finite values keep exactly nine
/// significant digits by scaling the decimal count to the magnitude
/// (`45.0` -> `45.0000000`, `0.7071067811865476` -> `0.707106781`).
/// Non-finite values fall back to the standard rendering so a damaged
/// value is visible rather than silently reshaped.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}
