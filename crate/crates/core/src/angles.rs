//! Degree-based trigonometry with exact values on quadrant boundaries.
//!
//! Waveplate settings and sweep grids are specified in degrees. Converting
//! 90 deg through radians gives cos = 6.1e-17 rather than 0, which leaks into
//! quantities that must vanish identically (the inconclusive fraction at the
//! 45 deg endpoint, cross-talk of an ideal splitter). Reducing modulo 360
//! first and special-casing the four axis angles keeps those exact.

fn reduce(deg: f64) -> f64 {
    deg.rem_euclid(360.0)
}

pub fn cos_deg(deg: f64) -> f64 {
    let r = reduce(deg);
    if r == 0.0 {
        1.0
    } else if r == 90.0 {
        0.0
    } else if r == 180.0 {
        -1.0
    } else if r == 270.0 {
        0.0
    } else {
        r.to_radians().cos()
    }
}

pub fn sin_deg(deg: f64) -> f64 {
    let r = reduce(deg);
    if r == 0.0 {
        0.0
    } else if r == 90.0 {
        1.0
    } else if r == 180.0 {
        0.0
    } else if r == 270.0 {
        -1.0
    } else {
        r.to_radians().sin()
    }
}
