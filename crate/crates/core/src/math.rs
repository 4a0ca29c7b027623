//! Float helpers that work without `std`.

pub(crate) use libm::{cos, exp, fabs as abs, log as ln, pow, sin, sqrt};

pub(crate) const E: f64 = core::f64::consts::E;
pub(crate) const PI: f64 = core::f64::consts::PI;

/// `base^n` by repeated squaring.
pub(crate) fn powi(base: f64, n: i64) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= b;
        }
        b *= b;
        k >>= 1;
    }
    if n < 0 {
        1.0 / acc
    } else {
        acc
    }
}
