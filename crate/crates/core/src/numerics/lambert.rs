use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;

/// Principal branch `W0` of the Lambert W function, the solution `w >= -1`
/// of `w * exp(w) = x`.
///
/// The seed comes from the branch-point expansion near `-1/e`, the Taylor
/// series near zero or `ln x - ln ln x` for large arguments, and is refined
/// with Halley steps. Above `x = e` the iteration runs on `w + ln w = ln x`
/// so `exp(w)` never overflows.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w0 of NaN".into()));
    }
    if x < BRANCH_POINT {
        // Values within rounding of the branch point are accepted as -1/e.
        if x > BRANCH_POINT - 4.0 * f64::EPSILON {
            return Ok(-1.0);
        }
        return Err(Error::Domain(format!("lambert_w0 requires x >= -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    if x > E {
        return Ok(halley_log_form(x));
    }

    let mut w = if x < -0.25 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x.abs() < 0.25 {
        x - x * x + 1.5 * x * x * x
    } else {
        // Moderate arguments: log1p keeps the seed positive and monotone.
        0.6 * x.ln_1p()
    };
    if (w + 1.0).abs() < 1e-12 {
        return Ok(w);
    }

    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        let done = (next - w).abs() <= 1e-15 * (1.0 + next.abs());
        w = next.max(-1.0);
        if done {
            break;
        }
    }
    Ok(w)
}

/// Halley iteration on `g(w) = w + ln w - ln x` for `x > e` (so `w > 1`).
fn halley_log_form(x: f64) -> f64 {
    let lx = x.ln();
    let mut w = if lx > 3.0 { lx - lx.ln() } else { lx.max(1.0) * 0.75 + 0.25 };
    for _ in 0..64 {
        let g = w + w.ln() - lx;
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = g / (d1 - 0.5 * g * d2 / d1);
        let next = (w - step).max(1e-300);
        let done = (next - w).abs() <= 1e-15 * next;
        w = next;
        if done {
            break;
        }
    }
    w
}
