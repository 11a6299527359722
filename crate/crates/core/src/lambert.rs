//! Real branches of the Lambert W function (inverse of `w e^w`).
//!
//! Halley iteration from branch-specific starting points: the branch-point
//! series in `p = sqrt(2 (e y + 1))` near `y = -1/e`, the Taylor series near
//! zero and the logarithmic asymptotics for large `|ln|y||`.

use std::f64::consts::E;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;
const MAX_ITER: usize = 64;

/// Arguments this close below `-1/e` are treated as the branch point.
const BRANCH_SLACK: f64 = 4.0 * f64::EPSILON;

fn branch_p(y: f64) -> f64 {
    // e*y + 1 with the rounding error of 1/e folded in.
    let t = E * y + 1.0;
    (2.0 * t.max(0.0)).sqrt()
}

fn halley(mut w: f64, y: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - y;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300) {
            w = next;
            break;
        }
        w = next;
    }
    w
}

/// Principal branch `W0(y) >= -1`, defined for `y >= -1/e`.
pub fn lambert_w0(y: f64) -> Result<f64> {
    if y.is_nan() || y < -INV_E - BRANCH_SLACK {
        return Err(Error::BranchPoint { y });
    }
    if y <= -INV_E {
        return Ok(-1.0);
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if y.abs() < 1e-4 {
        // y - y^2 + 3/2 y^3 - 8/3 y^4 + 125/24 y^5
        let w = y * (1.0 + y * (-1.0 + y * (1.5 + y * (-8.0 / 3.0 + y * 125.0 / 24.0))));
        return Ok(w);
    }
    let guess = if y < -0.25 {
        let p = branch_p(y);
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else if y < 3.0 {
        (1.0 + y).ln() * 0.8
    } else {
        let l1 = y.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(guess, y).max(-1.0))
}

/// Lower real branch `W_-1(y) <= -1`, defined for `-1/e <= y < 0`.
pub fn lambert_wm1(y: f64) -> Result<f64> {
    if y.is_nan() || y < -INV_E - BRANCH_SLACK {
        return Err(Error::BranchPoint { y });
    }
    if y >= 0.0 {
        return Err(Error::LambertBranch { y });
    }
    if y <= -INV_E {
        return Ok(-1.0);
    }
    let guess = if y < -0.25 {
        let p = branch_p(y);
        -1.0 - p * (1.0 + p * (1.0 / 3.0 + p * (11.0 / 72.0 + p * (43.0 / 540.0))))
    } else {
        let l1 = (-y).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    Ok(halley(guess, y).min(-1.0))
}
