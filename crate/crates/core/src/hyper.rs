//! Gauss ₂F₁ and Kummer M on the real axis.

use crate::error::{Error, Result};
use crate::heunfn::FnValue;
use crate::ode::LinearOde;
use crate::poly::Poly;

const MAX_TERMS: usize = 20_000;

fn nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Sums `Σ c_n z^n` and its derivative, with `c_{n+1} = c_n * ratio(n)`.
fn ratio_series(z: f64, ratio: impl Fn(usize) -> f64) -> Result<FnValue> {
    let mut c = 1.0f64;
    let (mut s, mut ds, mut abs_sum) = (0.0f64, 0.0f64, 0.0f64);
    let mut pw = 1.0f64;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let t = c * pw;
        s += t;
        abs_sum += t.abs();
        if n >= 1 {
            ds += n as f64 * c * pw / z;
        }
        if c == 0.0 {
            return Ok(FnValue { value: s, derivative: if z == 0.0 { 0.0 } else { ds }, est_error: 4.0 * f64::EPSILON * abs_sum });
        }
        if t.abs() <= 1e-17 * s.abs() {
            small += 1;
            if small >= 3 {
                let d = if z == 0.0 { ratio(0) } else { ds };
                return Ok(FnValue { value: s, derivative: d, est_error: t.abs() + 4.0 * f64::EPSILON * abs_sum });
            }
        } else {
            small = 0;
        }
        c *= ratio(n);
        pw *= z;
        if z == 0.0 {
            return Ok(FnValue { value: 1.0, derivative: c, est_error: 0.0 });
        }
    }
    Err(Error::Solver(format!("series did not converge at z = {z}")))
}

/// Kummer's M(a, b, z).
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<FnValue> {
    if nonpositive_integer(b) {
        return Err(Error::Degenerate(format!("Kummer M lower parameter b = {b}")));
    }
    if z < 0.0 && !nonpositive_integer(a) {
        // M(a, b, z) = e^z M(b - a, b, -z)
        let n = kummer_m(b - a, b, -z)?;
        let e = z.exp();
        return Ok(FnValue {
            value: e * n.value,
            derivative: e * (n.value - n.derivative),
            est_error: e * n.est_error,
        });
    }
    ratio_series(z, |n| {
        let n = n as f64;
        (a + n) / ((b + n) * (n + 1.0))
    })
}

fn gauss_series(a: f64, b: f64, c: f64, z: f64) -> Result<FnValue> {
    ratio_series(z, |n| {
        let n = n as f64;
        (a + n) * (b + n) / ((c + n) * (n + 1.0))
    })
}

/// Gauss ₂F₁(a, b; c; z) for real z < 1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<FnValue> {
    if nonpositive_integer(c) {
        return Err(Error::Degenerate(format!("2F1 lower parameter c = {c}")));
    }
    if z >= 1.0 {
        return Err(Error::SingularPoint { family: "hypergeometric".into(), z: 1.0 });
    }
    if z.abs() <= 0.5 {
        return gauss_series(a, b, c, z);
    }
    if z < -0.5 {
        // Pfaff: (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))
        let w = z / (z - 1.0);
        let g = gauss_2f1(a, c - b, c, w)?;
        let f = (1.0 - z).powf(-a);
        let dw = -1.0 / ((z - 1.0) * (z - 1.0));
        return Ok(FnValue {
            value: f * g.value,
            derivative: a * f / (1.0 - z) * g.value + f * g.derivative * dw,
            est_error: f * g.est_error,
        });
    }
    let seed = gauss_series(a, b, c, 0.5)?;
    let ode = LinearOde {
        p2: Poly(vec![0.0, 1.0, -1.0]),
        p1: Poly(vec![c, -(a + b + 1.0)]),
        p0: Poly::constant(-a * b),
        singular: vec![0.0, 1.0],
        max_step: 0.5,
    };
    let j = ode.continue_to(0.5, seed.value, seed.derivative, z)?;
    Ok(FnValue { value: j.u, derivative: j.du, est_error: j.err + seed.est_error * (j.u / seed.value).abs() })
}
