//! Near-origin and large-x behavior of the Lambert-map class `(1, -1)`,
//! `V = sum_n V_n (z-1)^-n` with `x = x0 + sigma (z - ln z)`, `x0 = -sigma`.

use nalgebra::Matrix5;
use serde::Serialize;

use super::PotentialSpec;
use crate::catalog::EquationFamily;
use crate::error::{Error, Result};

const TERMS: usize = 10;

type Series = Vec<f64>;

fn mul(a: &Series, b: &Series) -> Series {
    let mut out = vec![0.0; TERMS];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < TERMS {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn sqrt_series(a: &Series) -> Series {
    // a[0] > 0; b^2 = a solved term by term.
    let mut b = vec![0.0; TERMS];
    b[0] = a[0].sqrt();
    for n in 1..TERMS {
        let cross: f64 = (1..n).map(|k| b[k] * b[n - k]).sum();
        b[n] = (a[n] - cross) / (2.0 * b[0]);
    }
    b
}

fn recip(a: &Series) -> Series {
    let mut b = vec![0.0; TERMS];
    b[0] = 1.0 / a[0];
    for n in 1..TERMS {
        let s: f64 = (1..=n).map(|k| a[k] * b[n - k]).sum();
        b[n] = -s / a[0];
    }
    b
}

fn compose(outer: &Series, inner: &Series) -> Series {
    // outer(inner(s)), inner[0] == 0.
    let mut out = vec![0.0; TERMS];
    let mut pw = vec![0.0; TERMS];
    pw[0] = 1.0;
    for c in outer {
        for k in 0..TERMS {
            out[k] += c * pw[k];
        }
        pw = mul(&pw, inner);
    }
    out
}

/// Coefficients `c_k` of `z - 1 = sum_k c_k s^k`, `s = sqrt((x - x0 - sigma)/sigma)`,
/// on the branch `z < 1`.
fn inverse_map_series() -> Series {
    // s = h(w) = -w sqrt(g(w)/2), g_j = 2 (-1)^j / (j + 2)
    let g: Series = (0..TERMS).map(|j| 2.0 * if j % 2 == 0 { 1.0 } else { -1.0 } / (j as f64 + 2.0)).collect();
    let half_g: Series = g.iter().map(|c| c / 2.0).collect();
    let root = sqrt_series(&half_g);
    let mut h = vec![0.0; TERMS];
    for k in 0..TERMS - 1 {
        h[k + 1] = -root[k];
    }
    // Reversion by fixed point: w = (s - (h(w) - h1 w)) / h1.
    let h1 = h[1];
    let mut nonlinear = h.clone();
    nonlinear[1] = 0.0;
    let mut w = vec![0.0; TERMS];
    w[1] = 1.0 / h1;
    for _ in 0..TERMS + 2 {
        let hw = compose(&nonlinear, &w);
        let mut next = vec![0.0; TERMS];
        next[1] = 1.0 / h1;
        for k in 0..TERMS {
            next[k] -= hw[k] / h1;
        }
        w = next;
    }
    w
}

/// Linear map from table coefficients `(V0..V4)` to `(d_-4, ..., d_0)`.
pub fn origin_expansion_matrix(sigma: f64) -> Matrix5<f64> {
    let w = inverse_map_series();
    // w = s * c(s)
    let c: Series = (0..TERMS).map(|k| if k + 1 < TERMS { w[k + 1] } else { 0.0 }).collect();
    let inv_c = recip(&c);
    let mut m = Matrix5::zeros();
    let mut pw = vec![0.0; TERMS];
    pw[0] = 1.0;
    for n in 0..5usize {
        // V_n s^-n c^-n contributes to s^(j) for j = k - n
        for (k, coef) in pw.iter().enumerate() {
            let j = k as i32 - n as i32;
            if (-4..=0).contains(&j) {
                let row = (j + 4) as usize;
                // s^j = (x/sigma)^(j/2)
                m[(row, n)] += coef * sigma.powf(-f64::from(j) / 2.0);
            }
        }
        pw = mul(&pw, &inv_c);
    }
    m
}

/// `(d_-4, d_-3, d_-2, d_-1, d_0)` multiplying `x^-2, x^-3/2, x^-1, x^-1/2, 1`.
pub fn origin_expansion(spec: &PotentialSpec) -> Result<[f64; 5]> {
    check_lambert_class(spec)?;
    let v = nalgebra::Vector5::from(spec.table_coefficients());
    Ok((origin_expansion_matrix(spec.sigma) * v).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailInfo {
    pub v_inf: f64,
    pub amplitude: f64,
    pub rate: f64,
}

fn check_lambert_class(spec: &PotentialSpec) -> Result<()> {
    let e = spec.class.exponents;
    let ok = spec.class.family == EquationFamily::ConfluentHeun
        && e.m1.doubled() == 2
        && e.m2.doubled() == -2
        && spec.sigma > 0.0
        && spec.x0 == -spec.sigma;
    if ok {
        Ok(())
    } else {
        Err(Error::WrongClass {
            expected: "confluent-heun (1, -1) with sigma > 0 and x0 = -sigma".into(),
            got: format!("{} sigma={} x0={}", spec.class.label(), spec.sigma, spec.x0),
        })
    }
}

/// `V -> V_inf - A exp(-(x + sigma)/sigma)` as `x -> +inf`.
pub fn tail(spec: &PotentialSpec) -> Result<TailInfo> {
    check_lambert_class(spec)?;
    let v = spec.table_coefficients();
    let sign = |n: usize| if n % 2 == 0 { 1.0 } else { -1.0 };
    let v_inf = (0..5).map(|n| sign(n) * v[n]).sum();
    let amplitude = v[1] - 2.0 * v[2] + 3.0 * v[3] - 4.0 * v[4];
    Ok(TailInfo { v_inf, amplitude, rate: 1.0 / spec.sigma })
}

/// `V_inf - V(x)` evaluated without cancellation for large x.
pub fn tail_deviation(spec: &PotentialSpec, x: f64) -> Result<f64> {
    check_lambert_class(spec)?;
    let z = spec.map().z_of_x(x)?;
    let v = spec.table_coefficients();
    let l = (-z).ln_1p();
    Ok((1..5)
        .map(|n| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            -v[n] * s * (-(n as f64) * l).exp_m1()
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::class;
    use crate::potentials::eval_potential_x;

    fn lam(v: [f64; 5], sigma: f64) -> PotentialSpec {
        let c = class(EquationFamily::ConfluentHeun, 2, -2).unwrap();
        PotentialSpec::from_table(c, v, sigma, -sigma).unwrap()
    }

    #[test]
    fn leading_coefficient() {
        let d = origin_expansion(&lam([0.0, 0.0, 0.0, 0.0, 1.0], 1.5)).unwrap();
        assert!((d[0] - 1.5f64.powi(2) / 4.0).abs() < 1e-14);
        let d = origin_expansion(&lam([1.0, 0.0, 0.0, 0.0, 0.0], 1.0)).unwrap();
        for (a, b) in d.iter().zip([0.0, 0.0, 0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn series_inversion_against_forward_map() {
        let w = inverse_map_series();
        assert!((w[1] + 2f64.sqrt()).abs() < 1e-15);
        for s in [1e-3f64, 1e-2, 0.05] {
            let u: f64 = w.iter().enumerate().map(|(k, c)| c * s.powi(k as i32)).sum();
            let tau = u - u.ln_1p();
            assert!((tau - s * s).abs() < 1e-12 * s * s, "{s}");
        }
    }

    #[test]
    fn numeric_fit_of_leading_term() {
        let v = [0.3, -0.7, 1.1, 0.4, 0.9];
        let sigma = 1.2;
        let s = lam(v, sigma);
        let d = origin_expansion(&s).unwrap();
        // sample x^2 V and extrapolate against the known sub-leading powers
        for x in [1e-6 * sigma, 1e-5 * sigma] {
            let val = eval_potential_x(&s, x).unwrap();
            let series = d[0] / x.powi(2) + d[1] / x.powf(1.5) + d[2] / x + d[3] / x.sqrt() + d[4];
            assert!((val - series).abs() < 1e-4 * val.abs(), "{x}: {val} vs {series}");
            let fit = val * x * x;
            assert!((fit - d[0]).abs() < 1e-4 * d[0].abs().max(1e-3) + 5.0 * d[1].abs() * x.sqrt());
        }
    }

    #[test]
    fn tail_examples() {
        let close = |t: TailInfo, v: f64, a: f64| (t.v_inf - v).abs() < 1e-14 && (t.amplitude - a).abs() < 1e-14;
        let t = tail(&lam([1.0, 0.0, 0.0, 0.0, 0.0], 1.0)).unwrap();
        assert!(close(t, 1.0, 0.0));
        let t = tail(&lam([0.0, 1.0, 0.0, 0.0, 0.0], 1.0)).unwrap();
        assert!(close(t, -1.0, 1.0));
        let t = tail(&lam([0.0, 0.0, 0.0, 0.0, 1.0], 1.0)).unwrap();
        assert!(close(t, 1.0, -4.0));
        let bad = PotentialSpec::from_table(class(EquationFamily::ConfluentHeun, 2, 0).unwrap(), [0.0; 5], 1.0, -1.0);
        assert!(tail(&bad.unwrap()).is_err());
    }
}
