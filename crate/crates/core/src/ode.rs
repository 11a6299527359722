//! ODE integrators.
//!
//! * [`dopri5`]: adaptive Dormand–Prince 5(4) for small nonlinear systems.
//! * [`LinearOde`]: analytic continuation of `P2 u'' + P1 u' + P0 u = 0` with
//!   polynomial coefficients by re-expanding the Taylor series at each step.
//!   Steps stay inside half the distance to the nearest finite singularity, so
//!   every expansion converges geometrically and `u''` comes for free.

use crate::error::{Error, Result};
use crate::poly::Poly;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rtol: 1e-10, atol: 1e-12 }
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn dopri5<F>(mut f: F, t0: f64, y0: &[f64], t1: f64, tol: Tolerance) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok(y);
    }
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut h = dir * (t1 - t0).abs().min(1e-3);
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    f(t, &y, &mut k[0])?;
    let mut steps = 0usize;
    while dir * (t1 - t) > 0.0 {
        steps += 1;
        if steps > 5_000_000 {
            return Err(Error::StepUnderflow { t });
        }
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        let stage = |coef: &[(usize, f64)], k: &Vec<Vec<f64>>, y: &[f64], tmp: &mut [f64], h: f64| {
            for i in 0..y.len() {
                tmp[i] = y[i] + h * coef.iter().map(|(j, a)| a * k[*j][i]).sum::<f64>();
            }
        };
        stage(&[(0, A21)], &k, &y, &mut tmp, h);
        let (a, rest) = k.split_at_mut(1);
        f(t + C2 * h, &tmp, &mut rest[0])?;
        let _ = a;
        stage(&[(0, A31), (1, A32)], &k, &y, &mut tmp, h);
        f(t + C3 * h, &tmp, &mut k[2])?;
        stage(&[(0, A41), (1, A42), (2, A43)], &k, &y, &mut tmp, h);
        f(t + C4 * h, &tmp, &mut k[3])?;
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &y, &mut tmp, h);
        f(t + C5 * h, &tmp, &mut k[4])?;
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &y, &mut tmp, h);
        f(t + h, &tmp, &mut k[5])?;
        let mut y_new = vec![0.0; n];
        for i in 0..n {
            y_new[i] = y[i] + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        }
        f(t + h, &y_new, &mut k[6])?;
        let mut err = 0.0f64;
        for i in 0..n {
            let e = h
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 || !err.is_finite() && false {
            t += h;
            y = y_new;
            k.swap(0, 6);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
    }
    Ok(y)
}

/// `P2 u'' + P1 u' + P0 u = 0` with the real zeros of `P2` listed explicitly.
#[derive(Debug, Clone)]
pub struct LinearOde {
    pub p2: Poly,
    pub p1: Poly,
    pub p0: Poly,
    pub singular: Vec<f64>,
    /// Cap on a single continuation step.
    pub max_step: f64,
}

/// Value, first and second derivative at a point, plus an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub err: f64,
}

const MAX_TERMS: usize = 600;

impl LinearOde {
    /// Taylor coefficients of the solution with `u(z0) = u`, `u'(z0) = du`.
    pub fn taylor_coefficients(&self, z0: f64, u: f64, du: f64, n: usize) -> Result<Vec<f64>> {
        let a = self.p2.taylor_shift(z0);
        let b = self.p1.taylor_shift(z0);
        let c = self.p0.taylor_shift(z0);
        let a0 = a.coeff(0);
        if a0 == 0.0 {
            return Err(Error::SingularPoint { family: "linear".into(), z: z0 });
        }
        let mut co = vec![0.0; n.max(2)];
        co[0] = u;
        co[1] = du;
        for m in 0..n.saturating_sub(2) {
            let mut s = 0.0;
            for (k, ak) in a.0.iter().enumerate().skip(1) {
                let idx = m as i64 - k as i64 + 2;
                if idx >= 0 {
                    let i = idx as usize;
                    if i >= 2 {
                        s += ak * (i * (i - 1)) as f64 * co[i];
                    }
                }
            }
            for (k, bk) in b.0.iter().enumerate() {
                let idx = m as i64 - k as i64 + 1;
                if idx >= 1 {
                    let i = idx as usize;
                    s += bk * i as f64 * co[i];
                }
            }
            for (k, ck) in c.0.iter().enumerate() {
                let idx = m as i64 - k as i64;
                if idx >= 0 {
                    s += ck * co[idx as usize];
                }
            }
            co[m + 2] = -s / (a0 * ((m + 2) * (m + 1)) as f64);
        }
        Ok(co)
    }

    fn dist_to_singular(&self, z: f64) -> f64 {
        self.singular.iter().map(|s| (z - s).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Sums the Taylor series at offset `h`; `None` if it did not converge.
    fn sum_series(co_fn: &dyn Fn(usize) -> Result<Vec<f64>>, h: f64) -> Result<Option<(Jet, usize)>> {
        let mut n = 48;
        loop {
            let co = co_fn(n)?;
            let mut u = 0.0f64;
            let mut du = 0.0f64;
            let mut d2u = 0.0f64;
            let mut pw = 1.0f64;
            let mut tail = 0.0f64;
            let mut small = 0;
            let mut converged = false;
            for (k, ck) in co.iter().enumerate() {
                let t = ck * pw;
                u += t;
                if k >= 1 {
                    du += k as f64 * ck * pw / h;
                }
                if k >= 2 {
                    d2u += (k * (k - 1)) as f64 * ck * pw / (h * h);
                }
                let mag = t.abs() * (k as f64 + 1.0).powi(2);
                if mag <= 1e-18 * (u.abs() + du.abs() * h.abs() + 1e-300) {
                    small += 1;
                    if small >= 3 && k > 4 {
                        converged = true;
                        tail = mag;
                        break;
                    }
                } else {
                    small = 0;
                }
                pw *= h;
            }
            if h == 0.0 {
                let co = co_fn(3)?;
                return Ok(Some((Jet { u: co[0], du: co[1], d2u: 2.0 * co[2], err: 0.0 }, 3)));
            }
            if converged {
                let err = tail + 4.0 * f64::EPSILON * u.abs();
                return Ok(Some((Jet { u, du, d2u, err }, n)));
            }
            if n >= MAX_TERMS {
                return Ok(None);
            }
            n = (n * 2).min(MAX_TERMS);
        }
    }

    /// Continues the solution from `(z0, u, du)` to `z1` along the real axis.
    /// Errors if the path touches a singular point.
    pub fn continue_to(&self, z0: f64, u: f64, du: f64, z1: f64) -> Result<Jet> {
        let lo = z0.min(z1);
        let hi = z0.max(z1);
        if let Some(s) = self.singular.iter().find(|s| **s >= lo && **s <= hi && **s != z0 || **s == z1) {
            return Err(Error::SingularPoint { family: "linear".into(), z: *s });
        }
        let mut z = z0;
        let mut state = (u, du);
        let mut err = 0.0;
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::StepUnderflow { t: z });
            }
            let remaining = z1 - z;
            let mut h = remaining.signum()
                * remaining.abs().min(0.5 * self.dist_to_singular(z)).min(self.max_step);
            if remaining == 0.0 {
                h = 0.0;
            }
            loop {
                let zc = z;
                let (su, sdu) = state;
                let co_fn = |n: usize| self.taylor_coefficients(zc, su, sdu, n);
                match Self::sum_series(&co_fn, h)? {
                    Some((jet, _)) => {
                        z += h;
                        state = (jet.u, jet.du);
                        err += jet.err;
                        if remaining == 0.0 || z == z1 || h == remaining {
                            // u'' from differentiating the last expansion
                            return Ok(Jet { u: state.0, du: state.1, d2u: jet.d2u, err });
                        }
                        break;
                    }
                    None => {
                        h *= 0.5;
                        if h.abs() < 1e-12 {
                            return Err(Error::StepUnderflow { t: z });
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dopri_exponential() {
        let y = dopri5(|_, y, dy| {
            dy[0] = -y[0];
            Ok(())
        }, 0.0, &[1.0], 5.0, Tolerance { rtol: 1e-12, atol: 1e-14 })
        .unwrap();
        assert!((y[0] - (-5f64).exp()).abs() < 1e-12);
        let y = dopri5(|_, y, dy| {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        }, 0.0, &[0.0, 1.0], -3.0, Tolerance { rtol: 1e-12, atol: 1e-14 })
        .unwrap();
        assert!((y[0] - (-3f64).sin()).abs() < 1e-10);
    }

    #[test]
    fn taylor_continuation_airy_like() {
        // u'' + u = 0 (cos), and z u'' + u' ... checked against closed forms
        let ode = LinearOde {
            p2: Poly::constant(1.0),
            p1: Poly::zero(),
            p0: Poly::constant(1.0),
            singular: vec![],
            max_step: 1.0,
        };
        let j = ode.continue_to(0.0, 1.0, 0.0, 7.3).unwrap();
        assert!((j.u - 7.3f64.cos()).abs() < 1e-13);
        assert!((j.du + 7.3f64.sin()).abs() < 1e-13);
        assert!((j.d2u + 7.3f64.cos()).abs() < 1e-13);
        // (1 - z) u'' - u' = 0 -> u = -ln(1 - z): u' = 1/(1-z)
        let ode = LinearOde {
            p2: Poly(vec![1.0, -1.0]),
            p1: Poly::constant(-1.0),
            p0: Poly::zero(),
            singular: vec![1.0],
            max_step: 1.0,
        };
        let j = ode.continue_to(0.0, 0.0, 1.0, 0.999).unwrap();
        assert!((j.u + (0.001f64).ln()).abs() < 1e-11, "{}", j.u);
        assert!(ode.continue_to(0.0, 0.0, 1.0, 1.5).is_err());
    }
}
