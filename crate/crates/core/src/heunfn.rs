//! Confluent Heun function and solvers for the four confluent Heun
//! canonical forms
//!
//! ```text
//! CHE: u'' + (γ/z + δ/(z-1) + ε) u' + (αz - q)/(z(z-1)) u = 0
//! DHE: u'' + (γ/z² + δ/z + ε) u' + (αz - q)/z² u = 0
//! BHE: u'' + (γ/z + δ + εz) u' + (αz - q)/z u = 0
//! THE: u'' + (γ + δz + εz²) u' + (αz - q) u = 0
//! ```

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::catalog::EquationFamily;
use crate::error::{Error, Result};
use crate::ode::{Jet, LinearOde};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunParams {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FnValue {
    pub value: f64,
    pub derivative: f64,
    pub est_error: f64,
}

/// Radius of the direct series evaluation about z = 0.
pub const SERIES_RADIUS: f64 = 0.5;

impl HeunParams {
    pub fn new(gamma: f64, delta: f64, epsilon: f64, alpha: f64, q: f64) -> Self {
        HeunParams { gamma, delta, epsilon, alpha, q }
    }

    /// Parameters of the same equation in `w = 1 - z`.
    pub fn reflected(&self) -> Self {
        HeunParams {
            gamma: self.delta,
            delta: self.gamma,
            epsilon: -self.epsilon,
            alpha: -self.alpha,
            q: self.q - self.alpha,
        }
    }
}

/// `P2 u'' + P1 u' + P0 u = 0` form of a family's canonical equation.
pub fn polynomial_form(family: EquationFamily, p: &HeunParams) -> Result<LinearOde> {
    let HeunParams { gamma: g, delta: d, epsilon: e, alpha: a, q } = *p;
    let quad = Poly(vec![g, d, e]);
    let pot = Poly(vec![-q, a]);
    let (p2, p1, singular) = match family {
        EquationFamily::ConfluentHeun => {
            (Poly(vec![0.0, -1.0, 1.0]), Poly(vec![-g, g + d - e, e]), vec![0.0, 1.0])
        }
        EquationFamily::DoubleConfluentHeun => (Poly::monomial(2), quad, vec![0.0]),
        EquationFamily::BiConfluentHeun => (Poly::monomial(1), quad, vec![0.0]),
        EquationFamily::TriConfluentHeun => (Poly::constant(1.0), quad, vec![]),
        other => {
            return Err(Error::WrongClass { expected: "a confluent Heun family".into(), got: other.slug().into() })
        }
    };
    Ok(LinearOde { p2, p1, p0: pot, singular, max_step: 0.5 })
}

/// `(f, g)` of `u'' + f u' + g u = 0`.
pub fn canonical_coefficients(family: EquationFamily, p: &HeunParams, z: f64) -> Result<(f64, f64)> {
    let ode = polynomial_form(family, p)?;
    let p2 = ode.p2.eval(z);
    if p2 == 0.0 {
        return Err(Error::SingularPoint { family: family.slug().into(), z });
    }
    Ok((ode.p1.eval(z) / p2, ode.p0.eval(z) / p2))
}

fn degenerate_gamma(g: f64) -> bool {
    g <= 0.0 && g == g.round()
}

/// Sums `Σ c_n z^n` with `c_0 = 1`, `c_{n+1} = next(n, c_n, c_{n-1})`,
/// returning value, first and second derivative.
fn recurrence_series(z: f64, next: impl Fn(f64, f64, f64) -> f64) -> Result<Jet> {
    let (mut c_prev, mut c) = (0.0f64, 1.0f64);
    if z == 0.0 {
        let c1 = next(0.0, 1.0, 0.0);
        let c2 = next(1.0, c1, 1.0);
        return Ok(Jet { u: 1.0, du: c1, d2u: 2.0 * c2, err: 0.0 });
    }
    let (mut s, mut ds, mut d2s, mut abs_sum) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut pw = 1.0f64;
    let mut small = 0;
    for n in 0..5000usize {
        let nf = n as f64;
        let t = c * pw;
        s += t;
        abs_sum += t.abs();
        ds += nf * t / z;
        d2s += nf * (nf - 1.0) * t / (z * z);
        let c_next = next(nf, c, c_prev);
        if t.abs() <= 1e-17 * s.abs() && (c_next * pw * z).abs() <= 1e-17 * s.abs() {
            small += 1;
            if small >= 2 && n > 3 {
                return Ok(Jet { u: s, du: ds, d2u: d2s, err: t.abs() + 4.0 * f64::EPSILON * abs_sum });
            }
        } else {
            small = 0;
        }
        c_prev = c;
        c = c_next;
        pw *= z;
    }
    Err(Error::Solver(format!("series did not converge at z = {z}")))
}

/// Power series about z = 0 from the three-term recurrence, `|z| <= 1/2`.
fn heun_series(p: &HeunParams, z: f64) -> Result<Jet> {
    let HeunParams { gamma: g, delta: d, epsilon: e, alpha: a, q } = *p;
    recurrence_series(z, |n, c, cp| {
        ((n * (n - 1.0 + g + d - e) - q) * c + (e * (n - 1.0) + a) * cp) / ((n + 1.0) * (n + g))
    })
}

/// Local solution of BHE regular at z = 0 with u(0) = 1.
fn bhe_series(p: &HeunParams, z: f64) -> Result<Jet> {
    let HeunParams { gamma: g, delta: d, epsilon: e, alpha: a, q } = *p;
    recurrence_series(z, |n, c, cp| ((q - d * n) * c - (e * (n - 1.0) + a) * cp) / ((n + 1.0) * (n + g)))
}

fn to_value(j: Jet) -> FnValue {
    FnValue { value: j.u, derivative: j.du, est_error: j.err }
}

/// Hc(γ, δ, ε; α, q; z), normalized by Hc(0) = 1, for real z < 1.
pub fn heun_c(p: &HeunParams, z: f64) -> Result<FnValue> {
    heun_c_with_radius(p, z, SERIES_RADIUS)
}

/// As [`heun_c`] with the series/continuation hand-off at `radius`.
pub fn heun_c_with_radius(p: &HeunParams, z: f64, radius: f64) -> Result<FnValue> {
    heun_c_jet(p, z, radius).map(to_value)
}

fn heun_c_jet(p: &HeunParams, z: f64, radius: f64) -> Result<Jet> {
    if degenerate_gamma(p.gamma) {
        return Err(Error::Degenerate(format!("gamma = {} is a nonpositive integer", p.gamma)));
    }
    if z >= 1.0 {
        return Err(Error::SingularPoint { family: "confluent-heun".into(), z: 1.0 });
    }
    if z.abs() <= radius {
        return heun_series(p, z);
    }
    continued(EquationFamily::ConfluentHeun, p, heun_series(p, radius.copysign(z))?, radius.copysign(z), z)
}

fn continued(family: EquationFamily, p: &HeunParams, seed: Jet, z_seed: f64, z: f64) -> Result<Jet> {
    let j = polynomial_form(family, p)?.continue_to(z_seed, seed.u, seed.du, z)?;
    let scale = (j.u.abs() + j.du.abs()) / (seed.u.abs() + seed.du.abs()).max(f64::MIN_POSITIVE);
    Ok(Jet { err: j.err + seed.err * scale, ..j })
}

/// Solution regular at z = 1 with value 1 there, for z > 1 (or any z > 0).
pub fn heun_c_at_one(p: &HeunParams, z: f64) -> Result<FnValue> {
    let v = heun_c(&p.reflected(), 1.0 - z)?;
    Ok(FnValue { value: v.value, derivative: -v.derivative, est_error: v.est_error })
}

/// A fixed solution of the family's canonical equation at real z:
/// * CHE: `Hc` for z < 1, the solution regular at 1 for z > 1;
/// * BHE: the solution regular at 0 with u(0) = 1;
/// * THE: u(0) = 1, u'(0) = 0;
/// * DHE: u(1) = 1, u'(1) = 0 (z = 0 is irregular).
pub fn local_solution(family: EquationFamily, p: &HeunParams, z: f64) -> Result<FnValue> {
    local_jet(family, p, z).map(to_value)
}

/// [`local_solution`] with the second derivative taken from the
/// differentiated series expansion.
pub fn local_jet(family: EquationFamily, p: &HeunParams, z: f64) -> Result<Jet> {
    match family {
        EquationFamily::ConfluentHeun => {
            if z < 1.0 {
                heun_c_jet(p, z, SERIES_RADIUS)
            } else if z > 1.0 {
                let j = heun_c_jet(&p.reflected(), 1.0 - z, SERIES_RADIUS)?;
                Ok(Jet { du: -j.du, ..j })
            } else {
                Err(Error::SingularPoint { family: family.slug().into(), z })
            }
        }
        EquationFamily::BiConfluentHeun => {
            if degenerate_gamma(p.gamma) {
                return Err(Error::Degenerate(format!("gamma = {} is a nonpositive integer", p.gamma)));
            }
            if z.abs() <= SERIES_RADIUS {
                return bhe_series(p, z);
            }
            let z_seed = SERIES_RADIUS.copysign(z);
            continued(family, p, bhe_series(p, z_seed)?, z_seed, z)
        }
        EquationFamily::TriConfluentHeun => polynomial_form(family, p)?.continue_to(0.0, 1.0, 0.0, z),
        EquationFamily::DoubleConfluentHeun => {
            if z <= 0.0 {
                return Err(Error::SingularPoint { family: family.slug().into(), z: 0.0 });
            }
            polynomial_form(family, p)?.continue_to(1.0, 1.0, 0.0, z)
        }
        other => Err(Error::WrongClass { expected: "a confluent Heun family".into(), got: other.slug().into() }),
    }
}

/// Second derivative at `zs[i]` from the Hermite interpolant of `(u, u')`
/// at up to five neighbouring nodes.
pub fn hermite_second_derivative(zs: &[f64], vals: &[f64], ders: &[f64], i: usize) -> f64 {
    let n = zs.len();
    let k = n.min(5);
    let lo = i.saturating_sub(k / 2).min(n - k);
    let z0 = zs[i];
    let h = (zs[lo + k - 1] - zs[lo]).abs() / (k - 1) as f64;
    let dim = 2 * k;
    let mut m = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    for (r, j) in (lo..lo + k).enumerate() {
        let t = (zs[j] - z0) / h;
        for p in 0..dim {
            m[(2 * r, p)] = t.powi(p as i32);
            m[(2 * r + 1, p)] = if p == 0 { 0.0 } else { p as f64 * t.powi(p as i32 - 1) };
        }
        rhs[2 * r] = vals[j];
        rhs[2 * r + 1] = ders[j] * h;
    }
    match m.lu().solve(&rhs) {
        Some(c) => 2.0 * c[2] / (h * h),
        None => f64::NAN,
    }
}

/// Max over the grid of `|u'' + f u' + g u|` divided by the local scale
/// `|u''| + |f u'| + |g u|`. The grid may contain z = 0 for the CHE and BHE
/// solutions regular there; other singular points are rejected.
pub fn ode_residual(family: EquationFamily, p: &HeunParams, zs: &[f64], us: &[FnValue]) -> Result<f64> {
    if zs.len() < 3 || zs.len() != us.len() {
        return Err(Error::Degenerate("residual needs at least three matching grid points".into()));
    }
    let ode = polynomial_form(family, p)?;
    if let Some(s) = ode.singular.iter().find(|s| zs.iter().any(|z| z == *s && **s != 0.0 || z == *s && family != EquationFamily::ConfluentHeun && family != EquationFamily::BiConfluentHeun)) {
        return Err(Error::SingularPoint { family: family.slug().into(), z: *s });
    }
    let vals: Vec<f64> = us.iter().map(|u| u.value).collect();
    let ders: Vec<f64> = us.iter().map(|u| u.derivative).collect();
    let mut worst = 0.0f64;
    for i in 0..zs.len() {
        // the ratio is unchanged by clearing denominators, which also
        // covers the regular singular point z = 0 of series solutions
        let z = zs[i];
        let d2 = hermite_second_derivative(zs, &vals, &ders, i);
        let (a, b, c) = (ode.p2.eval(z) * d2, ode.p1.eval(z) * us[i].derivative, ode.p0.eval(z) * us[i].value);
        let scale = a.abs() + b.abs() + c.abs();
        let r = if scale == 0.0 { 0.0 } else { (a + b + c).abs() / scale };
        worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    Ok(worst)
}
