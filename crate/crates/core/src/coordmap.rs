//! Coordinate maps `dz/dx = rho(z) = z^m1 (z-1)^m2 / sigma`, their closed-form
//! antiderivatives `x(z)`, inverses `z(x)` and the Schwarzian derivative.
//!
//! Integer powers keep the sign of their base; half-integer powers act on
//! `|base|` (see [`real_pow`]), so every map is real on its class domain.
//! Classes that are not the canonical member of a `z <-> 1-z` pair are
//! evaluated through their partner: `x(z) = x0 - c sigma F(1 - z)` with
//! `c = reflection_sign(m1) * reflection_sign(m2)`.

use std::f64::consts::PI;

use crate::catalog::{canonical, ClassInfo, EquationFamily, ExponentPair};
use crate::error::{Error, Result};
use crate::halfint::{real_pow, reflection_sign};
use crate::lambert::lambert_w0;

#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub class: ClassInfo,
    pub sigma: f64,
    pub x0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Chart {
    /// Canonical confluent Heun pair, doubled exponents, Table-1 domains.
    Heun(i32, i32),
    /// Canonical hypergeometric pair on 0 < z < 1.
    Gauss(i32, i32),
    /// One finite singularity at z = 0, doubled m1.
    Power(i32),
    Linear,
}

/// Range of `t = (x - x0)/sigma` (after mirror scaling) covered by a chart.
#[derive(Debug, Clone, Copy)]
struct TRange {
    lo: f64,
    hi: f64,
    lo_closed: bool,
}

impl TRange {
    const fn open(lo: f64, hi: f64) -> Self {
        TRange { lo, hi, lo_closed: false }
    }
    fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        above && t < self.hi
    }
}

const INF: f64 = f64::INFINITY;

impl Chart {
    fn antiderivative(self, z: f64) -> f64 {
        match self {
            Chart::Heun(a, b) => match (a, b) {
                (0, 0) => z,
                (1, -1) => (z * (z - 1.0)).sqrt() - (z - 1.0).sqrt().asinh(),
                (1, 0) => 2.0 * z.sqrt(),
                (1, 1) => 2.0 * (z - 1.0).sqrt().asinh(),
                (2, -2) => z - z.ln(),
                (2, -1) => {
                    let s = (z - 1.0).sqrt();
                    2.0 * s - 2.0 * s.atan()
                }
                (2, 0) => z.ln(),
                (2, 1) => 2.0 * (z - 1.0).sqrt().atan(),
                (2, 2) => 2.0 * (1.0 - 2.0 * z).atanh(),
                _ => unreachable!(),
            },
            Chart::Gauss(a, b) => match (a, b) {
                (2, 2) => 2.0 * (1.0 - 2.0 * z).atanh(),
                (2, 0) => z.ln(),
                (1, 1) => 2.0 * z.sqrt().asin(),
                (2, 1) => -2.0 * (1.0 - z).sqrt().atanh(),
                _ => unreachable!(),
            },
            Chart::Power(a) => match a {
                2 => z.ln(),
                _ => {
                    let p = 1.0 - f64::from(a) / 2.0;
                    z.powf(p) / p
                }
            },
            Chart::Linear => z,
        }
    }

    fn t_range(self) -> TRange {
        match self {
            Chart::Heun(a, b) => match (a, b) {
                (0, 0) | (2, 0) | (2, 2) => TRange::open(-INF, INF),
                (2, -2) => TRange { lo: 1.0, hi: INF, lo_closed: true },
                (2, 1) => TRange::open(0.0, PI),
                _ => TRange::open(0.0, INF),
            },
            Chart::Gauss(a, b) => match (a, b) {
                (2, 2) => TRange::open(-INF, INF),
                (1, 1) => TRange::open(0.0, PI),
                _ => TRange::open(-INF, 0.0),
            },
            Chart::Power(a) => match a.cmp(&2) {
                std::cmp::Ordering::Less => TRange::open(0.0, INF),
                std::cmp::Ordering::Equal => TRange::open(-INF, INF),
                std::cmp::Ordering::Greater => TRange::open(-INF, 0.0),
            },
            Chart::Linear => TRange::open(-INF, INF),
        }
    }

    /// Closed-form inverse of [`Chart::antiderivative`]; `None` when the chart
    /// needs a numeric root-find.
    fn inverse(self, t: f64) -> Option<f64> {
        let z = match self {
            Chart::Heun(a, b) => match (a, b) {
                (0, 0) => t,
                (1, 0) => 0.25 * t * t,
                (1, 1) => (0.5 * t).cosh().powi(2),
                (2, 0) => t.exp(),
                (2, 1) => 1.0 + (0.5 * t).tan().powi(2),
                (2, 2) => 0.5 * (1.0 - (0.5 * t).tanh()),
                _ => return None,
            },
            Chart::Gauss(a, b) => match (a, b) {
                (2, 2) => 0.5 * (1.0 - (0.5 * t).tanh()),
                (2, 0) => t.exp(),
                (1, 1) => (0.5 * t).sin().powi(2),
                (2, 1) => 1.0 / (0.5 * t).cosh().powi(2),
                _ => unreachable!(),
            },
            Chart::Power(a) => match a {
                2 => t.exp(),
                _ => {
                    let p = 1.0 - f64::from(a) / 2.0;
                    (p * t).powf(1.0 / p)
                }
            },
            Chart::Linear => t,
        };
        Some(z)
    }
}

/// `u - ln(1 + u)`, accurate for small `u`.
fn u_minus_log1p(u: f64) -> f64 {
    if u.abs() < 0.05 {
        let mut term = -u;
        let mut sum = 0.0;
        for k in 2..40 {
            term *= -u;
            let c = term / k as f64;
            sum += c;
            if c.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        u - u.ln_1p()
    }
}

impl MapSpec {
    pub fn new(class: ClassInfo, sigma: f64, x0: f64) -> Result<Self> {
        if sigma == 0.0 || !sigma.is_finite() || !x0.is_finite() {
            return Err(Error::Degenerate(format!("map scale sigma must be finite and nonzero, got {sigma}")));
        }
        Ok(MapSpec { class, sigma, x0 })
    }

    fn exps(&self) -> ExponentPair {
        self.class.exponents
    }

    fn label(&self) -> String {
        self.class.label()
    }

    /// Chart plus the mirror factor (`None` for direct evaluation).
    fn chart(&self) -> (Chart, Option<f64>) {
        let p = self.exps();
        match self.class.family {
            EquationFamily::ConfluentHeun | EquationFamily::Hypergeometric => {
                let rep = canonical(p);
                let chart = if self.class.family == EquationFamily::ConfluentHeun {
                    Chart::Heun(rep.m1.doubled(), rep.m2.doubled())
                } else {
                    Chart::Gauss(rep.m1.doubled(), rep.m2.doubled())
                };
                if rep == p {
                    (chart, None)
                } else {
                    (chart, Some(reflection_sign(p.m1) * reflection_sign(p.m2)))
                }
            }
            EquationFamily::TriConfluentHeun => (Chart::Linear, None),
            _ => (Chart::Power(p.m1.doubled()), None),
        }
    }

    fn check_z(&self, z: f64) -> Result<()> {
        if self.class.z_domain.contains(z) {
            Ok(())
        } else {
            Err(Error::ZDomain { class: self.label(), z, domain: self.class.z_domain.to_string() })
        }
    }

    fn check_interior(&self, z: f64) -> Result<()> {
        if self.class.z_domain.contains_interior(z) {
            Ok(())
        } else {
            Err(Error::ZDomain { class: self.label(), z, domain: self.class.z_domain.to_string() })
        }
    }

    pub fn x_of_z(&self, z: f64) -> Result<f64> {
        self.check_z(z)?;
        let (chart, mirror) = self.chart();
        let t = match mirror {
            None => chart.antiderivative(z),
            Some(c) => -c * chart.antiderivative(1.0 - z),
        };
        Ok(self.x0 + self.sigma * t)
    }

    pub fn z_of_x(&self, x: f64) -> Result<f64> {
        let (chart, mirror) = self.chart();
        let s = (x - self.x0) / self.sigma;
        let t = match mirror {
            None => s,
            Some(c) => -c * s,
        };
        let range = chart.t_range();
        if !range.contains(t) || !x.is_finite() {
            return Err(Error::XDomain {
                class: self.label(),
                x,
                detail: format!("(x - x0)/sigma must lie in ({}, {})", range.lo, range.hi),
            });
        }
        let w = if chart == Chart::Heun(2, -2) {
            let k = mirror.map_or(1.0, |c| -c);
            self.lambert_inverse(t, k * (x - (self.x0 + k * self.sigma)) / self.sigma)?
        } else if let Some(w) = chart.inverse(t) {
            w
        } else {
            self.bisect_inverse(chart, t)?
        };
        let z = match mirror {
            None => w,
            Some(_) => 1.0 - w,
        };
        if !self.class.z_domain.contains(z) {
            return Err(Error::XDomain { class: self.label(), x, detail: format!("inverse landed at z = {z}") });
        }
        Ok(z)
    }

    /// `z = -W0(-exp(-t))`, polished by Newton steps on
    /// `u - ln(1 + u) = tau` with `u = z - 1`; `tau = t - 1` is passed in
    /// separately so it keeps full relative precision near the origin.
    fn lambert_inverse(&self, t: f64, tau: f64) -> Result<f64> {
        if tau <= 0.0 {
            return Ok(1.0);
        }
        let z = -lambert_w0(-(-t).exp())?;
        if z < 1e-3 {
            return Ok(z);
        }
        let mut u = z - 1.0;
        if u == 0.0 {
            u = -(2.0 * tau).sqrt();
        }
        for _ in 0..8 {
            let h = u_minus_log1p(u) - tau;
            let dh = u / (1.0 + u);
            if dh == 0.0 {
                break;
            }
            let next = (u - h / dh).clamp(-1.0 + 1e-300, -1e-300);
            let done = (next - u).abs() <= 1e-16 * u.abs();
            u = next;
            if done {
                break;
            }
        }
        Ok(1.0 + u)
    }

    fn bisect_inverse(&self, chart: Chart, t: f64) -> Result<f64> {
        // Only the two z > 1 Heun charts without elementary inverses reach here.
        let f = |z: f64| chart.antiderivative(z) - t;
        let mut lo = 1.0;
        let mut hi = 2.0;
        let mut expansions = 0;
        while f(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if expansions > 1100 || !hi.is_finite() {
                return Err(Error::NoBracket { class: self.label(), lo: 1.0, hi });
            }
        }
        if f(lo) > 0.0 && lo > 1.0 {
            return Err(Error::NoBracket { class: self.label(), lo, hi });
        }
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi * 1e-3 {
                break;
            }
        }
        // Newton polish inside the verified bracket, dF/dz = z^-m1 (z-1)^-m2.
        let (a, b) = match chart {
            Chart::Heun(a, b) => (a, b),
            _ => unreachable!(),
        };
        let mut z = 0.5 * (lo + hi);
        for _ in 0..3 {
            let dfdz = (z).powf(-f64::from(a) / 2.0) * (z - 1.0).powf(-f64::from(b) / 2.0);
            let next = z - f(z) / dfdz;
            if next > lo && next < hi {
                z = next;
            }
        }
        Ok(z)
    }

    /// `(rho, d rho/dz, d^2 rho/dz^2)` without a domain check.
    pub fn rho_derivatives_unchecked(&self, z: f64) -> (f64, f64, f64) {
        let (r, rz) = self.log_derivative(z);
        let rho = self.rho_unchecked(z);
        (rho, rho * r, rho * (rz + r * r))
    }

    pub fn rho_unchecked(&self, z: f64) -> f64 {
        let p = self.exps();
        match self.class.family.finite_singularities() {
            2 => real_pow(z, p.m1) * real_pow(z - 1.0, p.m2) / self.sigma,
            1 => real_pow(z, p.m1) / self.sigma,
            _ => 1.0 / self.sigma,
        }
    }

    /// `R = rho_z / rho` and `dR/dz`.
    pub fn log_derivative(&self, z: f64) -> (f64, f64) {
        let p = self.exps();
        let (a, b) = (p.m1.value(), p.m2.value());
        match self.class.family.finite_singularities() {
            2 => (a / z + b / (z - 1.0), -a / (z * z) - b / ((z - 1.0) * (z - 1.0))),
            1 => (a / z, -a / (z * z)),
            _ => (0.0, 0.0),
        }
    }

    /// `rho^2` as the analytic product of integer powers `z^{2m1}(z-1)^{2m2}/sigma^2`
    /// taken in absolute value.
    pub fn rho_squared_unchecked(&self, z: f64) -> f64 {
        let r = self.rho_unchecked(z);
        r * r
    }

    pub fn rho(&self, z: f64) -> Result<f64> {
        self.check_interior(z)?;
        Ok(self.rho_unchecked(z))
    }

    pub fn schwarzian_unchecked(&self, z: f64) -> f64 {
        let (rho, rz, rzz) = self.rho_derivatives_unchecked(z);
        rho * rzz - 0.5 * rz * rz
    }

    /// `{z, x} = rho rho_zz - rho_z^2 / 2`.
    pub fn schwarzian(&self, z: f64) -> Result<f64> {
        self.check_interior(z)?;
        Ok(self.schwarzian_unchecked(z))
    }

    /// Image of the class domain in x, as `(x_lo, x_hi)` (ordered, may be infinite).
    pub fn x_image(&self) -> (f64, f64) {
        let (chart, mirror) = self.chart();
        let r = chart.t_range();
        let scale = self.sigma * mirror.map_or(1.0, |c| -c);
        let a = self.x0 + scale * r.lo;
        let b = self.x0 + scale * r.hi;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}
