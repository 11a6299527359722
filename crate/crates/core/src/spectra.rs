//! Bound states: Numerov shooting as an independent oracle, and textbook
//! closed forms for the classical hypergeometric sub-potentials.
//!
//! Closed forms (units 2m/hbar^2 = 1, `t = (x - x0)/sigma`):
//!
//! | name | potential | levels |
//! |------|-----------|--------|
//! | Eckart | `A y + B y^2`, `y = 1/(1 + e^t)` | `E = -k^2/sigma^2`, `k = (K - 4 sigma^2 (A+B)/K)/4`, `K = sqrt(1 + 4 sigma^2 B) - 1 - 2n` |
//! | Eckart (wall) | `A/(z-1) + B/(z-1)^2`, `z = e^t`, `t < 0` | `E = -((k^2 - P)/(2k))^2`, `k = (b + n)/sigma`, `P = B - A`, `b = 1/2 + sqrt(1/4 + sigma^2 B)` |
//! | Pöschl–Teller | `-lambda(lambda-1) a^2 sech^2(a x)`, `a = 1/(2 sigma)` | `E = -a^2 (lambda - 1 - n)^2` |
//! | Morse | `V1 e^t + V2 e^{2t}` | `E = -(sqrt(D) - (n + 1/2)/sigma)^2`, `D = V1^2/(4 V2)` |
//! | harmonic | `w^2 (x - x0)^2` | `E = w (2n + 1)` |
//! | Kratzer | `c1/r + c2/r^2` | `E = -c1^2 / (4 (n + s)^2)`, `s = 1/2 + sqrt(1/4 + c2)` |

use serde::Serialize;

use crate::catalog::{class, ClassInfo, EquationFamily};
use crate::error::{Error, Result};
use crate::potentials::{eval_potential_x, eval_table_z, PotentialSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub node_counts: Vec<usize>,
    pub domain: (f64, f64),
    pub grid_n: usize,
    pub method_tol: f64,
}

impl Spectrum {
    fn closed(energies: Vec<f64>) -> Self {
        let n = energies.len();
        Spectrum { energies, node_counts: (0..n).collect(), domain: (f64::NEG_INFINITY, f64::INFINITY), grid_n: 0, method_tol: 0.0 }
    }
}

/// Behaviour at the left end of the integration interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftEnd {
    /// Decaying into a classically forbidden region (truncated).
    Decay,
    /// `psi = 0` at a finite endpoint.
    Wall,
    /// Regular solution `r^s (1 + c1 r / (2 s))` at `r = x - x_lo`.
    Power { s: f64, c1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightEnd {
    Decay,
    Wall,
}

/// A one-dimensional bound-state problem.
pub struct Problem<'a> {
    pub potential: Box<dyn Fn(f64) -> f64 + 'a>,
    /// Search box; decaying ends are truncated inside it.
    pub x_box: (f64, f64),
    pub left: LeftEnd,
    pub right: RightEnd,
}

/// Numerov settings.
#[derive(Debug, Clone, Copy)]
pub struct NumerovOptions {
    pub grid_n: usize,
    /// Decay exponent demanded at truncated ends.
    pub decay: f64,
}

impl Default for NumerovOptions {
    fn default() -> Self {
        NumerovOptions { grid_n: 40_000, decay: 36.0 }
    }
}

struct Grid {
    x_lo: f64,
    h: f64,
    v: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn truncate(&self, e_top: f64, decay: f64) -> (f64, f64) {
        let (a, b) = self.x_box;
        let scan = 4000;
        let dx = (b - a) / scan as f64;
        let mut best = (f64::INFINITY, 0.5 * (a + b));
        for i in 1..scan {
            let x = a + i as f64 * dx;
            let v = (self.potential)(x);
            if v.is_finite() && v < best.0 {
                best = (v, x);
            }
        }
        let center = best.1;
        let march = |dir: f64, limit: f64| {
            let step = dx / 8.0;
            let mut x = center;
            let mut acc = 0.0;
            while dir * (limit - x) > step {
                let v = (self.potential)(x + dir * step);
                if !v.is_finite() {
                    break;
                }
                x += dir * step;
                acc += (v - e_top).max(0.0).sqrt() * step;
                if acc >= decay {
                    break;
                }
            }
            x
        };
        let lo = match self.left {
            LeftEnd::Decay => march(-1.0, a),
            _ => a,
        };
        let hi = match self.right {
            RightEnd::Decay => march(1.0, b),
            RightEnd::Wall => b,
        };
        (lo, hi)
    }

    fn grid(&self, lo: f64, hi: f64, n: usize) -> Grid {
        let h = (hi - lo) / n as f64;
        let v = (0..=n).map(|i| (self.potential)(lo + i as f64 * h)).collect();
        Grid { x_lo: lo, h, v }
    }

    /// Sign changes of the shooting solution on `(x_lo, x_hi]`, including
    /// the Dirichlet residue at `x_hi`.
    fn count(&self, g: &Grid, e: f64) -> usize {
        let n = g.v.len() - 1;
        let h2 = g.h * g.h / 12.0;
        let w = |i: usize| 1.0 + h2 * (e - g.v[i]);
        let (mut p0, mut p1, start) = match self.left {
            LeftEnd::Decay | LeftEnd::Wall => (0.0, 1e-30, 1),
            LeftEnd::Power { s, c1 } => {
                let seed = |r: f64| r.powf(s) * (1.0 + c1 * r / (2.0 * s));
                (seed(g.h), seed(2.0 * g.h), 2)
            }
        };
        // weighted values y_i = w_i psi_i; the first step skips f at a pole
        let mut y0 = if start == 1 { 0.0 } else { w(1) * p0 };
        let mut y1 = w(start) * p1;
        let mut sign = p1.signum();
        let mut changes = 0;
        for i in start..n {
            let psi_i = p1;
            let y2 = 12.0 * psi_i - 10.0 * y1 - y0;
            let psi_next = if i + 1 == n { y2 } else { y2 / w(i + 1) };
            let s = psi_next.signum();
            if s != 0.0 && s != sign {
                changes += 1;
                sign = s;
            }
            y0 = y1;
            y1 = y2;
            p0 = p1;
            p1 = psi_next;
            if p1.abs() > 1e200 {
                p0 *= 1e-200;
                p1 *= 1e-200;
                y0 *= 1e-200;
                y1 *= 1e-200;
            }
        }
        let _ = (p0, g.x_lo);
        changes
    }

    fn solve_on(&self, g: &Grid, window: (f64, f64), n_max: usize) -> Result<Vec<(f64, usize)>> {
        let (e_lo, e_hi) = window;
        let k0 = self.count(g, e_lo);
        let k1 = self.count(g, e_hi).min(k0 + n_max);
        let mut out = vec![];
        for k in k0..k1 {
            let (mut a, mut b) = (e_lo, e_hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m == a || m == b || (b - a) <= 1e-15 * m.abs().max(1.0) {
                    break;
                }
                if self.count(g, m) > k {
                    b = m;
                } else {
                    a = m;
                }
            }
            if !(b - a <= 1e-12 * b.abs().max(1.0)) {
                return Err(Error::Solver(format!("bisection for level {k} did not converge")));
            }
            out.push((0.5 * (a + b), k));
        }
        Ok(out)
    }

    /// Unextrapolated levels on a single grid of `grid_n` intervals.
    pub fn levels_on_grid(&self, window: (f64, f64), n_max: usize, grid_n: usize, decay: f64) -> Result<Vec<f64>> {
        let (lo, hi) = self.truncate(window.1, decay);
        Ok(self.solve_on(&self.grid(lo, hi, grid_n), window, n_max)?.into_iter().map(|(e, _)| e).collect())
    }

    /// Levels in `window` (at most `n_max`), Richardson-extrapolated from
    /// grids of `grid_n` and `2 grid_n` intervals.
    pub fn bound_states(&self, window: (f64, f64), n_max: usize, opts: NumerovOptions) -> Result<Spectrum> {
        let (lo, hi) = self.truncate(window.1, opts.decay);
        let coarse = self.solve_on(&self.grid(lo, hi, opts.grid_n), window, n_max)?;
        let fine = self.solve_on(&self.grid(lo, hi, 2 * opts.grid_n), window, n_max)?;
        if coarse.len() != fine.len() {
            return Err(Error::Solver("level count changed under grid refinement".into()));
        }
        let mut energies = vec![];
        let mut nodes = vec![];
        let mut tol = 0.0f64;
        for ((ec, _), (ef, k)) in coarse.iter().zip(&fine) {
            let d = ef - ec;
            energies.push(ef + d / 15.0);
            nodes.push(*k);
            tol = tol.max(d.abs() / 15.0);
        }
        Ok(Spectrum { energies, node_counts: nodes, domain: (lo, hi), grid_n: 2 * opts.grid_n, method_tol: tol })
    }
}

/// Numerov levels of a catalog potential on its x-image. Finite endpoints are
/// walls, or power-law seeds where `r^2 V` tends to a nonzero constant.
pub fn numerov_bound_states(spec: &PotentialSpec, window: (f64, f64), n_max: usize) -> Result<Spectrum> {
    let (a, b) = spec.map().x_image();
    let span = 60.0 * spec.sigma.abs();
    let lo = if a.is_finite() { a } else { b.min(spec.x0 + span) - 2.0 * span };
    let hi = if b.is_finite() { b } else { a.max(spec.x0 - span) + 2.0 * span };
    let v = |x: f64| eval_potential_x(spec, x).unwrap_or(f64::INFINITY);
    let left = if a.is_finite() {
        let r = 1e-6 * (hi - lo);
        let c2 = r * r * v(lo + r);
        if c2.is_finite() && c2.abs() > 1e-6 && c2 > -0.25 {
            LeftEnd::Power { s: 0.5 + (0.25 + c2).sqrt(), c1: 0.0 }
        } else {
            LeftEnd::Wall
        }
    } else {
        LeftEnd::Decay
    };
    let right = if b.is_finite() { RightEnd::Wall } else { RightEnd::Decay };
    let p = Problem { potential: Box::new(v), x_box: (lo, hi), left, right };
    p.bound_states(window, n_max, NumerovOptions::default())
}

/// Classical sub-potentials with closed-form spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Classical {
    Eckart { a: f64, b: f64, sigma: f64 },
    EckartWall { a: f64, b: f64, sigma: f64 },
    PoschlTeller { lambda: f64, sigma: f64 },
    Morse { v1: f64, v2: f64, sigma: f64 },
    Harmonic { omega: f64 },
    Kratzer { c1: f64, c2: f64 },
}

impl Classical {
    pub fn name(&self) -> &'static str {
        match self {
            Classical::Eckart { .. } | Classical::EckartWall { .. } => "eckart",
            Classical::PoschlTeller { .. } => "poschl-teller",
            Classical::Morse { .. } => "morse",
            Classical::Harmonic { .. } => "harmonic",
            Classical::Kratzer { .. } => "kratzer",
        }
    }
}

/// Closed-form levels, lowest first, at most `n_max`.
pub fn closed_form_spectrum(c: &Classical, n_max: usize) -> Result<Spectrum> {
    let none = || Error::NoBoundStates(format!("{c:?}"));
    let mut e = vec![];
    match *c {
        Classical::Eckart { a, b, sigma } => {
            let s2 = sigma * sigma;
            if 1.0 + 4.0 * s2 * b < 0.0 {
                return Err(none());
            }
            for n in 0..n_max {
                let k = (1.0 + 4.0 * s2 * b).sqrt() - 1.0 - 2.0 * n as f64;
                if k <= 0.0 {
                    break;
                }
                let kap = (k - 4.0 * s2 * (a + b) / k) / 4.0;
                if kap <= 0.0 || k / 2.0 - kap <= 0.0 {
                    break;
                }
                e.push(-kap * kap / s2);
            }
        }
        Classical::EckartWall { a, b, sigma } => {
            let bb = 0.5 + (0.25 + sigma * sigma * b).sqrt();
            let p = b - a;
            for n in 0..n_max {
                let k = (bb + n as f64) / sigma;
                if k * k >= -p {
                    break;
                }
                let r = (k * k - p) / (2.0 * k);
                e.push(-r * r);
            }
        }
        Classical::PoschlTeller { lambda, sigma } => {
            let a = 1.0 / (2.0 * sigma.abs());
            for n in 0..n_max {
                let k = lambda - 1.0 - n as f64;
                if k <= 0.0 {
                    break;
                }
                e.push(-a * a * k * k);
            }
        }
        Classical::Morse { v1, v2, sigma } => {
            if v2 <= 0.0 || v1 >= 0.0 {
                return Err(none());
            }
            let d = (v1 * v1 / (4.0 * v2)).sqrt();
            for n in 0..n_max {
                let k = d - (n as f64 + 0.5) / sigma.abs();
                if k <= 0.0 {
                    break;
                }
                e.push(-k * k);
            }
        }
        Classical::Harmonic { omega } => {
            if omega <= 0.0 {
                return Err(none());
            }
            e = (0..n_max).map(|n| omega * (2 * n + 1) as f64).collect();
        }
        Classical::Kratzer { c1, c2 } => {
            if c1 >= 0.0 || c2 < -0.25 {
                return Err(none());
            }
            let s = 0.5 + (0.25 + c2).sqrt();
            e = (0..n_max).map(|n| -c1 * c1 / (4.0 * (n as f64 + s).powi(2))).collect();
        }
    }
    if e.is_empty() {
        return Err(none());
    }
    Ok(Spectrum::closed(e))
}

/// A classical potential realized inside a catalog class.
pub struct Instance {
    pub spec: PotentialSpec,
    /// Table-labeled coefficients as given.
    pub table: [f64; 5],
    pub classical: Classical,
    pub left: LeftEnd,
    pub right: RightEnd,
    pub x_box: (f64, f64),
    /// Reflect `x < x0` onto `x > x0` (even extension).
    pub even: bool,
    /// Continuum threshold.
    pub threshold: f64,
}

fn che(d1: i32, d2: i32) -> Result<ClassInfo> {
    class(EquationFamily::ConfluentHeun, d1, d2)
}

/// Coefficients of `classical` in `cls` (table labeling).
pub fn instantiate(cls: &ClassInfo, classical: &Classical) -> Result<Instance> {
    let fam = cls.family;
    let key = (fam, cls.exponents.m1.doubled(), cls.exponents.m2.doubled());
    let unsupported = || Error::Specialization { spec: classical.name().into(), class: cls.label() };
    let inf = f64::INFINITY;
    let build = |table: [f64; 5], sigma: f64, x_box, left, right, even, threshold, classical| -> Result<Instance> {
        Ok(Instance {
            spec: PotentialSpec::from_table(cls.clone(), table, sigma, 0.0)?,
            table,
            classical,
            left,
            right,
            x_box,
            even,
            threshold,
        })
    };
    let che_key = |d1, d2| (EquationFamily::ConfluentHeun, d1, d2);
    match (*classical, key) {
        (Classical::Eckart { a, b, sigma }, k) if k == che_key(2, 2) => {
            let w = 80.0 * sigma;
            build([0.0, a, b, 0.0, 0.0], sigma, (-w, w), LeftEnd::Decay, RightEnd::Decay, false, 0f64.min(a + b), *classical)
        }
        (Classical::Eckart { a, b, sigma }, k) if k == che_key(2, 0) => {
            let c = Classical::EckartWall { a, b, sigma };
            build([0.0, 0.0, 0.0, a, b], sigma, (-160.0 * sigma, 0.0), LeftEnd::Decay, RightEnd::Wall, false, b - a, c)
        }
        (Classical::EckartWall { a, b, sigma }, k) if k == che_key(2, 0) => {
            build([0.0, 0.0, 0.0, a, b], sigma, (-160.0 * sigma, 0.0), LeftEnd::Decay, RightEnd::Wall, false, b - a, *classical)
        }
        (Classical::PoschlTeller { lambda, sigma }, k) if k == che_key(1, 1) => {
            let v3 = -lambda * (lambda - 1.0) / (4.0 * sigma * sigma);
            let w = 80.0 * sigma;
            build([0.0, 0.0, 0.0, v3, 0.0], sigma, (-w, w), LeftEnd::Decay, RightEnd::Decay, true, 0.0, *classical)
        }
        (Classical::Morse { v1, v2, sigma }, k) if k == che_key(2, 0) => {
            build([0.0, v1, v2, 0.0, 0.0], sigma, (-160.0 * sigma, 40.0 * sigma), LeftEnd::Decay, RightEnd::Decay, false, 0.0, *classical)
        }
        (Classical::Harmonic { omega }, (EquationFamily::TriConfluentHeun, _, _)) => {
            build([0.0, 0.0, omega * omega, 0.0, 0.0], 1.0, (-40.0, 40.0), LeftEnd::Decay, RightEnd::Decay, false, inf, *classical)
        }
        (Classical::Harmonic { omega }, k) if k == che_key(1, 0) => {
            // V1 z = V1 x^2 / 4 with sigma = 1
            build([0.0, 4.0 * omega * omega, 0.0, 0.0, 0.0], 1.0, (-40.0, 40.0), LeftEnd::Decay, RightEnd::Decay, true, inf, *classical)
        }
        (Classical::Kratzer { c1, c2 }, k) if k == che_key(0, 0) => {
            let s = 0.5 + (0.25 + c2).sqrt();
            let reach = 4000.0 / c1.abs().max(1e-3);
            build([0.0, c1, c2, 0.0, 0.0], 1.0, (0.0, reach), LeftEnd::Power { s, c1 }, RightEnd::Decay, false, 0.0, *classical)
        }
        _ => Err(unsupported()),
    }
}

impl Instance {
    pub fn potential(&self, x: f64) -> f64 {
        let x = if self.even {
            let d = (x - self.spec.x0).abs();
            if self.spec.map().x_image().0.is_finite() { self.spec.x0 + d } else { self.spec.x0 - d }
        } else {
            x
        };
        let table = self.table;
        let map = self.spec.map();
        let z = match map.z_of_x(x) {
            Ok(z) => z,
            Err(_) => {
                // rounding onto a singular point at a finite end of the image
                let (a, b) = map.x_image();
                let eps = 1e-6 * self.spec.sigma.abs();
                let inner = if (x - a).abs() < eps { a + eps } else if (x - b).abs() < eps { b - eps } else { return f64::INFINITY };
                let Ok(zi) = map.z_of_x(inner) else { return f64::INFINITY };
                let d = self.spec.class.z_domain;
                if (zi - d.lo).abs() < (zi - d.hi).abs() { d.lo } else { d.hi }
            }
        };
        let v = if self.spec.class.family == EquationFamily::ConfluentHeun {
            eval_table_z(&self.spec.class, &table, z)
        } else {
            eval_potential_x(&self.spec, x)
        };
        v.unwrap_or(f64::INFINITY)
    }

    pub fn problem(&self) -> Problem<'_> {
        Problem { potential: Box::new(move |x| self.potential(x)), x_box: self.x_box, left: self.left, right: self.right }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub class: String,
    pub specialization: Classical,
    pub energies: Vec<f64>,
    pub node_counts: Vec<usize>,
    pub oracle_energies: Vec<f64>,
    pub max_rel_err: f64,
    pub method_tol: f64,
}

/// Numerov on the catalog instance versus the closed form, lowest `n_max`
/// levels.
pub fn cross_validate(cls: &ClassInfo, classical: &Classical, n_max: usize) -> Result<CrossValidation> {
    let inst = instantiate(cls, classical)?;
    let oracle = closed_form_spectrum(&inst.classical, n_max)?;
    let last = *oracle.energies.last().expect("nonempty");
    let first = oracle.energies[0];
    let gap = if oracle.energies.len() > 1 { (last - oracle.energies[oracle.energies.len() - 2]).abs() } else { first.abs().max(1.0) };
    let top = if inst.threshold.is_finite() { 0.5 * (last + inst.threshold.min(last + gap)) } else { last + 0.5 * gap };
    let bottom = first - 0.5 * gap.max(first.abs() * 0.1);
    let num = inst.problem().bound_states((bottom, top), n_max, NumerovOptions::default())?;
    let mut err = 0.0f64;
    if num.energies.len() != oracle.energies.len() {
        err = f64::INFINITY;
    } else {
        for (a, b) in num.energies.iter().zip(&oracle.energies) {
            err = err.max((a - b).abs() / b.abs().max(1e-300));
        }
    }
    Ok(CrossValidation {
        class: cls.label(),
        specialization: inst.classical,
        energies: num.energies,
        node_counts: num.node_counts,
        oracle_energies: oracle.energies,
        max_rel_err: err,
        method_tol: num.method_tol,
    })
}

/// Reads a classical potential off table coefficients of `cls`. Coefficients
/// outside the specialization must vanish.
pub fn classical_from_table(cls: &ClassInfo, name: &str, v: &[f64; 5], sigma: f64) -> Result<Classical> {
    let bad = || Error::Specialization { spec: name.into(), class: cls.label() };
    let only = |keep: &[usize]| (0..5).all(|i| keep.contains(&i) || v[i] == 0.0);
    let key = (cls.family, cls.exponents.m1.doubled(), cls.exponents.m2.doubled());
    let che_key = |a, b| (EquationFamily::ConfluentHeun, a, b);
    let c = match name {
        "eckart" if key == che_key(2, 2) && only(&[1, 2]) => Classical::Eckart { a: v[1], b: v[2], sigma },
        "eckart" if key == che_key(2, 0) && only(&[3, 4]) => Classical::EckartWall { a: v[3], b: v[4], sigma },
        "poschl-teller" if key == che_key(1, 1) && only(&[3]) => {
            let disc = 0.25 - 4.0 * sigma * sigma * v[3];
            if disc < 0.0 {
                return Err(bad());
            }
            Classical::PoschlTeller { lambda: 0.5 + disc.sqrt(), sigma }
        }
        "morse" if key == che_key(2, 0) && only(&[1, 2]) => Classical::Morse { v1: v[1], v2: v[2], sigma },
        "harmonic" if cls.family == EquationFamily::TriConfluentHeun && only(&[2]) && v[2] > 0.0 => {
            Classical::Harmonic { omega: v[2].sqrt() / sigma.abs() }
        }
        "harmonic" if key == che_key(1, 0) && only(&[1]) && v[1] > 0.0 => {
            Classical::Harmonic { omega: v[1].sqrt() / (2.0 * sigma.abs()) }
        }
        "kratzer" if key == che_key(0, 0) && only(&[1, 2]) => Classical::Kratzer { c1: v[1] * sigma, c2: v[2] * sigma * sigma },
        _ => return Err(bad()),
    };
    Ok(c)
}

/// The standard cross-validation set: each classical potential in its
/// hosting class.
pub fn standard_cases() -> Result<Vec<(ClassInfo, Classical)>> {
    Ok(vec![
        (che(2, 2)?, Classical::Eckart { a: -8.0, b: 12.0, sigma: 1.5 }),
        (che(2, 0)?, Classical::EckartWall { a: 12.0, b: 1.5, sigma: 1.0 }),
        (che(1, 1)?, Classical::PoschlTeller { lambda: 3.0, sigma: 0.5 }),
        (che(2, 0)?, Classical::Morse { v1: -20.0, v2: 4.0, sigma: 1.0 }),
        (class(EquationFamily::TriConfluentHeun, 0, 0)?, Classical::Harmonic { omega: 1.0 }),
        (che(1, 0)?, Classical::Harmonic { omega: 0.7 }),
        (che(0, 0)?, Classical::Kratzer { c1: -2.0, c2: 0.75 }),
    ])
}
