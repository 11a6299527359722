//! Reduction of the Schrödinger equation to the confluent Heun family.
//!
//! With `psi = phi(z) u(z)` and `u` solving a canonical equation
//! `u'' + f u' + g u = 0`, the map and potential must satisfy
//!
//! ```text
//! rho^2 I(z) + {z, x}/2 = E - V,    I = g - f_z/2 - f^2/4
//! ```
//!
//! Clearing denominators turns this into an identity between polynomials of
//! degree <= 4; the prefactor exponents come from quadratics, the remaining
//! Heun parameters from linear equations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{ClassInfo, EquationFamily};
use crate::coordmap::MapSpec;
use crate::error::{Error, Result};
use crate::heunfn::{local_jet, local_solution, HeunParams};
use crate::poly::Poly;
use crate::potentials::{eval_potential_z, PotentialSpec};

/// Exponents of `exp(a0 z + a_quad z^2 + a_cub z^3 - a_inv / z) |z|^a1 |z-1|^a2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AnsatzFactors {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a_inv: f64,
    pub a_quad: f64,
    pub a_cub: f64,
}

impl AnsatzFactors {
    pub fn eval(&self, z: f64) -> f64 {
        let mut e = self.a0 * z + self.a_quad * z * z + self.a_cub * z * z * z;
        if self.a_inv != 0.0 {
            e -= self.a_inv / z;
        }
        let mut v = e.exp();
        if self.a1 != 0.0 {
            v *= z.abs().powf(self.a1);
        }
        if self.a2 != 0.0 {
            v *= (z - 1.0).abs().powf(self.a2);
        }
        v
    }

    /// `d/dz log` of the prefactor.
    pub fn log_derivative(&self, z: f64) -> f64 {
        let mut d = self.a0 + 2.0 * self.a_quad * z + 3.0 * self.a_cub * z * z;
        if self.a_inv != 0.0 {
            d += self.a_inv / (z * z);
        }
        if self.a1 != 0.0 {
            d += self.a1 / z;
        }
        if self.a2 != 0.0 {
            d += self.a2 / (z - 1.0);
        }
        d
    }

    /// Derivative of [`Self::log_derivative`].
    pub fn log_derivative_z(&self, z: f64) -> f64 {
        let mut d = 2.0 * self.a_quad + 6.0 * self.a_cub * z;
        if self.a_inv != 0.0 {
            d -= 2.0 * self.a_inv / (z * z * z);
        }
        if self.a1 != 0.0 {
            d -= self.a1 / (z * z);
        }
        if self.a2 != 0.0 {
            d -= self.a2 / ((z - 1.0) * (z - 1.0));
        }
        d
    }
}

/// Which root of each quadratic was taken: +1 / -1, or 0 for a double root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BranchTag {
    pub epsilon: i8,
    pub gamma: i8,
    pub delta: i8,
}

impl std::fmt::Display for BranchTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = |s: i8| match s {
            1 => '+',
            -1 => '-',
            _ => '0',
        };
        write!(f, "{}{}{}", c(self.epsilon), c(self.gamma), c(self.delta))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveSolution {
    pub family: EquationFamily,
    pub factors: AnsatzFactors,
    pub heun: HeunParams,
    pub energy: f64,
    pub branch: BranchTag,
    /// Names of quadratics that had a double root.
    pub degenerate: Vec<&'static str>,
}

/// `(f, f_z, g)` of a family's canonical form.
fn canonical_parts(family: EquationFamily, p: &HeunParams, z: f64) -> Result<(f64, f64, f64)> {
    let HeunParams { gamma: g, delta: d, epsilon: e, alpha: a, q } = *p;
    let singular = || Err(Error::SingularPoint { family: family.slug().into(), z });
    match family {
        EquationFamily::ConfluentHeun => {
            if z == 0.0 || z == 1.0 {
                return singular();
            }
            let w = z - 1.0;
            Ok((g / z + d / w + e, -g / (z * z) - d / (w * w), (a * z - q) / (z * w)))
        }
        EquationFamily::DoubleConfluentHeun => {
            if z == 0.0 {
                return singular();
            }
            let z2 = z * z;
            Ok((g / z2 + d / z + e, -2.0 * g / (z2 * z) - d / z2, (a * z - q) / z2))
        }
        EquationFamily::BiConfluentHeun => {
            if z == 0.0 {
                return singular();
            }
            Ok((g / z + d + e * z, -g / (z * z) + e, (a * z - q) / z))
        }
        EquationFamily::TriConfluentHeun => Ok((g + d * z + e * z * z, d + 2.0 * e * z, a * z - q)),
        other => Err(Error::WrongClass { expected: "a confluent Heun family".into(), got: other.slug().into() }),
    }
}

/// `I(z) = g - f_z/2 - f^2/4`.
pub fn invariant(family: EquationFamily, p: &HeunParams, z: f64) -> Result<f64> {
    let (f, fz, g) = canonical_parts(family, p, z)?;
    Ok(g - 0.5 * fz - 0.25 * f * f)
}

/// Interior z-interval used for verification grids.
pub fn working_z_interval(class: &ClassInfo) -> (f64, f64) {
    match class.family {
        EquationFamily::TriConfluentHeun => (-2.0, 2.0),
        EquationFamily::DoubleConfluentHeun => (0.3, 3.0),
        EquationFamily::BiConfluentHeun | EquationFamily::ConfluentHypergeometric => (0.05, 3.0),
        _ => {
            let d = &class.z_domain;
            if d.lo >= 1.0 {
                (1.05, 4.0)
            } else if d.hi <= 0.0 {
                (-3.0, -0.05)
            } else {
                (0.05, 0.95)
            }
        }
    }
}

/// `n` evenly spaced x points spanning the working z-interval.
pub fn default_x_grid(spec: &PotentialSpec, n: usize) -> Result<Vec<f64>> {
    let (zl, zh) = working_z_interval(&spec.class);
    let map = spec.map();
    let (a, b) = (map.x_of_z(zl)?, map.x_of_z(zh)?);
    let (lo, hi) = (a.min(b), a.max(b));
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect())
}

fn int_pow(z: f64, k: i32) -> f64 {
    z.powi(k)
}

/// Sign of `rho^2 sigma^2 / (z^{2 m1} (z-1)^{2 m2})` on the working interval.
fn rho_sign(spec: &PotentialSpec) -> f64 {
    let (zl, zh) = working_z_interval(&spec.class);
    let z = 0.5 * (zl + zh);
    let m = spec.class.exponents;
    let r2 = spec.map().rho_squared_unchecked(z) * spec.sigma * spec.sigma;
    let plain = int_pow(z, m.m1.doubled()) * int_pow(z - 1.0, m.m2.doubled());
    (r2 / plain).signum()
}

/// Right-hand side `T(z)` after clearing denominators.
fn target_poly(spec: &PotentialSpec, energy: f64) -> Result<Poly> {
    let m1 = spec.class.exponents.m1.value();
    let m2 = spec.class.exponents.m2.value();
    let d1 = spec.class.exponents.m1.doubled();
    let d2 = spec.class.exponents.m2.doubled();
    let s = rho_sign(spec) * spec.sigma * spec.sigma;
    let p = spec.poly();
    let (base, mpart) = match spec.class.family {
        EquationFamily::ConfluentHeun => {
            let base = &Poly::monomial((2 - d1) as usize) * &Poly::shifted_power(1.0, (2 - d2) as usize);
            let zm1 = Poly(vec![-1.0, 1.0]);
            let quad = &(&zm1 * &zm1).scale(m1) + &Poly::monomial(2).scale(m2);
            let lin = &zm1.scale(m1) + &Poly(vec![0.0, m2]);
            (base, &quad.scale(0.5) - &(&lin * &lin).scale(0.25))
        }
        EquationFamily::DoubleConfluentHeun => {
            (Poly::monomial((4 - d1) as usize), Poly::monomial(2).scale(m1 / 2.0 - m1 * m1 / 4.0))
        }
        EquationFamily::BiConfluentHeun => {
            (Poly::monomial((2 - d1) as usize), Poly::constant(m1 / 2.0 - m1 * m1 / 4.0))
        }
        EquationFamily::TriConfluentHeun => (Poly::constant(1.0), Poly::zero()),
        _ => {
            return Err(Error::WrongClass { expected: "a confluent Heun family".into(), got: spec.class.label() })
        }
    };
    Ok(&mpart + &(&base.scale(energy) - &p).scale(s))
}

/// Left-hand side `I(z)` times the cleared denominator, as a polynomial.
fn lhs_poly(family: EquationFamily, p: &HeunParams) -> Poly {
    let HeunParams { gamma: g, delta: d, epsilon: e, alpha: a, q } = *p;
    match family {
        EquationFamily::ConfluentHeun => {
            let h = Poly(vec![-g, g + d - e, e]);
            let zm1 = Poly(vec![-1.0, 1.0]);
            let t1 = &(&Poly(vec![0.0, -1.0, 1.0]) * &Poly(vec![-q, a])) + &(&(&zm1 * &zm1).scale(g) + &Poly::monomial(2).scale(d)).scale(0.5);
            &t1 - &(&h * &h).scale(0.25)
        }
        EquationFamily::DoubleConfluentHeun => {
            let h = Poly(vec![g, d, e]);
            &Poly(vec![0.0, g, -q + d / 2.0, a]) - &(&h * &h).scale(0.25)
        }
        EquationFamily::BiConfluentHeun => {
            let h = Poly(vec![g, d, e]);
            &Poly(vec![g / 2.0, -q, a - e / 2.0]) - &(&h * &h).scale(0.25)
        }
        _ => {
            let h = Poly(vec![g, d, e]);
            &Poly(vec![-q - d / 2.0, a - e]) - &(&h * &h).scale(0.25)
        }
    }
}

/// Roots of a quadratic in the form `center ± sqrt(disc)`.
fn roots(which: &'static str, center: f64, disc: f64, scale: f64) -> Result<Vec<(f64, i8)>> {
    let tol = 1e-13 * scale.max(1.0);
    if disc < -tol {
        return Err(Error::ComplexExponents { which: which.into(), disc });
    }
    if disc.abs() <= tol {
        return Ok(vec![(center, 0)]);
    }
    let r = disc.sqrt();
    Ok(vec![(center + r, 1), (center - r, -1)])
}

/// All branch combinations of the ansatz for a confluent Heun family class.
pub fn solve_ansatz(spec: &PotentialSpec, energy: f64) -> Result<Vec<WaveSolution>> {
    let family = spec.class.family;
    let t = target_poly(spec, energy)?;
    let tc: Vec<f64> = (0..5).map(|k| t.coeff(k)).collect();
    let scale = tc.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let m1 = spec.class.exponents.m1.value();
    let m2 = spec.class.exponents.m2.value();
    let mut out = Vec::new();
    // each candidate: (params, factors, tag, degenerate list)
    let mut candidates: Vec<(HeunParams, AnsatzFactors, BranchTag, Vec<&'static str>)> = Vec::new();
    let eps_roots = roots("epsilon", 0.0, -4.0 * tc[4], scale)?;
    match family {
        EquationFamily::ConfluentHeun => {
            let t1 = t.eval(1.0);
            let gam_roots = roots("gamma", 1.0, 1.0 - 4.0 * tc[0], scale)?;
            let del_roots = roots("delta", 1.0, 1.0 - 4.0 * t1, scale)?;
            for &(e, se) in &eps_roots {
                for &(g, sg) in &gam_roots {
                    for &(d, sd) in &del_roots {
                        let s = g + d - e;
                        let a = tc[3] + e * s / 2.0;
                        let q = tc[1] + g - g * s / 2.0;
                        let p = HeunParams::new(g, d, e, a, q);
                        let f = AnsatzFactors { a0: e / 2.0, a1: (g - m1) / 2.0, a2: (d - m2) / 2.0, ..Default::default() };
                        let mut deg = vec![];
                        if se == 0 {
                            deg.push("epsilon");
                        }
                        if sg == 0 {
                            deg.push("gamma");
                        }
                        if sd == 0 {
                            deg.push("delta");
                        }
                        candidates.push((p, f, BranchTag { epsilon: se, gamma: sg, delta: sd }, deg));
                    }
                }
            }
        }
        EquationFamily::DoubleConfluentHeun => {
            let gam_roots = roots("gamma", 0.0, -4.0 * tc[0], scale)?;
            for &(e, se) in &eps_roots {
                for &(g, sg) in &gam_roots {
                    let mut deg = vec![];
                    if se == 0 {
                        deg.push("epsilon");
                    }
                    let mut inner = vec![];
                    if sg == 0 {
                        deg.push("gamma");
                        if tc[1].abs() > 1e-12 * scale {
                            return Err(Error::Inconsistent(format!("gamma = 0 but T1 = {}", tc[1])));
                        }
                        // q is free; take q = 0 and solve delta/2 - delta^2/4 = T2
                        for (d, sd) in roots("delta", 1.0, 1.0 - 4.0 * tc[2], scale)? {
                            inner.push((d, 0.0, sd));
                        }
                    } else {
                        let d = 2.0 * (g - tc[1]) / g;
                        let q = d / 2.0 - (d * d + 2.0 * g * e) / 4.0 - tc[2];
                        inner.push((d, q, 0));
                    }
                    for (d, q, sd) in inner {
                        let a = tc[3] + d * e / 2.0;
                        let p = HeunParams::new(g, d, e, a, q);
                        let f = AnsatzFactors { a0: e / 2.0, a1: (d - m1) / 2.0, a_inv: g / 2.0, ..Default::default() };
                        candidates.push((p, f, BranchTag { epsilon: se, gamma: sg, delta: sd }, deg.clone()));
                    }
                }
            }
        }
        EquationFamily::BiConfluentHeun => {
            let gam_roots = roots("gamma", 1.0, 1.0 - 4.0 * tc[0], scale)?;
            for &(e, se) in &eps_roots {
                let mut deg = vec![];
                let mut inner = vec![];
                if se == 0 {
                    deg.push("epsilon");
                    if tc[3].abs() > 1e-12 * scale {
                        return Err(Error::Inconsistent(format!("epsilon = 0 but T3 = {}", tc[3])));
                    }
                    // alpha is free; take alpha = 0 and solve delta^2 = -4 T2
                    for (d, sd) in roots("delta", 0.0, -4.0 * tc[2], scale)? {
                        inner.push((d, sd));
                    }
                } else {
                    inner.push((-2.0 * tc[3] / e, 0));
                }
                for &(g, sg) in &gam_roots {
                    for &(d, sd) in &inner {
                        let q = -tc[1] - g * d / 2.0;
                        let a = if se == 0 { 0.0 } else { tc[2] + e / 2.0 + (d * d + 2.0 * g * e) / 4.0 };
                        let mut dg = deg.clone();
                        if sg == 0 {
                            dg.push("gamma");
                        }
                        let p = HeunParams::new(g, d, e, a, q);
                        let f = AnsatzFactors { a0: d / 2.0, a1: (g - m1) / 2.0, a_quad: e / 4.0, ..Default::default() };
                        candidates.push((p, f, BranchTag { epsilon: se, gamma: sg, delta: sd }, dg));
                    }
                }
            }
        }
        EquationFamily::TriConfluentHeun => {
            for &(e, se) in &eps_roots {
                let mut deg = vec![];
                // (gamma, delta, alpha, delta tag)
                let mut inner = vec![];
                if se == 0 {
                    deg.push("epsilon");
                    if tc[3].abs() > 1e-12 * scale {
                        return Err(Error::Inconsistent(format!("epsilon = 0 but T3 = {}", tc[3])));
                    }
                    for (d, sd) in roots("delta", 0.0, -4.0 * tc[2], scale)? {
                        if sd == 0 {
                            // gamma free: take gamma = 0, alpha = T1
                            inner.push((0.0, d, tc[1], sd));
                        } else {
                            inner.push((-2.0 * tc[1] / d, d, 0.0, sd));
                        }
                    }
                } else {
                    let d = -2.0 * tc[3] / e;
                    let g = (-4.0 * tc[2] - d * d) / (2.0 * e);
                    inner.push((g, d, tc[1] + e + g * d / 2.0, 0));
                }
                for (g, d, a, sd) in inner {
                    let q = -tc[0] - d / 2.0 - g * g / 4.0;
                    let p = HeunParams::new(g, d, e, a, q);
                    let f = AnsatzFactors { a0: g / 2.0, a_quad: d / 4.0, a_cub: e / 6.0, ..Default::default() };
                    candidates.push((p, f, BranchTag { epsilon: se, gamma: 0, delta: sd }, deg.clone()));
                }
            }
        }
        _ => unreachable!("target_poly rejects other families"),
    }
    for (p, f, tag, deg) in candidates {
        let lhs = lhs_poly(family, &p);
        let mismatch = (0..5).map(|k| (lhs.coeff(k) - t.coeff(k)).abs()).fold(0.0, f64::max);
        if lhs.degree().unwrap_or(0) > 4 || mismatch > 1e-9 * scale {
            return Err(Error::Inconsistent(format!("branch {tag}: coefficient mismatch {mismatch:e}")));
        }
        out.push(WaveSolution { family, factors: f, heun: p, energy, branch: tag, degenerate: deg });
    }
    Ok(out)
}

/// `(psi, dpsi/dx)` at `x`.
pub fn psi_with_derivative(spec: &PotentialSpec, sol: &WaveSolution, x: f64) -> Result<(f64, f64)> {
    let map = spec.map();
    let z = map.z_of_x(x)?;
    psi_at_z(&map, sol, z)
}

fn psi_at_z(map: &MapSpec, sol: &WaveSolution, z: f64) -> Result<(f64, f64)> {
    let u = local_solution(sol.family, &sol.heun, z)?;
    let phi = sol.factors.eval(z);
    if phi == 0.0 {
        return Ok((0.0, 0.0));
    }
    let dz = phi * (u.derivative + u.value * sol.factors.log_derivative(z));
    Ok((phi * u.value, map.rho_unchecked(z) * dz))
}

/// `psi(x) = prefactor(z) u(z)` with `u` the family's local solution.
pub fn build_psi(spec: &PotentialSpec, sol: &WaveSolution, x: f64) -> Result<f64> {
    Ok(psi_with_derivative(spec, sol, x)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// Max of `|rho^2 I + S/2 - (E - V)|` over the grid, relative to
    /// `max(1, |rho^2 I|, |S/2|, |E - V|)`.
    pub identity: f64,
    /// Max of `|psi'' + (E - V) psi| / (|psi''| + |(E - V) psi|)`, with
    /// `psi''` assembled from the differentiated local expansion of `u`.
    pub psi: f64,
}

/// Identity residual only.
pub fn identity_residual(spec: &PotentialSpec, sol: &WaveSolution, x_grid: &[f64]) -> Result<f64> {
    let map = spec.map();
    let mut worst = 0.0f64;
    for &x in x_grid {
        let z = map.z_of_x(x)?;
        let rho2 = map.rho_squared_unchecked(z);
        let s = map.schwarzian(z)?;
        let i = invariant(sol.family, &sol.heun, z)?;
        let v = eval_potential_z(spec, z)?;
        let (a, b, c) = (rho2 * i, 0.5 * s, sol.energy - v);
        let scale = 1f64.max(a.abs()).max(b.abs()).max(c.abs());
        worst = worst.max((a + b - c).abs() / scale);
    }
    Ok(worst)
}

/// Both residuals on a grid of at least three points.
pub fn residual(spec: &PotentialSpec, sol: &WaveSolution, x_grid: &[f64]) -> Result<Residuals> {
    let identity = identity_residual(spec, sol, x_grid)?;
    if x_grid.len() < 3 {
        return Err(Error::Degenerate("residual grid needs at least three points".into()));
    }
    let map = spec.map();
    let mut psi = 0.0f64;
    for &x in x_grid {
        let z = map.z_of_x(x)?;
        let v = eval_potential_z(spec, z)?;
        let u = local_jet(sol.family, &sol.heun, z)?;
        let f = &sol.factors;
        let (l, dl) = (f.log_derivative(z), f.log_derivative_z(z));
        let phi = f.eval(z);
        // psi_z = phi (u' + L u), psi_zz = phi (u'' + 2 L u' + (L' + L^2) u)
        let pz = phi * (u.du + l * u.u);
        let pzz = phi * (u.d2u + 2.0 * l * u.du + (dl + l * l) * u.u);
        let (rho, rho_z, _) = map.rho_derivatives_unchecked(z);
        let d2 = rho * rho * pzz + rho * rho_z * pz;
        let k = (sol.energy - v) * phi * u.u;
        let scale = d2.abs() + k.abs();
        let r = if scale == 0.0 { 0.0 } else { (d2 + k).abs() / scale };
        psi = psi.max(if r.is_nan() { f64::INFINITY } else { r });
    }
    Ok(Residuals { identity, psi })
}

/// One row of the verification report.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationRow {
    pub class: String,
    pub v: [f64; 5],
    #[serde(rename = "E")]
    pub energy: f64,
    pub branch: String,
    pub residual_identity: f64,
    pub residual_psi: f64,
}

pub fn verification_rows(spec: &PotentialSpec, energy: f64, x_grid: &[f64]) -> Result<Vec<VerificationRow>> {
    let mut rows = vec![];
    for sol in solve_ansatz(spec, energy)? {
        let r = residual(spec, &sol, x_grid)?;
        rows.push(VerificationRow {
            class: spec.class.label(),
            v: spec.v,
            energy,
            branch: sol.branch.to_string(),
            residual_identity: r.identity,
            residual_psi: r.psi,
        });
    }
    Ok(rows)
}

/// Uniform draw of coefficients, `sigma` and `x0` for a class.
pub fn random_spec<R: Rng>(class: &ClassInfo, rng: &mut R) -> Result<PotentialSpec> {
    let mut v = [0.0; 5];
    for c in v.iter_mut() {
        *c = rng.gen_range(-1.0..1.0);
    }
    let sigma = rng.gen_range(0.6..1.4);
    let x0 = rng.gen_range(-0.5..0.5);
    PotentialSpec::new(class.clone(), v, sigma, x0)
}

/// A random spec with `n` random energies, all giving real ansatz exponents.
/// Draws with complex exponents are rejected and redrawn.
pub fn random_admissible<R: Rng>(class: &ClassInfo, rng: &mut R, n: usize) -> Result<(PotentialSpec, Vec<f64>)> {
    for _ in 0..1000 {
        let spec = random_spec(class, rng)?;
        let mut energies = vec![];
        for _ in 0..50 * n {
            let e = rng.gen_range(-3.0..3.0);
            match solve_ansatz(&spec, e) {
                Ok(_) => energies.push(e),
                Err(Error::ComplexExponents { .. }) => continue,
                Err(err) => return Err(err),
            }
            if energies.len() == n {
                return Ok((spec, energies));
            }
        }
    }
    Err(Error::Solver(format!("no admissible draw found for class {}", class.label())))
}

/// Verification rows for `draws` seeded random draws with `energies` each.
pub fn verify_class(class: &ClassInfo, draws: usize, energies: usize, seed: u64, grid: usize) -> Result<Vec<VerificationRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![];
    for _ in 0..draws {
        let (spec, es) = random_admissible(class, &mut rng, energies)?;
        let x = default_x_grid(&spec, grid)?;
        for e in es {
            rows.extend(verification_rows(&spec, e, &x)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::class;

    #[test]
    fn invariant_trivial_cases() {
        let zero = HeunParams::new(0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(invariant(EquationFamily::ConfluentHeun, &zero, 0.3).unwrap(), 0.0);
        let eps = HeunParams::new(0.0, 0.0, 1.7, 0.0, 0.0);
        assert!((invariant(EquationFamily::ConfluentHeun, &eps, 0.3).unwrap() + 1.7 * 1.7 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn invariant_against_normal_form() {
        // w = u exp(F/2), F' = f, solves w'' + I w = 0
        let p = HeunParams::new(1.3, 0.7, -0.4, 0.9, 0.25);
        let z = 0.5;
        let big_f = |z: f64| 1.3 * z.ln() + 0.7 * (1.0 - z).ln() - 0.4 * z;
        let w = |z: f64| local_solution(EquationFamily::ConfluentHeun, &p, z).unwrap().value * (0.5 * big_f(z)).exp();
        let h = 1e-3;
        let w2 = (w(z + h) - 2.0 * w(z) + w(z - h)) / (h * h);
        let i = invariant(EquationFamily::ConfluentHeun, &p, z).unwrap();
        assert!((w2 / w(z) + i).abs() < 1e-5, "{} {}", w2 / w(z), i);
    }

    #[test]
    fn free_case() {
        let c = class(EquationFamily::ConfluentHeun, 2, 2).unwrap();
        let spec = PotentialSpec::new(c, [0.0; 5], 1.0, 0.0).unwrap();
        let sols = solve_ansatz(&spec, 0.0).unwrap();
        assert!(sols.iter().any(|s| s.factors.a0 == 0.0 && s.factors.a1 == 0.0 && s.factors.a2 == 0.0));
        let grid = default_x_grid(&spec, 50).unwrap();
        for s in &sols {
            let r = residual(&spec, s, &grid).unwrap();
            assert!(r.identity < 1e-14 && r.psi < 1e-8, "{:?} {:?}", s.branch, r);
        }
    }

    #[test]
    fn morse_decaying_branch() {
        let c = class(EquationFamily::ConfluentHeun, 2, 0).unwrap();
        let (v1, v2, sigma) = (-3.0, 1.2, 0.8);
        let spec = PotentialSpec::from_table(c, [0.0, v1, v2, 0.0, 0.0], sigma, 0.0).unwrap();
        let sols = solve_ansatz(&spec, -0.5).unwrap();
        assert!(sols.iter().any(|s| (s.factors.a0 + v2.sqrt() * sigma).abs() < 1e-13));
        let grid = default_x_grid(&spec, 200).unwrap();
        for s in &sols {
            let r = residual(&spec, s, &grid).unwrap();
            assert!(r.identity <= 1e-9, "{r:?}");
        }
    }

    #[test]
    fn perturbed_q_detected() {
        let c = class(EquationFamily::ConfluentHeun, 2, 2).unwrap();
        let spec = PotentialSpec::new(c, [0.4, -0.3, 0.8, 0.1, 0.2], 1.3, 0.2).unwrap();
        let mut sol = solve_ansatz(&spec, -0.7).unwrap().remove(0);
        let grid = default_x_grid(&spec, 200).unwrap();
        assert!(identity_residual(&spec, &sol, &grid).unwrap() <= 1e-9);
        sol.heun.q += 1e-3;
        assert!(identity_residual(&spec, &sol, &grid).unwrap() > 1e-4);
    }
}
