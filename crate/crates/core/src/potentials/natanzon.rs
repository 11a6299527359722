//! Continuous (unspecialized) Natanzon family: the map is obtained by
//! integrating `z' = w(z) / sqrt(r(z))` numerically, with `w = z(1-z)` in
//! hypergeometric mode and `w = z` in confluent mode, and
//! `V = v(z)/r(z) - {z, x}/2`.

use crate::catalog::{class, ClassInfo, EquationFamily};
use crate::coordmap::MapSpec;
use crate::error::{Error, Result};
use crate::ode::{dopri5, Tolerance};
use crate::poly::Poly;

use super::PotentialSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct NatanzonSpec {
    pub r: [f64; 3],
    pub v: [f64; 3],
    pub confluent: bool,
    pub x0: f64,
    /// Initial condition `z(x0)`.
    pub z0: f64,
}

impl NatanzonSpec {
    fn r_poly(&self) -> Poly {
        Poly(self.r.to_vec())
    }

    fn w_poly(&self) -> Poly {
        if self.confluent {
            Poly(vec![0.0, 1.0])
        } else {
            Poly(vec![0.0, 1.0, -1.0])
        }
    }

    fn r_checked(&self, z: f64) -> Result<f64> {
        let r = self.r_poly().eval(z);
        if r > 0.0 && r.is_finite() {
            Ok(r)
        } else {
            Err(Error::NonPositiveR { z, value: r })
        }
    }

    /// `dz/dx` as a function of z.
    pub fn rho(&self, z: f64) -> Result<f64> {
        Ok(self.w_poly().eval(z) / self.r_checked(z)?.sqrt())
    }

    /// Schwarzian `{z, x}` from the analytic z-derivatives of `rho`.
    pub fn schwarzian(&self, z: f64) -> Result<f64> {
        let r = self.r_checked(z)?;
        let rp = self.r_poly();
        let (r1, r2) = (rp.derivative().eval(z), rp.derivative().derivative().eval(z));
        let wp = self.w_poly();
        let (w, w1, w2) = (wp.eval(z), wp.derivative().eval(z), wp.derivative().derivative().eval(z));
        let s = r.sqrt();
        let g = w / s;
        let g1 = w1 / s - 0.5 * w * r1 / (r * s);
        let g2 = w2 / s - w1 * r1 / (r * s) - 0.5 * w * r2 / (r * s) + 0.75 * w * r1 * r1 / (r * r * s);
        Ok(g * g2 - 0.5 * g1 * g1)
    }

    pub fn potential_z(&self, z: f64) -> Result<f64> {
        let r = self.r_checked(z)?;
        Ok(Poly(self.v.to_vec()).eval(z) / r - 0.5 * self.schwarzian(z)?)
    }
}

/// Integrates the map from `(x0, z0)` to each grid point and evaluates the
/// potential there. The grid may be unsorted; each point is reached from the
/// nearest already-computed point on the same side of `x0`.
pub fn natanzon_general(spec: &NatanzonSpec, x_grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.r_checked(spec.z0)?;
    let tol = Tolerance { rtol: 1e-12, atol: 1e-14 };
    let mut order: Vec<usize> = (0..x_grid.len()).collect();
    order.sort_by(|&a, &b| {
        (x_grid[a] - spec.x0).abs().total_cmp(&(x_grid[b] - spec.x0).abs())
    });
    let mut zs = vec![f64::NAN; x_grid.len()];
    let (mut up, mut down) = ((spec.x0, spec.z0), (spec.x0, spec.z0));
    for i in order {
        let x = x_grid[i];
        let start = if x >= spec.x0 { up } else { down };
        let y = dopri5(
            |_, y, dy| {
                dy[0] = spec.rho(y[0])?;
                Ok(())
            },
            start.0,
            &[start.1],
            x,
            tol,
        )?;
        zs[i] = y[0];
        if x >= spec.x0 {
            up = (x, y[0]);
        } else {
            down = (x, y[0]);
        }
    }
    let vs = zs.iter().map(|&z| spec.potential_z(z)).collect::<Result<Vec<_>>>()?;
    Ok((zs, vs))
}

/// Catalog class and polynomial coefficients reproducing a specialized
/// `r(z) = kappa z^a (1-z)^b`; errors when `r` is not of that form.
pub fn catalog_equivalent(spec: &NatanzonSpec) -> Result<PotentialSpec> {
    let [r0, r1, r2] = spec.r;
    let not_special = || Error::Specialization {
        spec: format!("r = ({r0}, {r1}, {r2})"),
        class: if spec.confluent { "confluent-hypergeometric".into() } else { "hypergeometric".into() },
    };
    // (kappa, a, b)
    let (kappa, a, b) = if spec.confluent {
        match (r0 != 0.0, r1 != 0.0, r2 != 0.0) {
            (true, false, false) => (r0, 0, 0),
            (false, true, false) => (r1, 1, 0),
            (false, false, true) => (r2, 2, 0),
            _ => return Err(not_special()),
        }
    } else {
        let candidates = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
        let mut found = None;
        for (a, b) in candidates {
            let shape = &Poly::monomial(a) * &Poly::monomial(b).reflect();
            let k = match (0..3).map(|i| shape.coeff(i)).position(|c| c != 0.0) {
                Some(i) => spec.r[i] / shape.coeff(i),
                None => continue,
            };
            if k != 0.0 && (0..3).all(|i| (spec.r[i] - k * shape.coeff(i)).abs() <= 1e-14 * k.abs()) {
                found = Some((k, a as i32, b as i32));
                break;
            }
        }
        found.ok_or_else(not_special)?
    };
    if kappa <= 0.0 {
        return Err(not_special());
    }
    let d1 = 2 - a;
    let (cls, sigma, p): (ClassInfo, f64, Poly) = if spec.confluent {
        let m1 = d1 as f64 / 2.0;
        let mut p = Poly(spec.v.to_vec());
        p = &p - &Poly::constant((m1 * m1 / 2.0 - m1) / 2.0);
        (class(EquationFamily::ConfluentHypergeometric, d1, 0)?, kappa.sqrt(), p.scale(1.0 / kappa))
    } else {
        let d2 = 2 - b;
        let (m1, m2) = (d1 as f64 / 2.0, d2 as f64 / 2.0);
        let zm1 = Poly(vec![-1.0, 1.0]);
        let l = &zm1.scale(m1) + &Poly(vec![0.0, m2]);
        let q = &(&(&zm1 * &zm1).scale(-m1) - &Poly::monomial(2).scale(m2)) + &(&l * &l).scale(0.5);
        let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
        let p = (&Poly(spec.v.to_vec()) - &q.scale(0.5)).scale(sign / kappa);
        // (1-z)^m2 = -(z-1) for integer m2 = 1 on (0, 1)
        let s = if d2 == 2 { -1.0 } else { 1.0 };
        (class(EquationFamily::Hypergeometric, d1, d2)?, s * kappa.sqrt(), p)
    };
    let origin = MapSpec::new(cls.clone(), sigma, 0.0)?.x_of_z(spec.z0)?;
    let mut v = [0.0; 5];
    for (i, c) in v.iter_mut().enumerate() {
        *c = p.coeff(i);
    }
    PotentialSpec::new(cls, v, sigma, spec.x0 - origin)
}
