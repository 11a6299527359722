//! Dense real polynomials, coefficients in ascending order.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Poly(c)
    }

    /// `(z - a)^k`.
    pub fn shifted_power(a: f64, k: usize) -> Self {
        let lin = Poly(vec![-a, 1.0]);
        (0..k).fold(Poly::constant(1.0), |acc, _| &acc * &lin)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.0.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| *c != 0.0)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    /// `p(1 - z)`, re-expanded in powers of z.
    pub fn reflect(&self) -> Poly {
        let one_minus = Poly(vec![1.0, -1.0]);
        let mut out = Poly::zero();
        let mut pw = Poly::constant(1.0);
        for c in &self.0 {
            out = &out + &pw.scale(*c);
            pw = &pw * &one_minus;
        }
        out
    }

    /// `p(z + a)`, re-expanded in powers of z.
    pub fn taylor_shift(&self, a: f64) -> Poly {
        let lin = Poly(vec![a, 1.0]);
        let mut out = Poly::zero();
        for c in self.0.iter().rev() {
            out = &(&out * &lin) + &Poly::constant(*c);
        }
        out
    }

    /// Coefficients padded or truncated to exactly `n` entries.
    pub fn padded(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.coeff(k)).collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_and_reflection() {
        assert_eq!(Poly::shifted_power(1.0, 2).0, vec![1.0, -2.0, 1.0]);
        // z^2 -> (1-z)^2 = 1 - 2z + z^2
        assert_eq!(Poly::monomial(2).reflect().0, vec![1.0, -2.0, 1.0]);
        let p = Poly(vec![0.3, -1.0, 2.0, 0.5]);
        for z in [-1.3, 0.2, 2.7] {
            assert!((p.reflect().eval(z) - p.eval(1.0 - z)).abs() < 1e-13);
            assert!((p.taylor_shift(0.7).eval(z) - p.eval(z + 0.7)).abs() < 1e-13);
            assert!((p.derivative().eval(z) - (0.0 - 1.0 + 4.0 * z + 1.5 * z * z)).abs() < 1e-13);
        }
    }
}
