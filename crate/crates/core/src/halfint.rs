//! Exact integer / half-integer numbers stored as twice their value.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt {
    doubled: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { doubled: 0 };
    pub const HALF: HalfInt = HalfInt { doubled: 1 };
    pub const ONE: HalfInt = HalfInt { doubled: 2 };

    pub const fn from_doubled(doubled: i32) -> Self {
        HalfInt { doubled }
    }

    pub const fn from_int(m: i32) -> Self {
        HalfInt { doubled: 2 * m }
    }

    pub const fn doubled(self) -> i32 {
        self.doubled
    }

    pub fn value(self) -> f64 {
        f64::from(self.doubled) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    /// Returns `Some(m)` when the value is an integer.
    pub const fn as_integer(self) -> Option<i32> {
        if self.is_integer() {
            Some(self.doubled / 2)
        } else {
            None
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_doubled(self.doubled + rhs.doubled)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_doubled(self.doubled - rhs.doubled)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_doubled(-self.doubled)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

/// Accepts `1`, `-1/2`, `3/2`, `0.5`, `-1.5`.
impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("'{s}' is not an integer or half-integer"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            let den: i32 = den.trim().parse().map_err(|_| bad())?;
            return match den {
                1 => Ok(HalfInt::from_int(num)),
                2 => Ok(HalfInt::from_doubled(num)),
                -1 => Ok(HalfInt::from_int(-num)),
                -2 => Ok(HalfInt::from_doubled(-num)),
                _ => Err(bad()),
            };
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        let d = 2.0 * v;
        if !d.is_finite() || d.fract() != 0.0 || d.abs() > f64::from(i32::MAX) {
            return Err(bad());
        }
        Ok(HalfInt::from_doubled(d as i32))
    }
}

/// Real power of a (possibly negative) base with an integer or half-integer
/// exponent. Integer exponents keep the sign of the base; half-integer
/// exponents use `|base|` so the result stays on the real branch.
pub fn real_pow(base: f64, exponent: HalfInt) -> f64 {
    match exponent.as_integer() {
        Some(k) => base.powi(k),
        None => base.abs().powf(exponent.value()),
    }
}

/// `(-1)^m` for integer `m`, `1` for half-integers: the factor relating
/// `real_pow(-b, m)` to `real_pow(b, m)`.
pub fn reflection_sign(exponent: HalfInt) -> f64 {
    match exponent.as_integer() {
        Some(k) if k % 2 != 0 => -1.0,
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("1/2".parse::<HalfInt>().unwrap(), HalfInt::HALF);
        assert_eq!("-1/2".parse::<HalfInt>().unwrap().doubled(), -1);
        assert_eq!("0.5".parse::<HalfInt>().unwrap(), HalfInt::HALF);
        assert_eq!("-1".parse::<HalfInt>().unwrap().doubled(), -2);
        assert_eq!("3/2".parse::<HalfInt>().unwrap().doubled(), 3);
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("0.25".parse::<HalfInt>().is_err());
    }

    #[test]
    fn exact_arithmetic() {
        let a = HalfInt::from_doubled(-1);
        let b = HalfInt::from_doubled(3);
        assert_eq!((a + b).value(), 1.0);
        assert_eq!((a - b).doubled(), -4);
        assert!(a < b);
        assert_eq!(format!("{}", a), "-1/2");
        assert_eq!(format!("{}", a + b), "1");
    }

    #[test]
    fn real_pow_branches() {
        assert_eq!(real_pow(-2.0, HalfInt::from_int(3)), -8.0);
        assert_eq!(real_pow(-4.0, HalfInt::HALF), 2.0);
        assert_eq!(reflection_sign(HalfInt::from_int(-1)), -1.0);
        assert_eq!(reflection_sign(HalfInt::HALF), 1.0);
    }
}
