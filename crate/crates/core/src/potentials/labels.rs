//! Presentation labelings of the five potential coefficients.
//!
//! Internally every potential is stored in polynomial form
//! `V = z^(2 m1 - d1) (z-1)^(2 m2 - d2) (p0 + p1 z + ... + p4 z^4)`.
//! The published tables use partial-fraction (confluent Heun) or explicit
//! x-power (double-/bi-confluent) labelings; each is an invertible 5x5
//! linear map to the polynomial coefficients, `p = M v_table`.

use nalgebra::Matrix5;

use crate::catalog::{canonical, ClassInfo, EquationFamily};
use crate::poly::Poly;

/// Partial-fraction terms `z^a (z-1)^b` of the canonical confluent Heun rows.
fn heun_terms(m1_doubled: i32, m2_doubled: i32) -> [(i32, i32); 5] {
    match (m1_doubled, m2_doubled) {
        (0, 0) => [(0, 0), (-1, 0), (-2, 0), (0, -1), (0, -2)],
        (1, -1) => [(0, 0), (-1, 0), (0, -1), (0, -2), (0, -3)],
        (1, 0) => [(0, 0), (1, 0), (-1, 0), (0, -1), (0, -2)],
        (1, 1) => [(0, 0), (1, 0), (2, 0), (-1, 0), (0, -1)],
        (2, -2) => [(0, 0), (0, -1), (0, -2), (0, -3), (0, -4)],
        (2, -1) => [(0, 0), (1, 0), (0, -1), (0, -2), (0, -3)],
        (2, 0) => [(0, 0), (1, 0), (2, 0), (0, -1), (0, -2)],
        (2, 1) => [(0, 0), (1, 0), (2, 0), (3, 0), (0, -1)],
        (2, 2) => [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)],
        _ => unreachable!("not a canonical confluent Heun pair"),
    }
}

/// Partial-fraction terms for any confluent Heun class; mirror classes use
/// the canonical row with the roles of `z` and `z - 1` swapped.
pub fn table_terms(class: &ClassInfo) -> Option<[(i32, i32); 5]> {
    if class.family != EquationFamily::ConfluentHeun {
        return None;
    }
    let p = class.exponents;
    let rep = canonical(p);
    let terms = heun_terms(rep.m1.doubled(), rep.m2.doubled());
    Some(if rep == p { terms } else { terms.map(|(a, b)| (b, a)) })
}

/// `M` with `p = M v_table`.
pub fn table_to_poly(class: &ClassInfo) -> Matrix5<f64> {
    let m1 = class.exponents.m1.doubled();
    let m2 = class.exponents.m2.doubled();
    match class.family {
        EquationFamily::ConfluentHeun => {
            let terms = table_terms(class).expect("confluent Heun");
            let mut m = Matrix5::zeros();
            for (k, (a, b)) in terms.iter().enumerate() {
                let ea = a + 2 - m1;
                let eb = b + 2 - m2;
                assert!(ea >= 0 && eb >= 0, "table term is not polynomial after clearing");
                let col = &Poly::monomial(ea as usize) * &Poly::shifted_power(1.0, eb as usize);
                for r in 0..5 {
                    m[(r, k)] = col.coeff(r);
                }
                debug_assert!(col.degree().unwrap_or(0) <= 4);
            }
            m
        }
        EquationFamily::DoubleConfluentHeun => match m1 {
            0 => Matrix5::from_fn(|r, c| if r + c == 4 { 1.0 } else { 0.0 }),
            1 => {
                let mut m = Matrix5::zeros();
                let scale = [1.0 / 64.0, 1.0 / 16.0, 0.25, 1.0, 4.0];
                for (k, s) in scale.iter().enumerate() {
                    m[(k, 4 - k)] = *s;
                }
                m
            }
            _ => Matrix5::identity(),
        },
        EquationFamily::BiConfluentHeun => {
            let scale = |k: i32| -> f64 {
                match m1 {
                    -2 => 2f64.powf(f64::from(4 - k) / 2.0),
                    -1 => 1.5f64.powf(-2.0 * f64::from(k - 3) / 3.0),
                    1 => 4f64.powi(k - 1),
                    _ => 1.0,
                }
            };
            Matrix5::from_fn(|r, c| if r == c { scale(r as i32) } else { 0.0 })
        }
        _ => Matrix5::identity(),
    }
}

pub fn poly_to_table(class: &ClassInfo) -> Matrix5<f64> {
    table_to_poly(class).try_inverse().expect("labeling maps are invertible")
}

/// True when the published tables give a labeling for this class.
pub fn has_table(class: &ClassInfo) -> bool {
    match class.family {
        EquationFamily::ConfluentHeun => true,
        EquationFamily::DoubleConfluentHeun => class.exponents.m1.doubled() <= 2,
        EquationFamily::BiConfluentHeun | EquationFamily::TriConfluentHeun => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{all_heun_representatives, class};

    #[test]
    fn maps_are_inverse() {
        for c in all_heun_representatives() {
            let m = table_to_poly(&c);
            let prod = m * poly_to_table(&c);
            assert!((prod - Matrix5::identity()).abs().max() < 1e-12, "{}", c.label());
        }
    }

    #[test]
    fn binomial_example() {
        // (1/2, 0): V2/z * z (z-1)^2 = (z-1)^2 -> p = (1, -2, 1, 0, 0)
        let c = class(EquationFamily::ConfluentHeun, 1, 0).unwrap();
        let m = table_to_poly(&c);
        let col: Vec<f64> = (0..5).map(|r| m[(r, 2)]).collect();
        assert_eq!(col, vec![1.0, -2.0, 1.0, 0.0, 0.0]);
    }
}
