use proptest::prelude::*;

use heunpot::catalog::{all_heun_representatives, class, independent_representatives};
use heunpot::potentials::{eval_potential_x, eval_potential_z, mirror_relabel, PotentialSpec};
use heunpot::reduction::{identity_residual, solve_ansatz};
use heunpot::spectra::{closed_form_spectrum, Classical};
use heunpot::{EquationFamily, HalfInt};

fn coeffs() -> impl Strategy<Value = [f64; 5]> {
    prop::array::uniform5(-2.0f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn half_integers_round_trip(d in -20i32..20) {
        let h = HalfInt::from_doubled(d);
        prop_assert_eq!(h.to_string().parse::<HalfInt>().unwrap(), h);
        prop_assert_eq!(format!("{}", h.value()).parse::<HalfInt>().unwrap(), h);
    }

    #[test]
    fn map_round_trip(idx in 0usize..9, u in 0.02f64..0.98, sigma in 0.3f64..3.0, x0 in -2.0f64..2.0) {
        let c = &independent_representatives(EquationFamily::ConfluentHeun)[idx];
        let spec = PotentialSpec::new(c.clone(), [0.0; 5], sigma, x0).unwrap();
        let d = c.z_domain;
        // pull u into the z-domain
        let z = match (d.lo.is_finite(), d.hi.is_finite()) {
            (true, true) => d.lo + (d.hi - d.lo) * u,
            (true, false) => d.lo + u / (1.0 - u),
            (false, true) => d.hi - u / (1.0 - u),
            (false, false) => 4.0 * (u - 0.5),
        };
        prop_assume!(d.contains_interior(z) && (z - 1.0).abs() > 1e-3 && z.abs() > 1e-3);
        let map = spec.map();
        let x = map.x_of_z(z).unwrap();
        let back = map.z_of_x(x).unwrap();
        prop_assert!((back - z).abs() <= 1e-10 * z.abs().max(1.0), "{} z={} back={}", c.label(), z, back);
    }

    #[test]
    fn table_and_polynomial_forms_agree(idx in 0usize..9, v in coeffs(), u in 0.05f64..0.95) {
        let c = &independent_representatives(EquationFamily::ConfluentHeun)[idx];
        let exact = PotentialSpec::from_table(c.clone(), v, 1.0, 0.0).unwrap();
        let poly = PotentialSpec::new(c.clone(), exact.v, 1.0, 0.0).unwrap();
        let z = if c.z_domain.contains_interior(u) { u } else if c.z_domain.contains_interior(1.0 + 3.0 * u) { 1.0 + 3.0 * u } else { -3.0 * u };
        prop_assume!(c.z_domain.contains_interior(z));
        let a = eval_potential_z(&exact, z).unwrap();
        let b = eval_potential_z(&poly, z).unwrap();
        let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>() * (1.0 + z.abs()).powi(4) / (z.abs() * (z - 1.0).abs()).min(1.0).powi(4);
        prop_assert!((a - b).abs() <= 1e-12 * scale, "{} z={} {} {}", c.label(), z, a, b);
    }

    #[test]
    fn mirror_preserves_potential(v in coeffs(), t in 0.1f64..3.0) {
        let c = class(EquationFamily::ConfluentHeun, 2, -1).unwrap();
        let s = PotentialSpec::from_table(c, v, 0.9, 0.1).unwrap();
        let m = mirror_relabel(&s).unwrap();
        let (a, b) = s.map().x_image();
        let x = if a.is_finite() { a + t } else { b - t };
        let v1 = eval_potential_x(&s, x).unwrap();
        let v2 = eval_potential_x(&m, x).unwrap();
        prop_assert!((v1 - v2).abs() <= 1e-9 * v1.abs().max(1.0));
    }

    #[test]
    fn reduction_identity_random(idx in 0usize..18, v in coeffs(), e in -3.0f64..3.0) {
        let c = &all_heun_representatives()[idx];
        let spec = PotentialSpec::new(c.clone(), v, 1.0, 0.0).unwrap();
        let Ok(sols) = solve_ansatz(&spec, e) else { return Ok(()) };
        let grid = heunpot::reduction::default_x_grid(&spec, 40).unwrap();
        for s in sols {
            let r = identity_residual(&spec, &s, &grid).unwrap();
            prop_assert!(r <= 1e-9, "{} {}", c.label(), r);
        }
    }

    #[test]
    fn closed_form_levels_increase(v1 in -30.0f64..-1.0, v2 in 0.5f64..6.0, sigma in 0.5f64..2.0) {
        if let Ok(s) = closed_form_spectrum(&Classical::Morse { v1, v2, sigma }, 50) {
            prop_assert!(s.energies.windows(2).all(|w| w[0] < w[1]));
            let d = v1 * v1 / (4.0 * v2);
            let expected = ((d.sqrt() * sigma - 0.5).floor() + 1.0).max(0.0) as usize;
            prop_assert_eq!(s.energies.len(), expected);
        }
    }
}
