//! Potentials of the discrete classes, in the units `2m/hbar^2 = 1` so the
//! Schrödinger equation reads `psi'' + (E - V) psi = 0`.

pub mod expansion;
pub mod labels;
pub mod natanzon;

use std::io::Write;

use nalgebra::Vector5;
use serde::Serialize;

use crate::catalog::{ClassInfo, EquationFamily};
use crate::coordmap::MapSpec;
use crate::error::{Error, Result};
use crate::halfint::reflection_sign;
use crate::poly::Poly;

pub use expansion::{origin_expansion, tail, tail_deviation, TailInfo};
pub use natanzon::{natanzon_general, NatanzonSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub class: ClassInfo,
    /// Polynomial-form coefficients `p0..p4`.
    pub v: [f64; 5],
    pub sigma: f64,
    pub x0: f64,
    /// Table coefficients as given, kept so that pole terms stay exact.
    pub table: Option<[f64; 5]>,
}

impl PotentialSpec {
    pub fn new(class: ClassInfo, v: [f64; 5], sigma: f64, x0: f64) -> Result<Self> {
        MapSpec::new(class.clone(), sigma, x0)?;
        Ok(PotentialSpec { class, v, sigma, x0, table: None })
    }

    /// Builds a spec from coefficients in the published table labeling.
    pub fn from_table(class: ClassInfo, v_table: [f64; 5], sigma: f64, x0: f64) -> Result<Self> {
        let p = labels::table_to_poly(&class) * Vector5::from(v_table);
        let mut spec = Self::new(class, p.into(), sigma, x0)?;
        spec.table = Some(v_table);
        Ok(spec)
    }

    pub fn table_coefficients(&self) -> [f64; 5] {
        match self.table {
            Some(t) => t,
            None => (labels::poly_to_table(&self.class) * Vector5::from(self.v)).into(),
        }
    }

    pub fn map(&self) -> MapSpec {
        MapSpec { class: self.class.clone(), sigma: self.sigma, x0: self.x0 }
    }

    pub fn poly(&self) -> Poly {
        Poly(self.v.to_vec())
    }

    /// Integer powers `(e1, e2)` of the prefactor `z^e1 (z-1)^e2`.
    pub fn prefactor_powers(&self) -> (i32, i32) {
        let m1 = self.class.exponents.m1.doubled();
        let m2 = self.class.exponents.m2.doubled();
        match self.class.family {
            EquationFamily::ConfluentHeun | EquationFamily::Hypergeometric => (m1 - 2, m2 - 2),
            EquationFamily::DoubleConfluentHeun => (m1 - 4, 0),
            EquationFamily::BiConfluentHeun | EquationFamily::ConfluentHypergeometric => (m1 - 2, 0),
            EquationFamily::TriConfluentHeun => (0, 0),
        }
    }

    /// Number of free real parameters: coefficients, then sigma and x0 where
    /// they are not absorbed.
    pub fn parameter_count(&self) -> usize {
        match self.class.family {
            EquationFamily::TriConfluentHeun => 5,
            EquationFamily::DoubleConfluentHeun | EquationFamily::BiConfluentHeun => 6,
            _ => 7,
        }
    }
}

fn signed_pow(base: f64, k: i32) -> f64 {
    base.powi(k)
}

/// `V(z)`; at a pole of the prefactor the result is a signed infinity.
pub fn eval_potential_z(spec: &PotentialSpec, z: f64) -> Result<f64> {
    let d = spec.class.z_domain;
    if !(z >= d.lo && z <= d.hi) || z.is_nan() {
        return Err(Error::ZDomain { class: spec.class.label(), z, domain: d.to_string() });
    }
    Ok(eval_potential_z_unchecked(spec, z))
}

pub fn eval_potential_z_unchecked(spec: &PotentialSpec, z: f64) -> f64 {
    let (e1, e2) = spec.prefactor_powers();
    let p = spec.poly().eval(z);
    let at_pole = (e1 < 0 && z == 0.0) || (e2 < 0 && z == 1.0);
    if at_pole {
        let s = if p < 0.0 { -1.0 } else { 1.0 };
        return s * f64::INFINITY;
    }
    if spec.class.family.finite_singularities() == 0 {
        return p;
    }
    if let Some(terms) = labels::table_terms(&spec.class) {
        // partial fractions keep full relative accuracy next to the poles
        let t = spec.table_coefficients();
        return terms.iter().zip(&t).map(|((a, b), c)| c * z.powi(*a) * (z - 1.0).powi(*b)).sum();
    }
    signed_pow(z, e1) * signed_pow(z - 1.0, e2) * p
}

pub fn eval_potential_x(spec: &PotentialSpec, x: f64) -> Result<f64> {
    let z = spec.map().z_of_x(x)?;
    eval_potential_z(spec, z)
}

/// Partial-fraction (table) form `sum v_k z^a (z-1)^b` for confluent Heun classes.
pub fn eval_table_z(class: &ClassInfo, v_table: &[f64; 5], z: f64) -> Result<f64> {
    let terms = labels::table_terms(class).ok_or_else(|| Error::WrongClass {
        expected: "confluent-heun".into(),
        got: class.label(),
    })?;
    Ok(terms
        .iter()
        .zip(v_table)
        .filter(|(_, c)| **c != 0.0)
        .map(|((a, b), c)| c * z.powi(*a) * (z - 1.0).powi(*b))
        .sum())
}

/// Explicit x-forms for the classes whose inverse map is elementary and that
/// are tabulated in x: the confluent Heun class (1, 0) as a Morse plus
/// Eckart sum, the double-/bi-confluent rows and the quartic oscillator.
/// `t = (x - x0)/sigma`; coefficients are in table labeling.
pub fn eval_table_x(class: &ClassInfo, v: &[f64; 5], t: f64) -> Result<f64> {
    let m1 = class.exponents.m1.doubled();
    let val = match (class.family, m1, class.exponents.m2.doubled()) {
        (EquationFamily::ConfluentHeun, 2, 0) => {
            let e = t.exp();
            v[0] + v[1] * e + v[2] * e * e + v[3] / (e - 1.0) + v[4] / ((e - 1.0) * (e - 1.0))
        }
        (EquationFamily::DoubleConfluentHeun, 0, _) => {
            v[0] + v[1] / t + v[2] / t.powi(2) + v[3] / t.powi(3) + v[4] / t.powi(4)
        }
        (EquationFamily::DoubleConfluentHeun, 1, _) => {
            v[0] * t * t + v[1] + v[2] / t.powi(2) + v[3] / t.powi(4) + v[4] / t.powi(6)
        }
        (EquationFamily::DoubleConfluentHeun, 2, _) => {
            let e = t.exp();
            v[0] / (e * e) + v[1] / e + v[2] + v[3] * e + v[4] * e * e
        }
        (EquationFamily::BiConfluentHeun, -2, _) => {
            v[0] / t.powi(2) + v[1] / t.powf(1.5) + v[2] / t + v[3] / t.sqrt() + v[4]
        }
        (EquationFamily::BiConfluentHeun, -1, _) => {
            let c = t.cbrt();
            v[0] / t.powi(2) + v[1] / (t * c) + v[2] / (c * c) + v[3] + v[4] * c * c
        }
        (EquationFamily::BiConfluentHeun, 0, _) => {
            v[0] / t.powi(2) + v[1] / t + v[2] + v[3] * t + v[4] * t * t
        }
        (EquationFamily::BiConfluentHeun, 1, _) => {
            v[0] / t.powi(2) + v[1] + v[2] * t.powi(2) + v[3] * t.powi(4) + v[4] * t.powi(6)
        }
        (EquationFamily::BiConfluentHeun, 2, _) => {
            let e = t.exp();
            v[0] + v[1] * e + v[2] * e.powi(2) + v[3] * e.powi(3) + v[4] * e.powi(4)
        }
        (EquationFamily::TriConfluentHeun, _, _) => {
            v[0] + t * (v[1] + t * (v[2] + t * (v[3] + t * v[4])))
        }
        _ => {
            return Err(Error::WrongClass { expected: "a class with a tabulated x-form".into(), got: class.label() })
        }
    };
    Ok(val)
}

/// The `z <-> 1-z` image: `V'(1 - z) = V(z)` with `p'(w) = (-1)^(2m1+2m2) p(1 - w)`.
///
/// For off-diagonal classes the returned map parameters describe the same
/// physical potential in x (`sigma' = -c sigma`). For diagonal classes the
/// result is the reflected potential of the same class.
pub fn mirror_relabel(spec: &PotentialSpec) -> Result<PotentialSpec> {
    let fam = spec.class.family;
    if fam != EquationFamily::ConfluentHeun && fam != EquationFamily::Hypergeometric {
        return Err(Error::NoMirror { class: spec.class.label() });
    }
    let p = spec.class.exponents;
    let target = crate::catalog::class_info(fam, p.swapped())?;
    let sign = if (p.m1.doubled() + p.m2.doubled()) % 2 == 0 { 1.0 } else { -1.0 };
    let reflected = spec.poly().reflect().scale(sign);
    let c = reflection_sign(p.m1) * reflection_sign(p.m2);
    let x0 = if p.m1.doubled() == 0 && p.m2.doubled() == 0 { spec.x0 + spec.sigma } else { spec.x0 };
    let mut v = [0.0; 5];
    v.copy_from_slice(&reflected.padded(5));
    let mut out = PotentialSpec::new(target, v, -c * spec.sigma, x0)?;
    // z^a (z-1)^b at z = 1-w is (-1)^(a+b) w^b (w-1)^a
    if let (Some(t), Some(src), Some(dst)) = (spec.table, labels::table_terms(&spec.class), labels::table_terms(&out.class)) {
        let mut mirrored = [0.0; 5];
        let mut complete = true;
        for ((a, b), c) in src.iter().zip(t) {
            match dst.iter().position(|q| *q == (*b, *a)) {
                Some(j) => mirrored[j] = if (a + b) % 2 == 0 { c } else { -c },
                None => complete = false,
            }
        }
        if complete {
            out.table = Some(mirrored);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub z: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

pub fn profile(spec: &PotentialSpec, xs: &[f64]) -> Result<Vec<ProfilePoint>> {
    let map = spec.map();
    xs.iter()
        .map(|&x| {
            let z = map.z_of_x(x)?;
            Ok(ProfilePoint { x, z, v: eval_potential_z(spec, z)? })
        })
        .collect()
}

/// 15 significant digits, `inf`/`-inf` for poles.
pub fn fmt15(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.14e}", v)
}

pub fn write_profile_csv<W: Write + ?Sized>(out: &mut W, spec: &PotentialSpec, pts: &[ProfilePoint]) -> Result<()> {
    writeln!(out, "# units: 2m/hbar^2 = 1")?;
    writeln!(out, "# class: {}", spec.class.label())?;
    writeln!(
        out,
        "# v(poly): {}",
        spec.v.iter().map(|c| fmt15(*c)).collect::<Vec<_>>().join(",")
    )?;
    writeln!(out, "# sigma: {} x0: {}", fmt15(spec.sigma), fmt15(spec.x0))?;
    writeln!(out, "x,z,V")?;
    for p in pts {
        writeln!(out, "{},{},{}", fmt15(p.x), fmt15(p.z), fmt15(p.v))?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct SpecEcho<'a> {
    pub class: &'a ClassInfo,
    pub v_poly: [f64; 5],
    pub v_table: Option<[f64; 5]>,
    pub sigma: f64,
    pub x0: f64,
}

pub fn spec_echo(spec: &PotentialSpec) -> SpecEcho<'_> {
    SpecEcho {
        class: &spec.class,
        v_poly: spec.v,
        v_table: labels::has_table(&spec.class).then(|| spec.table_coefficients()),
        sigma: spec.sigma,
        x0: spec.x0,
    }
}

pub fn profile_json(spec: &PotentialSpec, pts: &[ProfilePoint]) -> serde_json::Value {
    let finite = |v: f64| if v.is_finite() { serde_json::json!(v) } else { serde_json::json!(fmt15(v)) };
    serde_json::json!({
        "units": "2m/hbar^2 = 1",
        "spec": spec_echo(spec),
        "points": pts.iter().map(|p| serde_json::json!({"x": p.x, "z": p.z, "V": finite(p.v)})).collect::<Vec<_>>(),
    })
}
