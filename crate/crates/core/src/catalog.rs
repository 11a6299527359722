//! Discrete classes of coordinate maps `z' = z^m1 (z-1)^m2 / sigma` permitted
//! for each target equation, with the per-class metadata (mirror partner,
//! hypergeometric sub-families, physical z-interval, inversion method).

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::halfint::HalfInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquationFamily {
    Hypergeometric,
    ConfluentHypergeometric,
    ConfluentHeun,
    DoubleConfluentHeun,
    BiConfluentHeun,
    TriConfluentHeun,
}

impl EquationFamily {
    pub const ALL: [EquationFamily; 6] = [
        EquationFamily::Hypergeometric,
        EquationFamily::ConfluentHypergeometric,
        EquationFamily::ConfluentHeun,
        EquationFamily::DoubleConfluentHeun,
        EquationFamily::BiConfluentHeun,
        EquationFamily::TriConfluentHeun,
    ];

    /// The four confluent Heun forms.
    pub const HEUN: [EquationFamily; 4] = [
        EquationFamily::ConfluentHeun,
        EquationFamily::DoubleConfluentHeun,
        EquationFamily::BiConfluentHeun,
        EquationFamily::TriConfluentHeun,
    ];

    pub fn finite_singularities(self) -> usize {
        match self {
            EquationFamily::Hypergeometric | EquationFamily::ConfluentHeun => 2,
            EquationFamily::ConfluentHypergeometric
            | EquationFamily::DoubleConfluentHeun
            | EquationFamily::BiConfluentHeun => 1,
            EquationFamily::TriConfluentHeun => 0,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            EquationFamily::Hypergeometric => "hypergeometric",
            EquationFamily::ConfluentHypergeometric => "confluent-hypergeometric",
            EquationFamily::ConfluentHeun => "confluent-heun",
            EquationFamily::DoubleConfluentHeun => "double-confluent-heun",
            EquationFamily::BiConfluentHeun => "bi-confluent-heun",
            EquationFamily::TriConfluentHeun => "tri-confluent-heun",
        }
    }
}

impl fmt::Display for EquationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for EquationFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let fam = match key.as_str() {
            "hypergeometric" | "2f1" | "gauss" => EquationFamily::Hypergeometric,
            "confluent-hypergeometric" | "1f1" | "kummer" => EquationFamily::ConfluentHypergeometric,
            "confluent-heun" | "che" | "heun-c" => EquationFamily::ConfluentHeun,
            "double-confluent-heun" | "dhe" => EquationFamily::DoubleConfluentHeun,
            "bi-confluent-heun" | "bhe" => EquationFamily::BiConfluentHeun,
            "tri-confluent-heun" | "the" => EquationFamily::TriConfluentHeun,
            _ => return Err(Error::Parse(format!("unknown equation family '{s}'"))),
        };
        Ok(fam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentPair {
    pub m1: HalfInt,
    pub m2: HalfInt,
}

impl ExponentPair {
    pub const fn new(m1: HalfInt, m2: HalfInt) -> Self {
        ExponentPair { m1, m2 }
    }

    pub const fn from_doubled(m1: i32, m2: i32) -> Self {
        ExponentPair::new(HalfInt::from_doubled(m1), HalfInt::from_doubled(m2))
    }

    pub const fn swapped(self) -> Self {
        ExponentPair::new(self.m2, self.m1)
    }

    pub fn is_diagonal(self) -> bool {
        self.m1 == self.m2
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m1, self.m2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subfamily {
    Gauss2F1,
    Kummer1F1,
}

impl Subfamily {
    pub fn slug(self) -> &'static str {
        match self {
            Subfamily::Gauss2F1 => "2F1",
            Subfamily::Kummer1F1 => "1F1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapKind {
    ClosedForm,
    LambertW,
    NumericInverse,
}

impl MapKind {
    pub fn slug(self) -> &'static str {
        match self {
            MapKind::ClosedForm => "closed-form",
            MapKind::LambertW => "lambert-w",
            MapKind::NumericInverse => "numeric-inverse",
        }
    }
}

/// Interval of the z-axis; infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZDomain {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl ZDomain {
    pub const fn open(lo: f64, hi: f64) -> Self {
        ZDomain { lo, hi, lo_open: true, hi_open: true }
    }

    pub fn contains(&self, z: f64) -> bool {
        let above = if self.lo_open { z > self.lo } else { z >= self.lo };
        let below = if self.hi_open { z < self.hi } else { z <= self.hi };
        above && below
    }

    pub fn contains_interior(&self, z: f64) -> bool {
        z > self.lo && z < self.hi
    }

    /// Image under `z -> 1 - z`.
    pub fn reflected(&self) -> Self {
        ZDomain { lo: 1.0 - self.hi, hi: 1.0 - self.lo, lo_open: self.hi_open, hi_open: self.lo_open }
    }
}

impl fmt::Display for ZDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// `[lo, hi, lo_open, hi_open]`, infinite endpoints as `null`.
impl Serialize for ZDomain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
        let mut seq = serializer.serialize_seq(Some(4))?;
        seq.serialize_element(&finite(self.lo))?;
        seq.serialize_element(&finite(self.hi))?;
        seq.serialize_element(&self.lo_open)?;
        seq.serialize_element(&self.hi_open)?;
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassInfo {
    pub family: EquationFamily,
    pub exponents: ExponentPair,
    /// z <-> 1-z partner; only for off-diagonal confluent Heun pairs.
    pub mirror: Option<ExponentPair>,
    pub subfamilies: Vec<Subfamily>,
    pub z_domain: ZDomain,
    pub map_kind: MapKind,
    /// False for mirror images and for the double-confluent classes
    /// m1 = 3/2, 2 that reduce to m1 = 1/2, 0.
    pub independent: bool,
    /// Independent class this one is equivalent to, when not independent.
    pub equivalent_to: Option<ExponentPair>,
}

#[derive(Serialize)]
struct ClassInfoJson<'a> {
    family: &'static str,
    m1_doubled: i32,
    m2_doubled: i32,
    subfamilies: Vec<&'static str>,
    z_domain: &'a ZDomain,
    map_kind: &'static str,
}

impl Serialize for ClassInfo {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ClassInfoJson {
            family: self.family.slug(),
            m1_doubled: self.exponents.m1.doubled(),
            m2_doubled: self.exponents.m2.doubled(),
            subfamilies: self.subfamilies.iter().map(|s| s.slug()).collect(),
            z_domain: &self.z_domain,
            map_kind: self.map_kind.slug(),
        }
        .serialize(serializer)
    }
}

impl ClassInfo {
    /// Short label such as `confluent-heun (1, -1)`.
    pub fn label(&self) -> String {
        match self.family.finite_singularities() {
            2 => format!("{} {}", self.family, self.exponents),
            1 => format!("{} m1={}", self.family, self.exponents.m1),
            _ => self.family.to_string(),
        }
    }

    pub fn is_confluent_heun(&self) -> bool {
        self.family == EquationFamily::ConfluentHeun
    }
}

fn pair_ok(family: EquationFamily, p: ExponentPair) -> bool {
    let (a, b) = (p.m1.doubled(), p.m2.doubled());
    match family {
        EquationFamily::Hypergeometric | EquationFamily::ConfluentHeun => a <= 2 && b <= 2 && a + b >= 0,
        // z' = z^m1 (1-z)^m2 / sigma with r(z) of degree <= 2: m1, m2 in {0, 1/2, 1}, m1+m2 >= 1.
        EquationFamily::ConfluentHypergeometric => b == 0 && (0..=2).contains(&a),
        EquationFamily::DoubleConfluentHeun => b == 0 && (0..=4).contains(&a),
        EquationFamily::BiConfluentHeun => b == 0 && (-2..=2).contains(&a),
        EquationFamily::TriConfluentHeun => a == 0 && b == 0,
    }
}

fn hypergeometric_ok(p: ExponentPair) -> bool {
    let (a, b) = (p.m1.doubled(), p.m2.doubled());
    (0..=2).contains(&a) && (0..=2).contains(&b) && a + b >= 2
}

/// Every exponent pair admitted for `family`, sorted lexicographically.
pub fn enumerate_classes(family: EquationFamily) -> Vec<ExponentPair> {
    let mut out = Vec::new();
    for a in -4..=4 {
        for b in -4..=4 {
            let p = ExponentPair::from_doubled(a, b);
            let ok = match family {
                EquationFamily::Hypergeometric => hypergeometric_ok(p),
                f => pair_ok(f, p),
            };
            if ok {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// Canonical representative under `z <-> 1-z` (keeps `m1 >= m2`).
pub fn canonical(p: ExponentPair) -> ExponentPair {
    if p.m1 >= p.m2 {
        p
    } else {
        p.swapped()
    }
}

pub fn independent_representatives(family: EquationFamily) -> Vec<ClassInfo> {
    let pairs = enumerate_classes(family);
    let mut reps: Vec<ExponentPair> = match family {
        EquationFamily::ConfluentHeun | EquationFamily::Hypergeometric => {
            pairs.iter().copied().filter(|p| canonical(*p) == *p).collect()
        }
        EquationFamily::DoubleConfluentHeun => {
            pairs.into_iter().filter(|p| p.m1.doubled() <= 2).collect()
        }
        _ => pairs,
    };
    reps.sort();
    reps.into_iter()
        .map(|p| class_info(family, p).expect("enumerated pair is valid"))
        .collect()
}

fn che_representative_meta(p: ExponentPair) -> (Vec<Subfamily>, ZDomain, MapKind) {
    use Subfamily::*;
    let inf = f64::INFINITY;
    let (sub, dom, kind) = match (p.m1.doubled(), p.m2.doubled()) {
        (0, 0) => (vec![Kummer1F1], ZDomain::open(-inf, inf), MapKind::ClosedForm),
        (1, -1) => (vec![], ZDomain::open(1.0, inf), MapKind::NumericInverse),
        (1, 0) => (vec![Kummer1F1], ZDomain::open(0.0, inf), MapKind::ClosedForm),
        (1, 1) => (vec![Gauss2F1], ZDomain::open(1.0, inf), MapKind::ClosedForm),
        (2, -2) => (
            vec![],
            ZDomain { lo: 0.0, hi: 1.0, lo_open: true, hi_open: false },
            MapKind::LambertW,
        ),
        (2, -1) => (vec![], ZDomain::open(1.0, inf), MapKind::NumericInverse),
        (2, 0) => (vec![Gauss2F1, Kummer1F1], ZDomain::open(0.0, inf), MapKind::ClosedForm),
        (2, 1) => (vec![Gauss2F1], ZDomain::open(1.0, inf), MapKind::ClosedForm),
        (2, 2) => (vec![Gauss2F1], ZDomain::open(0.0, 1.0), MapKind::ClosedForm),
        _ => unreachable!("not a canonical confluent Heun pair: {p}"),
    };
    let mut sub = sub;
    sub.sort();
    (sub, dom, kind)
}

/// Metadata for one admitted class.
pub fn class_info(family: EquationFamily, pair: ExponentPair) -> Result<ClassInfo> {
    if !enumerate_classes(family).contains(&pair) {
        return Err(Error::InvalidClass { family: family.to_string(), pair: pair.to_string() });
    }
    let info = match family {
        EquationFamily::ConfluentHeun => {
            let rep = canonical(pair);
            let (subfamilies, dom, map_kind) = che_representative_meta(rep);
            let is_rep = rep == pair;
            ClassInfo {
                family,
                exponents: pair,
                mirror: if pair.is_diagonal() { None } else { Some(pair.swapped()) },
                subfamilies,
                z_domain: if is_rep { dom } else { dom.reflected() },
                map_kind,
                independent: is_rep,
                equivalent_to: if is_rep { None } else { Some(rep) },
            }
        }
        EquationFamily::Hypergeometric => {
            let rep = canonical(pair);
            ClassInfo {
                family,
                exponents: pair,
                mirror: if pair.is_diagonal() { None } else { Some(pair.swapped()) },
                subfamilies: vec![Subfamily::Gauss2F1],
                z_domain: ZDomain::open(0.0, 1.0),
                map_kind: MapKind::ClosedForm,
                independent: rep == pair,
                equivalent_to: if rep == pair { None } else { Some(rep) },
            }
        }
        EquationFamily::ConfluentHypergeometric => ClassInfo {
            family,
            exponents: pair,
            mirror: None,
            subfamilies: vec![Subfamily::Kummer1F1],
            z_domain: ZDomain::open(0.0, f64::INFINITY),
            map_kind: MapKind::ClosedForm,
            independent: true,
            equivalent_to: None,
        },
        EquationFamily::DoubleConfluentHeun => {
            // m1 -> 2 - m1 under z -> 1/z.
            let d = pair.m1.doubled();
            let equivalent_to = (d > 2).then(|| ExponentPair::from_doubled(4 - d, 0));
            ClassInfo {
                family,
                exponents: pair,
                mirror: None,
                subfamilies: vec![],
                z_domain: ZDomain::open(0.0, f64::INFINITY),
                map_kind: MapKind::ClosedForm,
                independent: d <= 2,
                equivalent_to,
            }
        }
        EquationFamily::BiConfluentHeun => ClassInfo {
            family,
            exponents: pair,
            mirror: None,
            subfamilies: vec![],
            z_domain: ZDomain::open(0.0, f64::INFINITY),
            map_kind: MapKind::ClosedForm,
            independent: true,
            equivalent_to: None,
        },
        EquationFamily::TriConfluentHeun => ClassInfo {
            family,
            exponents: pair,
            mirror: None,
            subfamilies: vec![],
            z_domain: ZDomain::open(f64::NEG_INFINITY, f64::INFINITY),
            map_kind: MapKind::ClosedForm,
            independent: true,
            equivalent_to: None,
        },
    };
    Ok(info)
}

/// Convenience constructor from doubled exponents.
pub fn class(family: EquationFamily, m1_doubled: i32, m2_doubled: i32) -> Result<ClassInfo> {
    class_info(family, ExponentPair::from_doubled(m1_doubled, m2_doubled))
}

/// Every independent class of the four confluent Heun families (9 + 3 + 5 + 1).
pub fn all_heun_representatives() -> Vec<ClassInfo> {
    EquationFamily::HEUN.iter().flat_map(|f| independent_representatives(*f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(p: &ExponentPair) -> (i32, i32) {
        (p.m1.doubled(), p.m2.doubled())
    }

    #[test]
    fn confluent_heun_fifteen_pairs() {
        let pairs = enumerate_classes(EquationFamily::ConfluentHeun);
        assert_eq!(pairs.len(), 15);
        let per_m1 = |m: i32| pairs.iter().filter(|p| p.m1.doubled() == m).count();
        assert_eq!([per_m1(2), per_m1(1), per_m1(0), per_m1(-1), per_m1(-2)], [5, 4, 3, 2, 1]);
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(sorted, pairs);
    }

    #[test]
    fn canonicalization_by_brute_force() {
        let pairs = enumerate_classes(EquationFamily::ConfluentHeun);
        let mut orbits: Vec<Vec<ExponentPair>> = Vec::new();
        for p in &pairs {
            if let Some(o) = orbits.iter_mut().find(|o| o.contains(p) || o.contains(&p.swapped())) {
                if !o.contains(p) {
                    o.push(*p);
                }
            } else {
                orbits.push(vec![*p]);
            }
        }
        assert_eq!(orbits.len(), 9);
        assert_eq!(orbits.iter().filter(|o| o.len() == 1).count(), 3);
        assert_eq!(orbits.iter().filter(|o| o.len() == 2).count(), 6);
        for p in &pairs {
            assert_eq!(canonical(canonical(*p)), canonical(*p));
        }
        let reps = independent_representatives(EquationFamily::ConfluentHeun);
        assert_eq!(reps.len(), 9);
        assert_eq!(reps.iter().filter(|c| c.exponents.is_diagonal()).count(), 3);
    }

    #[test]
    fn one_singularity_families() {
        let bhe: Vec<i32> =
            enumerate_classes(EquationFamily::BiConfluentHeun).iter().map(|p| p.m1.doubled()).collect();
        assert_eq!(bhe, vec![-2, -1, 0, 1, 2]);
        let dhe: Vec<i32> =
            enumerate_classes(EquationFamily::DoubleConfluentHeun).iter().map(|p| p.m1.doubled()).collect();
        assert_eq!(dhe, vec![0, 1, 2, 3, 4]);
        assert_eq!(independent_representatives(EquationFamily::DoubleConfluentHeun).len(), 3);
        assert_eq!(independent_representatives(EquationFamily::BiConfluentHeun).len(), 5);
        assert_eq!(enumerate_classes(EquationFamily::TriConfluentHeun).len(), 1);
        assert_eq!(enumerate_classes(EquationFamily::Hypergeometric).len(), 6);
        assert_eq!(independent_representatives(EquationFamily::Hypergeometric).len(), 4);
        assert_eq!(enumerate_classes(EquationFamily::ConfluentHypergeometric).len(), 3);
    }

    #[test]
    fn table_one_subfamilies() {
        use Subfamily::*;
        let expect: [((i32, i32), Vec<Subfamily>); 9] = [
            ((0, 0), vec![Kummer1F1]),
            ((1, 0), vec![Kummer1F1]),
            ((1, 1), vec![Gauss2F1]),
            ((2, 0), vec![Gauss2F1, Kummer1F1]),
            ((2, 1), vec![Gauss2F1]),
            ((2, 2), vec![Gauss2F1]),
            ((1, -1), vec![]),
            ((2, -2), vec![]),
            ((2, -1), vec![]),
        ];
        for ((a, b), sub) in expect {
            let info = class(EquationFamily::ConfluentHeun, a, b).unwrap();
            assert_eq!(info.subfamilies, sub, "({a},{b})");
            assert_eq!(info.map_kind == MapKind::LambertW, (a, b) == (2, -2));
        }
    }

    #[test]
    fn mirrors() {
        for p in enumerate_classes(EquationFamily::ConfluentHeun) {
            let info = class_info(EquationFamily::ConfluentHeun, p).unwrap();
            match info.mirror {
                None => assert!(p.is_diagonal()),
                Some(m) => {
                    let back = class_info(EquationFamily::ConfluentHeun, m).unwrap();
                    assert_eq!(back.mirror, Some(p));
                    assert_eq!(back.z_domain.reflected(), info.z_domain);
                }
            }
        }
        let zz = class(EquationFamily::ConfluentHeun, 0, 0).unwrap();
        assert_eq!(d(&canonical(zz.exponents)), (0, 0));
    }

    #[test]
    fn rejects_invalid_pairs() {
        assert!(class(EquationFamily::ConfluentHeun, 3, 0).is_err());
        assert!(class(EquationFamily::ConfluentHeun, -2, 1).is_err());
        assert!(class(EquationFamily::BiConfluentHeun, 4, 0).is_err());
        assert!(class(EquationFamily::TriConfluentHeun, 0, 1).is_err());
    }

    #[test]
    fn json_shape() {
        let info = class(EquationFamily::ConfluentHeun, 2, -2).unwrap();
        let v = serde_json::to_value(&info).unwrap();
        assert_eq!(v["family"], "confluent-heun");
        assert_eq!(v["m1_doubled"], 2);
        assert_eq!(v["m2_doubled"], -2);
        assert_eq!(v["map_kind"], "lambert-w");
        assert_eq!(v["z_domain"], serde_json::json!([0.0, 1.0, true, false]));
        let zz = class(EquationFamily::ConfluentHeun, 0, 0).unwrap();
        let v = serde_json::to_value(&zz).unwrap();
        assert_eq!(v["z_domain"], serde_json::json!([null, null, true, true]));
    }
}
