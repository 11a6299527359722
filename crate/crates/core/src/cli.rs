//! Command-line front end. All output is CSV (`#` header lines, 15
//! significant digits) or JSON; nothing depends on wall-clock or thread order.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{all_heun_representatives, class_info, enumerate_classes, ClassInfo, EquationFamily, ExponentPair, MapKind};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::potentials::labels::{has_table, table_terms};
use crate::potentials::{fmt15, profile, profile_json, spec_echo, write_profile_csv, PotentialSpec};
use crate::reduction::{default_x_grid, psi_with_derivative, solve_ansatz, verify_class, VerificationRow};
use crate::spectra::{classical_from_table, cross_validate, numerov_bound_states};

pub const EXIT_GATE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CLASS: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;
pub const EXIT_NUMERIC: i32 = 5;
pub const EXIT_SPECTRUM: i32 = 6;
pub const EXIT_IO: i32 = 7;

const UNITS: &str = "# units: 2m/hbar^2 = 1";

#[derive(Parser, Debug)]
#[command(name = "heunpot", version, about = "Exactly solvable potentials of the hypergeometric and confluent Heun classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the class catalog.
    List {
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print a class card: V(z), x(z), domain, subfamilies.
    Show {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tabulate x, z, V on a grid.
    Profile {
        #[command(flatten)]
        pot: PotArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reduction residuals for seeded random draws.
    Verify {
        /// Every independent Heun class (default when no class is given).
        #[arg(long)]
        all: bool,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        m1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        m2: Option<String>,
        #[arg(long, default_value_t = 5)]
        draws: usize,
        #[arg(long, default_value_t = 3)]
        energies: usize,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        /// Gate on the reduction identity residual.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Gate on the Schrödinger residual of the assembled psi.
        #[arg(long, default_value_t = 1e-6)]
        psi_tol: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bound states by Numerov shooting, with a closed-form oracle when
    /// `--specialize` names one.
    Spectrum {
        #[command(flatten)]
        pot: PotArgs,
        #[arg(long, allow_hyphen_values = true)]
        e_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        e_max: Option<f64>,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long, value_enum)]
        specialize: Option<Specialize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// x, psi, psi' for one ansatz branch.
    Psi {
        #[command(flatten)]
        pot: PotArgs,
        #[arg(long, allow_hyphen_values = true)]
        energy: f64,
        /// Branch tag such as `+-0`; default is the first branch.
        #[arg(long, allow_hyphen_values = true)]
        branch: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialize {
    Eckart,
    PoschlTeller,
    Morse,
    Harmonic,
    Kratzer,
}

impl Specialize {
    fn slug(self) -> &'static str {
        match self {
            Specialize::Eckart => "eckart",
            Specialize::PoschlTeller => "poschl-teller",
            Specialize::Morse => "morse",
            Specialize::Harmonic => "harmonic",
            Specialize::Kratzer => "kratzer",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassArgs {
    #[arg(long)]
    pub family: String,
    /// Integer or half-integer: `1`, `1/2`, `-0.5`.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub m1: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub m2: String,
}

/// Coefficients are in the published table labeling where one exists,
/// otherwise polynomial form.
#[derive(Args, Debug)]
pub struct PotArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub v0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub v1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub v2: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub v3: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub v4: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub x0: f64,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidClass { .. } | Error::WrongClass { .. } | Error::NoMirror { .. } | Error::Parse(_) => EXIT_CLASS,
        Error::ZDomain { .. }
        | Error::XDomain { .. }
        | Error::NoBracket { .. }
        | Error::BranchPoint { .. }
        | Error::LambertBranch { .. }
        | Error::SingularPoint { .. }
        | Error::NonPositiveR { .. } => EXIT_DOMAIN,
        Error::Specialization { .. } | Error::NoBoundStates(_) => EXIT_SPECTRUM,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_NUMERIC,
    }
}

impl ClassArgs {
    fn resolve(&self) -> Result<ClassInfo> {
        let family: EquationFamily = self.family.parse()?;
        let m1: HalfInt = self.m1.parse()?;
        let m2: HalfInt = self.m2.parse()?;
        class_info(family, ExponentPair::new(m1, m2))
    }
}

impl PotArgs {
    fn spec(&self) -> Result<PotentialSpec> {
        let cls = self.class.resolve()?;
        let v = self.table();
        if !self.sigma.is_finite() || self.sigma == 0.0 {
            return Err(Error::Parse(format!("--sigma must be finite and nonzero, got {}", self.sigma)));
        }
        if has_table(&cls) {
            PotentialSpec::from_table(cls, v, self.sigma, self.x0)
        } else {
            PotentialSpec::new(cls, v, self.sigma, self.x0)
        }
    }

    fn table(&self) -> [f64; 5] {
        [self.v0, self.v1, self.v2, self.v3, self.v4]
    }
}

impl GridArgs {
    fn xs(&self, spec: &PotentialSpec) -> Result<Vec<f64>> {
        if self.grid < 2 {
            return Err(Error::Parse("--grid must be at least 2".into()));
        }
        let (a, b) = spec.map().x_image();
        let span = 10.0 * spec.sigma.abs();
        let inset = |lo: f64, hi: f64| {
            let d = 1e-6 * (hi - lo);
            (lo + d, hi - d)
        };
        let (lo, hi) = match (a.is_finite(), b.is_finite()) {
            (true, true) => inset(a, b),
            (true, false) => inset(a, a + span),
            (false, true) => inset(b - span, b),
            (false, false) => (spec.x0 - span, spec.x0 + span),
        };
        let lo = self.x_min.unwrap_or(lo);
        let hi = self.x_max.unwrap_or(hi);
        if !(lo < hi) {
            return Err(Error::Parse(format!("empty x range [{lo}, {hi}]")));
        }
        let n = self.grid;
        Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn monomial(a: i32, b: i32) -> String {
    let mut parts = vec![];
    match a {
        0 => {}
        1 => parts.push("z".to_string()),
        _ => parts.push(format!("z^{a}")),
    }
    match b {
        0 => {}
        1 => parts.push("(z-1)".to_string()),
        _ => parts.push(format!("(z-1)^{b}")),
    }
    parts.join(" ")
}

/// `V(z)` with symbolic coefficients.
pub fn potential_formula(cls: &ClassInfo) -> String {
    if let Some(terms) = table_terms(cls) {
        return terms
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let m = monomial(*a, *b);
                if m.is_empty() { format!("V{k}") } else { format!("V{k} {m}") }
            })
            .collect::<Vec<_>>()
            .join(" + ");
    }
    let spec = PotentialSpec { class: cls.clone(), v: [0.0; 5], sigma: 1.0, x0: 0.0, table: None };
    let (e1, e2) = spec.prefactor_powers();
    let pre = monomial(e1, e2);
    let poly = "p0 + p1 z + p2 z^2 + p3 z^3 + p4 z^4";
    if pre.is_empty() { poly.to_string() } else { format!("{pre} ({poly})") }
}

fn chart_formula(family: EquationFamily, a: i32, b: i32) -> String {
    let s = match (family, a, b) {
        (EquationFamily::ConfluentHeun, 0, 0) => "z",
        (EquationFamily::ConfluentHeun, 1, -1) => "sqrt(z(z-1)) - asinh(sqrt(z-1))",
        (EquationFamily::ConfluentHeun, 1, 0) => "2 sqrt(z)",
        (EquationFamily::ConfluentHeun, 1, 1) => "2 asinh(sqrt(z-1))",
        (EquationFamily::ConfluentHeun, 2, -2) => "z - ln z",
        (EquationFamily::ConfluentHeun, 2, -1) => "2 sqrt(z-1) - 2 atan(sqrt(z-1))",
        (EquationFamily::ConfluentHeun, 2, 0) | (EquationFamily::Hypergeometric, 2, 0) => "ln z",
        (EquationFamily::ConfluentHeun, 2, 1) => "2 atan(sqrt(z-1))",
        (EquationFamily::ConfluentHeun, 2, 2) | (EquationFamily::Hypergeometric, 2, 2) => "2 atanh(1 - 2z)",
        (EquationFamily::Hypergeometric, 1, 1) => "2 asin(sqrt(z))",
        (EquationFamily::Hypergeometric, 2, 1) => "-2 atanh(sqrt(1-z))",
        (EquationFamily::TriConfluentHeun, _, _) => "z",
        (_, 2, _) => "ln z",
        (_, a, _) => {
            let p = 1.0 - f64::from(a) / 2.0;
            return format!("z^{p} / {p}");
        }
    };
    s.to_string()
}

/// `x(z)` as text.
pub fn map_formula(cls: &ClassInfo) -> String {
    let p = cls.exponents;
    match cls.family {
        EquationFamily::ConfluentHeun | EquationFamily::Hypergeometric => {
            let rep = crate::catalog::canonical(p);
            let f = chart_formula(cls.family, rep.m1.doubled(), rep.m2.doubled());
            if rep == p {
                format!("x = x0 + sigma [{f}]")
            } else {
                let c = crate::halfint::reflection_sign(p.m1) * crate::halfint::reflection_sign(p.m2);
                format!("x = x0 + {} sigma [{}], z -> 1 - z", -c, f)
            }
        }
        f => format!("x = x0 + sigma [{}]", chart_formula(f, p.m1.doubled(), p.m2.doubled())),
    }
}

#[derive(Serialize)]
struct ListRow {
    family: &'static str,
    m1: String,
    m2: String,
    independent: bool,
    equivalent_to: Option<String>,
    mirror: Option<String>,
    subfamilies: Vec<&'static str>,
    z_domain: String,
    map_kind: &'static str,
}

fn list_rows(families: &[EquationFamily]) -> Result<Vec<ListRow>> {
    let mut rows = vec![];
    for f in families {
        for pair in enumerate_classes(*f) {
            let c = class_info(*f, pair)?;
            rows.push(ListRow {
                family: f.slug(),
                m1: c.exponents.m1.to_string(),
                m2: c.exponents.m2.to_string(),
                independent: c.independent,
                equivalent_to: c.equivalent_to.map(|p| p.to_string()),
                mirror: c.mirror.map(|p| p.to_string()),
                subfamilies: c.subfamilies.iter().map(|s| s.slug()).collect(),
                z_domain: c.z_domain.to_string(),
                map_kind: c.map_kind.slug(),
            });
        }
    }
    Ok(rows)
}

const ALL_FAMILIES: [EquationFamily; 6] = [
    EquationFamily::Hypergeometric,
    EquationFamily::ConfluentHypergeometric,
    EquationFamily::ConfluentHeun,
    EquationFamily::DoubleConfluentHeun,
    EquationFamily::BiConfluentHeun,
    EquationFamily::TriConfluentHeun,
];

fn cmd_list(family: &Option<String>, fmt: Format, w: &mut dyn Write) -> Result<()> {
    let fams: Vec<EquationFamily> = match family {
        Some(f) => vec![f.parse()?],
        None => ALL_FAMILIES.to_vec(),
    };
    let rows = list_rows(&fams)?;
    let indep = rows.iter().filter(|r| r.independent).count();
    match fmt {
        Format::Json => {
            let v = serde_json::json!({"units": "2m/hbar^2 = 1", "count": rows.len(), "independent": indep, "classes": rows});
            writeln!(w, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        }
        Format::Csv => {
            writeln!(w, "{UNITS}")?;
            writeln!(w, "# classes: {} independent: {}", rows.len(), indep)?;
            writeln!(w, "family,m1,m2,independent,equivalent_to,mirror,subfamilies,z_domain,map_kind")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    r.family,
                    r.m1,
                    r.m2,
                    r.independent,
                    csv_field(r.equivalent_to.as_deref().unwrap_or("")),
                    csv_field(r.mirror.as_deref().unwrap_or("")),
                    r.subfamilies.join(";"),
                    csv_field(&r.z_domain),
                    r.map_kind
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_show(args: &ClassArgs, fmt: Format, w: &mut dyn Write) -> Result<()> {
    let c = args.resolve()?;
    let inverse = match c.map_kind {
        MapKind::ClosedForm => "closed form",
        MapKind::LambertW => "Lambert W",
        MapKind::NumericInverse => "numeric root-find",
    };
    let subs: Vec<&str> = c.subfamilies.iter().map(|s| s.slug()).collect();
    match fmt {
        Format::Json => {
            let v = serde_json::json!({
                "units": "2m/hbar^2 = 1",
                "class": c,
                "label": c.label(),
                "V(z)": potential_formula(&c),
                "x(z)": map_formula(&c),
                "inverse": inverse,
                "independent": c.independent,
                "equivalent_to": c.equivalent_to.map(|p| p.to_string()),
                "mirror": c.mirror.map(|p| p.to_string()),
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        }
        Format::Csv => {
            writeln!(w, "{UNITS}")?;
            writeln!(w, "class: {}", c.label())?;
            writeln!(w, "V(z): {}", potential_formula(&c))?;
            writeln!(w, "x(z): {}", map_formula(&c))?;
            writeln!(w, "z domain: {}", c.z_domain)?;
            writeln!(w, "inverse map: {inverse}")?;
            writeln!(w, "subfamilies: {}", if subs.is_empty() { "none".to_string() } else { subs.join(", ") })?;
            writeln!(w, "independent: {}", c.independent)?;
            if let Some(e) = c.equivalent_to {
                writeln!(w, "equivalent to: {e}")?;
            }
            if let Some(m) = c.mirror {
                writeln!(w, "mirror: {m}")?;
            }
        }
    }
    Ok(())
}

fn cmd_profile(pot: &PotArgs, grid: &GridArgs, fmt: Format, w: &mut dyn Write) -> Result<()> {
    let spec = pot.spec()?;
    let pts = profile(&spec, &grid.xs(&spec)?)?;
    match fmt {
        Format::Csv => write_profile_csv(w, &spec, &pts),
        Format::Json => {
            writeln!(w, "{}", serde_json::to_string_pretty(&profile_json(&spec, &pts)).expect("serializable"))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    units: &'static str,
    seed: u64,
    draws: usize,
    energies: usize,
    grid: usize,
    tol: f64,
    psi_tol: f64,
    max_identity: f64,
    max_psi: f64,
    pass: bool,
    rows: Vec<VerificationRow>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    classes: Vec<ClassInfo>,
    draws: usize,
    energies: usize,
    seed: u64,
    (tol, psi_tol): (f64, f64),
    grid: usize,
    fmt: Format,
    w: &mut dyn Write,
) -> Result<bool> {
    let mut rows = vec![];
    for c in &classes {
        rows.extend(verify_class(c, draws, energies, seed, grid)?);
    }
    let max_identity = rows.iter().map(|r| r.residual_identity).fold(0.0, f64::max);
    let max_psi = rows.iter().map(|r| r.residual_psi).fold(0.0, f64::max);
    let all_finite = rows.iter().all(|r| r.residual_identity.is_finite() && r.residual_psi.is_finite());
    let pass = all_finite && !rows.is_empty() && max_identity <= tol && max_psi <= psi_tol;
    match fmt {
        Format::Json => {
            let rep = VerifyReport { units: "2m/hbar^2 = 1", seed, draws, energies, grid, tol, psi_tol, max_identity, max_psi, pass, rows };
            writeln!(w, "{}", serde_json::to_string_pretty(&rep).expect("serializable"))?;
        }
        Format::Csv => {
            writeln!(w, "{UNITS}")?;
            writeln!(w, "# seed: {seed} draws: {draws} energies: {energies} grid: {grid} tol: {} psi_tol: {}", fmt15(tol), fmt15(psi_tol))?;
            writeln!(w, "class,p0,p1,p2,p3,p4,E,branch,residual_identity,residual_psi")?;
            for r in &rows {
                let v: Vec<String> = r.v.iter().map(|c| fmt15(*c)).collect();
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    csv_field(&r.class),
                    v.join(","),
                    fmt15(r.energy),
                    r.branch,
                    fmt15(r.residual_identity),
                    fmt15(r.residual_psi)
                )?;
            }
            writeln!(
                w,
                "# max_identity: {} max_psi: {} status: {}",
                fmt15(max_identity),
                fmt15(max_psi),
                if pass { "PASS" } else { "FAIL" }
            )?;
        }
    }
    Ok(pass)
}

#[derive(Serialize)]
struct SpectrumReport {
    units: &'static str,
    class: String,
    specialization: Option<&'static str>,
    energies: Vec<f64>,
    node_counts: Vec<usize>,
    oracle_energies: Option<Vec<f64>>,
    max_rel_err: Option<f64>,
    domain: Option<(f64, f64)>,
    grid_n: Option<usize>,
    method_tol: f64,
}

fn cmd_spectrum(
    pot: &PotArgs,
    window: (Option<f64>, Option<f64>),
    nmax: usize,
    special: Option<Specialize>,
    fmt: Format,
    w: &mut dyn Write,
) -> Result<()> {
    let spec = pot.spec()?;
    let rep = match special {
        Some(s) => {
            let k = classical_from_table(&spec.class, s.slug(), &pot.table(), pot.sigma)?;
            let r = cross_validate(&spec.class, &k, nmax)?;
            SpectrumReport {
                units: "2m/hbar^2 = 1",
                class: r.class,
                specialization: Some(s.slug()),
                energies: r.energies,
                node_counts: r.node_counts,
                oracle_energies: Some(r.oracle_energies),
                max_rel_err: Some(r.max_rel_err),
                domain: None,
                grid_n: None,
                method_tol: r.method_tol,
            }
        }
        None => {
            let (Some(lo), Some(hi)) = window else {
                return Err(Error::Parse("--e-min and --e-max are required without --specialize".into()));
            };
            if !(lo < hi) {
                return Err(Error::Parse(format!("empty energy window [{lo}, {hi}]")));
            }
            let s = numerov_bound_states(&spec, (lo, hi), nmax)?;
            SpectrumReport {
                units: "2m/hbar^2 = 1",
                class: spec.class.label(),
                specialization: None,
                energies: s.energies,
                node_counts: s.node_counts,
                oracle_energies: None,
                max_rel_err: None,
                domain: Some(s.domain),
                grid_n: Some(s.grid_n),
                method_tol: s.method_tol,
            }
        }
    };
    match fmt {
        Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&rep).expect("serializable"))?,
        Format::Csv => {
            writeln!(w, "{UNITS}")?;
            writeln!(w, "# class: {}", rep.class)?;
            writeln!(w, "# specialization: {}", rep.specialization.unwrap_or("none"))?;
            if let Some(e) = rep.max_rel_err {
                writeln!(w, "# max_rel_err: {}", fmt15(e))?;
            }
            writeln!(w, "# method_tol: {}", fmt15(rep.method_tol))?;
            writeln!(w, "n,E,E_oracle")?;
            for (i, e) in rep.energies.iter().enumerate() {
                let o = rep.oracle_energies.as_ref().and_then(|o| o.get(i)).map(|v| fmt15(*v)).unwrap_or_default();
                writeln!(w, "{},{},{}", rep.node_counts[i], fmt15(*e), o)?;
            }
        }
    }
    Ok(())
}

fn cmd_psi(pot: &PotArgs, energy: f64, branch: &Option<String>, grid: &GridArgs, fmt: Format, w: &mut dyn Write) -> Result<()> {
    let spec = pot.spec()?;
    let sols = solve_ansatz(&spec, energy)?;
    let sol = match branch {
        Some(b) => sols
            .iter()
            .find(|s| s.branch.to_string() == *b)
            .ok_or_else(|| Error::Parse(format!("no branch '{b}'; available: {}", sols.iter().map(|s| s.branch.to_string()).collect::<Vec<_>>().join(" "))))?,
        None => sols.first().ok_or_else(|| Error::Solver("no ansatz branch".into()))?,
    };
    let xs = if grid.x_min.is_some() || grid.x_max.is_some() { grid.xs(&spec)? } else { default_x_grid(&spec, grid.grid)? };
    let mut rows = vec![];
    for &x in &xs {
        let (p, dp) = psi_with_derivative(&spec, sol, x)?;
        rows.push((x, p, dp));
    }
    match fmt {
        Format::Json => {
            let v = serde_json::json!({
                "units": "2m/hbar^2 = 1",
                "spec": spec_echo(&spec),
                "E": energy,
                "branch": sol.branch.to_string(),
                "heun": sol.heun,
                "points": rows.iter().map(|(x, p, d)| serde_json::json!({"x": x, "psi": p, "dpsi": d})).collect::<Vec<_>>(),
            });
            writeln!(w, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
        }
        Format::Csv => {
            let h = &sol.heun;
            writeln!(w, "{UNITS}")?;
            writeln!(w, "# class: {}", spec.class.label())?;
            writeln!(w, "# E: {} branch: {}", fmt15(energy), sol.branch)?;
            writeln!(
                w,
                "# heun: gamma={} delta={} epsilon={} alpha={} q={}",
                fmt15(h.gamma),
                fmt15(h.delta),
                fmt15(h.epsilon),
                fmt15(h.alpha),
                fmt15(h.q)
            )?;
            writeln!(w, "x,psi,dpsi")?;
            for (x, p, d) in rows {
                writeln!(w, "{},{},{}", fmt15(x), fmt15(p), fmt15(d))?;
            }
        }
    }
    Ok(())
}

fn with_output<F>(out: &OutArgs, f: F) -> Result<bool>
where
    F: FnOnce(&mut dyn Write) -> Result<bool>,
{
    match &out.out {
        Some(path) => {
            let mut buf = Vec::new();
            let ok = f(&mut buf)?;
            std::fs::write(path, buf)?;
            Ok(ok)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let ok = f(&mut lock)?;
            lock.flush()?;
            Ok(ok)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::List { family, out } => with_output(out, |w| cmd_list(family, out.format, w).map(|_| true)),
        Command::Show { class, out } => with_output(out, |w| cmd_show(class, out.format, w).map(|_| true)),
        Command::Profile { pot, grid, out } => with_output(out, |w| cmd_profile(pot, grid, out.format, w).map(|_| true)),
        Command::Verify { all, family, m1, m2, draws, energies, seed, tol, psi_tol, grid, out } => {
            let classes = match (all, family) {
                (false, Some(f)) => {
                    let args = ClassArgs {
                        family: f.clone(),
                        m1: m1.clone().unwrap_or_else(|| "0".into()),
                        m2: m2.clone().unwrap_or_else(|| "0".into()),
                    };
                    vec![args.resolve()?]
                }
                _ => all_heun_representatives(),
            };
            with_output(out, |w| cmd_verify(classes, *draws, *energies, *seed, (*tol, *psi_tol), *grid, out.format, w))
        }
        Command::Spectrum { pot, e_min, e_max, nmax, specialize, out } => {
            with_output(out, |w| cmd_spectrum(pot, (*e_min, *e_max), *nmax, *specialize, out.format, w).map(|_| true))
        }
        Command::Psi { pot, energy, branch, grid, out } => {
            with_output(out, |w| cmd_psi(pot, *energy, branch, grid, out.format, w).map(|_| true))
        }
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: verification gate failed");
            EXIT_GATE
        }
        Err(Error::Io(m)) if m.contains("Broken pipe") => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture(args: &[&str]) -> (i32, String) {
        let dir = std::env::temp_dir().join(format!("heunpot-cli-{}-{}", std::process::id(), args.join("_").len()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{}.out", args.iter().map(|a| a.replace('/', "s")).collect::<String>()));
        let mut argv: Vec<String> = vec!["heunpot".into()];
        argv.extend(args.iter().map(|s| s.to_string()));
        argv.push("--out".into());
        argv.push(path.display().to_string());
        let code = run(argv);
        let text = std::fs::read_to_string(&path).unwrap_or_default();
        (code, text)
    }

    #[test]
    fn list_confluent_heun() {
        let (code, text) = capture(&["list", "--family", "confluent-heun"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("family")).collect();
        assert_eq!(rows.len(), 15);
        assert_eq!(rows.iter().filter(|l| l.split(',').nth(3) == Some("true")).count(), 9);
        assert!(text.starts_with("# units: 2m/hbar^2 = 1"));
    }

    #[test]
    fn show_lambert() {
        let (code, text) = capture(&["show", "--family", "confluent-heun", "--m1", "1", "--m2", "-1"]);
        assert_eq!(code, 0);
        assert!(text.contains("Lambert W"), "{text}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["heunpot", "show", "--family", "confluent-heun", "--m1", "3", "--m2", "0"]), EXIT_CLASS);
        assert_eq!(run(["heunpot", "show", "--family", "nope"]), EXIT_CLASS);
        assert_eq!(run(["heunpot", "profile", "--family", "confluent-heun", "--m1", "1", "--sigma", "x"]), EXIT_USAGE);
        let (code, _) = capture(&["profile", "--family", "confluent-heun", "--m1", "1", "--m2", "-1", "--x-min", "-5", "--x-max", "-4"]);
        assert_eq!(code, EXIT_DOMAIN);
        let (code, _) = capture(&["spectrum", "--family", "confluent-heun", "--m1", "1", "--specialize", "kratzer"]);
        assert_eq!(code, EXIT_SPECTRUM);
    }

    #[test]
    fn half_integer_flags() {
        let (a, x) = capture(&["show", "--family", "che", "--m1", "1/2", "--m2", "0.5"]);
        let (b, y) = capture(&["show", "--family", "che", "--m1", "0.5", "--m2", "1/2"]);
        assert_eq!((a, b), (0, 0));
        assert_eq!(x, y);
    }

    #[test]
    fn spectrum_poschl_teller() {
        let (code, text) = capture(&[
            "spectrum", "--family", "che", "--m1", "1/2", "--m2", "1/2", "--v3", "-6", "--sigma", "0.5", "--specialize", "poschl-teller",
            "--format", "json",
        ]);
        assert_eq!(code, 0, "{text}");
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["oracle_energies"], serde_json::json!([-4.0, -1.0]));
        assert!(v["max_rel_err"].as_f64().unwrap() < 1e-6);
    }

    #[test]
    fn byte_stable_profile_and_psi() {
        let args = ["profile", "--family", "che", "--m1", "1", "--m2", "0", "--v1", "-2", "--v2", "0.5", "--grid", "50"];
        assert_eq!(capture(&args), capture(&args));
        let psi = ["psi", "--family", "che", "--m1", "1", "--m2", "0", "--v1", "-2", "--v2", "0.5", "--energy", "-0.3", "--grid", "20"];
        let (code, text) = capture(&psi);
        assert_eq!(code, 0, "{text}");
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 21);
    }

    #[test]
    fn verify_single_class() {
        let (code, text) = capture(&["verify", "--family", "che", "--m1", "1", "--m2", "-1", "--draws", "1", "--energies", "1"]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("status: PASS"));
    }
}
