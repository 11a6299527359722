use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent pair {pair} is not a valid {family} class")]
    InvalidClass { family: String, pair: String },

    #[error("z = {z} lies outside the domain {domain} of class {class}")]
    ZDomain { class: String, z: f64, domain: String },

    #[error("x = {x} lies outside the image of class {class} ({detail})")]
    XDomain { class: String, x: f64, detail: String },

    #[error("root not bracketed on [{lo}, {hi}] while inverting class {class}")]
    NoBracket { class: String, lo: f64, hi: f64 },

    #[error("Lambert W argument {y} is below the branch point -1/e")]
    BranchPoint { y: f64 },

    #[error("Lambert W_-1 requires a negative argument, got {y}")]
    LambertBranch { y: f64 },

    #[error("z = {z} is a singular point of the {family} equation")]
    SingularPoint { family: String, z: f64 },

    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    #[error("class {class} has no mirror partner")]
    NoMirror { class: String },

    #[error("operation requires class {expected}, got {got}")]
    WrongClass { expected: String, got: String },

    #[error("r(z) = {value} <= 0 at z = {z}")]
    NonPositiveR { z: f64, value: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("ansatz exponent quadratic has negative discriminant {disc} ({which}); exponents are complex")]
    ComplexExponents { which: String, disc: f64 },

    #[error("inconsistent coefficient system: {0}")]
    Inconsistent(String),

    #[error("specialization {spec} is not available in class {class}")]
    Specialization { spec: String, class: String },

    #[error("no bound states for these parameters: {0}")]
    NoBoundStates(String),

    #[error("spectrum solver failed: {0}")]
    Solver(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
