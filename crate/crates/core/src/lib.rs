pub mod catalog;
pub mod cli;
pub mod coordmap;
pub mod error;
pub mod halfint;
pub mod heunfn;
pub mod hyper;
pub mod lambert;
pub mod ode;
pub mod poly;
pub mod potentials;
pub mod reduction;
pub mod spectra;

pub use catalog::{ClassInfo, EquationFamily, ExponentPair, MapKind, Subfamily, ZDomain};
pub use error::{Error, Result};
pub use halfint::HalfInt;
