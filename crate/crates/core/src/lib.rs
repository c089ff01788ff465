//! Coefficients and heights of cyclotomic polynomials `Φ_n` and of ternary
//! inclusion-exclusion polynomials `Q_{p,q,r}`, plus explicit constructions of
//! prime triples with prescribed heights.
//!
//! The [`series`] kernels do the arithmetic, [`cyclo`] assembles the
//! polynomials, [`oracle`] is an independent slow reference, and
//! [`constructions`] / [`sparse`] build witness triples and sparse prime sets.

pub mod arith;
pub mod config;
pub mod constructions;
pub mod cyclo;
pub mod error;
pub mod oracle;
pub mod primes;
pub mod series;
pub mod sparse;

pub use config::Budget;
pub use cyclo::{HeightRecord, Method, Subject, TernaryTriple};
pub use error::{Error, Result};
pub use series::CoeffSeries;
