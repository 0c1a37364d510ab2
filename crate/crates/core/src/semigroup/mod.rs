//! Beurling prime systems, their generalized integers and the arithmetic attached to them.

pub mod cache;
mod fit;
mod system;
mod table;

pub use fit::{fit_axiom_a, AxiomAFit, KappaMode};
pub use system::{parse_system_spec, sieve, PrimeSystem, SystemSpec};
pub use table::{enumerate_integers, Factorization, IntegerEntry, IntegerTable};
