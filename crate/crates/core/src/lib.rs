#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` rejects NaN along with the bound
pub mod cli;
pub mod error;
pub mod fmt;
pub mod pnt;
pub mod semigroup;
pub mod zeros;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
