use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prime system spec: {0}")]
    InvalidSpec(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration exceeded entry cap after {reached} entries")]
    Overflow { reached: usize },

    #[error("argument {x} outside table range (norm cap {cap})")]
    OutOfRange { x: f64, cap: f64 },

    #[error("table too small: cutoff {required:.6e} needed, best achievable radius {achievable_radius:.3e}")]
    InsufficientTable { required: f64, achievable_radius: f64 },

    #[error("evaluation point {re}+{im}i is within {limit} of the pole at s=1")]
    PoleProximity { re: f64, im: f64, limit: f64 },

    #[error("point {re}+{im}i lies on or left of the continuation abscissa theta={theta}")]
    OutsideStrip { re: f64, im: f64, theta: f64 },

    #[error("zeta nearly vanishes on the contour at {re}+{im}i (|zeta|={modulus:.3e})")]
    ZeroNearContour { re: f64, im: f64, modulus: f64 },

    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),

    #[error("quadrature budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("eta table does not cover y={y:.6e}")]
    Extrapolation { y: f64 },

    #[error("inconsistent result: {0}")]
    Inconsistent(String),

    #[error("cache format error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
