//! Zero counting, location and detection for the continued zeta function.

mod bounds;
pub mod contour;
mod detect;
mod search;

pub use bounds::{
    compute_thresholds, density_expression, density_rhs, k_bound, littlewood_bound, range_bound, threshold_t2_ln,
    KBound, RangeBound, ThresholdSet,
};
pub use contour::{circle_winding, zero_count, Rectangle};
pub use detect::{
    base_integral_i, base_integral_on_line, detector_i, detector_i_termwise, halasz_probe, select_separated,
    select_separated_from, weight_w, DetectionMode, DetectionParams, DetectorValue, ProbeReport, ProbeRow, Quadrature,
    SeparatedZeroSet, WeightLine,
};
pub use search::{count_n, find_zeros, winding_count, Zero, ZeroFinder, ZeroSet};
