//! Closed-form zero-count bounds and the size thresholds of the density argument.

use crate::error::{Error, Result};
use crate::semigroup::AxiomAFit;

fn check_b(fit: &AxiomAFit, b: f64) -> Result<()> {
    if !(b > fit.theta && b < 1.0) {
        return Err(Error::InvalidInput(format!("b = {b} outside ({}, 1)", fit.theta)));
    }
    Ok(())
}

/// `N(b, T) <= (1/(b-th)) { T log T / 2 + (2 log(A+k) + log(1/(b-th)) + 3) T }`, for `T >= 5`.
pub fn littlewood_bound(fit: &AxiomAFit, b: f64, t: f64) -> Result<f64> {
    check_b(fit, b)?;
    if !(t >= 5.0) {
        return Err(Error::InvalidInput(format!("T = {t} below 5")));
    }
    let d = b - fit.theta;
    Ok((0.5 * t * t.ln() + (2.0 * fit.a_plus_kappa().ln() + (1.0 / d).ln() + 3.0) * t) / d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeBound {
    /// Zeros with `R <= |gamma| <= T`.
    pub range: f64,
    /// Zeros with `T-1 <= gamma <= T+1`.
    pub window: f64,
}

/// Zero counts in height ranges. Requires `T > R >= 5`; the window form needs `T >= 6`.
pub fn range_bound(fit: &AxiomAFit, b: f64, r: f64, t: f64) -> Result<RangeBound> {
    check_b(fit, b)?;
    if !(t > r && r >= 5.0) {
        return Err(Error::InvalidInput(format!("need T > R >= 5, got R = {r}, T = {t}")));
    }
    let d = b - fit.theta;
    let ak2 = fit.a_plus_kappa().powi(2);
    let range = (4.0 / (3.0 * std::f64::consts::PI) * (t - r) * (11.4 * ak2 / d * t).ln()
        + 16.0 / 3.0 * (60.0 * ak2 / d * t).ln())
        / d;
    let window = if t >= 6.0 { (6.2 * t.ln() + 6.2 * (ak2 / d).ln() + 24.0) / d } else { f64::NAN };
    Ok(RangeBound { range, window })
}

/// `1000 (A+k)^4 / ((1-th)^3 (1-s)^4) T^{12(1-s)/(1-th)} log^5 T`, for `s > (1+th)/2`.
pub fn density_rhs(fit: &AxiomAFit, sigma: f64, t: f64) -> Result<f64> {
    let th = fit.theta;
    if !(sigma > 0.5 * (1.0 + th) && sigma < 1.0) {
        return Err(Error::InvalidInput(format!("sigma = {sigma} outside ({}, 1)", 0.5 * (1.0 + th))));
    }
    if !(t > 1.0) {
        return Err(Error::InvalidInput(format!("T = {t} must exceed 1")));
    }
    Ok(density_expression(fit, sigma, t))
}

/// The density right-hand side evaluated without its hypothesis on `sigma`.
pub fn density_expression(fit: &AxiomAFit, sigma: f64, t: f64) -> f64 {
    let th = fit.theta;
    let eta = 1.0 - sigma;
    1000.0 * fit.a_plus_kappa().powi(4) / ((1.0 - th).powi(3) * eta.powi(4))
        * t.powf(12.0 * eta / (1.0 - th))
        * t.ln().powi(5)
}

/// `T1 ... T6` and `T0 = max(T1, T3, T4, T5, T6)`, held as natural logarithms since `T5`
/// overflows `f64` for small `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub eta: f64,
    pub ln_t1: f64,
    pub ln_t3: f64,
    pub ln_t4: f64,
    pub ln_t5: f64,
    pub ln_t6: f64,
    pub ln_t0: f64,
    /// `eta > (1-theta)/12`: the density bound already follows from the Littlewood bound.
    pub trivial_via_littlewood: bool,
}

impl ThresholdSet {
    pub fn log2(ln: f64) -> f64 {
        ln / std::f64::consts::LN_2
    }

    /// `(name, ln T_i)` in order `T1, T3, T4, T5, T6, T0`.
    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("T1", self.ln_t1),
            ("T3", self.ln_t3),
            ("T4", self.ln_t4),
            ("T5", self.ln_t5),
            ("T6", self.ln_t6),
            ("T0", self.ln_t0),
        ]
    }

    pub fn below(&self, t: f64) -> bool {
        t.ln() < self.ln_t0
    }
}

/// Thresholds with `delta = 1.5 eta`.
pub fn compute_thresholds(fit: &AxiomAFit, eta: f64) -> Result<ThresholdSet> {
    let th = fit.theta;
    if !(eta > 0.0 && eta < 1.0 - th) {
        return Err(Error::InvalidInput(format!("eta = {eta} outside (0, {})", 1.0 - th)));
    }
    let ak = fit.a_plus_kappa().max(1.0);
    let delta = 1.5 * eta;
    let ln_t1 = (200.0 * ak * ak).ln();
    let ln_t3 = 1.0 / delta;
    let ln_t4 = 40.0 * (1.0 - th) / eta * ak.ln();
    let ln_t5 = 25.0 * (1.0 - th) / eta * (1.0 / eta).ln();
    let ln_t6 = -100.0 * (1.0 - th).ln();
    let ln_t0 = [ln_t1, ln_t3, ln_t4, ln_t5, ln_t6].into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(ThresholdSet { eta, ln_t1, ln_t3, ln_t4, ln_t5, ln_t6, ln_t0, trivial_via_littlewood: eta > (1.0 - th) / 12.0 })
}

/// `ln T2 = max(ln log X / 97, (1/3) ln(30 (A+k)^2 (1-th)/((1-xi)(xi-th)(s-th))) + eta ln X / 3)`.
pub fn threshold_t2_ln(fit: &AxiomAFit, sigma: f64, xi: f64, x: f64) -> Result<f64> {
    let th = fit.theta;
    if !(th < xi && xi < sigma && sigma < 1.0 && x > 1.0) {
        return Err(Error::InvalidInput(format!(
            "need theta < xi < sigma < 1 and X > 1, got xi={xi} sigma={sigma} X={x}"
        )));
    }
    let eta = 1.0 - sigma;
    let ak2 = fit.a_plus_kappa().powi(2);
    let c = 30.0 * ak2 * (1.0 - th) / ((1.0 - xi) * (xi - th) * (sigma - th));
    Ok((x.ln().ln() / 97.0).max(c.ln() / 3.0 + eta * x.ln() / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBound {
    /// `90 (A+k)^4/((1-th)^2 eta^4) L^3 T^{12 eta/(1-th)}`.
    pub k: f64,
    /// `(10.5/(1-th)) (K+1) L^2`.
    pub n: f64,
}

pub fn k_bound(fit: &AxiomAFit, eta: f64, t: f64) -> Result<KBound> {
    let th = fit.theta;
    if !(eta > 0.0 && eta < 1.0 - th && t > 1.0) {
        return Err(Error::InvalidInput(format!("eta = {eta}, T = {t} out of range")));
    }
    let l = t.ln();
    let k = 90.0 * fit.a_plus_kappa().powi(4) / ((1.0 - th).powi(2) * eta.powi(4))
        * l.powi(3)
        * t.powf(12.0 * eta / (1.0 - th));
    Ok(KBound { k, n: 10.5 / (1.0 - th) * (k + 1.0) * l * l })
}
