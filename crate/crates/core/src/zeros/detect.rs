//! Zero-detecting integrals and the separated-family probe.
//!
//! All line integrals are `(1/2 pi i) int_{Re s = c} f(s) ds = (1/2 pi) int f(c + it) dt`, computed
//! by composite midpoint rules on `[-T, T]` with step halving. Reported radii add three parts: the
//! analytic Gaussian tail beyond `T`, the last halving difference, and a rounding estimate of
//! `16 eps int |f|`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::semigroup::{AxiomAFit, IntegerTable};
use crate::zeta::{big_m, BoundedValue, ZetaEngine};

use super::bounds::{compute_thresholds, threshold_t2_ln};
use super::search::ZeroSet;

const MAX_NODES: usize = 1 << 22;

/// Breakdown of a line-integral radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub truncation: f64,
    pub discretization: f64,
    pub rounding: f64,
    /// Extra radius from the integrand's own evaluation error.
    pub integrand: f64,
    pub t_max: f64,
    pub nodes: usize,
}

impl Quadrature {
    pub fn radius(&self) -> f64 {
        self.truncation + self.discretization + self.rounding + self.integrand
    }

    pub fn bounded(&self) -> BoundedValue {
        BoundedValue::new(self.value, self.radius())
    }
}

/// `(G/pi) e^{c^2/L + h c} (L/(2T^2)) e^{-T^2/L}`: both tails of `G |e^{s^2/L + h s}/s|` past `|t| = T`.
fn gaussian_tail(g: f64, c: f64, h: f64, l: f64, t: f64) -> f64 {
    g / PI * (c * c / l + h * c - t * t / l).exp() * l / (2.0 * t * t)
}

/// Cut-off height: at least where `e^{(c^2 - t^2)/L} < tol`, plus 2, and far enough that the tail
/// bound drops below `tol/4`.
fn truncation_height(g: f64, c: f64, h: f64, l: f64, tol: f64) -> f64 {
    let mut t = (c * c + l * (1.0 / tol).ln()).max(0.0).sqrt() + 2.0;
    while gaussian_tail(g, c, h, l, t) > 0.25 * tol {
        t += 1.0;
    }
    t
}

/// Midpoint-rule line integral of `kernel(s) = f(s) e^{s^2/L + h s}/s` on `Re s = c`.
///
/// `f` returns the value and its own error radius. `g` bounds `|f|` on the line.
fn line_integral<F>(c: f64, h: f64, l: f64, g: f64, tol: f64, f: F) -> Result<Quadrature>
where
    F: Fn(Complex64) -> (Complex64, f64),
{
    if !(l > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("need L > 0 and tol > 0, got L = {l}, tol = {tol}")));
    }
    if c == 0.0 {
        return Err(Error::InvalidInput("integration line through the kernel pole".into()));
    }
    let t_max = truncation_height(g, c, h, l, tol);
    let rule = |n: usize| {
        let step = 2.0 * t_max / n as f64;
        let (mut acc, mut abs, mut rad) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for j in 0..n {
            let s = Complex64::new(c, -t_max + (j as f64 + 0.5) * step);
            let kernel = (s * s / l + h * s).exp() / s;
            let (v, r) = f(s);
            let term = v * kernel;
            acc += term;
            abs += term.norm();
            rad += r * kernel.norm();
        }
        let w = step / (2.0 * PI);
        (acc * w, abs * w, rad * w)
    };
    let mut n = 64;
    let (mut prev, _, _) = rule(n);
    loop {
        n *= 2;
        let (cur, abs, rad) = rule(n);
        let diff = (cur - prev).norm();
        let rounding = 16.0 * f64::EPSILON * (abs + n as f64 * cur.norm() * f64::EPSILON);
        if diff < (0.5 * tol).max(4.0 * rounding) {
            return Ok(Quadrature {
                value: cur,
                truncation: gaussian_tail(g, c, h, l, t_max),
                discretization: diff,
                rounding,
                integrand: rad,
                t_max,
                nodes: n,
            });
        }
        if n >= MAX_NODES {
            return Err(Error::BudgetExceeded(format!("line integral needs more than {MAX_NODES} nodes at tol {tol}")));
        }
        prev = cur;
    }
}

/// `(1/2 pi i) int_{Re s = c} e^{s^2/L + lambda s}/s ds`. Equals `I` for `c > 0` and `I - 1` for `c < 0`.
pub fn base_integral_on_line(l: f64, lambda: f64, c: f64, tol: f64) -> Result<Quadrature> {
    line_integral(c, lambda, l, 1.0, tol, |_| (Complex64::new(1.0, 0.0), 0.0))
}

/// `I(L, lambda)` on `Re s = 3`.
pub fn base_integral_i(l: f64, lambda: f64, tol: f64) -> Result<BoundedValue> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} must exceed 1")));
    }
    Ok(base_integral_on_line(l, lambda, 3.0, tol)?.bounded())
}

/// Engine accurate to `tol/10` everywhere on `Re s = c + beta`, `|Im s| <= reach`, or the best the
/// table has.
fn engine_for_line<'a>(
    table: &'a IntegerTable,
    fit: &AxiomAFit,
    sigma: f64,
    reach: f64,
    tol: f64,
) -> Result<ZetaEngine<'a>> {
    let d = sigma - fit.theta;
    let s_abs = sigma.hypot(reach);
    let y = (0.1 * tol * d / (fit.a * (s_abs + d))).powf(-1.0 / d).max(2.0);
    if y * 2.0 <= table.norm_cap() {
        let y = table.entries().get(table.count_lt(y)).map_or(table.norm_cap(), |e| e.norm);
        ZetaEngine::with_cutoff(table, *fit, y)
    } else {
        ZetaEngine::best(table, *fit)
    }
}

/// Line for the weight integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightLine {
    /// `Re s = 3`.
    Standard,
    /// `Re s = max(3, -hL/2)`, where the kernel is smallest for `h <= -2`.
    Shifted,
}

/// `w(rho, h) = (1/2 pi i) int zeta(s + rho)/s e^{s^2/L + h s} ds`.
pub fn weight_w(
    table: &IntegerTable,
    fit: &AxiomAFit,
    rho: Complex64,
    h: f64,
    l: f64,
    tol: f64,
    line: WeightLine,
) -> Result<Quadrature> {
    if !(rho.re > fit.theta) {
        return Err(Error::OutsideStrip { re: rho.re, im: rho.im, theta: fit.theta });
    }
    let c = match line {
        WeightLine::Standard => 3.0,
        WeightLine::Shifted => 3f64.max(-0.5 * h * l),
    };
    let sigma = c + rho.re;
    let g = fit.a_plus_kappa() * sigma / (sigma - 1.0);
    let reach = truncation_height(g, c, h, l, tol) + rho.im.abs();
    let engine = engine_for_line(table, fit, sigma, reach, tol)?;
    line_integral(c, h, l, g, tol, |s| {
        let z = s + rho;
        (engine.value(z), engine.radius(z))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionMode {
    /// `X = e^2 Y` with `L` and `Y` chosen freely.
    Detector,
    /// `X = T^{3.5/(1-theta)}` and `Y = X/e^2`.
    Theorem,
}

/// Parameters of the zero-detecting sum. `delta = 1.5 eta`, `xi = sigma - delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams {
    pub sigma: f64,
    pub eta: f64,
    pub xi: f64,
    pub delta: f64,
    pub x: f64,
    pub y: f64,
    pub lambda: f64,
    pub t: f64,
    pub l: f64,
    /// `(A+k)(1-th)/((1-xi)(xi-th))`.
    pub d: f64,
    pub mode: DetectionMode,
}

impl DetectionParams {
    fn build(fit: &AxiomAFit, sigma: f64, l: f64, y: f64, x: f64, mode: DetectionMode) -> Result<Self> {
        let th = fit.theta;
        if !(sigma > th && sigma < 1.0) {
            return Err(Error::InvalidInput(format!("sigma = {sigma} outside ({th}, 1)")));
        }
        let eta = 1.0 - sigma;
        let delta = 1.5 * eta;
        let xi = sigma - delta;
        if !(xi > 0.5 * (1.0 + th)) {
            return Err(Error::InvalidInput(format!("xi = {xi} must exceed (1+theta)/2 = {}", 0.5 * (1.0 + th))));
        }
        if !(l > 0.0 && y > 1.0) {
            return Err(Error::InvalidInput(format!("need L > 0 and Y > 1, got L = {l}, Y = {y}")));
        }
        let d = fit.a_plus_kappa() * (1.0 - th) / ((1.0 - xi) * (xi - th));
        Ok(Self { sigma, eta, xi, delta, x, y, lambda: y.ln(), t: l.exp(), l, d, mode })
    }

    pub fn detector(fit: &AxiomAFit, sigma: f64, l: f64, y: f64) -> Result<Self> {
        Self::build(fit, sigma, l, y, E * E * y, DetectionMode::Detector)
    }

    pub fn theorem(fit: &AxiomAFit, sigma: f64, t: f64) -> Result<Self> {
        if !(t > 1.0) {
            return Err(Error::InvalidInput(format!("T = {t} must exceed 1")));
        }
        let l = t.ln();
        let x = (3.5 / (1.0 - fit.theta) * l).exp();
        Self::build(fit, sigma, l, x / (E * E), x, DetectionMode::Theorem)
    }

    /// Whether `T` clears every threshold the detection estimates need.
    pub fn thresholds_met(&self, fit: &AxiomAFit) -> bool {
        let Ok(ts) = compute_thresholds(fit, self.eta) else { return false };
        let Ok(ln_t2) = threshold_t2_ln(fit, self.sigma, self.xi, self.x) else { return false };
        self.l >= ts.ln_t0.max(ln_t2)
    }

    /// Whether `rho` is in the family the argument ranges over: `beta >= sigma`, `10L <= gamma <= T`.
    pub fn admissible(&self, rho: Complex64) -> bool {
        rho.re >= self.sigma && rho.im >= 10.0 * self.l && rho.im <= self.t
    }
}

/// `(ln |g|, mu(g))` for squarefree `g` with `|g| <= X`.
fn mobius_terms(table: &IntegerTable, x: f64) -> Result<Vec<(f64, f64)>> {
    if x > table.norm_cap() {
        return Err(Error::InsufficientTable { required: x, achievable_radius: f64::INFINITY });
    }
    let n = table.counting(x)?;
    Ok(table.entries()[..n]
        .iter()
        .zip(table.ln_norms())
        .filter(|(e, _)| e.mu != 0)
        .map(|(e, &l)| (l, f64::from(e.mu)))
        .collect())
}

fn mobius_sum(terms: &[(f64, f64)], z: Complex64) -> Complex64 {
    terms.iter().map(|&(l, m)| m * (-z * l).exp()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorValue {
    pub value: BoundedValue,
    /// Bound on the omitted terms `|g| > X`: `2 e^2 (A+k)^2 / T`.
    pub tail_bound: f64,
    /// Thresholds met and `rho` admissible; only then is `|value - 1| <= 0.2` claimed.
    pub preconditions_met: bool,
}

/// `I(rho, X) = sum_{|g| <= X} mu(g) |g|^{-rho} w(rho, lambda - log|g|)`, computed as one line
/// integral of `zeta(s+rho) M_X(s+rho)/s e^{s^2/L + lambda s}` with `M_X(z) = sum mu(g)|g|^{-z}`.
pub fn detector_i(
    table: &IntegerTable,
    fit: &AxiomAFit,
    rho: Complex64,
    params: &DetectionParams,
    tol: f64,
) -> Result<DetectorValue> {
    if !(rho.re > fit.theta) {
        return Err(Error::OutsideStrip { re: rho.re, im: rho.im, theta: fit.theta });
    }
    let terms = mobius_terms(table, params.x)?;
    let c = 3.0;
    let sigma = c + rho.re;
    let mx_bound: f64 = terms.iter().map(|&(l, _)| (-sigma * l).exp()).sum();
    let g = fit.a_plus_kappa() * sigma / (sigma - 1.0) * mx_bound;
    let reach = truncation_height(g, c, params.lambda, params.l, tol) + rho.im.abs();
    let engine = engine_for_line(table, fit, sigma, reach, tol)?;
    let q = line_integral(c, params.lambda, params.l, g, tol, |s| {
        let z = s + rho;
        let m = mobius_sum(&terms, z);
        (engine.value(z) * m, engine.radius(z) * m.norm())
    })?;
    Ok(DetectorValue {
        value: q.bounded(),
        tail_bound: 2.0 * E * E * fit.a_plus_kappa().powi(2) / params.t,
        preconditions_met: params.thresholds_met(fit) && params.admissible(rho),
    })
}

/// The same sum evaluated term by term from separate weight integrals.
pub fn detector_i_termwise(
    table: &IntegerTable,
    fit: &AxiomAFit,
    rho: Complex64,
    params: &DetectionParams,
    tol: f64,
) -> Result<BoundedValue> {
    let terms = mobius_terms(table, params.x)?;
    let (mut acc, mut rad) = (Complex64::new(0.0, 0.0), 0.0);
    for &(l, m) in &terms {
        let coef = m * (-rho * l).exp();
        let w = weight_w(table, fit, rho, params.lambda - l, params.l, tol, WeightLine::Standard)?;
        acc += coef * w.value;
        rad += coef.norm() * w.radius();
    }
    Ok(BoundedValue::new(acc, rad))
}

/// Zeros with `gamma` gaps of at least `10L`, plus the per-member probe data once filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedZeroSet {
    pub members: Vec<Complex64>,
    pub l: f64,
    pub t: f64,
    pub tau: Vec<Option<f64>>,
    pub alpha: Vec<Option<Complex64>>,
    /// Separation floor of `gamma_k + tau_k`: `6L`.
    pub q: f64,
    /// Built by hand rather than by selection; the separation invariants are not promised.
    pub diagnostic: bool,
}

impl SeparatedZeroSet {
    fn with_members(members: Vec<Complex64>, l: f64, t: f64, diagnostic: bool) -> Self {
        let k = members.len();
        Self { members, l, t, tau: vec![None; k], alpha: vec![None; k], q: 6.0 * l, diagnostic }
    }

    /// Hand-picked members, for probing below the ranges the selection rule requires.
    pub fn diagnostic(mut members: Vec<Complex64>, l: f64, t: f64) -> Self {
        members.sort_by(|a, b| a.im.total_cmp(&b.im));
        Self::with_members(members, l, t, true)
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    /// `omega_k = gamma_k + tau_k` for members already probed.
    pub fn omega(&self) -> Vec<Option<f64>> {
        self.members.iter().zip(&self.tau).map(|(m, t)| t.map(|t| m.im + t)).collect()
    }
}

/// Greedy selection from candidate zeros: smallest admissible `gamma` first, each next one at
/// least `10L` above the previous.
pub fn select_separated_from(candidates: &[Complex64], sigma: f64, l: f64, t: f64) -> SeparatedZeroSet {
    let mut pool: Vec<Complex64> =
        candidates.iter().copied().filter(|z| z.re >= sigma && z.im >= 10.0 * l && z.im <= t).collect();
    pool.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    let mut out: Vec<Complex64> = Vec::new();
    for z in pool {
        if out.last().is_none_or(|p| z.im >= p.im + 10.0 * l) {
            out.push(z);
        }
    }
    SeparatedZeroSet::with_members(out, l, t, false)
}

pub fn select_separated(zs: &ZeroSet, sigma: f64, l: f64, t: f64) -> Result<SeparatedZeroSet> {
    let r = &zs.rect;
    if !(r.sigma_lo <= sigma && r.sigma_hi >= 1.0 && r.t_lo <= 10.0 * l && r.t_hi >= t) {
        return Err(Error::InvalidInput(format!("zero set does not cover [{sigma}, 1] x [{}, {t}]", 10.0 * l)));
    }
    let rhos: Vec<Complex64> = zs.zeros.iter().map(|z| z.rho()).collect();
    Ok(select_separated_from(&rhos, sigma, l, t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub rho: Complex64,
    pub tau: f64,
    pub max_abs: f64,
    /// Unit with `alpha * S(tau)` real and positive.
    pub alpha: Complex64,
    pub threshold: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    /// `M(xi, 2T)` used in the threshold, and how it was sampled.
    pub m: f64,
    pub m_step: f64,
    pub m_samples: usize,
    /// Rows are assertions only when this holds; otherwise they are diagnostics.
    pub preconditions_met: bool,
}

/// Scans `S(tau) = sum_{|g| <= X} mu(g) |g|^{-xi - i(gamma + tau)}` over `tau` in `[-2L, 2L]` in steps
/// of `L/50` for each member, records the maximiser and phase, and compares with
/// `1.1 Y^delta / (M log L)`. `M` is sampled on at most `m_samples` points of `[2, 2T]`.
pub fn halasz_probe(
    engine: &ZetaEngine,
    szs: &mut SeparatedZeroSet,
    params: &DetectionParams,
    m_samples: usize,
) -> Result<ProbeReport> {
    let table = engine.table();
    let fit = engine.fit();
    let terms = mobius_terms(table, params.x)?;
    if szs.k() == 0 {
        return Ok(ProbeReport {
            rows: Vec::new(),
            m: f64::NAN,
            m_step: f64::NAN,
            m_samples: 0,
            preconditions_met: false,
        });
    }
    let t_top = 2.0 * params.t;
    let m_step = 0.05f64.max((t_top - 2.0) / m_samples.max(1) as f64);
    let m = big_m(engine, params.xi, t_top, m_step)?;
    let threshold = 1.1 * params.y.powf(params.delta) / (m.value * params.l.ln());
    let l = params.l;
    let n_tau = 200;
    let mut rows = Vec::with_capacity(szs.k());
    for (k, rho) in szs.members.iter().enumerate() {
        let mut best = (f64::NEG_INFINITY, 0.0, Complex64::new(0.0, 0.0));
        for j in 0..=n_tau {
            let tau = -2.0 * l + j as f64 * (l / 50.0);
            let s = mobius_sum(&terms, Complex64::new(params.xi, rho.im + tau));
            if s.norm() > best.0 {
                best = (s.norm(), tau, s);
            }
        }
        let (max_abs, tau, s) = best;
        let alpha = if max_abs > 0.0 { s.conj() / max_abs } else { Complex64::new(1.0, 0.0) };
        szs.tau[k] = Some(tau);
        szs.alpha[k] = Some(alpha);
        rows.push(ProbeRow { rho: *rho, tau, max_abs, alpha, threshold, exceeds: max_abs >= threshold });
    }
    let preconditions_met =
        !szs.diagnostic && params.thresholds_met(fit) && szs.members.iter().all(|r| params.admissible(*r));
    Ok(ProbeReport {
        rows,
        m: m.value,
        m_step,
        m_samples: (((t_top - 2.0) / m_step).floor() as usize) + 1,
        preconditions_met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::test_support::naturals;

    #[test]
    fn base_integral_residue_identity() {
        for (l, lambda) in [(5.0, 2.0), (10.0, 3.0)] {
            let right = base_integral_on_line(l, lambda, 3.0, 1e-12).unwrap();
            let left = base_integral_on_line(l, lambda, -l, 1e-12).unwrap();
            let gap = (right.value - 1.0 - left.value).norm();
            assert!(gap <= right.radius() + left.radius(), "L={l} gap={gap}");
            assert!((right.value - 1.0).norm() <= (-(lambda - 1.0) * l).exp() + right.radius());
        }
        assert!(base_integral_i(10.0, 0.5, 1e-12).is_err());
    }

    #[test]
    fn base_integral_matches_erfc() {
        use statrs::function::erf::erfc;
        for (l, lambda) in [(5.0f64, 2.0f64), (10.0, 1.2), (20.0, 5.0), (4.0, 0.3)] {
            let q = base_integral_on_line(l, lambda, 3.0, 1e-12).unwrap();
            let exact = 0.5 * erfc(-lambda * l.sqrt() / 2.0);
            // the erfc oracle itself is only good to about 2e-13 near 1
            assert!((q.value - exact).norm() <= q.radius() + 1e-12, "L={l} lambda={lambda}");
            assert!(q.value.im.abs() <= q.radius());
        }
    }

    #[test]
    fn weight_decay_both_lines() {
        let (tab, fit) = naturals(3000);
        let rho = Complex64::new(0.5, 14.134725141734694);
        for h in [-2.0f64, -3.0] {
            let bound = fit.a_plus_kappa() * (-h * h * 10.0 / 4.0).exp();
            let w = weight_w(&tab, &fit, rho, h, 10.0, 1e-12, WeightLine::Standard).unwrap();
            assert!(w.value.norm() <= bound + w.radius());
            let ws = weight_w(&tab, &fit, rho, h, 10.0, 1e-12, WeightLine::Shifted).unwrap();
            assert!(ws.value.norm() <= bound + ws.radius());
            assert!((w.value - ws.value).norm() <= w.radius() + ws.radius());
        }
    }

    #[test]
    fn detector_routes_agree() {
        let (tab, fit) = naturals(3000);
        let p = DetectionParams::detector(&fit, 0.9, 10.0, 3f64.exp()).unwrap();
        assert!((p.x - 5f64.exp()).abs() < 1e-9);
        let rho = Complex64::new(0.5, 14.134725141734694);
        let fused = detector_i(&tab, &fit, rho, &p, 1e-10).unwrap();
        let termwise = detector_i_termwise(&tab, &fit, rho, &p, 1e-10).unwrap();
        assert!((fused.value.value - termwise.value).norm() <= fused.value.radius + termwise.radius + 1e-9);
        assert!(!fused.preconditions_met);
    }

    #[test]
    fn single_prime_detector_is_unit_term() {
        use crate::semigroup::{enumerate_integers, fit_axiom_a, KappaMode, PrimeSystem, SystemSpec};
        let ps = PrimeSystem::build(&SystemSpec::Explicit(vec![500.0])).unwrap();
        let tab = enumerate_integers(&ps, 1e6, 100).unwrap();
        let fit = fit_axiom_a(&tab, 0.4, KappaMode::LeastSquares).unwrap();
        // X = e^2 Y < 500: only the unit is summed
        let p = DetectionParams::detector(&fit, 0.9, 10.0, 2.0).unwrap();
        let rho = Complex64::new(0.8, 3.0);
        let d = detector_i(&tab, &fit, rho, &p, 1e-10).unwrap();
        let w = weight_w(&tab, &fit, rho, p.lambda, p.l, 1e-10, WeightLine::Standard).unwrap();
        assert!((d.value.value - w.value).norm() <= d.value.radius + w.radius());
    }

    #[test]
    fn greedy_selection() {
        let z = |g: f64| Complex64::new(0.95, g);
        let s = select_separated_from(&[z(150.0), z(100.0), z(400.0), z(220.0)], 0.9, 10.0, 1000.0);
        assert_eq!(s.members.iter().map(|m| m.im).collect::<Vec<_>>(), vec![100.0, 220.0, 400.0]);
        assert_eq!(s.q, 60.0);
        let dense: Vec<_> = (100..=1000).map(|g| z(g as f64)).collect();
        let s = select_separated_from(&dense, 0.9, 10.0, 1000.0);
        assert_eq!(s.k(), 10);
        assert_eq!(
            s.members.iter().map(|m| m.im).collect::<Vec<_>>(),
            (1..=10).map(|k| 100.0 * k as f64).collect::<Vec<_>>()
        );
        assert_eq!(select_separated_from(&[], 0.9, 10.0, 1000.0).k(), 0);
        // beta below sigma and gamma below 10L are excluded
        let s = select_separated_from(&[Complex64::new(0.5, 300.0), z(50.0)], 0.9, 10.0, 1000.0);
        assert_eq!(s.k(), 0);
    }

    #[test]
    fn probe_alignment() {
        let (tab, fit) = naturals(3000);
        let e = ZetaEngine::best(&tab, fit).unwrap();
        let p = DetectionParams::detector(&fit, 0.9, 10.0, 3f64.exp()).unwrap();
        let mut s = SeparatedZeroSet::diagnostic(vec![Complex64::new(0.5, 14.134725141734694)], 10.0, p.t);
        let rep = halasz_probe(&e, &mut s, &p, 500).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let row = rep.rows[0];
        assert!((row.alpha.norm() - 1.0).abs() < 1e-15);
        let terms = mobius_terms(&tab, p.x).unwrap();
        let sv = mobius_sum(&terms, Complex64::new(p.xi, row.rho.im + row.tau));
        let aligned = row.alpha * sv;
        assert!(aligned.re > 0.0 && aligned.im.abs() < 1e-12 * aligned.re);
        assert!(!rep.preconditions_met);
        assert_eq!(s.tau[0], Some(row.tau));
        let mut empty = SeparatedZeroSet::diagnostic(vec![], 10.0, p.t);
        assert!(halasz_probe(&e, &mut empty, &p, 500).unwrap().rows.is_empty());
    }
}
