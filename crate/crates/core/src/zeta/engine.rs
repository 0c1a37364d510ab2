use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::semigroup::{AxiomAFit, IntegerTable};

/// Continued evaluation refuses points closer than this to the pole.
pub const POLE_GUARD: f64 = 0.01;

/// A value with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedValue {
    pub value: Complex64,
    /// Bound on `|true - value|`, valid when the fitted inequality holds beyond the table.
    pub radius: f64,
}

impl BoundedValue {
    pub fn new(value: Complex64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Self { value, radius }
    }

    pub fn exact(value: Complex64) -> Self {
        Self { value, radius: 0.0 }
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        (self.value - z).norm() <= self.radius + slack
    }
}

/// `s = sigma + i t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripPoint {
    pub sigma: f64,
    pub t: f64,
}

impl StripPoint {
    pub fn new(sigma: f64, t: f64) -> Self {
        Self { sigma, t }
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

impl From<Complex64> for StripPoint {
    fn from(s: Complex64) -> Self {
        Self { sigma: s.re, t: s.im }
    }
}

/// `(e^z - 1)/z` and its derivative.
fn expm1_over(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        // e = sum z^k/(k+1)!, de = sum k z^{k-1}/(k+1)!
        let (mut e, mut de) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut zk = Complex64::new(1.0, 0.0);
        let mut zk1 = Complex64::new(0.0, 0.0);
        let mut fact = 1.0;
        for k in 0..24 {
            fact *= (k + 1) as f64;
            e += zk / fact;
            de += k as f64 * zk1 / fact;
            zk1 = zk;
            zk *= z;
        }
        (e, de)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (z * ez - ez + 1.0) / (z * z))
    }
}

/// Continuation of the zeta function of a table from a smoothed cutoff.
///
/// Averages the sharp-cutoff continuation `zeta_Y(s) + kappa Y^{1-s}/(s-1)` over `Y` uniform in
/// `[lo, hi]`. Each sharp cutoff has tail at most `A (|s|+sigma-theta)/(sigma-theta) Y^{theta-sigma}`,
/// which is decreasing in `Y`, so the average inherits the bound at `Y = lo`. The average weights
/// `|g|^{-s}` by 1 below `lo`, linearly down to 0 at `hi`.
#[derive(Debug, Clone)]
pub struct ZetaEngine<'a> {
    table: &'a IntegerTable,
    fit: AxiomAFit,
    lo: f64,
    hi: f64,
    /// Entries with norm `<= lo`.
    n_full: usize,
    /// Entries with norm `< hi`; those between carry fractional weight.
    n_win: usize,
}

impl<'a> ZetaEngine<'a> {
    pub fn new(table: &'a IntegerTable, fit: AxiomAFit, lo: f64, hi: f64) -> Result<Self> {
        let cap = table.norm_cap();
        if !(lo >= 1.0 && lo <= hi && hi <= cap) {
            return Err(Error::InvalidInput(format!("cutoff window [{lo}, {hi}] not inside [1, {cap}]")));
        }
        let n_full = table.count_le(lo);
        let n_win = if hi > lo { table.count_lt(hi) } else { n_full };
        Ok(Self { table, fit, lo, hi, n_full, n_win })
    }

    /// Window `[Y, min(2Y, cap)]`.
    pub fn with_cutoff(table: &'a IntegerTable, fit: AxiomAFit, y: f64) -> Result<Self> {
        let cap = table.norm_cap();
        if y > cap {
            return Err(Error::OutOfRange { x: y, cap });
        }
        Self::new(table, fit, y, (2.0 * y).min(cap))
    }

    /// Window `[cap/2, cap]`, the most accurate the table supports.
    pub fn best(table: &'a IntegerTable, fit: AxiomAFit) -> Result<Self> {
        let cap = table.norm_cap();
        if !cap.is_finite() {
            return Err(Error::InvalidInput("table has no finite norm cap".into()));
        }
        Self::new(table, fit, (cap / 2.0).max(1.0), cap)
    }

    pub fn fit(&self) -> &AxiomAFit {
        &self.fit
    }

    pub fn table(&self) -> &'a IntegerTable {
        self.table
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn weight(&self, i: usize) -> f64 {
        if i < self.n_full {
            1.0
        } else {
            (self.hi - self.table.entries()[i].norm) / (self.hi - self.lo)
        }
    }

    /// Smoothed Dirichlet sum and, if requested, its derivative.
    fn dirichlet(&self, s: Complex64, with_derivative: bool) -> (Complex64, Complex64) {
        let logs = self.table.ln_norms();
        let (mut re, mut im, mut dre, mut dim) = (0.0, 0.0, 0.0, 0.0);
        for (i, &l) in logs[..self.n_win].iter().enumerate() {
            let w = self.weight(i) * (-s.re * l).exp();
            let (sin, cos) = (s.im * l).sin_cos();
            let (a, b) = (w * cos, -w * sin);
            re += a;
            im += b;
            if with_derivative {
                dre -= l * a;
                dim -= l * b;
            }
        }
        (Complex64::new(re, im), Complex64::new(dre, dim))
    }

    /// `F(s)`, the window average of `Y^{1-s}`, and `F'(s)`.
    fn cutoff_power(&self, s: Complex64) -> (Complex64, Complex64) {
        let ln_lo = self.lo.ln();
        if self.hi == self.lo {
            let f = ((1.0 - s) * ln_lo).exp();
            return (f, -ln_lo * f);
        }
        let ln_r = (self.hi / self.lo).ln();
        let z = (2.0 - s) * ln_r;
        let (e, de) = expm1_over(z);
        let scale = ((2.0 - s) * ln_lo).exp() * ln_r / (self.hi - self.lo);
        let f = scale * e;
        (f, -ln_lo * f - scale * ln_r * de)
    }

    /// The approximant itself. Meromorphic with a single simple pole at 1 of residue kappa.
    pub fn value(&self, s: Complex64) -> Complex64 {
        let (d, _) = self.dirichlet(s, false);
        let (f, _) = self.cutoff_power(s);
        d + self.fit.kappa * f / (s - 1.0)
    }

    /// Approximant and its derivative in one pass.
    pub fn value_and_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let (d, dd) = self.dirichlet(s, true);
        let (f, df) = self.cutoff_power(s);
        let k = self.fit.kappa;
        let sm1 = s - 1.0;
        (d + k * f / sm1, dd + k * (df * sm1 - f) / (sm1 * sm1))
    }

    /// Tail bound for the value.
    pub fn radius(&self, s: Complex64) -> f64 {
        tail_radius(&self.fit, s, self.lo)
    }

    pub fn derivative_radius(&self, s: Complex64) -> f64 {
        derivative_tail_radius(&self.fit, s, self.lo)
    }

    fn check(&self, s: Complex64) -> Result<()> {
        if !(s.re > self.fit.theta) {
            return Err(Error::OutsideStrip { re: s.re, im: s.im, theta: self.fit.theta });
        }
        if (s - 1.0).norm() < POLE_GUARD {
            return Err(Error::PoleProximity { re: s.re, im: s.im, limit: POLE_GUARD });
        }
        Ok(())
    }

    pub fn zeta(&self, s: Complex64) -> Result<BoundedValue> {
        self.check(s)?;
        Ok(BoundedValue::new(self.value(s), self.radius(s)))
    }

    pub fn zeta_prime(&self, s: Complex64) -> Result<BoundedValue> {
        self.check(s)?;
        let (_, d) = self.value_and_derivative(s);
        Ok(BoundedValue::new(d, self.derivative_radius(s)))
    }
}

/// `A (|s|+sigma-theta)/(sigma-theta) Y^{theta-sigma}`.
pub fn tail_radius(fit: &AxiomAFit, s: Complex64, y: f64) -> f64 {
    let d = s.re - fit.theta;
    fit.a * (s.norm() + d) / d * y.powf(-d)
}

/// `A (log Y + 1/(sigma-theta)) (|s|+sigma-theta)/(sigma-theta) Y^{theta-sigma}`.
pub fn derivative_tail_radius(fit: &AxiomAFit, s: Complex64, y: f64) -> f64 {
    let d = s.re - fit.theta;
    (y.ln() + 1.0 / d) * tail_radius(fit, s, y)
}

/// Smallest table norm at or above `y`, or the cap.
fn round_up_to_norm(table: &IntegerTable, y: f64) -> f64 {
    let i = table.count_lt(y);
    table.entries().get(i).map_or(table.norm_cap(), |e| e.norm.min(table.norm_cap()))
}

fn cutoff_for<F: Fn(f64) -> f64>(table: &IntegerTable, radius_at: F, tol: f64) -> Result<f64> {
    let cap = table.norm_cap();
    if radius_at(1.0) <= tol {
        return Ok(1.0);
    }
    let achievable = radius_at(cap);
    if achievable > tol {
        return Err(Error::InsufficientTable { required: f64::NAN, achievable_radius: achievable });
    }
    // radius is decreasing in Y; bisect on log Y
    let (mut a, mut b) = (0.0, cap.ln());
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if radius_at(m.exp()) <= tol {
            b = m;
        } else {
            a = m;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    Ok(round_up_to_norm(table, b.exp()))
}

fn checked_engine<'a>(
    table: &'a IntegerTable,
    fit: &AxiomAFit,
    s: Complex64,
    tol: f64,
    radius_at: impl Fn(f64) -> f64,
) -> Result<ZetaEngine<'a>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    if !(s.re > fit.theta) {
        return Err(Error::OutsideStrip { re: s.re, im: s.im, theta: fit.theta });
    }
    if (s - 1.0).norm() < POLE_GUARD {
        return Err(Error::PoleProximity { re: s.re, im: s.im, limit: POLE_GUARD });
    }
    let y = match cutoff_for(table, &radius_at, tol) {
        Err(Error::InsufficientTable { achievable_radius, .. }) => {
            // closed form for the value bound; the derivative bound has none, report the cap
            let d = s.re - fit.theta;
            let required = (tol * d / (fit.a * (s.norm() + d))).powf(-1.0 / d);
            return Err(Error::InsufficientTable { required: required.max(table.norm_cap()), achievable_radius });
        }
        other => other?,
    };
    ZetaEngine::with_cutoff(table, *fit, y)
}

/// `sum_{|g| <= X} |g|^{-s}`.
pub fn zeta_partial(table: &IntegerTable, s: Complex64, x: f64) -> Result<Complex64> {
    let n = table.counting(x)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &l in &table.ln_norms()[..n] {
        acc += (-s * l).exp();
    }
    Ok(acc)
}

/// Continued zeta with the smallest cutoff whose tail bound is within `tol`.
pub fn zeta_continued(table: &IntegerTable, fit: &AxiomAFit, s: Complex64, tol: f64) -> Result<BoundedValue> {
    let engine = checked_engine(table, fit, s, tol, |y| tail_radius(fit, s, y))?;
    engine.zeta(s)
}

/// Derivative of the continued zeta, cutoff chosen against the derivative tail bound.
pub fn zeta_prime(table: &IntegerTable, fit: &AxiomAFit, s: Complex64, tol: f64) -> Result<BoundedValue> {
    let engine = checked_engine(table, fit, s, tol, |y| derivative_tail_radius(fit, s, y))?;
    engine.zeta_prime(s)
}
