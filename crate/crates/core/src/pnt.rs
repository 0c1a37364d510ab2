//! The transform `omega_eta(x) = inf_{y > 1} (eta(y) log x + log y)`, tabulated `Delta(x)`, and the
//! error-term envelope `x exp(-(1-eps) omega_eta(x))`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::fmt::{Num, OptNum};
use crate::semigroup::IntegerTable;

/// Left end of the search in `v = log y`.
pub const V_MIN: f64 = 1e-12;

/// A nonincreasing `eta(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum EtaFunction {
    Constant(f64),
    /// `c / log t`. Exceeds `1/2` for `t < e^{2c}`; left uncapped there.
    COverLog(f64),
    /// `(t, eta)` knots, linear in `(log t, eta)` between them.
    Table(Vec<(f64, f64)>),
}

impl EtaFunction {
    pub fn constant(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 0.5) {
            return Err(Error::InvalidInput(format!("constant eta = {eta} outside (0, 1/2)")));
        }
        Ok(Self::Constant(eta))
    }

    pub fn c_over_log(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("c = {c} must be positive")));
        }
        Ok(Self::COverLog(c))
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidInput("eta table needs at least two knots".into()));
        }
        for (i, &(t, e)) in knots.iter().enumerate() {
            if !(t > 0.0 && t.is_finite() && e > 0.0 && e < 0.5) {
                return Err(Error::InvalidInput(format!("eta knot ({t}, {e}) invalid")));
            }
            if i > 0 && !(t > knots[i - 1].0 && e <= knots[i - 1].1) {
                return Err(Error::InvalidInput("eta table must have increasing t and nonincreasing eta".into()));
            }
        }
        Ok(Self::Table(knots))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::COverLog(_) => "c-over-log",
            Self::Table(_) => "table",
        }
    }

    /// `eta(e^v)`.
    pub fn at_log(&self, v: f64) -> Result<f64> {
        match self {
            Self::Constant(e) => Ok(*e),
            Self::COverLog(c) => Ok(c / v),
            Self::Table(k) => {
                let (lo, hi) = (k[0].0.ln(), k[k.len() - 1].0.ln());
                if !(v >= lo && v <= hi) {
                    return Err(Error::Extrapolation { y: v.exp() });
                }
                let j = k.partition_point(|&(t, _)| t.ln() <= v).clamp(1, k.len() - 1);
                let ((t0, e0), (t1, e1)) = (k[j - 1], k[j]);
                let (u0, u1) = (t0.ln(), t1.ln());
                Ok(e0 + (e1 - e0) * (v - u0) / (u1 - u0))
            }
        }
    }

    pub fn at(&self, y: f64) -> Result<f64> {
        self.at_log(y.ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaPoint {
    /// `x` as given, or `e^{log x}` (infinite past about 709) when only `log x` was.
    pub x: f64,
    pub log_x: f64,
    pub omega: f64,
    pub y_star: f64,
    /// The infimum sits at the left end `y = 1 + 1e-12`; it may be a limit that is not attained.
    pub boundary: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `omega_eta` from `log x`, by golden-section search in `v = log y` (the objective is convex there
/// for the supported `eta`), bracketed by doubling.
pub fn omega_transform_log(eta: &EtaFunction, log_x: f64, tol: f64) -> Result<OmegaPoint> {
    if !(log_x > 0.0 && log_x.is_finite()) {
        return Err(Error::InvalidInput(format!("need x > 1, got log x = {log_x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol = {tol} must be positive")));
    }
    let phi = |v: f64| -> Result<f64> { Ok(eta.at_log(v)? * log_x + v) };
    let (mut a, mut b) = (V_MIN, 1f64.max(2.0 * V_MIN));
    if phi(b)? < phi(a)? {
        let mut cur = b;
        let mut f_cur = phi(cur)?;
        loop {
            let next = 2.0 * cur;
            let f_next = phi(next)?;
            if f_next >= f_cur {
                b = next;
                break;
            }
            a = cur;
            cur = next;
            f_cur = f_next;
            if !cur.is_finite() {
                return Err(Error::Inconsistent("objective decreases without bound".into()));
            }
        }
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (phi(c)?, phi(d)?);
    while b - a > tol.max(4.0 * f64::EPSILON * b) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = phi(d)?;
        }
    }
    let boundary = a <= V_MIN + tol;
    let v = if boundary { V_MIN } else { 0.5 * (a + b) };
    let mut omega = phi(v)?;
    // never report more than a value already seen
    omega = omega.min(fc).min(fd);
    Ok(OmegaPoint { x: log_x.exp(), log_x, omega, y_star: v.exp(), boundary })
}

pub fn omega_transform(eta: &EtaFunction, x: f64, tol: f64) -> Result<OmegaPoint> {
    if !(x > 1.0) {
        return Err(Error::InvalidInput(format!("need x > 1, got {x}")));
    }
    Ok(OmegaPoint { x, ..omega_transform_log(eta, x.ln(), tol)? })
}

/// `omega_eta` sampled at increasing `log x`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaCurve {
    pub eta: EtaFunction,
    pub samples: Vec<OmegaPoint>,
}

impl OmegaCurve {
    pub fn new(eta: EtaFunction, log_xs: &[f64], tol: f64) -> Result<Self> {
        Self::sampled(eta, &[], log_xs, tol)
    }

    /// Samples at each `x` and each `log x`, sorted and deduplicated.
    pub fn sampled(eta: EtaFunction, xs: &[f64], log_xs: &[f64], tol: f64) -> Result<Self> {
        let mut samples: Vec<OmegaPoint> = xs
            .iter()
            .map(|&x| omega_transform(&eta, x, tol))
            .chain(log_xs.iter().map(|&l| omega_transform_log(&eta, l, tol)))
            .collect::<Result<_>>()?;
        samples.sort_by(|a, b| a.log_x.total_cmp(&b.log_x));
        samples.dedup_by(|a, b| a.log_x == b.log_x);
        Ok(Self { eta, samples })
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].omega >= w[0].omega)
    }

    /// Largest `omega - (eta(y) log x + log y)` over the samples and probe `log y` values.
    pub fn infimum_excess(&self, log_ys: &[f64]) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for p in &self.samples {
            for &v in log_ys {
                worst = worst.max(p.omega - (self.eta.at_log(v)? * p.log_x + v));
            }
        }
        Ok(worst)
    }
}

/// `(x, Delta(x))` at each `x` and at every norm in `[min x, max x]` where `psi` jumps.
pub fn delta_table(table: &IntegerTable, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > table.norm_cap() {
        return Err(Error::OutOfRange { x: hi, cap: table.norm_cap() });
    }
    let mut pts: Vec<f64> = xs.to_vec();
    pts.extend(table.entries().iter().filter(|e| e.lambda > 0.0 && e.norm >= lo && e.norm <= hi).map(|e| e.norm));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.into_iter().map(|x| Ok((x, table.delta(x)?))).collect()
}

/// `x exp(-(1-eps) omega)` with the unknown leading constant set to 1. Only the shape is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint {
    pub log_x: f64,
    pub envelope: f64,
    pub ln_envelope: f64,
}

pub const ENVELOPE_SHAPE_ONLY: bool = true;

pub fn ingham_envelope(curve: &OmegaCurve, eps: f64) -> Result<Vec<EnvelopePoint>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!("eps = {eps} outside (0, 1)")));
    }
    Ok(curve
        .samples
        .iter()
        .map(|p| {
            let ln_envelope = p.log_x - (1.0 - eps) * p.omega;
            EnvelopePoint { log_x: p.log_x, envelope: ln_envelope.exp(), ln_envelope }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub omega: f64,
    pub y_star: f64,
    /// Present when `x` lies within the table.
    pub delta: Option<f64>,
    pub envelope: f64,
    /// `|Delta| / envelope`.
    pub ratio: Option<f64>,
}

pub fn curve_rows(curve: &OmegaCurve, table: Option<&IntegerTable>, eps: f64) -> Result<Vec<CurveRow>> {
    let env = ingham_envelope(curve, eps)?;
    curve
        .samples
        .iter()
        .zip(env)
        .map(|(p, e)| {
            let x = p.x;
            let delta = match table {
                Some(t) if x <= t.norm_cap() => Some(t.delta(x)?),
                _ => None,
            };
            Ok(CurveRow {
                x,
                omega: p.omega,
                y_star: p.y_star,
                delta,
                envelope: e.envelope,
                ratio: delta.map(|d| d.abs() / e.envelope),
            })
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(mut w: W, rows: &[CurveRow]) -> std::io::Result<()> {
    writeln!(w, "x,omega,y_star,delta,envelope,ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            Num(r.x),
            Num(r.omega),
            Num(r.y_star),
            OptNum(r.delta),
            Num(r.envelope),
            OptNum(r.ratio)
        )?;
    }
    Ok(())
}
