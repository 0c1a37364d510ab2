use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::table::IntegerTable;

/// How the density constant kappa is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KappaMode {
    Supplied(f64),
    /// Least-squares fit of `N(x) ~ kappa (x - 1)` on a log-spaced sample. A pragmatic stand-in
    /// for finite prime lists and labelled as such in every report.
    LeastSquares,
}

/// Regularity constants `|N(x) - kappa (x - 1)| <= a x^theta`, checked on `witness_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomAFit {
    pub kappa: f64,
    pub a: f64,
    pub theta: f64,
    pub witness_range: (f64, f64),
    pub kappa_mode: KappaMode,
}

impl AxiomAFit {
    /// Unchecked constructor, for hypothetical or deliberately corrupted constants.
    pub fn new(kappa: f64, a: f64, theta: f64, witness_range: (f64, f64)) -> Result<Self> {
        if !(kappa > 0.0) || !(a > 0.0) || !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidInput(format!("bad Axiom A constants kappa={kappa} A={a} theta={theta}")));
        }
        Ok(Self { kappa, a, theta, witness_range, kappa_mode: KappaMode::Supplied(kappa) })
    }

    pub fn a_plus_kappa(&self) -> f64 {
        self.a + self.kappa
    }

    pub fn with_amplitude(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    /// Largest `|R|/x^theta` over the jump points of the table (both sides) and the right end.
    pub fn envelope_ratio(table: &IntegerTable, kappa: f64, theta: f64) -> f64 {
        let mut below = 0usize;
        let mut best = 0.0f64;
        for (x, jump) in table.jumps() {
            let w = x.powf(theta);
            let lin = kappa * (x - 1.0);
            best = best.max((below as f64 - lin).abs() / w);
            below += jump;
            best = best.max((below as f64 - lin).abs() / w);
        }
        let cap = table.norm_cap();
        if cap.is_finite() {
            best = best.max((below as f64 - kappa * (cap - 1.0)).abs() / cap.powf(theta));
        }
        best
    }

    /// Whether the inequality holds at every jump point of `table`.
    pub fn holds_on(&self, table: &IntegerTable) -> bool {
        Self::envelope_ratio(table, self.kappa, self.theta) <= self.a * (1.0 + 1e-12)
    }
}

fn least_squares_kappa(table: &IntegerTable) -> Result<f64> {
    let cap = table.norm_cap();
    if !(cap > 1.0) || !cap.is_finite() {
        return Err(Error::InvalidInput("least-squares kappa needs a finite norm cap above 1".into()));
    }
    const SAMPLES: usize = 256;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..=SAMPLES {
        let x = (cap.ln() * i as f64 / SAMPLES as f64).exp().min(cap);
        let n = table.count_le(x) as f64;
        num += n * (x - 1.0);
        den += (x - 1.0) * (x - 1.0);
    }
    let kappa = num / den;
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput(format!("least-squares kappa {kappa} is not positive")));
    }
    Ok(kappa)
}

/// Fits `A` for a given `theta`: the envelope ratio over the whole table, then `max(A, 1 - kappa)`.
pub fn fit_axiom_a(table: &IntegerTable, theta: f64, mode: KappaMode) -> Result<AxiomAFit> {
    if table.is_empty() {
        return Err(Error::InvalidInput("empty table".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidInput(format!("theta {theta} outside (0,1)")));
    }
    let kappa = match mode {
        KappaMode::Supplied(k) if k > 0.0 => k,
        KappaMode::Supplied(k) => return Err(Error::InvalidInput(format!("kappa {k} must be positive"))),
        KappaMode::LeastSquares => least_squares_kappa(table)?,
    };
    let a = AxiomAFit::envelope_ratio(table, kappa, theta).max(1.0 - kappa);
    Ok(AxiomAFit { kappa, a, theta, witness_range: (1.0, table.norm_cap()), kappa_mode: mode })
}
