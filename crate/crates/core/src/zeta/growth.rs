use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::semigroup::AxiomAFit;

use super::engine::ZetaEngine;

/// Largest `|zeta(sigma + it)|` over `2 <= |t| <= T`, with its upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MBound {
    pub sigma: f64,
    pub t_max: f64,
    /// Empirical maximum of the approximant.
    pub value: f64,
    pub argmax: f64,
    /// Evaluation radius at the maximiser.
    pub radius: f64,
    pub rhs: f64,
}

impl MBound {
    pub fn holds(&self) -> bool {
        self.value <= self.rhs + self.radius
    }
}

/// `min((2A+k)(1-th)/((1-s)(s-th)), (4A+3k)/((s-th)(1-th)) log T) max(1, T^{(1-s)/(1-th)})`.
pub fn max_modulus_rhs(fit: &AxiomAFit, sigma: f64, t_max: f64) -> f64 {
    let (a, k, th) = (fit.a, fit.kappa, fit.theta);
    let logfree = (2.0 * a + k) * (1.0 - th) / ((1.0 - sigma) * (sigma - th));
    let with_log = (4.0 * a + 3.0 * k) / ((sigma - th) * (1.0 - th)) * t_max.ln();
    logfree.min(with_log) * t_max.powf((1.0 - sigma) / (1.0 - th)).max(1.0)
}

/// `|zeta(sigma+it)|` sampled on `t = 2, 2+step, ...` up to `t_max` (endpoint included).
#[derive(Debug, Clone)]
pub struct ModulusScan {
    pub sigma: f64,
    pub step: f64,
    pub samples: Vec<(f64, f64)>,
}

impl ModulusScan {
    pub fn new(engine: &ZetaEngine, sigma: f64, t_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidInput(format!("grid step {step} must be positive")));
        }
        if !(t_max >= 2.0) {
            return Err(Error::InvalidInput(format!("T = {t_max} below 2")));
        }
        let n = ((t_max - 2.0) / step).floor() as usize;
        let mut samples = Vec::with_capacity(n + 2);
        for i in 0..=n {
            let t = 2.0 + i as f64 * step;
            samples.push((t, engine.value(Complex64::new(sigma, t)).norm()));
        }
        if samples.last().is_none_or(|&(t, _)| t < t_max) {
            samples.push((t_max, engine.value(Complex64::new(sigma, t_max)).norm()));
        }
        Ok(Self { sigma, step, samples })
    }

    /// Grid maximum over `t <= t_max`, refined by a parabola through each interior local peak.
    pub fn max_upto(&self, engine: &ZetaEngine, t_max: f64) -> (f64, f64) {
        let pts: Vec<(f64, f64)> = self.samples.iter().copied().take_while(|&(t, _)| t <= t_max).collect();
        let mut best = pts.iter().copied().fold((f64::NAN, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
        for w in pts.windows(3) {
            let ((t0, f0), (t1, f1), (t2, f2)) = (w[0], w[1], w[2]);
            if !(f1 >= f0 && f1 >= f2) {
                continue;
            }
            let den = f0 - 2.0 * f1 + f2;
            if den >= 0.0 {
                continue;
            }
            let h = 0.5 * (t2 - t0);
            let tv = (t1 + 0.5 * h * (f0 - f2) / den).clamp(t0, t2);
            let fv = engine.value(Complex64::new(self.sigma, tv)).norm();
            if fv > best.1 {
                best = (tv, fv);
            }
        }
        (best.1, best.0)
    }
}

/// `M(sigma, T)` on a grid with parabolic refinement, and its closed-form upper bound.
pub fn big_m(engine: &ZetaEngine, sigma: f64, t_max: f64, grid_step: f64) -> Result<MBound> {
    let fit = engine.fit();
    if !(sigma > fit.theta && sigma < 1.0) {
        return Err(Error::InvalidInput(format!("sigma {sigma} outside ({}, 1)", fit.theta)));
    }
    let scan = ModulusScan::new(engine, sigma, t_max, grid_step)?;
    let (value, argmax) = scan.max_upto(engine, t_max);
    Ok(MBound {
        sigma,
        t_max,
        value,
        argmax,
        radius: engine.radius(Complex64::new(sigma, argmax)),
        rhs: max_modulus_rhs(fit, sigma, t_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::engine::tests::{naturals, riemann_zeta_em};

    #[test]
    fn critical_line_maximum() {
        // fine-grid oracle: max |zeta(1/2+it)| on [2,30] is 2.847472689... at t = 27.7358...
        let mut oracle = (0.0, 0.0);
        let mut t = 2.0;
        while t <= 30.0 {
            let v = riemann_zeta_em(Complex64::new(0.5, t)).norm();
            if v > oracle.0 {
                oracle = (v, t);
            }
            t += 1e-3;
        }
        assert!((oracle.0 - 2.847472689122848).abs() < 1e-5);
        let (tab, fit) = naturals(50_000);
        let e = ZetaEngine::best(&tab, fit).unwrap();
        let m = big_m(&e, 0.5, 30.0, 0.05).unwrap();
        assert!((m.value - oracle.0).abs() < 1e-4, "{m:?}");
        assert!((m.argmax - oracle.1).abs() < 0.01);
        assert!(m.holds());
    }

    #[test]
    fn degenerate_and_invalid() {
        let (tab, fit) = naturals(2000);
        let e = ZetaEngine::best(&tab, fit).unwrap();
        let m = big_m(&e, 0.6, 2.0, 0.05).unwrap();
        assert_eq!(m.argmax, 2.0);
        assert_eq!(m.value, e.value(Complex64::new(0.6, 2.0)).norm());
        assert!(big_m(&e, 0.6, 10.0, 0.0).is_err());
        assert!(big_m(&e, 1.2, 10.0, 0.1).is_err());
    }

    #[test]
    fn rhs_formula() {
        let fit = AxiomAFit::new(1.0, 1.0, 0.1, (1.0, 1e3)).unwrap();
        let v = max_modulus_rhs(&fit, 0.5, 30.0);
        let logfree: f64 = 3.0 * 0.9 / (0.5 * 0.4);
        let with_log = 7.0 / (0.4 * 0.9) * 30f64.ln();
        assert!((v - logfree.min(with_log) * 30f64.powf(0.5 / 0.9)).abs() < 1e-12);
    }
}
