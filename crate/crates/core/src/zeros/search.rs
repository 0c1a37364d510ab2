use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmt::Num;
use crate::semigroup::{AxiomAFit, IntegerTable};
use crate::zeta::ZetaEngine;

use super::contour::{circle_winding, with_jitter, zero_count, Rectangle};

/// Contour sums never use a cutoff above this; accuracy there matters only for counting.
const CONTOUR_CUTOFF: f64 = 1e5;
/// Newton polish starts once a single zero is isolated in a rectangle this small.
const NEWTON_DIAMETER: f64 = 1.0;
const NEWTON_ITERATIONS: usize = 50;
/// Allowed drift of a polished zero outside its rectangle.
const ACCEPT_SLACK: f64 = 1e-5;
/// Two polished zeros closer than this are the same zero.
const DEDUP_DISTANCE: f64 = 1e-6;
/// `|gamma|` below this counts as a real zero.
const REAL_AXIS: f64 = 1e-9;
/// Relative offsets tried for split lines that hit a zero or fail the count check.
const SPLIT_SHIFTS: [f64; 5] = [0.0, 0.0137, -0.0211, 0.0343, -0.0467];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub beta: f64,
    pub gamma: f64,
    pub multiplicity: u32,
    /// `|zeta|` at the polished point.
    pub residual: f64,
}

impl Zero {
    pub fn rho(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }
}

/// Zeros found in a rectangle, sorted by height.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Zero>,
    /// Rectangle actually searched, after any jitter of its top edge.
    pub rect: Rectangle,
    pub requested: Rectangle,
    pub tol: f64,
    /// Zero count of `rect` from its boundary winding.
    pub count: i64,
}

impl ZeroSet {
    pub fn empty(rect: Rectangle, tol: f64) -> Self {
        Self { zeros: Vec::new(), rect, requested: rect, tol, count: 0 }
    }

    pub fn total_multiplicity(&self) -> i64 {
        self.zeros.iter().map(|z| i64::from(z.multiplicity)).sum()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "beta,gamma,multiplicity,residual")?;
        for z in &self.zeros {
            writeln!(w, "{},{},{},{}", Num(z.beta), Num(z.gamma), z.multiplicity, Num(z.residual))?;
        }
        Ok(())
    }
}

/// Zeros with `beta >= b` and `|gamma| <= T`, with multiplicity.
///
/// Only the upper half of the search rectangle is used: zeros above the real axis are doubled for
/// their conjugates, zeros below it are ignored, real zeros count once.
pub fn count_n(zs: &ZeroSet, b: f64, t: f64) -> Result<u64> {
    let r = &zs.rect;
    if !(r.sigma_lo <= b && r.sigma_hi >= 1.0 && r.t_lo <= 0.0 && r.t_hi >= t) {
        return Err(Error::InvalidInput(format!(
            "search rectangle [{}, {}] x [{}, {}] does not cover [{b}, 1] x [0, {t}]",
            r.sigma_lo, r.sigma_hi, r.t_lo, r.t_hi
        )));
    }
    Ok(zs
        .zeros
        .iter()
        .filter(|z| z.beta >= b && z.gamma <= t && z.gamma >= -REAL_AXIS)
        .map(|z| if z.gamma.abs() <= REAL_AXIS { 1 } else { 2 } * u64::from(z.multiplicity))
        .sum())
}

/// Argument-principle search with a coarse engine for contours and a fine one for polishing.
#[derive(Debug, Clone)]
pub struct ZeroFinder<'a> {
    contour: ZetaEngine<'a>,
    polish: ZetaEngine<'a>,
    tol: f64,
    seed: u64,
}

impl<'a> ZeroFinder<'a> {
    pub fn new(table: &'a IntegerTable, fit: AxiomAFit, tol: f64, seed: u64) -> Result<Self> {
        let polish = ZetaEngine::best(table, fit)?;
        let contour = if table.norm_cap() > CONTOUR_CUTOFF {
            ZetaEngine::new(table, fit, CONTOUR_CUTOFF / 2.0, CONTOUR_CUTOFF)?
        } else {
            polish.clone()
        };
        Self::from_engines(contour, polish, tol, seed)
    }

    pub fn from_engines(contour: ZetaEngine<'a>, polish: ZetaEngine<'a>, tol: f64, seed: u64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
        }
        Ok(Self { contour, polish, tol, seed })
    }

    pub fn polish_engine(&self) -> &ZetaEngine<'a> {
        &self.polish
    }

    fn check_rect(&self, rect: &Rectangle) -> Result<()> {
        let theta = self.contour.fit().theta;
        if !(rect.sigma_lo > theta) {
            return Err(Error::InvalidRectangle(format!("left edge {} not right of theta = {theta}", rect.sigma_lo)));
        }
        Ok(())
    }

    /// Zero count of `rect` (winding plus pole correction), without jitter.
    pub fn count(&self, rect: &Rectangle) -> Result<i64> {
        self.check_rect(rect)?;
        zero_count(&self.contour, rect, self.tol)
    }

    pub fn find(&self, rect: &Rectangle) -> Result<ZeroSet> {
        self.check_rect(rect)?;
        let (effective, (count, mut zeros)) = with_jitter(rect, self.seed, |r| {
            let n = zero_count(&self.contour, r, self.tol)?;
            let mut out = Vec::new();
            self.search(*r, n, &mut out)?;
            Ok((n, out))
        })?;
        zeros.sort_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.beta.total_cmp(&b.beta)));
        let set = ZeroSet { zeros, rect: effective, requested: *rect, tol: self.tol, count };
        if set.total_multiplicity() != count {
            return Err(Error::Inconsistent(format!(
                "located multiplicity {} differs from winding count {count}",
                set.total_multiplicity()
            )));
        }
        Ok(set)
    }

    fn search(&self, rect: Rectangle, n: i64, out: &mut Vec<Zero>) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        if n < 0 {
            return Err(Error::Inconsistent(format!("negative zero count {n}")));
        }
        if n == 1 && rect.diameter() <= NEWTON_DIAMETER {
            if let Some((z, residual)) = self.newton(rect.center()) {
                if rect.contains(z, ACCEPT_SLACK) {
                    if !out.iter().any(|o| (o.rho() - z).norm() < DEDUP_DISTANCE) {
                        let multiplicity = self.multiplicity(z, out)?;
                        out.push(Zero { beta: z.re, gamma: z.im, multiplicity, residual });
                    }
                    return Ok(());
                }
            }
        }
        if rect.diameter() <= 10.0 * self.tol {
            // unresolvable cluster: one point carrying the whole count
            let (z, residual) = self.newton(rect.center()).unwrap_or_else(|| {
                let c = rect.center();
                (c, self.polish.value(c).norm())
            });
            let multiplicity = u32::try_from(n).map_err(|_| Error::Inconsistent("count overflow".into()))?;
            out.push(Zero { beta: z.re, gamma: z.im, multiplicity, residual });
            return Ok(());
        }
        let children = self.split(&rect, n)?;
        for (child, m) in children {
            self.search(child, m, out)?;
        }
        Ok(())
    }

    /// Quarters `rect`, moving split lines off zeros and the pole until child counts add up.
    fn split(&self, rect: &Rectangle, n: i64) -> Result<Vec<(Rectangle, i64)>> {
        let mut last_err = None;
        for (k, &shift) in SPLIT_SHIFTS.iter().enumerate() {
            let sm = rect.sigma_lo + rect.width() * (0.5 + shift);
            let tm = rect.t_lo + rect.height() * (0.5 - SPLIT_SHIFTS[(k + 2) % SPLIT_SHIFTS.len()] * 0.5);
            if sm == 1.0 || tm == 0.0 {
                continue;
            }
            let quads = [
                Rectangle { sigma_lo: rect.sigma_lo, sigma_hi: sm, t_lo: rect.t_lo, t_hi: tm },
                Rectangle { sigma_lo: sm, sigma_hi: rect.sigma_hi, t_lo: rect.t_lo, t_hi: tm },
                Rectangle { sigma_lo: rect.sigma_lo, sigma_hi: sm, t_lo: tm, t_hi: rect.t_hi },
                Rectangle { sigma_lo: sm, sigma_hi: rect.sigma_hi, t_lo: tm, t_hi: rect.t_hi },
            ];
            let counts: Result<Vec<i64>> = quads.iter().map(|q| zero_count(&self.contour, q, self.tol)).collect();
            match counts {
                Ok(c) if c.iter().sum::<i64>() == n => return Ok(quads.into_iter().zip(c).collect()),
                Ok(c) => last_err = Some(Error::Inconsistent(format!("child counts {c:?} do not sum to {n}"))),
                Err(e @ (Error::ZeroNearContour { .. } | Error::Inconsistent(_) | Error::InvalidRectangle(_))) => {
                    last_err = Some(e)
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::Inconsistent("no admissible split".into())))
    }

    /// Damped Newton on the fine engine. Returns the point and its residual on convergence.
    pub fn newton(&self, start: Complex64) -> Option<(Complex64, f64)> {
        let mut z = start;
        let (mut f, mut df) = self.polish.value_and_derivative(z);
        for _ in 0..NEWTON_ITERATIONS {
            if !(df.norm() > 0.0) || !f.is_finite() {
                return None;
            }
            let step = f / df;
            let mut lam = 1.0;
            let (mut zn, mut fn_, mut dfn);
            loop {
                zn = z - step * lam;
                (fn_, dfn) = self.polish.value_and_derivative(zn);
                if fn_.norm() < f.norm() || lam < 1e-6 {
                    break;
                }
                lam *= 0.5;
            }
            let moved = (zn - z).norm();
            z = zn;
            f = fn_;
            df = dfn;
            if moved <= 1e-14 * z.norm().max(1.0) || f.norm() <= self.tol * 1e-4 {
                break;
            }
        }
        let residual = f.norm();
        (residual <= self.tol).then_some((z, residual))
    }

    /// Winding number of a small circle around `z` that excludes every other known zero.
    fn multiplicity(&self, z: Complex64, known: &[Zero]) -> Result<u32> {
        let nearest = known.iter().map(|o| (o.rho() - z).norm()).fold(f64::INFINITY, f64::min);
        let pole = (z - 1.0).norm();
        let r = 1e-3f64.min(0.25 * nearest).min(0.5 * pole);
        let w = circle_winding(&self.polish, z, r, self.tol * 1e-3)?;
        u32::try_from(w).map_err(|_| Error::Inconsistent(format!("circle winding {w} around a located zero")))
    }
}

/// Zero count of `rect` on the default engines.
pub fn winding_count(table: &IntegerTable, fit: &AxiomAFit, rect: &Rectangle, tol: f64) -> Result<i64> {
    ZeroFinder::new(table, *fit, tol, 0)?.count(rect)
}

/// Zeros of `rect` on the default engines, jitter seed 0.
pub fn find_zeros(table: &IntegerTable, fit: &AxiomAFit, rect: &Rectangle, tol: f64) -> Result<ZeroSet> {
    ZeroFinder::new(table, *fit, tol, 0)?.find(rect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{enumerate_integers, fit_axiom_a, KappaMode, PrimeSystem, SystemSpec};
    use crate::zeta::test_support::naturals;

    #[test]
    fn first_three_riemann_zeros() {
        let (tab, fit) = naturals(100_000);
        let rect = Rectangle::new(0.2, 3.0, 10.0, 30.0).unwrap();
        let zs = find_zeros(&tab, &fit, &rect, 1e-9).unwrap();
        let want = [14.134725141734694, 21.022039638771555, 25.01085758014569];
        assert_eq!(zs.zeros.len(), 3);
        for (z, g) in zs.zeros.iter().zip(want) {
            assert!((z.gamma - g).abs() < 1e-5, "{z:?}");
            assert!((z.beta - 0.5).abs() < 1e-5, "{z:?}");
            assert_eq!(z.multiplicity, 1);
            assert!(z.residual <= 1e-9);
        }
        assert_eq!(zs.count, 3);
    }

    #[test]
    fn count_n_rules() {
        let rect = Rectangle::new(0.2, 3.0, -1.0, 30.0).unwrap();
        let mut zs = ZeroSet::empty(rect, 1e-9);
        assert_eq!(count_n(&zs, 0.4, 30.0).unwrap(), 0);
        zs.zeros = vec![
            Zero { beta: 0.5, gamma: -0.5, multiplicity: 1, residual: 0.0 },
            Zero { beta: 0.5, gamma: 0.0, multiplicity: 1, residual: 0.0 },
            Zero { beta: 0.5, gamma: 14.0, multiplicity: 2, residual: 0.0 },
            Zero { beta: 0.7, gamma: 29.0, multiplicity: 1, residual: 0.0 },
        ];
        assert_eq!(count_n(&zs, 0.4, 30.0).unwrap(), 1 + 4 + 2);
        assert_eq!(count_n(&zs, 0.6, 30.0).unwrap(), 2);
        assert_eq!(count_n(&zs, 0.4, 20.0).unwrap(), 5);
        assert!(count_n(&zs, 0.1, 30.0).is_err());
        assert!(count_n(&zs, 0.4, 31.0).is_err());
    }

    #[test]
    fn empty_rectangle_and_strip_check() {
        let (tab, fit) = naturals(5000);
        let zs = find_zeros(&tab, &fit, &Rectangle::new(0.2, 3.0, 5.0, 12.0).unwrap(), 1e-9).unwrap();
        assert!(zs.zeros.is_empty());
        let r = Rectangle::new(0.05, 3.0, 5.0, 12.0).unwrap();
        assert!(matches!(winding_count(&tab, &fit, &r, 1e-9), Err(Error::InvalidRectangle(_))));
    }

    #[test]
    fn perturbed_small_rectangles_are_consistent() {
        let ps = PrimeSystem::build(&SystemSpec::Perturbed { bound: 2000, width: 0.01, seed: 42 }).unwrap();
        let tab = enumerate_integers(&ps, 2000.0, 1 << 20).unwrap();
        let fit = fit_axiom_a(&tab, 0.1, KappaMode::LeastSquares).unwrap();
        let finder = ZeroFinder::new(&tab, fit, 1e-9, 1).unwrap();
        for (lo, hi) in [(12.0, 16.0), (20.0, 26.0)] {
            let rect = Rectangle::new(0.35, 3.0, lo, hi).unwrap();
            let zs = finder.find(&rect).unwrap();
            assert_eq!(zs.total_multiplicity(), finder.count(&zs.rect).unwrap());
            for z in &zs.zeros {
                // conjugate symmetry of the approximant
                assert!(finder.polish_engine().value(z.rho().conj()).norm() <= 1e-9);
            }
        }
    }
}
