//! Grid verification of the explicit bounds on zeta, its partial sums and their remainders.
//!
//! Every check is stated as `lhs <= rhs`. A row passes when `rhs - lhs >= -(radius + slack)`,
//! where `radius` is the truncation radius of the continued values involved and `slack` a relative
//! floating-point allowance of `1e-12`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;
use crate::fmt::{Num, OptNum};
use crate::zeros::contour::circle_winding;

use super::engine::{zeta_partial, ZetaEngine};
use super::growth::ModulusScan;

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub lemma_id: &'static str,
    pub sigma: f64,
    pub t: Option<f64>,
    pub x: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub radius: f64,
    pub status: Status,
}

/// Evaluation grid. `m_step` is the sampling step for the maximum-modulus check.
#[derive(Debug, Clone, PartialEq)]
pub struct StripGrid {
    pub sigmas: Vec<f64>,
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub m_step: f64,
}

impl StripGrid {
    /// `sigma` from `theta + 0.05` in steps of 0.1 up to 0.95, then 1.05, 2, 3.
    pub fn standard(theta: f64) -> Self {
        let mut sigmas = Vec::new();
        let mut k = 0;
        loop {
            let s = theta + 0.05 + 0.1 * k as f64;
            if s > 0.95 + 1e-9 {
                break;
            }
            sigmas.push((s * 1e9).round() / 1e9);
            k += 1;
        }
        sigmas.extend([1.05, 2.0, 3.0]);
        Self { sigmas, ts: vec![0.0, 2.0, 5.0, 10.0, 30.0], xs: vec![2.0, 10.0, 100.0, 1000.0], m_step: 0.05 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LemmaReport {
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn checked(&self) -> usize {
        self.rows.iter().filter(|r| r.status != Status::Skipped).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "lemma_id,sigma,t,X,lhs,rhs,margin,status")?;
        for r in &self.rows {
            if r.status == Status::Skipped {
                writeln!(w, "{},{},{},{},,,,skipped", r.lemma_id, Num(r.sigma), OptNum(r.t), OptNum(r.x))?;
            } else {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r.lemma_id,
                    Num(r.sigma),
                    OptNum(r.t),
                    OptNum(r.x),
                    Num(r.lhs),
                    Num(r.rhs),
                    Num(r.margin),
                    r.status.as_str()
                )?;
            }
        }
        Ok(())
    }
}

struct Rows<'r> {
    out: &'r mut Vec<LemmaRow>,
    sigma: f64,
    t: Option<f64>,
    x: Option<f64>,
}

impl Rows<'_> {
    fn check(&mut self, id: &'static str, ok: bool, f: impl FnOnce() -> Option<(f64, f64, f64)>) {
        let row = |lhs, rhs, radius, status| LemmaRow {
            lemma_id: id,
            sigma: self.sigma,
            t: self.t,
            x: self.x,
            lhs,
            rhs,
            margin: rhs - lhs,
            radius,
            status,
        };
        let r = match ok.then(f).flatten() {
            None => row(f64::NAN, f64::NAN, f64::NAN, Status::Skipped),
            Some((lhs, rhs, radius)) => {
                let slack = radius + SLACK * lhs.abs().max(rhs.abs()).max(1.0);
                let pass = rhs - lhs >= -slack;
                row(lhs, rhs, radius, if pass { Status::Pass } else { Status::Fail })
            }
        };
        self.out.push(r);
    }
}

/// Evaluates every bound on `grid` against `engine`, which supplies both the continuation and the
/// constants `(kappa, A, theta)`.
pub fn verify_lemma_bounds(engine: &ZetaEngine, grid: &StripGrid, tol: f64) -> Result<LemmaReport> {
    let fit = *engine.fit();
    let table = engine.table();
    let (a, k, th) = (fit.a, fit.kappa, fit.theta);
    let cap = table.norm_cap();
    let mut out = Vec::new();
    let cz = |s: Complex64| engine.zeta(s).ok();

    for &sigma in &grid.sigmas {
        let strip = sigma > th && sigma < 1.0;
        let zsig = if sigma > th { cz(Complex64::new(sigma, 0.0)) } else { None };
        let scan = if strip {
            let t_top = grid.ts.iter().copied().fold(2.0, f64::max);
            Some(ModulusScan::new(engine, sigma, t_top, grid.m_step)?)
        } else {
            None
        };

        // bounds without t
        for &x in &grid.xs {
            let mut r = Rows { out: &mut out, sigma, t: None, x: Some(x) };
            let in_table = x <= cap && x >= 1.0;
            let zx_sig = || zeta_partial(table, Complex64::new(sigma, 0.0), x).ok().map(|v| v.re);
            r.check("partial_sum_real", in_table && sigma > th, || {
                let lhs = zx_sig()?;
                let d = sigma - th;
                let rhs = if sigma < 1.0 {
                    let p = x.powf(1.0 - sigma);
                    (k * p / (1.0 - sigma) + a / d).min(k * p * x.ln() + a / d)
                } else if sigma == 1.0 {
                    k * x.ln() + a / (1.0 - th)
                } else {
                    (sigma * (a + k) / (sigma - 1.0)).min(k * x.ln() + sigma * a / d)
                };
                Some((lhs, rhs, 0.0))
            });
            r.check("partial_sum_logfree", in_table && sigma > 0.0 && sigma < 1.0, || {
                Some((zx_sig()?, (a + k) / (1.0 - sigma) * x.powf(1.0 - sigma), 0.0))
            });
            r.check("partial_sum_log", in_table && strip, || {
                Some((zx_sig()?, (a + k) / (sigma - th) * x.powf(1.0 - sigma) * x.ln(), 0.0))
            });
        }

        // bounds without X
        for &t in &grid.ts {
            let s = Complex64::new(sigma, t);
            let zs = cz(s);
            let mut r = Rows { out: &mut out, sigma, t: Some(t), x: None };
            let right = sigma > 1.0;
            r.check("halfplane_upper", right, || {
                let (z, zr) = (zs?, zsig?);
                Some((z.value.norm(), zr.value.re, z.radius + zr.radius))
            });
            r.check("halfplane_upper_explicit", right, || {
                let zr = zsig?;
                Some((zr.value.re, (a + k) * sigma / (sigma - 1.0), zr.radius))
            });
            let recip_radius = |zr: f64, rad: f64| if zr > rad { rad / (zr * (zr - rad)) } else { f64::INFINITY };
            r.check("halfplane_lower", right, || {
                let (z, zr) = (zs?, zsig?);
                Some((1.0 / zr.value.re, z.value.norm(), z.radius + recip_radius(zr.value.re, zr.radius)))
            });
            r.check("halfplane_lower_explicit", right, || {
                let zr = zsig?;
                Some(((sigma - 1.0) / ((a + k) * sigma), 1.0 / zr.value.re, recip_radius(zr.value.re, zr.radius)))
            });
            r.check("pole_removed", sigma > th, || {
                let z = zs?;
                Some(((z.value - k / (s - 1.0)).norm(), a * s.norm() / (sigma - th), z.radius))
            });
            r.check("large_t", sigma > th && sigma <= t.abs(), || {
                let z = zs?;
                Some((z.value.norm(), 2f64.sqrt() * (a + k) * t.abs() / (sigma - th), z.radius))
            });
            let sm1 = (s - 1.0).norm();
            r.check("near_pole", sigma > th, || {
                let z = zs?;
                Some(((z.value * (s - 1.0) - k).norm(), a * s.norm() * sm1 / (sigma - th), z.radius * sm1))
            });
            r.check("near_pole_const", sigma > th && sigma <= 4.0 && t.abs() <= 9.0, || {
                let z = zs?;
                Some(((z.value * (s - 1.0) - k).norm(), 100.0 * a / (sigma - th), z.radius * sm1))
            });
            let grow = (t.max(1.0)).powf((1.0 - sigma) / (1.0 - th));
            r.check("strip_growth", strip && t >= 2.0, || {
                let z = zs?;
                Some((z.value.norm(), (2.0 * a + k) * (1.0 - th) / ((1.0 - sigma) * (sigma - th)) * grow, z.radius))
            });
            r.check("strip_growth_log", strip && t >= 2.0, || {
                let z = zs?;
                Some((z.value.norm(), (4.0 * a + 3.0 * k) / ((sigma - th) * (1.0 - th)) * grow * t.ln(), z.radius))
            });
            r.check("max_modulus", strip && t >= 2.0, || {
                let (value, argmax) = scan.as_ref()?.max_upto(engine, t);
                let rhs = super::growth::max_modulus_rhs(&fit, sigma, t);
                Some((value, rhs, engine.radius(Complex64::new(sigma, argmax))))
            });

            // bounds with both t and X
            for &x in &grid.xs {
                let mut r = Rows { out: &mut out, sigma, t: Some(t), x: Some(x) };
                let in_table = x <= cap && x >= 1.0;
                let zx = if in_table { zeta_partial(table, s, x).ok() } else { None };
                let zx_sig = || zeta_partial(table, Complex64::new(sigma, 0.0), x).ok().map(|v| v.re);
                let xp = x.powf(1.0 - s.re);
                let xth = x.powf(th - sigma);
                let x1s = ((1.0 - s) * x.ln()).exp();
                r.check("partial_sum_abs", in_table && sigma > th, || Some((zx?.norm(), zx_sig()?, 0.0)));
                r.check("tail_remainder", in_table && sigma > th, || {
                    let z = zs?;
                    let lhs = (z.value - zx? - k * x1s / (s - 1.0)).norm();
                    Some((lhs, a * (s.norm() + sigma - th) / (sigma - th) * xth, z.radius))
                });
                r.check("head_remainder", in_table && sigma > th && (s - 1.0).norm() > 0.0, || {
                    let lhs = (zx? - k * (1.0 - x1s) / (s - 1.0)).norm();
                    Some((lhs, a * (s.norm() * (1.0 - xth) / (sigma - th) + xth), 0.0))
                });
                let trunc = in_table && strip && t >= 2.0 && x >= 2.0;
                r.check("truncation_strip", trunc, || {
                    let z = zs?;
                    let lhs = (z.value - zx?).norm();
                    Some((lhs, (k * xp / t + 2.0 * a * t * xth) / (sigma - th), z.radius))
                });
                r.check("truncation_strip_sym", trunc, || {
                    let z = zs?;
                    let lhs = (z.value - zx?).norm();
                    Some((lhs, (2.0 * a + k) / (sigma - th) * (xp / t + t * xth), z.radius))
                });
                r.check("partial_sum_strip", trunc, || {
                    let lhs = zx?.norm();
                    let logfree = (2.0 * a + k) * (1.0 - th) / ((1.0 - sigma) * (sigma - th)) * grow;
                    let with_log = (4.0 * a + 3.0 * k) / ((sigma - th) * (1.0 - th)) * grow * t.ln();
                    let rhs = logfree.min(with_log) + (2.0 * a + k) / (sigma - th) * (xp / t + t * xth);
                    Some((lhs, rhs, 0.0))
                });
            }
        }
    }

    // no zero in the disc |s - 1| <= kappa (1 - theta)/(A + kappa)
    // a grid left empty by the hypotheses stays empty
    let grid_checked = out.iter().any(|row| row.status != Status::Skipped);
    let radius = k * (1.0 - th) / (a + k);
    let mut r = Rows { out: &mut out, sigma: 1.0, t: Some(0.0), x: None };
    let zeros = circle_winding(engine, Complex64::new(1.0, 0.0), radius, tol).map(|w| w + 1);
    r.check("pole_free_disc", grid_checked, || match zeros {
        Ok(n) => Some((n as f64, 0.0, 0.0)),
        // a zero on the circle itself lies in the closed disc
        Err(_) => Some((1.0, 0.0, 0.0)),
    });
    Ok(LemmaReport { rows: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::engine::tests::naturals;

    #[test]
    fn standard_grid() {
        let g = StripGrid::standard(0.1);
        assert_eq!(g.sigmas, vec![0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95, 1.05, 2.0, 3.0]);
        let g = StripGrid::standard(0.5);
        assert_eq!(g.sigmas, vec![0.55, 0.65, 0.75, 0.85, 0.95, 1.05, 2.0, 3.0]);
    }

    #[test]
    fn naturals_pass_and_halved_amplitude_fails() {
        let (tab, fit) = naturals(20_000);
        let grid = StripGrid { sigmas: vec![0.5, 2.0], ts: vec![0.0, 2.0, 10.0], xs: vec![10.0, 100.0], m_step: 0.05 };
        let e = ZetaEngine::best(&tab, fit).unwrap();
        let rep = verify_lemma_bounds(&e, &grid, 1e-10).unwrap();
        let bad: Vec<_> = rep.failures().collect();
        assert!(bad.is_empty(), "{bad:?}");
        let row = rep
            .rows
            .iter()
            .find(|r| r.lemma_id == "halfplane_upper_explicit" && r.sigma == 2.0 && r.t == Some(0.0))
            .unwrap();
        assert!((row.margin - (4.0 - 1.6449340668482264)).abs() < 1e-6);

        let half = ZetaEngine::best(&tab, fit.with_amplitude(fit.a / 2.0)).unwrap();
        let rep = verify_lemma_bounds(&half, &grid, 1e-10).unwrap();
        let row = rep.rows.iter().find(|r| r.lemma_id == "pole_removed" && r.sigma == 2.0 && r.t == Some(0.0)).unwrap();
        assert_eq!(row.status, Status::Fail);
        assert!((row.lhs - 0.6449340668482264).abs() < 1e-6);
        assert!((row.rhs - 1.0 / 1.9).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let rep = LemmaReport {
            rows: vec![
                LemmaRow {
                    lemma_id: "pole_removed",
                    sigma: 2.0,
                    t: Some(0.0),
                    x: None,
                    lhs: 0.5,
                    rhs: 1.0,
                    margin: 0.5,
                    radius: 0.0,
                    status: Status::Pass,
                },
                LemmaRow {
                    lemma_id: "large_t",
                    sigma: 2.0,
                    t: Some(0.0),
                    x: None,
                    lhs: f64::NAN,
                    rhs: f64::NAN,
                    margin: f64::NAN,
                    radius: f64::NAN,
                    status: Status::Skipped,
                },
            ],
        };
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "lemma_id,sigma,t,X,lhs,rhs,margin,status\npole_removed,2,0,,0.5,1,0.5,pass\nlarge_t,2,0,,,,,skipped\n"
        );
        assert_eq!(rep.checked(), 1);
    }
}
