use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::zeta::ZetaEngine;

/// Initial boundary sample spacing.
const BASE_STEP: f64 = 0.05;
/// Finest parameter spacing before a rapid phase change is blamed on a nearby zero.
const MIN_STEP: f64 = 1e-12;
pub const JITTER_RETRIES: usize = 5;

/// Closed axis-parallel rectangle `[sigma_lo, sigma_hi] x [t_lo, t_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rectangle {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(sigma_lo < sigma_hi && t_lo < t_hi) || ![sigma_lo, sigma_hi, t_lo, t_hi].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidRectangle(format!("[{sigma_lo}, {sigma_hi}] x [{t_lo}, {t_hi}]")));
        }
        Ok(Self { sigma_lo, sigma_hi, t_lo, t_hi })
    }

    pub fn width(&self) -> f64 {
        self.sigma_hi - self.sigma_lo
    }

    pub fn height(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.sigma_lo + self.sigma_hi), 0.5 * (self.t_lo + self.t_hi))
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.sigma_lo - slack
            && z.re <= self.sigma_hi + slack
            && z.im >= self.t_lo - slack
            && z.im <= self.t_hi + slack
    }

    pub fn covers(&self, other: &Rectangle) -> bool {
        self.sigma_lo <= other.sigma_lo
            && self.sigma_hi >= other.sigma_hi
            && self.t_lo <= other.t_lo
            && self.t_hi >= other.t_hi
    }

    fn pole_inside(&self) -> bool {
        self.sigma_lo < 1.0 && 1.0 < self.sigma_hi && self.t_lo < 0.0 && 0.0 < self.t_hi
    }

    fn pole_on_boundary(&self) -> bool {
        let on_vertical = (self.sigma_lo == 1.0 || self.sigma_hi == 1.0) && self.t_lo <= 0.0 && 0.0 <= self.t_hi;
        let on_horizontal = (self.t_lo == 0.0 || self.t_hi == 0.0) && self.sigma_lo <= 1.0 && 1.0 <= self.sigma_hi;
        on_vertical || on_horizontal
    }

    pub fn with_t_hi(&self, t_hi: f64) -> Self {
        Self { t_hi, ..*self }
    }
}

/// Total change of `arg f` along a closed polygonal or smooth path `u -> z(u)`, `u` in `[0, 1]`.
///
/// The parameter interval is sampled at `n0` points, then each step is bisected until the phase
/// increment is below `pi/2`.
fn phase_change<P: Fn(f64) -> Complex64>(engine: &ZetaEngine, path: P, n0: usize, tol: f64) -> Result<f64> {
    let eval = |u: f64| -> Result<Complex64> {
        let z = path(u);
        let f = engine.value(z);
        let m = f.norm();
        if !(m >= 10.0 * tol) || !m.is_finite() {
            return Err(Error::ZeroNearContour { re: z.re, im: z.im, modulus: m });
        }
        Ok(f)
    };
    let n0 = n0.max(4);
    let mut total = 0.0;
    let mut prev = (0.0, eval(0.0)?);
    for i in 1..=n0 {
        let u = i as f64 / n0 as f64;
        let next = (u, eval(u)?);
        // bisect [prev, next] on a stack
        let mut stack = vec![next];
        while let Some(&(ub, fb)) = stack.last() {
            let (ua, fa) = prev;
            let d = (fb / fa).arg();
            if d.abs() < FRAC_PI_2 {
                total += d;
                prev = (ub, fb);
                stack.pop();
            } else {
                if ub - ua < MIN_STEP {
                    let z = path(ua);
                    return Err(Error::ZeroNearContour { re: z.re, im: z.im, modulus: fa.norm().min(fb.norm()) });
                }
                let um = 0.5 * (ua + ub);
                stack.push((um, eval(um)?));
            }
        }
    }
    Ok(total)
}

fn rounded_winding(total: f64) -> Result<i64> {
    let w = total / TAU;
    let r = w.round();
    if (w - r).abs() > 0.1 {
        return Err(Error::Inconsistent(format!("non-integral winding {w}")));
    }
    Ok(r as i64)
}

/// Winding number of the approximant around the boundary of `rect`, without pole correction.
pub fn rect_winding(engine: &ZetaEngine, rect: &Rectangle, tol: f64) -> Result<i64> {
    if rect.pole_on_boundary() {
        return Err(Error::InvalidRectangle("pole s = 1 lies on the boundary".into()));
    }
    let Rectangle { sigma_lo: a, sigma_hi: b, t_lo: c, t_hi: d } = *rect;
    let corners = [Complex64::new(a, c), Complex64::new(b, c), Complex64::new(b, d), Complex64::new(a, d)];
    let mut total = 0.0;
    for k in 0..4 {
        let (z0, z1) = (corners[k], corners[(k + 1) % 4]);
        let n = ((z1 - z0).norm() / BASE_STEP).ceil() as usize;
        total += phase_change(engine, |u| z0 + (z1 - z0) * u, n, tol)?;
    }
    rounded_winding(total)
}

/// Zeros minus poles of the approximant inside the circle `|s - center| = radius`.
pub fn circle_winding(engine: &ZetaEngine, center: Complex64, radius: f64, tol: f64) -> Result<i64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("circle radius {radius} must be positive")));
    }
    if ((center - 1.0).norm() - radius).abs() < 1e-12 {
        return Err(Error::InvalidRectangle("pole s = 1 lies on the circle".into()));
    }
    let n = ((TAU * radius / BASE_STEP).ceil() as usize).max(32);
    let total = phase_change(engine, |u| center + Complex64::from_polar(radius, TAU * u), n, tol)?;
    rounded_winding(total)
}

/// Number of zeros in `rect`, counted with multiplicity: winding number plus one if the pole at
/// `s = 1` is enclosed.
pub fn zero_count(engine: &ZetaEngine, rect: &Rectangle, tol: f64) -> Result<i64> {
    let w = rect_winding(engine, rect, tol)?;
    Ok(w + i64::from(rect.pole_inside()))
}

/// Deterministic offsets in `[0.01, 0.1]` for moving a contour off a zero.
pub fn jitter_sequence(seed: u64) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || rng.gen_range(0.01..=0.1))
}

/// Runs `f` on `rect`, moving `t_hi` up by seeded jitter after each zero-near-contour failure.
pub fn with_jitter<T>(
    rect: &Rectangle,
    seed: u64,
    mut f: impl FnMut(&Rectangle) -> Result<T>,
) -> Result<(Rectangle, T)> {
    let mut current = *rect;
    let mut offsets = jitter_sequence(seed);
    let mut attempt = 0;
    loop {
        match f(&current) {
            Ok(v) => return Ok((current, v)),
            Err(e @ Error::ZeroNearContour { .. }) => {
                if attempt == JITTER_RETRIES {
                    return Err(e);
                }
                attempt += 1;
                current = rect.with_t_hi(rect.t_hi + offsets.next().expect("infinite sequence"));
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::test_support::naturals;

    #[test]
    fn counts_known_zeros() {
        let (tab, fit) = naturals(20_000);
        let e = ZetaEngine::best(&tab, fit).unwrap();
        let r = |a, b, c, d| Rectangle::new(a, b, c, d).unwrap();
        assert_eq!(zero_count(&e, &r(0.2, 3.0, 5.0, 12.0), 1e-10).unwrap(), 0);
        assert_eq!(zero_count(&e, &r(0.2, 3.0, 13.0, 22.0), 1e-10).unwrap(), 2);
        // pole enclosed, no zeros: winding -1 corrected to 0
        assert_eq!(rect_winding(&e, &r(0.2, 3.0, -1.0, 1.0), 1e-10).unwrap(), -1);
        assert_eq!(zero_count(&e, &r(0.2, 3.0, -1.0, 1.0), 1e-10).unwrap(), 0);
        assert_eq!(circle_winding(&e, Complex64::new(1.0, 0.0), 0.45, 1e-10).unwrap(), -1);
        assert_eq!(circle_winding(&e, Complex64::new(0.5, 14.134725), 0.01, 1e-10).unwrap(), 1);
    }

    #[test]
    fn boundary_failures() {
        let (tab, fit) = naturals(20_000);
        let e = ZetaEngine::best(&tab, fit).unwrap();
        let through_pole = Rectangle::new(1.0, 3.0, -1.0, 1.0).unwrap();
        assert!(matches!(zero_count(&e, &through_pole, 1e-10), Err(Error::InvalidRectangle(_))));
        // top edge through the first zero of the approximant
        let mut z = Complex64::new(0.5, 14.134725141734694);
        for _ in 0..8 {
            let (v, d) = e.value_and_derivative(z);
            z -= v / d;
        }
        let hit = Rectangle::new(0.2, 3.0, 10.0, z.im).unwrap();
        assert!(matches!(zero_count(&e, &hit, 1e-6), Err(Error::ZeroNearContour { .. })));
        let (moved, n) = with_jitter(&hit, 7, |r| zero_count(&e, r, 1e-6)).unwrap();
        assert_eq!(n, 1);
        assert!(moved.t_hi - hit.t_hi >= 0.01 && moved.t_hi - hit.t_hi <= 0.1);
        assert!(Rectangle::new(1.0, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn jitter_is_seeded() {
        let a: Vec<f64> = jitter_sequence(3).take(5).collect();
        let b: Vec<f64> = jitter_sequence(3).take(5).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| (0.01..=0.1).contains(&x)));
    }
}
