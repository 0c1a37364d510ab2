use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmt::{Num, OptNum};
use crate::pnt::{curve_rows, write_curve_csv, EtaFunction, OmegaCurve};
use crate::semigroup::{
    cache, enumerate_integers, fit_axiom_a, parse_system_spec, AxiomAFit, IntegerTable, KappaMode, PrimeSystem,
};
use crate::zeros::{
    compute_thresholds, count_n, density_rhs, detector_i, halasz_probe, littlewood_bound, threshold_t2_ln,
    DetectionMode, DetectionParams, Rectangle, SeparatedZeroSet, ThresholdSet, ZeroFinder,
};
use crate::zeta::{verify_lemma_bounds, StripGrid, ZetaEngine};

use super::config::{KappaSetting, RunConfig};
use super::{Common, Outcome};

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Right edge of zero searches; no zeros lie right of `Re s = 1`.
const SEARCH_SIGMA_HI: f64 = 1.5;
/// Tables larger than this get a cheaper fixed window for contour work.
const CONTOUR_CAP: f64 = 1e5;

#[derive(Clone, Copy)]
enum TolKind {
    Zeta,
    Zeros,
    Quadrature,
    Omega,
}

struct Context {
    cfg: RunConfig,
    system_text: Option<String>,
    output: Option<PathBuf>,
    command: &'static str,
}

impl Context {
    fn new(common: &Common, command: &'static str, tol_kind: TolKind) -> Result<Self> {
        let mut cfg = match &common.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &common.system {
            cfg.system = Some(s.clone());
        }
        if let Some(t) = common.theta {
            cfg.theta = t;
        }
        if let Some(k) = &common.kappa {
            cfg.kappa = KappaSetting::parse(k)?;
        }
        if let Some(n) = common.norm_cap {
            cfg.norm_cap = n;
        }
        if let Some(n) = common.entry_cap {
            cfg.entry_cap = n;
        }
        if let Some(d) = &common.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(s) = common.seed {
            cfg.seed = s;
        }
        if let Some(t) = common.tol {
            let tols = &mut cfg.tolerances;
            match tol_kind {
                TolKind::Zeta => tols.zeta = t,
                TolKind::Zeros => tols.zeros = t,
                TolKind::Quadrature => tols.quadrature = t,
                TolKind::Omega => tols.omega = t,
            }
        }
        cfg.validate()?;
        let system_text = cfg.system.as_ref().map(std::fs::read_to_string).transpose()?;
        Ok(Self { cfg, system_text, output: common.output.clone(), command })
    }

    fn system(&self) -> Result<(PrimeSystem, &Path)> {
        let (Some(path), Some(text)) = (&self.cfg.system, &self.system_text) else {
            return Err(Error::InvalidInput("no prime system given (--system or `system` in the config)".into()));
        };
        Ok((PrimeSystem::build(&parse_system_spec(text, path)?)?, path))
    }

    /// Table from the cache when it matches, otherwise enumerated and cached.
    fn table(&self) -> Result<IntegerTable> {
        let (system, _) = self.system()?;
        let (cap, entry_cap) = (self.cfg.norm_cap, self.cfg.entry_cap);
        let path = self.cfg.cache_dir().join(cache::file_name(&system, cap));
        if path.exists() {
            match cache::load(&path, &system, cap, entry_cap) {
                Ok(t) => return Ok(t),
                Err(e @ Error::Overflow { .. }) => return Err(e),
                Err(e) => eprintln!("warning: cache {} unusable ({e}); rebuilding", path.display()),
            }
        }
        let table = enumerate_integers(&system, cap, entry_cap)?;
        if let Err(e) = cache::save(&path, &table) {
            eprintln!("warning: could not write cache {}: {e}", path.display());
        }
        Ok(table)
    }

    fn fit(&self, table: &IntegerTable) -> Result<AxiomAFit> {
        fit_axiom_a(table, self.cfg.theta, self.cfg.kappa.mode())
    }

    fn header(&self, fit: Option<&AxiomAFit>, flags: &[(&str, String)]) -> String {
        let mut h = String::new();
        let cfg = &self.cfg;
        let _ = writeln!(h, "# beurzeta {VERSION}");
        let _ = writeln!(h, "# command: {}", self.command);
        let _ = writeln!(h, "# config_sha256: {}", cfg.hash(self.system_text.as_deref()));
        let sys = cfg.system.as_ref().map_or("none".to_string(), |p| p.display().to_string());
        let _ = writeln!(h, "# system: {sys}");
        match fit {
            Some(f) => {
                let mode = match f.kappa_mode {
                    KappaMode::Supplied(_) => "supplied",
                    KappaMode::LeastSquares => "least-squares",
                };
                let _ = writeln!(
                    h,
                    "# fit: kappa={} A={} theta={} kappa_mode={mode}",
                    Num(f.kappa),
                    Num(f.a),
                    Num(f.theta)
                );
            }
            None => {
                let _ = writeln!(h, "# fit: none");
            }
        }
        let t = &cfg.tolerances;
        let _ = writeln!(
            h,
            "# config: norm_cap={} entry_cap={} seed={} tol_zeta={} tol_zeros={} tol_quadrature={} tol_omega={}",
            Num(cfg.norm_cap),
            cfg.entry_cap,
            cfg.seed,
            Num(t.zeta),
            Num(t.zeros),
            Num(t.quadrature),
            Num(t.omega)
        );
        for (k, v) in flags {
            let _ = writeln!(h, "# flag: {k}={v}");
        }
        h
    }

    fn write(&self, header: &str, body: &[u8]) -> Result<PathBuf> {
        let path = self.output.clone().unwrap_or_else(|| self.cfg.out_dir.join(format!("{}.csv", self.command)));
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut bytes = header.as_bytes().to_vec();
        bytes.extend_from_slice(body);
        std::fs::write(&path, bytes)?;
        Ok(path)
    }
}

fn contour_engine<'a>(table: &'a IntegerTable, fit: AxiomAFit) -> Result<ZetaEngine<'a>> {
    if table.norm_cap() > CONTOUR_CAP {
        ZetaEngine::new(table, fit, 0.5 * CONTOUR_CAP, CONTOUR_CAP)
    } else {
        ZetaEngine::best(table, fit)
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| Num(*x).to_string()).collect::<Vec<_>>().join(" ")
}

pub(super) fn enumerate(common: &Common) -> Result<Outcome> {
    let ctx = Context::new(common, "enumerate", TolKind::Zeta)?;
    let table = ctx.table()?;
    let fit = ctx.fit(&table)?;
    let cap = table.norm_cap();
    let rows = [
        ("norm_cap", Num(cap).to_string()),
        ("entries", table.len().to_string()),
        ("N", table.counting(cap)?.to_string()),
        ("psi", Num(table.psi(cap)?).to_string()),
        ("kappa", Num(fit.kappa).to_string()),
        ("A", Num(fit.a).to_string()),
        ("theta", Num(fit.theta).to_string()),
        ("possibly_incomplete", table.possibly_incomplete().to_string()),
    ];
    let mut body = String::from("quantity,value\n");
    for (k, v) in &rows {
        let _ = writeln!(body, "{k},{v}");
        println!("{k} = {v}");
    }
    ctx.write(&ctx.header(Some(&fit), &[]), body.as_bytes())?;
    Ok(Outcome::Ok)
}

pub(super) fn verify(
    common: &Common,
    sigmas: Option<Vec<f64>>,
    ts: Option<Vec<f64>>,
    xs: Option<Vec<f64>>,
    m_step: Option<f64>,
    a_scale: f64,
) -> Result<Outcome> {
    let ctx = Context::new(common, "verify", TolKind::Zeta)?;
    if !(a_scale > 0.0) {
        return Err(Error::InvalidInput(format!("a-scale = {a_scale} must be positive")));
    }
    let table = ctx.table()?;
    let fitted = ctx.fit(&table)?;
    let fit = fitted.with_amplitude(fitted.a * a_scale);
    let mut grid = StripGrid::standard(fit.theta);
    grid.sigmas = sigmas.unwrap_or(grid.sigmas);
    grid.ts = ts.unwrap_or(grid.ts);
    grid.xs = xs.unwrap_or(grid.xs);
    grid.m_step = m_step.unwrap_or(grid.m_step);
    let engine = ZetaEngine::best(&table, fit)?;
    let report = verify_lemma_bounds(&engine, &grid, ctx.cfg.tolerances.zeta)?;
    let mut body = Vec::new();
    report.write_csv(&mut body)?;
    let flags = [
        ("sigmas", list(&grid.sigmas)),
        ("ts", list(&grid.ts)),
        ("xs", list(&grid.xs)),
        ("m_step", Num(grid.m_step).to_string()),
        ("a_scale", Num(a_scale).to_string()),
    ];
    ctx.write(&ctx.header(Some(&fit), &flags), &body)?;
    let failures = report.failures().count();
    println!("checked {} rows, {failures} failures", report.checked());
    if report.checked() == 0 {
        return Ok(Outcome::Empty("nothing checked".into()));
    }
    if failures > 0 {
        let ids: Vec<&str> = report.failures().map(|r| r.lemma_id).collect();
        return Ok(Outcome::Failed(format!("{failures} rows failed: {}", ids.join(" "))));
    }
    Ok(Outcome::Ok)
}

pub(super) fn zeros(common: &Common, rect: &[f64]) -> Result<Outcome> {
    let ctx = Context::new(common, "zeros", TolKind::Zeros)?;
    let rect = Rectangle::new(rect[0], rect[1], rect[2], rect[3])?;
    let table = ctx.table()?;
    let fit = ctx.fit(&table)?;
    let finder = ZeroFinder::new(&table, fit, ctx.cfg.tolerances.zeros, ctx.cfg.seed)?;
    let zs = finder.find(&rect)?;
    let mut body = Vec::new();
    zs.write_csv(&mut body)?;
    let r = zs.rect;
    let flags = [
        ("rect", list(&[rect.sigma_lo, rect.sigma_hi, rect.t_lo, rect.t_hi])),
        ("searched_rect", list(&[r.sigma_lo, r.sigma_hi, r.t_lo, r.t_hi])),
        ("count", zs.count.to_string()),
    ];
    ctx.write(&ctx.header(Some(&fit), &flags), &body)?;
    println!("{} zeros, winding count {}", zs.zeros.len(), zs.count);
    Ok(Outcome::Ok)
}

pub(super) fn density(common: &Common, sigmas: &[f64], ts: &[f64]) -> Result<Outcome> {
    let ctx = Context::new(common, "density", TolKind::Zeros)?;
    let table = ctx.table()?;
    let fit = ctx.fit(&table)?;
    if sigmas.is_empty() || ts.is_empty() {
        return Ok(Outcome::Empty("no (sigma, T) pairs".into()));
    }
    let b_min = sigmas.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(b_min > fit.theta && sigmas.iter().all(|s| *s < 1.0)) {
        return Err(Error::InvalidInput(format!("sigma values must lie in ({}, 1)", fit.theta)));
    }
    let rect = Rectangle::new(b_min, SEARCH_SIGMA_HI, -1.0, t_max)?;
    let finder = ZeroFinder::new(&table, fit, ctx.cfg.tolerances.zeros, ctx.cfg.seed)?;
    let zs = finder.find(&rect)?;
    let mut body = String::from("sigma,T,count,littlewood_rhs,density_rhs,below_threshold\n");
    let mut failed = Vec::new();
    for &b in sigmas {
        let below = compute_thresholds(&fit, 1.0 - b).ok();
        for &t in ts {
            let count = count_n(&zs, b, t)?;
            let lw = littlewood_bound(&fit, b, t).ok();
            let dr = density_rhs(&fit, b, t).ok();
            for (name, bound) in [("littlewood", lw), ("density", dr)] {
                if bound.is_some_and(|v| count as f64 > v) {
                    failed.push(format!("{name} at sigma={b} T={t}"));
                }
            }
            let below = below.map_or(String::new(), |ts| ts.below(t).to_string());
            let _ = writeln!(body, "{},{},{count},{},{},{below}", Num(b), Num(t), OptNum(lw), OptNum(dr));
        }
    }
    let flags = [
        ("sigma", list(sigmas)),
        ("T", list(ts)),
        ("search_rect", list(&[zs.rect.sigma_lo, zs.rect.sigma_hi, zs.rect.t_lo, zs.rect.t_hi])),
    ];
    ctx.write(&ctx.header(Some(&fit), &flags), body.as_bytes())?;
    print!("{body}");
    if failed.is_empty() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed(failed.join("; ")))
    }
}

pub(super) fn detect(
    common: &Common,
    sigma: f64,
    l: f64,
    y: Option<f64>,
    theorem_t: Option<f64>,
    rho: &[f64],
    m_samples: usize,
) -> Result<Outcome> {
    let ctx = Context::new(common, "detect", TolKind::Quadrature)?;
    let table = ctx.table()?;
    let fit = ctx.fit(&table)?;
    let params = match theorem_t {
        Some(t) => DetectionParams::theorem(&fit, sigma, t)?,
        None => DetectionParams::detector(&fit, sigma, l, y.unwrap_or(3f64.exp()))?,
    };
    let rhos: Vec<Complex64> = rho.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    if rhos.is_empty() {
        return Ok(Outcome::Empty("no --rho points given".into()));
    }
    let ts = compute_thresholds(&fit, params.eta)?;
    let ln_t2 = threshold_t2_ln(&fit, params.sigma, params.xi, params.x)?;
    let tol = ctx.cfg.tolerances.quadrature;
    let status = |ok: bool| if ok { "asserted" } else { "diagnostic" };
    let mut failed = Vec::new();
    let mut body = String::from(
        "kind,beta,gamma,value_re,value_im,radius,tail_bound,tau,max_abs_s,alpha_re,alpha_im,threshold,exceeds,status\n",
    );
    for r in &rhos {
        let d = detector_i(&table, &fit, *r, &params, tol)?;
        let v = d.value;
        if d.preconditions_met && (v.value - 1.0).norm() > 0.2 + v.radius + d.tail_bound {
            failed.push(format!("detector at {r}"));
        }
        let _ = writeln!(
            body,
            "detector,{},{},{},{},{},{},,,,,,,{}",
            Num(r.re),
            Num(r.im),
            Num(v.value.re),
            Num(v.value.im),
            Num(v.radius),
            Num(d.tail_bound),
            status(d.preconditions_met)
        );
    }
    let engine = contour_engine(&table, fit)?;
    let mut szs = SeparatedZeroSet::diagnostic(rhos, params.l, params.t);
    let probe = halasz_probe(&engine, &mut szs, &params, m_samples)?;
    for row in &probe.rows {
        if probe.preconditions_met && !row.exceeds {
            failed.push(format!("probe at {}", row.rho));
        }
        let _ = writeln!(
            body,
            "probe,{},{},,,,,{},{},{},{},{},{},{}",
            Num(row.rho.re),
            Num(row.rho.im),
            Num(row.tau),
            Num(row.max_abs),
            Num(row.alpha.re),
            Num(row.alpha.im),
            Num(row.threshold),
            row.exceeds,
            status(probe.preconditions_met)
        );
    }
    let mode = match params.mode {
        DetectionMode::Detector => "detector",
        DetectionMode::Theorem => "theorem",
    };
    let mut flags = vec![
        ("mode", mode.to_string()),
        ("sigma", Num(params.sigma).to_string()),
        ("eta", Num(params.eta).to_string()),
        ("delta", Num(params.delta).to_string()),
        ("xi", Num(params.xi).to_string()),
        ("L", Num(params.l).to_string()),
        ("T", Num(params.t).to_string()),
        ("X", Num(params.x).to_string()),
        ("Y", Num(params.y).to_string()),
        ("D", Num(params.d).to_string()),
        ("M", Num(probe.m).to_string()),
        ("M_step", Num(probe.m_step).to_string()),
        ("M_samples", probe.m_samples.to_string()),
        ("rho", list(rho)),
    ];
    for (name, ln) in ts.entries() {
        flags.push((name, format!("2^{}", Num(ThresholdSet::log2(ln)))));
    }
    flags.push(("T2", format!("2^{}", Num(ThresholdSet::log2(ln_t2)))));
    flags.push(("thresholds_met", params.thresholds_met(&fit).to_string()));
    ctx.write(&ctx.header(Some(&fit), &flags), body.as_bytes())?;
    print!("{body}");
    if failed.is_empty() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed(failed.join("; ")))
    }
}

fn read_eta_table(path: &Path) -> Result<EtaFunction> {
    let text = std::fs::read_to_string(path)?;
    let mut knots = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err =
            || Error::Parse { path: path.to_path_buf(), line: i + 1, msg: format!("expected `t eta`, got `{line}`") };
        let mut w = line.split_whitespace().map(str::parse::<f64>);
        match (w.next(), w.next(), w.next()) {
            (Some(Ok(t)), Some(Ok(e)), None) => knots.push((t, e)),
            _ => return Err(err()),
        }
    }
    EtaFunction::table(knots)
}

pub(super) fn omega(common: &Common, eta: &[String], xs: &[f64], log_xs: &[f64], eps: f64) -> Result<Outcome> {
    let ctx = Context::new(common, "omega", TolKind::Omega)?;
    let param = |s: &str| s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad eta parameter `{s}`")));
    let eta_fn = match eta[0].as_str() {
        "constant" => EtaFunction::constant(param(&eta[1])?)?,
        "c-over-log" => EtaFunction::c_over_log(param(&eta[1])?)?,
        "table" => read_eta_table(Path::new(&eta[1]))?,
        k => return Err(Error::InvalidInput(format!("unknown eta kind `{k}`"))),
    };
    if let Some(bad) = xs.iter().find(|x| !(**x > 1.0)) {
        return Err(Error::InvalidInput(format!("x = {bad} must exceed 1")));
    }
    if xs.is_empty() && log_xs.is_empty() {
        return Ok(Outcome::Empty("no x values given".into()));
    }
    let curve = OmegaCurve::sampled(eta_fn, xs, log_xs, ctx.cfg.tolerances.omega)?;
    let (table, fit) = if ctx.cfg.system.is_some() {
        let t = ctx.table()?;
        let f = ctx.fit(&t)?;
        (Some(t), Some(f))
    } else {
        (None, None)
    };
    let rows = curve_rows(&curve, table.as_ref(), eps)?;
    let mut body = Vec::new();
    write_curve_csv(&mut body, &rows)?;
    let flags = [
        ("eta", format!("{} {}", eta[0], eta[1])),
        ("x", list(xs)),
        ("log_x", list(log_xs)),
        ("eps", Num(eps).to_string()),
        ("envelope", "shape only, leading constant 1".to_string()),
    ];
    ctx.write(&ctx.header(fit.as_ref(), &flags), &body)?;
    for (r, p) in rows.iter().zip(&curve.samples) {
        println!(
            "log_x={} omega={} y_star={}{}",
            Num(p.log_x),
            Num(r.omega),
            Num(r.y_star),
            if p.boundary { " (boundary)" } else { "" }
        );
    }
    Ok(Outcome::Ok)
}
