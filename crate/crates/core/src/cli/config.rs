use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::semigroup::KappaMode;

pub const CACHE_ENV: &str = "BEURZETA_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaSetting {
    Value(f64),
    Mode(KappaKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaKeyword {
    LeastSquares,
}

impl KappaSetting {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "least-squares" | "ls" => Ok(Self::Mode(KappaKeyword::LeastSquares)),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|k| *k > 0.0)
                .map(Self::Value)
                .ok_or_else(|| Error::InvalidInput(format!("kappa `{v}` is neither positive nor `least-squares`"))),
        }
    }

    pub fn mode(self) -> KappaMode {
        match self {
            Self::Value(k) => KappaMode::Supplied(k),
            Self::Mode(KappaKeyword::LeastSquares) => KappaMode::LeastSquares,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub zeta: f64,
    pub zeros: f64,
    pub quadrature: f64,
    pub omega: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zeta: 1e-8, zeros: 1e-9, quadrature: 1e-10, omega: 1e-10 }
    }
}

/// Run configuration: TOML file values, then command-line overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Prime-system spec file; relative paths resolve against the config file's directory.
    pub system: Option<PathBuf>,
    pub theta: f64,
    pub kappa: KappaSetting,
    pub norm_cap: f64,
    pub entry_cap: usize,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: None,
            theta: 0.1,
            kappa: KappaSetting::Mode(KappaKeyword::LeastSquares),
            norm_cap: 1e5,
            entry_cap: 50_000_000,
            tolerances: Tolerances::default(),
            out_dir: PathBuf::from("."),
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].lines().count().max(1));
            Error::Parse { path: path.to_path_buf(), line, msg: e.message().to_string() }
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(sys) = &cfg.system {
            if sys.is_relative() {
                cfg.system = Some(base.join(sys));
            }
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if ![t.zeta, t.zeros, t.quadrature, t.omega].iter().all(|v| *v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.norm_cap >= 1.0) {
            return Err(Error::InvalidInput(format!("norm_cap = {} below 1", self.norm_cap)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidInput(format!("theta = {} outside (0, 1)", self.theta)));
        }
        Ok(())
    }

    /// SHA-256 over the resolved configuration and the system spec text.
    pub fn hash(&self, system_text: Option<&str>) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("config serialises"));
        if let Some(t) = system_text {
            h.update([0u8]);
            h.update(t.as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn cache_dir(&self) -> PathBuf {
        std::env::var_os(CACHE_ENV).map_or_else(|| self.out_dir.join("cache"), PathBuf::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_and_defaults() {
        let cfg: RunConfig = toml::from_str("theta = 0.2\nkappa = 1.0\n[tolerances]\nzeta = 1e-6\n").unwrap();
        assert_eq!(cfg.theta, 0.2);
        assert_eq!(cfg.kappa, KappaSetting::Value(1.0));
        assert_eq!(cfg.tolerances.zeta, 1e-6);
        assert_eq!(cfg.tolerances.zeros, 1e-9);
        let ls: RunConfig = toml::from_str("kappa = \"least-squares\"").unwrap();
        assert_eq!(ls.kappa.mode(), KappaMode::LeastSquares);
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
        let back: RunConfig = toml::from_str(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(Some("x")), b.hash(Some("x")));
        assert_ne!(a.hash(Some("x")), a.hash(Some("y")));
        b.seed = 7;
        assert_ne!(a.hash(None), b.hash(None));
        assert!(KappaSetting::parse("-1").is_err());
        assert_eq!(KappaSetting::parse("ls").unwrap(), KappaSetting::Mode(KappaKeyword::LeastSquares));
    }
}
