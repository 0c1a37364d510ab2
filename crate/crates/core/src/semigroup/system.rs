use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// How a prime system is generated.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    /// Explicit multiset of prime norms. The list is taken to be the whole system.
    Explicit(Vec<f64>),
    /// Rational primes up to `bound`.
    Natural { bound: u64 },
    /// Rational primes up to `bound`, each scaled by `exp(eps)` with `eps` uniform in `[-width, width]`.
    Perturbed { bound: u64, width: f64, seed: u64 },
}

/// Generators of a free commutative semigroup, identified by their norms.
///
/// Norms are kept sorted nondecreasing. Distinct primes may share a norm. Primes with norm above
/// `prime_cap` are unknown; tables enumerated past that cap are flagged possibly incomplete.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeSystem {
    norms: Vec<f64>,
    labels: Option<Vec<String>>,
    prime_cap: f64,
}

impl PrimeSystem {
    pub fn new(norms: Vec<f64>, labels: Option<Vec<String>>, prime_cap: f64) -> Result<Self> {
        if norms.is_empty() {
            return Err(Error::InvalidSpec("empty prime list".into()));
        }
        if let Some(bad) = norms.iter().find(|&&p| !(p > 1.0) || !p.is_finite()) {
            return Err(Error::InvalidSpec(format!("prime norm {bad} is not a finite real > 1")));
        }
        if let Some(l) = &labels {
            if l.len() != norms.len() {
                return Err(Error::InvalidSpec("label count differs from prime count".into()));
            }
        }
        let mut idx: Vec<usize> = (0..norms.len()).collect();
        idx.sort_by(|&a, &b| norms[a].total_cmp(&norms[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = idx.iter().map(|&i| norms[i]).collect();
        let labels = labels.map(|l| idx.iter().map(|&i| l[i].clone()).collect());
        Ok(Self { norms: sorted, labels, prime_cap })
    }

    pub fn build(spec: &SystemSpec) -> Result<Self> {
        match spec {
            SystemSpec::Explicit(norms) => Self::new(norms.clone(), None, f64::INFINITY),
            SystemSpec::Natural { bound } => {
                let primes = sieve(*bound);
                if primes.is_empty() {
                    return Err(Error::InvalidSpec(format!("no primes up to {bound}")));
                }
                let labels = primes.iter().map(|p| p.to_string()).collect();
                Self::new(primes.iter().map(|&p| p as f64).collect(), Some(labels), *bound as f64)
            }
            SystemSpec::Perturbed { bound, width, seed } => {
                if !(*width >= 0.0 && *width < std::f64::consts::LN_2) {
                    return Err(Error::InvalidSpec(format!("perturbation width {width} must lie in [0, ln 2)")));
                }
                let primes = sieve(*bound);
                if primes.is_empty() {
                    return Err(Error::InvalidSpec(format!("no primes up to {bound}")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let norms = primes
                    .iter()
                    .map(|&p| {
                        let eps = if *width > 0.0 { rng.gen_range(-*width..=*width) } else { 0.0 };
                        p as f64 * eps.exp()
                    })
                    .collect();
                let labels = primes.iter().map(|p| p.to_string()).collect();
                Self::new(norms, Some(labels), *bound as f64)
            }
        }
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn prime_cap(&self) -> f64 {
        self.prime_cap
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// SHA-256 over the norm bit patterns and the coverage cap.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"beurzeta-prime-system-v1");
        h.update((self.norms.len() as u64).to_le_bytes());
        for p in &self.norms {
            h.update(p.to_le_bytes());
        }
        h.update(self.prime_cap.to_le_bytes());
        h.finalize().into()
    }
}

/// Sieve of Eratosthenes.
pub fn sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Parses the line-oriented system spec format.
///
/// Either a single `generator natural <P>` / `generator perturbed <P> <w> <seed>` directive, or one
/// decimal prime norm per line. `#` starts a comment.
pub fn parse_system_spec(text: &str, path: &Path) -> Result<SystemSpec> {
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut generator: Option<(usize, SystemSpec)> = None;
    let mut norms = Vec::new();
    let mut first_norm_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if words[0] == "generator" {
            if generator.is_some() {
                return Err(err(lineno, "more than one generator directive".into()));
            }
            let parse_u64 =
                |w: &str, what: &str| w.parse::<u64>().map_err(|_| err(lineno, format!("bad {what} `{w}`")));
            let spec = match words.get(1).copied() {
                Some("natural") if words.len() == 3 => SystemSpec::Natural { bound: parse_u64(words[2], "bound")? },
                Some("perturbed") if words.len() == 5 => SystemSpec::Perturbed {
                    bound: parse_u64(words[2], "bound")?,
                    width: words[3].parse::<f64>().map_err(|_| err(lineno, format!("bad width `{}`", words[3])))?,
                    seed: parse_u64(words[4], "seed")?,
                },
                _ => return Err(err(lineno, format!("unrecognised generator directive `{line}`"))),
            };
            generator = Some((lineno, spec));
        } else {
            if words.len() != 1 {
                return Err(err(lineno, format!("expected one prime norm, got `{line}`")));
            }
            let p: f64 = words[0].parse().map_err(|_| err(lineno, format!("bad prime norm `{}`", words[0])))?;
            if !(p > 1.0) || !p.is_finite() {
                return Err(err(lineno, format!("prime norm {p} must exceed 1")));
            }
            if norms.is_empty() {
                first_norm_line = lineno;
            }
            norms.push(p);
        }
    }
    match generator {
        Some((lineno, _)) if !norms.is_empty() => {
            Err(err(lineno.max(first_norm_line), "generator directive mixed with explicit prime norms".into()))
        }
        Some((_, spec)) => Ok(spec),
        None if norms.is_empty() => Err(err(text.lines().count().max(1), "no primes specified".into())),
        None => Ok(SystemSpec::Explicit(norms)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_primes_to_ten() {
        let ps = PrimeSystem::build(&SystemSpec::Natural { bound: 10 }).unwrap();
        assert_eq!(ps.norms(), &[2.0, 3.0, 5.0, 7.0]);
        assert_eq!(ps.prime_cap(), 10.0);
    }

    #[test]
    fn explicit_multiset_keeps_duplicates() {
        let ps = PrimeSystem::build(&SystemSpec::Explicit(vec![2.0, 3.5, 2.0])).unwrap();
        assert_eq!(ps.norms(), &[2.0, 2.0, 3.5]);
        assert!(ps.prime_cap().is_infinite());
    }

    #[test]
    fn rejects_bad_norms() {
        assert!(matches!(PrimeSystem::build(&SystemSpec::Explicit(vec![2.0, 1.0])), Err(Error::InvalidSpec(_))));
        assert!(matches!(PrimeSystem::build(&SystemSpec::Explicit(vec![])), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn perturbation_is_reproducible_and_bounded() {
        let spec = SystemSpec::Perturbed { bound: 100, width: 0.01, seed: 42 };
        let a = PrimeSystem::build(&spec).unwrap();
        let b = PrimeSystem::build(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 25);
        let labels = a.labels().unwrap();
        for (norm, label) in a.norms().iter().zip(labels) {
            let p: f64 = label.parse().unwrap();
            let ratio = norm / p;
            assert!(ratio >= (-0.01f64).exp() - 1e-15 && ratio <= 0.01f64.exp() + 1e-15);
        }
        let other = PrimeSystem::build(&SystemSpec::Perturbed { bound: 100, width: 0.01, seed: 43 }).unwrap();
        assert_ne!(a.content_hash(), other.content_hash());
    }

    #[test]
    fn parses_spec_files() {
        let p = Path::new("x.sys");
        assert_eq!(
            parse_system_spec("# naturals\ngenerator natural 1000\n", p).unwrap(),
            SystemSpec::Natural { bound: 1000 }
        );
        assert_eq!(
            parse_system_spec("generator perturbed 100 0.01 42", p).unwrap(),
            SystemSpec::Perturbed { bound: 100, width: 0.01, seed: 42 }
        );
        assert_eq!(
            parse_system_spec("2.0\n\n2.0 # twin\n3.5\n", p).unwrap(),
            SystemSpec::Explicit(vec![2.0, 2.0, 3.5])
        );
        match parse_system_spec("2.0\nfoo\n", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_system_spec("0.5\n", p), Err(Error::Parse { line: 1, .. })));
        assert!(parse_system_spec("generator natural 10\n3.0\n", p).is_err());
    }
}
