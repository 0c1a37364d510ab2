use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};

use super::system::PrimeSystem;

/// Sparse exponent vector: `(prime index, exponent)` pairs with strictly increasing indices and
/// positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factorization(Vec<(u32, u32)>);

impl Factorization {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        if pairs.iter().any(|p| p.1 == 0) || pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("factorization needs distinct indices and positive exponents".into()));
        }
        Ok(Self(pairs))
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn distinct_primes(&self) -> usize {
        self.0.len()
    }

    pub fn exponent(&self, index: u32) -> u32 {
        self.0.binary_search_by_key(&index, |p| p.0).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn largest_index(&self) -> Option<u32> {
        self.0.last().map(|p| p.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    out.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self(out)
    }

    /// All divisors in the factorization lattice, unit included.
    pub fn divisors(&self) -> Vec<Factorization> {
        let mut out = vec![Vec::new()];
        for &(idx, e) in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for d in &out {
                next.push(d.clone());
                for k in 1..=e {
                    let mut d2: Vec<(u32, u32)> = d.clone();
                    d2.push((idx, k));
                    next.push(d2);
                }
            }
            out = next;
        }
        out.into_iter().map(Factorization).collect()
    }

    pub fn norm(&self, system: &PrimeSystem) -> f64 {
        let p = system.norms();
        self.0.iter().map(|&(i, e)| p[i as usize].powi(e as i32)).product()
    }

    /// Lexicographic order on the dense exponent vectors.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        lex_cmp_pairs(&self.0, &other.0)
    }
}

fn lex_cmp_pairs(a: &[(u32, u32)], b: &[(u32, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(x), Some(y)) => {
                if x.0 < y.0 {
                    return Ordering::Greater;
                }
                if x.0 > y.0 {
                    return Ordering::Less;
                }
                match x.1.cmp(&y.1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegerEntry {
    pub norm: f64,
    pub factorization: Factorization,
    /// Generalized von Mangoldt value.
    pub lambda: f64,
    pub mu: i8,
}

impl IntegerEntry {
    pub fn new(system: &PrimeSystem, norm: f64, factorization: Factorization) -> Self {
        let pairs = factorization.pairs();
        let lambda = if pairs.len() == 1 { system.norms()[pairs[0].0 as usize].ln() } else { 0.0 };
        let mu = if pairs.iter().any(|p| p.1 >= 2) {
            0
        } else if pairs.len().is_multiple_of(2) {
            1
        } else {
            -1
        };
        Self { norm, factorization, lambda, mu }
    }
}

/// Generalized integers of a prime system up to a norm cap, in sorted order.
#[derive(Debug)]
pub struct IntegerTable {
    system: PrimeSystem,
    entries: Vec<IntegerEntry>,
    norm_cap: f64,
    ln_norms: Vec<f64>,
    psi_prefix: Vec<f64>,
    index: OnceLock<HashMap<Factorization, usize>>,
}

impl IntegerTable {
    pub(crate) fn from_sorted(system: PrimeSystem, entries: Vec<IntegerEntry>, norm_cap: f64) -> Self {
        let ln_norms = entries.iter().map(|e| e.norm.ln()).collect();
        let mut acc = 0.0;
        let psi_prefix = entries
            .iter()
            .map(|e| {
                acc += e.lambda;
                acc
            })
            .collect();
        Self { system, entries, norm_cap, ln_norms, psi_prefix, index: OnceLock::new() }
    }

    pub fn system(&self) -> &PrimeSystem {
        &self.system
    }

    pub fn entries(&self) -> &[IntegerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_cap(&self) -> f64 {
        self.norm_cap
    }

    pub fn ln_norms(&self) -> &[f64] {
        &self.ln_norms
    }

    /// True when the cap runs past the primes the system declares.
    pub fn possibly_incomplete(&self) -> bool {
        self.norm_cap > self.system.prime_cap()
    }

    pub fn index_of(&self, f: &Factorization) -> Option<usize> {
        self.index
            .get_or_init(|| self.entries.iter().enumerate().map(|(i, e)| (e.factorization.clone(), i)).collect())
            .get(f)
            .copied()
    }

    fn check_range(&self, x: f64) -> Result<()> {
        if x > self.norm_cap || x.is_nan() {
            Err(Error::OutOfRange { x, cap: self.norm_cap })
        } else {
            Ok(())
        }
    }

    /// Number of entries with norm at most `x`, without a range check.
    pub(crate) fn count_le(&self, x: f64) -> usize {
        self.entries.partition_point(|e| e.norm <= x)
    }

    pub(crate) fn count_lt(&self, x: f64) -> usize {
        self.entries.partition_point(|e| e.norm < x)
    }

    /// `N(x)`: number of generalized integers of norm at most `x`.
    pub fn counting(&self, x: f64) -> Result<usize> {
        self.check_range(x)?;
        Ok(self.count_le(x))
    }

    /// `R(x) = N(x) - kappa (x - 1)`.
    pub fn remainder(&self, kappa: f64, x: f64) -> Result<f64> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
        }
        Ok(self.counting(x)? as f64 - kappa * (x - 1.0))
    }

    /// Chebyshev function: sum of the von Mangoldt weights up to `x`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        self.check_range(x)?;
        Ok(match self.count_le(x) {
            0 => 0.0,
            n => self.psi_prefix[n - 1],
        })
    }

    /// `psi(x) - x`.
    pub fn delta(&self, x: f64) -> Result<f64> {
        Ok(self.psi(x)? - x)
    }

    /// Distinct norms where `N` jumps, together with the jump size.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= self.entries.len() {
                return None;
            }
            let x = self.entries[i].norm;
            let start = i;
            while i < self.entries.len() && self.entries[i].norm == x {
                i += 1;
            }
            Some((x, i - start))
        })
    }
}

struct Node {
    norm: f64,
    /// Norm of the node with one copy of its largest prime removed.
    base: f64,
    factors: Vec<(u32, u32)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.norm.total_cmp(&self.norm).then_with(|| lex_cmp_pairs(&other.factors, &self.factors))
    }
}

/// Enumerates all generalized integers of norm at most `norm_cap`.
///
/// Products are generated from a frontier heap. A product may only be extended by primes whose
/// index is at least its largest prime index, which makes every factorization reachable along
/// exactly one path: popping `h * p_m` pushes its child `h * p_m * p_m` and its sibling
/// `h * p_{m+1}`.
pub fn enumerate_integers(system: &PrimeSystem, norm_cap: f64, entry_cap: usize) -> Result<IntegerTable> {
    if !(norm_cap >= 1.0) {
        return Err(Error::InvalidInput(format!("norm cap {norm_cap} must be at least 1")));
    }
    let primes = system.norms();
    let mut out: Vec<IntegerEntry> = Vec::new();
    let push_entry = |out: &mut Vec<IntegerEntry>, norm: f64, f: Factorization| -> Result<()> {
        if out.len() >= entry_cap {
            return Err(Error::Overflow { reached: out.len() });
        }
        out.push(IntegerEntry::new(system, norm, f));
        Ok(())
    };

    push_entry(&mut out, 1.0, Factorization::unit())?;
    let mut heap = BinaryHeap::new();
    if primes[0] <= norm_cap {
        heap.push(Node { norm: primes[0], base: 1.0, factors: vec![(0, 1)] });
    }
    while let Some(node) = heap.pop() {
        let (m, e) = *node.factors.last().expect("non-unit node");
        // child: one more copy of the largest prime
        let child_norm = node.norm * primes[m as usize];
        if child_norm <= norm_cap {
            let mut f = node.factors.clone();
            f.last_mut().unwrap().1 += 1;
            heap.push(Node { norm: child_norm, base: node.norm, factors: f });
        }
        // sibling: swap one copy of the largest prime for the next prime
        let next = m as usize + 1;
        if next < primes.len() {
            let sib_norm = node.base * primes[next];
            if sib_norm <= norm_cap {
                let mut f = node.factors.clone();
                if e == 1 {
                    f.pop();
                } else {
                    f.last_mut().unwrap().1 -= 1;
                }
                f.push((next as u32, 1));
                heap.push(Node { norm: sib_norm, base: node.base, factors: f });
            }
        }
        push_entry(&mut out, node.norm, Factorization(node.factors))?;
    }
    out.sort_by(|a, b| a.norm.total_cmp(&b.norm).then_with(|| a.factorization.lex_cmp(&b.factorization)));
    Ok(IntegerTable::from_sorted(system.clone(), out, norm_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::system::SystemSpec;

    fn naturals(p: u64) -> PrimeSystem {
        PrimeSystem::build(&SystemSpec::Natural { bound: p }).unwrap()
    }

    #[test]
    fn naturals_to_ten() {
        let t = enumerate_integers(&naturals(10), 10.0, 100).unwrap();
        let norms: Vec<f64> = t.entries().iter().map(|e| e.norm).collect();
        assert_eq!(norms, (1..=10).map(|n| n as f64).collect::<Vec<_>>());
        let unit = &t.entries()[0];
        assert!(unit.factorization.is_unit());
        assert_eq!((unit.norm, unit.lambda, unit.mu), (1.0, 0.0, 1));
    }

    #[test]
    fn single_prime_geometric() {
        let ps = PrimeSystem::build(&SystemSpec::Explicit(vec![2.0])).unwrap();
        let t = enumerate_integers(&ps, 10.0, 100).unwrap();
        let norms: Vec<f64> = t.entries().iter().map(|e| e.norm).collect();
        assert_eq!(norms, vec![1.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn three_smooth_numbers() {
        // brute force over exponents
        let mut expect = Vec::new();
        for a in 0..8 {
            for b in 0..5 {
                let n = 2f64.powi(a) * 3f64.powi(b);
                if n <= 13.0 {
                    expect.push(n);
                }
            }
        }
        expect.sort_by(f64::total_cmp);
        let ps = PrimeSystem::build(&SystemSpec::Explicit(vec![2.0, 3.0])).unwrap();
        let t = enumerate_integers(&ps, 13.0, 100).unwrap();
        let norms: Vec<f64> = t.entries().iter().map(|e| e.norm).collect();
        assert_eq!(norms, expect);
        assert_eq!(norms, vec![1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 9.0, 12.0]);
        assert_eq!(t.counting(13.0).unwrap(), 8);
        assert!((t.remainder(0.7, 13.0).unwrap() - (-0.4)).abs() < 1e-12);
    }

    #[test]
    fn equal_norm_primes_stay_distinct() {
        let ps = PrimeSystem::build(&SystemSpec::Explicit(vec![2.0, 2.0, 3.5])).unwrap();
        let t = enumerate_integers(&ps, 4.0, 100).unwrap();
        // 1, p0, p1, 3.5, p0^2, p0 p1, p1^2
        assert_eq!(t.len(), 7);
        assert_eq!(t.counting(2.0).unwrap(), 3);
        // ties ordered lexicographically on exponent vectors
        let fours: Vec<_> =
            t.entries().iter().filter(|e| e.norm == 4.0).map(|e| e.factorization.pairs().to_vec()).collect();
        assert_eq!(fours, vec![vec![(1, 2)], vec![(0, 1), (1, 1)], vec![(0, 2)]]);
    }

    #[test]
    fn entry_cap_overflow() {
        match enumerate_integers(&naturals(100), 100.0, 10) {
            Err(Error::Overflow { reached }) => assert_eq!(reached, 10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn counting_range_and_steps() {
        let t = enumerate_integers(&naturals(10), 10.0, 100).unwrap();
        assert_eq!(t.counting(10.0).unwrap(), 10);
        assert_eq!(t.counting(0.5).unwrap(), 0);
        assert_eq!(t.counting(1.0).unwrap(), 1);
        assert!(matches!(t.counting(10.5), Err(Error::OutOfRange { .. })));
        assert_eq!(t.remainder(1.0, 10.0).unwrap(), 1.0);
        let t2 = enumerate_integers(&naturals(11), 11.0, 100).unwrap();
        assert!((t2.remainder(1.0, 10.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn psi_and_delta() {
        let t = enumerate_integers(&naturals(10), 10.0, 100).unwrap();
        let oracle: f64 = t.entries().iter().map(|e| e.lambda).sum();
        let closed = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((oracle - closed).abs() < 1e-12);
        assert!((t.psi(10.0).unwrap() - 7.832014180505469).abs() < 1e-12);
        assert!((t.delta(10.0).unwrap() - (-2.167985819494531)).abs() < 1e-12);
        assert_eq!(t.psi(1.0).unwrap(), 0.0);
        assert_eq!(t.delta(1.0).unwrap(), -1.0);

        let two = PrimeSystem::build(&SystemSpec::Explicit(vec![2.0])).unwrap();
        let t = enumerate_integers(&two, 10.0, 100).unwrap();
        assert!((t.psi(10.0).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-15);
        assert!((t.delta(2.0).unwrap() - (2f64.ln() - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn possibly_incomplete_flag() {
        let t = enumerate_integers(&naturals(10), 20.0, 100).unwrap();
        assert!(t.possibly_incomplete());
        // 11, 13, 17, 19 missing
        assert_eq!(t.counting(20.0).unwrap(), 16);
    }

    #[test]
    fn lex_order() {
        let a = Factorization::from_pairs(vec![(0, 1)]).unwrap();
        let b = Factorization::from_pairs(vec![(1, 1)]).unwrap();
        assert_eq!(a.lex_cmp(&b), Ordering::Greater);
        assert_eq!(b.lex_cmp(&a), Ordering::Less);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
        assert_eq!(Factorization::unit().lex_cmp(&b), Ordering::Less);
        let c = Factorization::from_pairs(vec![(0, 1), (2, 1)]).unwrap();
        assert_eq!(a.lex_cmp(&c), Ordering::Less);
    }

    #[test]
    fn divisors_of_twelve() {
        let f = Factorization::from_pairs(vec![(0, 2), (1, 1)]).unwrap();
        assert_eq!(f.divisors().len(), 6);
        assert_eq!(f.mul(&Factorization::from_pairs(vec![(1, 2), (3, 1)]).unwrap()).pairs(), &[(0, 2), (1, 3), (3, 1)]);
    }
}
