use beurzeta::semigroup::{enumerate_integers, Factorization, IntegerTable, PrimeSystem, SystemSpec};
use proptest::prelude::*;

/// Every exponent vector with product at most `cap`, by nested loops over the primes.
fn brute_force(norms: &[f64], cap: f64) -> Vec<Vec<(u32, u32)>> {
    fn go(norms: &[f64], i: usize, acc: f64, cap: f64, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if i == norms.len() {
            out.push(cur.clone());
            return;
        }
        go(norms, i + 1, acc, cap, cur, out);
        let mut e = 1;
        while acc * norms[i].powi(e) <= cap {
            cur.push((i as u32, e as u32));
            go(norms, i + 1, acc * norms[i].powi(e), cap, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    go(norms, 0, 1.0, cap, &mut Vec::new(), &mut out);
    out
}

fn table(norms: Vec<f64>, cap: f64) -> IntegerTable {
    let ps = PrimeSystem::build(&SystemSpec::Explicit(norms)).unwrap();
    enumerate_integers(&ps, cap, 1_000_000).unwrap()
}

fn check_identities(t: &IntegerTable) {
    for e in t.entries() {
        let divs = e.factorization.divisors();
        let mu: i64 = divs.iter().map(|d| i64::from(t.entries()[t.index_of(d).unwrap()].mu)).sum();
        assert_eq!(mu, i64::from(e.factorization.is_unit()), "{:?}", e.factorization);
        let lam: f64 = divs.iter().map(|d| t.entries()[t.index_of(d).unwrap()].lambda).sum();
        assert!((lam - e.norm.ln()).abs() <= 1e-9, "{:?}", e.factorization);
    }
}

#[test]
fn identities_on_natural_and_perturbed_systems() {
    for spec in [SystemSpec::Natural { bound: 1000 }, SystemSpec::Perturbed { bound: 1000, width: 0.01, seed: 42 }] {
        let ps = PrimeSystem::build(&spec).unwrap();
        check_identities(&enumerate_integers(&ps, 1000.0, 100_000).unwrap());
    }
}

fn norms_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1.5f64..30.0, 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heap_matches_brute_force(norms in norms_strategy(), cap in 1.0f64..1000.0) {
        let t = table(norms.clone(), cap);
        let sorted = t.system().norms().to_vec();
        let mut expect = brute_force(&sorted, cap);
        let mut got: Vec<Vec<(u32, u32)>> = t.entries().iter().map(|e| e.factorization.pairs().to_vec()).collect();
        expect.sort();
        got.sort();
        prop_assert_eq!(got, expect);
        // order: nondecreasing norm, lexicographic among equal norms
        for w in t.entries().windows(2) {
            prop_assert!(w[0].norm < w[1].norm || (w[0].norm == w[1].norm && w[0].factorization.lex_cmp(&w[1].factorization).is_lt()));
        }
    }

    #[test]
    fn divisor_sum_identities(norms in norms_strategy(), cap in 1.0f64..1000.0) {
        check_identities(&table(norms, cap));
    }

    #[test]
    fn counting_is_a_right_continuous_step(norms in norms_strategy(), cap in 2.0f64..1000.0, probes in prop::collection::vec(0.0f64..1.0, 1..20)) {
        let t = table(norms, cap);
        prop_assert_eq!(t.counting(1.0).unwrap(), 1);
        let mut xs: Vec<f64> = probes.iter().map(|u| 1.0 + u * (cap - 1.0)).collect();
        xs.sort_by(f64::total_cmp);
        for w in xs.windows(2) {
            prop_assert!(t.counting(w[0]).unwrap() <= t.counting(w[1]).unwrap());
        }
        for (x, jump) in t.jumps() {
            let at = t.counting(x).unwrap();
            let below = t.entries().iter().filter(|e| e.norm < x).count();
            prop_assert_eq!(at, below + jump);
            // right-continuous: a hair to the right changes nothing unless another jump sits there
            let right = x * (1.0 + 1e-15);
            if right <= cap && t.entries().iter().all(|e| e.norm <= x || e.norm > right) {
                prop_assert_eq!(t.counting(right).unwrap(), at);
            }
        }
    }

    #[test]
    fn norms_multiply(norms in norms_strategy(), cap in 10.0f64..1000.0, picks in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..30)) {
        let t = table(norms, cap);
        let n = t.len();
        for (u, v) in picks {
            let g = &t.entries()[((u * n as f64) as usize).min(n - 1)];
            let h = &t.entries()[((v * n as f64) as usize).min(n - 1)];
            if g.norm * h.norm <= cap * (1.0 - 1e-12) {
                let gh: Factorization = g.factorization.mul(&h.factorization);
                let i = t.index_of(&gh);
                prop_assert!(i.is_some());
                let prod = t.entries()[i.unwrap()].norm;
                prop_assert!((prod / (g.norm * h.norm) - 1.0).abs() <= 1e-12);
            }
        }
    }
}
