use beurzeta::semigroup::{
    enumerate_integers, fit_axiom_a, AxiomAFit, IntegerTable, KappaMode, PrimeSystem, SystemSpec,
};
use beurzeta::zeros::{select_separated_from, weight_w, winding_count, Rectangle, WeightLine, ZeroFinder};
use beurzeta::zeta::ZetaEngine;
use beurzeta::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn system(spec: SystemSpec, cap: f64, theta: f64, kappa: KappaMode) -> (IntegerTable, AxiomAFit) {
    let ps = PrimeSystem::build(&spec).unwrap();
    let t = enumerate_integers(&ps, cap, 10_000_000).unwrap();
    let f = fit_axiom_a(&t, theta, kappa).unwrap();
    (t, f)
}

fn test_systems() -> Vec<(&'static str, IntegerTable, AxiomAFit)> {
    let (a, fa) = system(SystemSpec::Natural { bound: 10_000 }, 1e4, 0.1, KappaMode::Supplied(1.0));
    let (b, fb) =
        system(SystemSpec::Perturbed { bound: 10_000, width: 0.01, seed: 42 }, 1e4, 0.3, KappaMode::LeastSquares);
    vec![("natural", a, fa), ("perturbed", b, fb)]
}

#[test]
fn multiplicities_match_winding_on_random_rectangles() {
    for (name, table, fit) in test_systems() {
        let finder = ZeroFinder::new(&table, fit, 1e-8, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..20 {
            let lo = rng.gen_range(fit.theta + 0.1..0.8);
            let t_lo = rng.gen_range(2.0..30.0);
            let rect = Rectangle::new(lo, lo + rng.gen_range(0.2..1.5), t_lo, t_lo + rng.gen_range(1.0..8.0)).unwrap();
            let zs = finder.find(&rect).unwrap();
            let w = winding_count(&table, &fit, &zs.rect, 1e-8).unwrap();
            assert_eq!(zs.total_multiplicity(), w, "{name} {rect:?}");
            assert_eq!(zs.count, w, "{name} {rect:?}");
        }
    }
}

#[test]
fn zeros_come_in_conjugate_pairs() {
    for (name, table, fit) in test_systems() {
        let finder = ZeroFinder::new(&table, fit, 1e-8, 1).unwrap();
        let rect = Rectangle::new(fit.theta + 0.1, 3.0, 0.5, 26.0).unwrap();
        let zs = finder.find(&rect).unwrap();
        assert!(!zs.zeros.is_empty(), "{name}");
        let e = ZetaEngine::best(&table, fit).unwrap();
        for z in &zs.zeros {
            let m = e.value(z.rho().conj()).norm();
            assert!(m <= 10.0 * 1e-8, "{name} {z:?} |zeta(conj rho)| = {m}");
        }
    }
}

#[test]
fn weight_decays_on_the_grid() {
    let (table, fit) = system(SystemSpec::Natural { bound: 3000 }, 3000.0, 0.1, KappaMode::Supplied(1.0));
    let rho = Complex64::new(0.5, 21.022039638771555);
    for l in [5.0, 10.0, 20.0] {
        for h in [-2.0f64, -3.0, -5.0] {
            let w = weight_w(&table, &fit, rho, h, l, 1e-12, WeightLine::Standard).unwrap();
            let bound = fit.a_plus_kappa() * (-h * h * l / 4.0).exp();
            assert!(w.value.norm() <= bound + w.radius(), "L={l} h={h}: {} > {bound}", w.value.norm());
        }
    }
}

proptest! {
    #[test]
    fn separated_selection_invariants(
        gammas in prop::collection::vec(0.0f64..5000.0, 0..200),
        betas in prop::collection::vec(0.5f64..1.0, 200),
        l in 1.0f64..20.0,
        t in 100.0f64..5000.0,
    ) {
        let cands: Vec<Complex64> = gammas.iter().zip(&betas).map(|(g, b)| Complex64::new(*b, *g)).collect();
        let s = select_separated_from(&cands, 0.9, l, t);
        for w in s.members.windows(2) {
            prop_assert!(w[1].im - w[0].im >= 10.0 * l);
        }
        prop_assert!(s.members.iter().all(|m| m.re >= 0.9 && m.im >= 10.0 * l && m.im <= t));
        prop_assert!(s.k() as f64 <= t / (10.0 * l));
        prop_assert_eq!(s.q, 6.0 * l);
        // maximal: every admissible candidate is within 10L above some member or is one
        for c in cands.iter().filter(|c| c.re >= 0.9 && c.im >= 10.0 * l && c.im <= t) {
            prop_assert!(s.members.iter().any(|m| c.im >= m.im && c.im < m.im + 10.0 * l));
        }
    }
}
