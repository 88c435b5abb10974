mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tate::beilinson::{beilinson_monad, direct_image_complex, verify_monad};
use tate::bgg::coarse_regularity;
use tate::cohomology::{euler_polynomial_table, kunneth_line_bundle, EulerPolynomial};
use tate::json::{ComplexJson, ModuleJson};
use tate::space::binomial;
use tate::tate::tate_resolution;
use tate::{md, Multidegree, PresentedModule};

use common::*;

fn module(seed: u64) -> PresentedModule {
    random_module(&mut ChaCha8Rng::seed_from_u64(seed), &p1p2())
}

/// Generators of ⊠ Ω^{p_i}(p_i) on P1×P2: `C(n_i + 1, p_i + 1)` per factor with `p_i > 0`.
fn bundle_rank(p: &Multidegree) -> usize {
    p.0.iter()
        .zip([1u64, 2])
        .map(|(&pi, n)| if pi == 0 { 1 } else { binomial(n + 1, pi as u64 + 1) as usize })
        .product()
}

fn add(a: &EulerPolynomial, b: &EulerPolynomial) -> EulerPolynomial {
    let n = a.coefficients().len().max(b.coefficients().len());
    EulerPolynomial::new((0..n).map(|i| a.get(i) + b.get(i)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn line_bundles_follow_kunneth(c0 in -4i32..=4, c1 in -4i32..=4) {
        let c = md![c0, c1];
        let o = structure_sheaf().twist(&c);
        let t = euler_polynomial_table(&o, &md![-1, -1], &md![1, 1]).unwrap();
        for (a, e) in &t.entries {
            prop_assert_eq!(e, &kunneth_line_bundle(&[1, 2], &(&c + a)));
        }
    }

    #[test]
    fn table_shifts_with_twist(seed in any::<u64>(), c0 in -1i32..=1, c1 in -1i32..=1) {
        let m = module(seed);
        let c = md![c0, c1];
        let (low, high) = (md![-1, -1], md![0, 0]);
        let base = euler_polynomial_table(&m, &(&low + &c), &(&high + &c)).unwrap();
        let twisted = euler_polynomial_table(&m.twist(&c), &low, &high).unwrap();
        for (a, e) in &twisted.entries {
            prop_assert_eq!(Some(e), base.get(&(a + &c)));
        }
    }

    #[test]
    fn tables_are_additive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (m, n) = (module(s1), module(s2));
        let (low, high) = (md![-1, -1], md![0, 1]);
        let sum = euler_polynomial_table(&m.direct_sum(&n).unwrap(), &low, &high).unwrap();
        let tm = euler_polynomial_table(&m, &low, &high).unwrap();
        let tn = euler_polynomial_table(&n, &low, &high).unwrap();
        for (a, e) in &sum.entries {
            prop_assert_eq!(e, &add(tm.get(a).unwrap(), tn.get(a).unwrap()));
        }
    }

    #[test]
    fn windows_are_minimal_complexes(seed in any::<u64>()) {
        let m = module(seed);
        let t = tate_resolution(&m, &md![-2, -1], &md![0, 0]).unwrap();
        prop_assert!(t.check_d_squared_symbolic().unwrap());
        prop_assert!(t.is_minimal());
        let back = ComplexJson::from_complex(&t).to_complex().unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn module_json_round_trip(seed in any::<u64>()) {
        let m = module(seed);
        let text = serde_json::to_string(&ModuleJson::from_module(&m)).unwrap();
        prop_assert_eq!(tate::json::parse_module(&text, 2).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monads_recover_the_module(seed in any::<u64>()) {
        let m = module(seed);
        let b = beilinson_monad(&m).unwrap();
        let reg = coarse_regularity(&m).unwrap();
        let low = b.positivity_threshold().sup(&reg);
        let r = verify_monad(&b, &m, &low, &low.plus_constant(1));
        prop_assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn monad_terms_have_window_ranks(seed in any::<u64>()) {
        let m = module(seed);
        let b = beilinson_monad(&m).unwrap();
        for (d, exps) in b.exponents() {
            let gens: usize = exps.iter().map(bundle_rank).sum();
            prop_assert_eq!(b.term(*d).unwrap().num_gens(), gens);
        }
    }
}

#[test]
fn pushforward_of_twisted_line_bundles() {
    // R π_* O(a, 0) to P2 is H^*(P1, O(a)) ⊗ O
    for a in -4..=3 {
        let o = structure_sheaf().twist(&md![a, 0]);
        let d = direct_image_complex(&o, &[1]).unwrap();
        let h = kunneth_line_bundle(&[1], &md![a]);
        let ranks: Vec<(i64, usize)> = d.terms().iter().map(|(i, m)| (*i, m.num_gens())).collect();
        let want: Vec<(i64, usize)> = (0..=1).filter(|&i| h.get(i) > 0).map(|i| (i as i64, h.get(i) as usize)).collect();
        assert_eq!(ranks, want, "a = {a}");
        for m in d.terms().values() {
            assert_eq!(m.num_relations(), 0);
            assert!(m.gen_degrees().iter().all(|g| *g == Multidegree(vec![0])));
        }
    }
}
