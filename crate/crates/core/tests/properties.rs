//! Randomized property tests for the scalar inequalities and the
//! measure/bound plumbing.

use proptest::prelude::*;

use qmonogamy::measures::{
    check_superadditivity, concurrence_pure, g_alpha, lemma1_terms, renyi_entanglement_pure,
    AlphaParam, EtaParam, ALPHA_ANALYTIC_MIN,
};
use qmonogamy::monogamy::{profile, verify, ChainState, LemmaSelector};
use qmonogamy::states;

fn alpha_strategy() -> impl Strategy<Value = f64> {
    // analytic regime, avoiding the alpha = 1 removable singularity
    prop_oneof![ALPHA_ANALYTIC_MIN..0.999, 1.001..4.0f64]
}

proptest! {
    #[test]
    fn g_alpha_stays_in_unit_interval(x in 0.0..=1.0f64, a in alpha_strategy()) {
        let g = g_alpha(x, &AlphaParam::new(a).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
    }

    #[test]
    fn g_alpha_monotone(x in 0.0..=1.0f64, y in 0.0..=1.0f64, a in alpha_strategy()) {
        let ap = AlphaParam::new(a).unwrap();
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let gl = g_alpha(lo, &ap).unwrap();
        let gh = g_alpha(hi, &ap).unwrap();
        prop_assert!(gh >= gl - 1e-12, "g({lo}) = {gl} > g({hi}) = {gh}");
    }

    #[test]
    fn power_inequality_chain_holds(x in 0.0..=1.0f64, mu in 1.0..=6.0f64) {
        let (lhs, mid, weak) = lemma1_terms(x, mu).unwrap();
        prop_assert!(lhs >= mid - 1e-9 && mid >= weak - 1e-9);
    }

    #[test]
    fn squared_superadditivity_in_disc(
        x in 0.0..=1.0f64,
        t in 0.0..=1.0f64,
        a in alpha_strategy(),
    ) {
        // (x, y) inside the unit disc
        let y = t * (1.0 - x * x).sqrt();
        let (ok, res) = check_superadditivity(x, y, &AlphaParam::new(a).unwrap(), true).unwrap();
        prop_assert!(ok, "residual {res} at ({x}, {y}), alpha {a}");
    }

    #[test]
    fn pure_state_measure_consistency(seed in 0u64..5000, a in alpha_strategy()) {
        // the spectrum path and the g_alpha(concurrence) path must agree;
        // the library cross-checks internally and errors on mismatch
        let psi = states::haar_random_pure(2, seed).unwrap();
        let ap = AlphaParam::new(a).unwrap();
        let e = renyi_entanglement_pure(&psi, &[0], &ap).unwrap();
        let c = concurrence_pure(&psi, &[0]).unwrap();
        prop_assert!((e - g_alpha(c, &ap).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn first_hierarchy_margin_nonnegative(seed in 0u64..2000, eta in 1.0..=4.0f64) {
        let psi = states::haar_random_pure(3, seed).unwrap();
        let chain = ChainState::natural(psi).unwrap();
        let rep = verify(
            &chain,
            &AlphaParam::new(2.0).unwrap(),
            &EtaParam::new(eta).unwrap(),
            &LemmaSelector::L2,
        )
        .unwrap();
        if rep.condition_met {
            prop_assert!(rep.margin >= -1e-9, "margin {}", rep.margin);
        }
        prop_assert!(rep.tightening >= -1e-12);
    }

    #[test]
    fn profile_respects_squared_concurrence_budget(seed in 0u64..2000) {
        let psi = states::haar_random_pure(4, seed).unwrap();
        let chain = ChainState::natural(psi).unwrap();
        let prof = profile(&chain, &AlphaParam::new(2.0).unwrap()).unwrap();
        prop_assert!(prof.ckw_residual() >= -1e-9);
        for c in &prof.c_pair {
            prop_assert!((0.0..=1.0 + 1e-12).contains(c));
        }
    }
}
