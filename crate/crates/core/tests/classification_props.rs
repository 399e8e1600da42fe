use gou_core::classification::{
    delta, feasible_u_set, finite_variation_decision, is_subordinator_1d, is_subordinator_s,
    no_ruin_threshold, Decision, Verdict,
};
use gou_core::corpus::{random_triplet, u_grid, SigmaKind};
use gou_core::extended::NegInf;
use gou_core::levy_model::{s_process, scale_eta};
use gou_core::tol;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind() -> impl Strategy<Value = SigmaKind> {
    prop_oneof![Just(SigmaKind::Zero), Just(SigmaKind::RankOne), Just(SigmaKind::Full)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn region_test_matches_direct_test(seed in any::<u64>(), k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triplet(&mut rng, k);
        for u in u_grid(&mut rng, &t, 50) {
            let a = is_subordinator_s(&t, u).unwrap();
            let b = is_subordinator_1d(&s_process(&t, u).unwrap()).unwrap();
            prop_assert_eq!(a.verdict, b.verdict, "u={} t={:?}\n{:?}\n{:?}", u, t, a, b);
        }
    }

    #[test]
    fn delta_laws(seed in any::<u64>(), k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triplet(&mut rng, k);
        let fs = feasible_u_set(&t).unwrap();
        let mut prev = NegInf;
        for i in 0..21 {
            let z = -5.0 + 0.5 * i as f64;
            let d = fs.delta(z);
            prop_assert!(d <= z);
            prop_assert!(prev <= d);
            if let Some(v) = d.finite() {
                prop_assert_eq!(fs.delta(v), d);
            }
            prev = d;
        }
    }

    #[test]
    fn threshold_matches_delta(seed in any::<u64>(), k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triplet(&mut rng, k);
        let r = no_ruin_threshold(&t).unwrap();
        for i in 0..40 {
            let z = 0.25 * i as f64;
            let d = delta(&t, z).unwrap();
            match r.decision {
                Decision::NoRuinFrom { u_star } => prop_assert_eq!(d >= 0.0, z >= u_star),
                Decision::RuinEverywhere => prop_assert!(d < 0.0),
                Decision::Undetermined => prop_assert!(false, "atom tier is always decided"),
            }
        }
        if let Decision::NoRuinFrom { u_star } = r.decision {
            prop_assert!(u_star >= 0.0);
            prop_assert_eq!(r.certificate.unwrap().verdict, Verdict::Yes);
        }
    }

    #[test]
    fn scaling_eta_scales_threshold(seed in any::<u64>(), k in kind(), s in prop_oneof![Just(0.5), Just(2.0), Just(10.0), 0.1f64..20.0]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triplet(&mut rng, k);
        let a = no_ruin_threshold(&t).unwrap().decision;
        let b = no_ruin_threshold(&scale_eta(&t, s).unwrap()).unwrap().decision;
        match (a, b) {
            (Decision::NoRuinFrom { u_star: x }, Decision::NoRuinFrom { u_star: y }) => {
                prop_assert!((y - s * x).abs() <= 1e-10 * (s * x).abs().max(1e-300) || (x == 0.0 && y == 0.0), "{} {} {}", x, y, s);
            }
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn finite_variation_form_agrees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triplet(&mut rng, SigmaKind::Zero);
        let a = finite_variation_decision(&t).unwrap();
        let b = no_ruin_threshold(&t).unwrap().decision;
        match (a, b) {
            (Decision::NoRuinFrom { u_star: x }, Decision::NoRuinFrom { u_star: y }) => {
                prop_assert!(tol::approx_eq(x, y), "{} vs {} for {:?}", x, y, t);
            }
            (a, b) => prop_assert_eq!(a, b, "{:?}", t),
        }
    }
}
