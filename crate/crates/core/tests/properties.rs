use proptest::prelude::*;

use detour_core::mechanisms::{generalized_median, opt_max_cost, opt_soc_cost, sample, PhantomProfile};
use detour_core::verify::{grid_opt, InstanceSampler, LengthMode, Objective};
use detour_core::{max_cost, social_cost, Mechanism, NamedMechanism, Outcome};

const NAMES: [&str; 13] = [
    "optsc",
    "optmc",
    "twoextreme:inner",
    "twoextreme:outer",
    "twoextreme:left",
    "twoextreme:right",
    "restrict",
    "randmc",
    "randub",
    "median",
    "genmedian:median",
    "genmedian:inner",
    "genmedian:restrict",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn outputs_are_feasible(seed in any::<u64>(), idx in 0u64..1000) {
        let inst = InstanceSampler::new(seed).with_length(LengthMode::Zero).instance(idx);
        let p = *inst.params();
        for name in NAMES {
            let m: NamedMechanism = name.parse().unwrap();
            let lottery = m.outcome(&inst).unwrap().into_lottery();
            let total: f64 = lottery.support().iter().map(|s| s.1).sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "{}", name);
            for (e, _) in lottery.support() {
                prop_assert!(e.contains_tol(&p, 0.0), "{} gave {:?}", name, e);
            }
        }
    }

    #[test]
    fn optima_beat_a_coarse_grid(seed in any::<u64>()) {
        let inst = InstanceSampler::new(seed).instance(0);
        let (_, sc) = grid_opt(&inst, Objective::SocialCost, 60).unwrap();
        let (_, mc) = grid_opt(&inst, Objective::MaxCost, 60).unwrap();
        prop_assert!(social_cost(opt_soc_cost(&inst), &inst) <= sc + 1e-12);
        prop_assert!(max_cost(opt_max_cost(&inst), &inst) <= mc + 1e-12);
    }

    #[test]
    fn inner_phantoms_match_two_extreme_for_any_length(seed in any::<u64>()) {
        let inst = InstanceSampler::new(seed).instance(3);
        let via = generalized_median(&inst, &PhantomProfile::two_extreme_inner(inst.len())).unwrap();
        let direct: NamedMechanism = "twoextreme:inner".parse().unwrap();
        prop_assert_eq!(Outcome::Edge(via), direct.outcome(&inst).unwrap());
    }

    #[test]
    fn lottery_samples_stay_in_support(seed in any::<u64>()) {
        let inst = InstanceSampler::new(seed).with_length(LengthMode::Zero).instance(1);
        let m: NamedMechanism = "randub".parse().unwrap();
        let lottery = m.outcome(&inst).unwrap().into_lottery();
        let e = sample(&lottery, seed);
        prop_assert!(lottery.support().iter().any(|(s, _)| *s == e));
        prop_assert_eq!(e, sample(&lottery, seed));
    }
}
