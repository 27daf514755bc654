mod common;

use common::*;
use proptest::prelude::*;
use sposs::lp::{build_coverage_lp, solve, DenseLp};
use sposs::objective::Coverage;
use sposs::rng::{substream, tag, Estimate};
use sposs::stochastic::{sample_active, stochastic_opt};
use sposs::{MatroidOracle, Objective, SetSystem, SppInstance};

fn coef() -> impl Strategy<Value = f64> {
    (-20i32..=20).prop_map(|v| f64::from(v) / 10.0)
}

fn arb_lp() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    (1usize..=8, 0usize..=4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(coef(), n),
            prop::collection::vec(prop::collection::vec(coef(), n), m),
            prop::collection::vec((-5i32..=20).prop_map(|v| f64::from(v) / 10.0), m),
            prop::collection::vec((1i32..=20).prop_map(|v| f64::from(v) / 10.0), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn simplex_matches_basic_solution_enumeration((c, a, b, u) in arb_lp()) {
        let lp = DenseLp::new(c.clone(), a.clone(), b.clone(), u.clone()).unwrap();
        match (solve(&lp), brute_lp(&c, &a, &b, &u)) {
            (Ok(sol), Some(best)) => {
                prop_assert!((sol.value - best).abs() <= 1e-9, "simplex {} vs brute {}", sol.value, best);
                prop_assert!(sol.max_violation <= 1e-9);
                prop_assert!(lp.max_violation(&sol.x) <= 1e-9);
                prop_assert!((lp.value(&sol.x) - sol.value).abs() <= 1e-9);
            }
            (Err(_), None) => {}
            (s, bf) => prop_assert!(false, "disagreement: {:?} vs {:?}", s.map(|x| x.value), bf),
        }
    }

    #[test]
    fn coverage_lp_bounds_the_stochastic_optimum(
        (rank, p, universe, sets, seed) in (1usize..4, prop::sample::select(vec![0.3, 0.5, 0.8]), 2usize..=12)
            .prop_flat_map(|(rank, p, u)| (
                Just(rank), Just(p), Just(u),
                prop::collection::vec(prop::collection::vec(0..u, 1..=u), rank..=8),
                any::<u64>(),
            ))
    ) {
        let n = sets.len();
        let obj = Objective::Coverage(Coverage::new(universe, sets, false).unwrap());
        let inst = SppInstance::new("c", SetSystem::matroid(MatroidOracle::uniform(n, rank)), obj, p, 0).unwrap();
        let lp = solve(&build_coverage_lp(&inst).unwrap().lp).unwrap();
        let values: Vec<f64> = (0..400)
            .map(|t| stochastic_opt(&inst, &sample_active(&inst, &mut substream(seed, tag::ACTIVE, t))).unwrap().weight)
            .collect();
        let opt = Estimate::from_samples(&values);
        prop_assert!(lp.value >= opt.mean - 3.0 * opt.stderr - 1e-9, "LP {} vs OPT {:?}", lp.value, opt);
    }
}
