//! Property tests for the satisfaction framework: the DNS chain, welfare
//! additivity, and cost-neutrality over random cost profiles.

mod common;

use proptest::prelude::*;

use pb_core::generators::{gen_random, RandomSpec};
use pb_core::model::{instance_params, validate_instance, Project, RawInstance, ValidationMode};
use pb_core::rational::{rat, Rational};
use pb_core::satisfaction::{check_dns, utilitarian_welfare, SatisfactionFunction};

fn cost_strategy() -> impl Strategy<Value = Rational> {
    (1i64..=800, 1i64..=8).prop_map(|(n, d)| rat(n, d))
}

fn instance_from_costs(costs: Vec<Rational>) -> pb_core::model::Instance {
    let budget = costs.iter().cloned().fold(rat(100, 1), |a, b| a.max(b));
    let projects = costs
        .into_iter()
        .enumerate()
        .map(|(i, cost)| Project { id: format!("p{i:03}"), cost })
        .collect::<Vec<_>>();
    let ids: Vec<String> = projects.iter().map(|p| p.id.clone()).collect();
    let raw = RawInstance { budget, projects, approvals: vec![ids] };
    validate_instance(&raw, ValidationMode::Strict).unwrap().0
}

proptest! {
    /// For every DNS function and every instance project:
    /// μ_min/c_min ≥ μ(p)/c(p) ≥ μ_max/c_max.
    #[test]
    fn dns_chain_holds_for_builtin_functions(costs in prop::collection::vec(cost_strategy(), 1..12)) {
        let instance = instance_from_costs(costs);
        let sats = [
            SatisfactionFunction::Cost,
            SatisfactionFunction::Cardinality,
            SatisfactionFunction::sqrt_cost_checked(1_000_000, &instance).unwrap(),
        ];
        for sat in sats {
            let params = instance_params(&instance, &sat).unwrap();
            for project in instance.projects() {
                let mu = sat.value_of_cost(&project.cost).unwrap();
                prop_assert!(&params.mu_min * &project.cost >= &mu * &params.c_min);
                prop_assert!(&mu * &params.c_max >= &params.mu_max * &project.cost);
            }
        }
    }

    /// Welfare is additive over disjoint outcome parts.
    #[test]
    fn welfare_is_additive(seed in 0u64..400) {
        let instance = gen_random(&RandomSpec { seed, ..RandomSpec::default() }).unwrap();
        let sat = SatisfactionFunction::Cost;
        let ids: Vec<&str> = instance.projects().iter().map(|p| p.id.as_str()).collect();
        let (left, right) = ids.split_at(ids.len() / 2);
        let total = utilitarian_welfare(&sat, &instance, ids.iter().copied()).unwrap();
        let a = utilitarian_welfare(&sat, &instance, left.iter().copied()).unwrap();
        let b = utilitarian_welfare(&sat, &instance, right.iter().copied()).unwrap();
        prop_assert_eq!(total, a + b);
    }

    /// Cost-neutrality: equal costs always get equal satisfaction.
    #[test]
    fn equal_costs_mean_equal_satisfaction(cost in cost_strategy()) {
        let instance = instance_from_costs(vec![cost.clone(), cost]);
        let sats = [
            SatisfactionFunction::Cost,
            SatisfactionFunction::Cardinality,
            SatisfactionFunction::sqrt_cost_checked(1_000_000, &instance).unwrap(),
        ];
        for sat in sats {
            let a = sat.value_of_cost(&instance.projects()[0].cost).unwrap();
            let b = sat.value_of_cost(&instance.projects()[1].cost).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn rounded_sqrt_passes_dns_on_random_instances() {
    for seed in 0..200 {
        let instance = gen_random(&RandomSpec { seed, ..RandomSpec::default() }).unwrap();
        let sat = SatisfactionFunction::sqrt_cost_checked(1_000_000, &instance)
            .expect("rounded sqrt must stay DNS at precision 10^6 on bounded-denominator costs");
        assert!(check_dns(&sat, &instance).unwrap().is_dns());
    }
}
