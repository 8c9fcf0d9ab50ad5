//! Shared fixtures and helpers for the integration suites.
#![allow(dead_code)]

use pb_core::model::{validate_instance, Instance, Project, RawInstance, ValidationMode};
use pb_core::rational::{int, Rational};
use pb_core::rules::Outcome;
use pb_core::satisfaction::{utilitarian_welfare, SatisfactionFunction};

/// The 10-voter, 5-project running example (budget 100; costs 65, 60, 40,
/// 20, 20).
pub fn table1() -> Instance {
    let raw = RawInstance {
        budget: int(100),
        projects: vec![
            Project { id: "p1".into(), cost: int(65) },
            Project { id: "p2".into(), cost: int(60) },
            Project { id: "p3".into(), cost: int(40) },
            Project { id: "p4".into(), cost: int(20) },
            Project { id: "p5".into(), cost: int(20) },
        ],
        approvals: vec![
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["p1".into(), "p2".into()],
            vec!["p1".into(), "p2".into()],
            vec!["p1".into(), "p4".into()],
            vec!["p3".into(), "p4".into()],
            vec!["p4".into()],
            vec!["p5".into()],
            vec!["p5".into()],
        ],
    };
    validate_instance(&raw, ValidationMode::Strict).unwrap().0
}

pub fn welfare(instance: &Instance, sat: &SatisfactionFunction, outcome: &Outcome) -> Rational {
    utilitarian_welfare(sat, instance, outcome.ids()).unwrap()
}

/// No unselected project fits into the remaining budget.
pub fn assert_exhaustive(instance: &Instance, outcome: &Outcome) {
    let remaining = instance.budget() - &outcome.total_cost;
    let selected = outcome.id_set();
    for project in instance.projects() {
        if !selected.contains(project.id.as_str()) {
            assert!(
                project.cost > remaining,
                "project {} (cost {}) still affordable with {} left",
                project.id,
                project.cost,
                remaining
            );
        }
    }
}
