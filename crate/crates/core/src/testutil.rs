//! Shared fixtures for unit tests.

use alloc::vec;

use crate::model::{validate_instance, Instance, Project, RawInstance, ValidationMode};
use crate::rational::int;

/// The 10-voter, 5-project running example (budget 100; costs 65, 60, 40,
/// 20, 20).
pub(crate) fn table1_raw() -> RawInstance {
    RawInstance {
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
    }
}

pub(crate) fn table1() -> Instance {
    validate_instance(&table1_raw(), ValidationMode::Strict).unwrap().0
}
