//! The rule families: value-greedy selection, the Method of Equal Shares
//! (plain and greedy-completed), and exact welfare maximization, plus the
//! diagnostics used by the comparative welfare bounds.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::model::Instance;
use crate::rational::Rational;

mod greedy;
mod maxsat;
mod mes;

pub use greedy::{
    first_divergence_stage, run_greedy, run_greedy_from, truncated_greedy_welfare, Divergence,
    GreedyRun,
};
pub use maxsat::{brute_force_maxsat, run_maxsat, MaxSatConfig, MaxSatError};
pub use mes::{compute_rho, run_mes, run_mes_completed, MesRound, MesRun, MesTrace, Rho, RhoResult};

/// A feasible outcome: selected project ids in selection order, plus their
/// exact total cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub selected: Vec<String>,
    pub total_cost: Rational,
}

impl Outcome {
    pub fn empty() -> Self {
        Outcome { selected: Vec::new(), total_cost: Rational::zero() }
    }

    pub(crate) fn from_indices(instance: &Instance, indices: &[usize]) -> Self {
        let mut total_cost = Rational::zero();
        let mut selected = Vec::with_capacity(indices.len());
        for &idx in indices {
            let project = instance.project(idx);
            total_cost += &project.cost;
            selected.push(project.id.clone());
        }
        Outcome { selected, total_cost }
    }

    /// Selected ids as a set, for membership tests.
    pub fn id_set(&self) -> BTreeSet<&str> {
        self.selected.iter().map(|s| s.as_str()).collect()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.selected.iter().map(|s| s.as_str())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.selected.iter().any(|s| s == id)
    }
}
