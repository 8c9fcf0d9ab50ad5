//! The value-greedy rule and the greedy-side diagnostics consumed by the
//! comparative welfare bounds: truncated greedy welfare and the first stage
//! at which equal-shares budget dynamics diverge from greedy's choices.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::model::{Instance, ModelError, VoterId};
use crate::rational::Rational;
use crate::rules::Outcome;
use crate::satisfaction::{value_by_index, SatisfactionFunction};

/// A greedy run: the outcome in selection order and each pick's value
/// v_μ(p) at selection time (values are state-independent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyRun {
    pub outcome: Outcome,
    pub values: Vec<Rational>,
}

/// Runs the greedy rule from scratch: repeatedly selects the affordable
/// unselected project with highest value, ties broken by ascending project
/// id, until nothing is affordable.
pub fn run_greedy(instance: &Instance, sat: &SatisfactionFunction) -> Result<GreedyRun, ModelError> {
    run_greedy_continuation(instance, sat, &BTreeSet::new(), Rational::zero())
}

/// Runs greedy as a completion rule: `already_selected` is excluded from
/// the candidate pool and `spent` has already been committed. The returned
/// run contains only the continuation picks.
pub fn run_greedy_from(
    instance: &Instance,
    sat: &SatisfactionFunction,
    already_selected: &[String],
    spent: &Rational,
) -> Result<GreedyRun, ModelError> {
    let selected = instance.resolve_ids(already_selected.iter().map(|s| s.as_str()))?;
    run_greedy_continuation(instance, sat, &selected, spent.clone())
}

fn run_greedy_continuation(
    instance: &Instance,
    sat: &SatisfactionFunction,
    already: &BTreeSet<usize>,
    spent: Rational,
) -> Result<GreedyRun, ModelError> {
    let values: Vec<Rational> = (0..instance.projects().len())
        .map(|idx| value_by_index(sat, instance, idx))
        .collect::<Result<_, _>>()?;
    let mut unselected: Vec<usize> = instance
        .indices_by_id()
        .iter()
        .copied()
        .filter(|idx| !already.contains(idx))
        .collect();
    let mut remaining = instance.budget() - spent;
    let mut picks = Vec::new();
    let mut pick_values = Vec::new();
    loop {
        let mut best: Option<usize> = None;
        for (slot, &idx) in unselected.iter().enumerate() {
            if instance.project(idx).cost > remaining {
                continue;
            }
            // Ascending-id iteration order makes "strictly greater" the
            // ascending-id tie-break.
            if best.is_none_or(|b| values[idx] > values[unselected[b]]) {
                best = Some(slot);
            }
        }
        let Some(slot) = best else { break };
        let idx = unselected.remove(slot);
        remaining -= &instance.project(idx).cost;
        pick_values.push(values[idx].clone());
        picks.push(idx);
    }
    Ok(GreedyRun { outcome: Outcome::from_indices(instance, &picks), values: pick_values })
}

/// uw of the truncated greedy outcome: the projects covered by the first
/// `b − c_max` currency units greedy spends, the straddling project counted
/// fractionally at its full value so value per unit cost is preserved.
/// Returns 0 when `c_max = b` (empty prefix).
pub fn truncated_greedy_welfare(
    instance: &Instance,
    sat: &SatisfactionFunction,
) -> Result<Rational, ModelError> {
    let Some(c_max) = instance.projects().iter().map(|p| &p.cost).max() else {
        return Ok(Rational::zero());
    };
    let threshold = instance.budget() - c_max;
    if threshold <= Rational::zero() {
        return Ok(Rational::zero());
    }
    let run = run_greedy(instance, sat)?;
    let mut welfare = Rational::zero();
    let mut spent = Rational::zero();
    for (id, value) in run.outcome.selected.iter().zip(&run.values) {
        let cost = &instance.project(instance.project_index(id).expect("selected id")).cost;
        if &spent + cost <= threshold {
            welfare += value * cost;
            spent += cost;
        } else {
            let fractional_cost = &threshold - &spent;
            welfare += value * fractional_cost;
            break;
        }
    }
    Ok(welfare)
}

/// The first greedy stage at which the two rules' selections come apart
/// under equal-shares budget dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// 1-based stage index into greedy's selection order.
    pub stage: usize,
    pub project_id: String,
    /// |N_p|·b / (n·c(p)) — how many times over p's supporters could buy it
    /// from their initial shares. Zero for an unsupported project, which
    /// equal shares can never buy at all.
    pub alpha: Rational,
}

/// Replays greedy's selection order against equal-shares budget dynamics
/// (each pick funded by an equal split among its supporters) and returns
/// the first stage whose pick some supporter cannot cover — or that has no
/// supporters at all. `None` means the two rules agree on the full
/// sequence.
pub fn first_divergence_stage(
    instance: &Instance,
    sat: &SatisfactionFunction,
) -> Result<Option<Divergence>, ModelError> {
    let run = run_greedy(instance, sat)?;
    let n = instance.voter_count();
    let share = instance.budget() / Rational::from_integer(n.into());
    let mut budgets: Vec<Rational> = vec![share; n];
    for (stage0, id) in run.outcome.selected.iter().enumerate() {
        let idx = instance.project_index(id).expect("selected id");
        let cost = &instance.project(idx).cost;
        let supporters: &[VoterId] = instance.supporters_by_index(idx);
        if supporters.is_empty() {
            return Ok(Some(Divergence {
                stage: stage0 + 1,
                project_id: id.clone(),
                alpha: Rational::zero(),
            }));
        }
        let count = Rational::from_integer(supporters.len().into());
        let equal_share = cost / &count;
        if supporters.iter().any(|&v| budgets[v - 1] < equal_share) {
            let alpha = &count * instance.budget()
                / (Rational::from_integer(n.into()) * cost);
            return Ok(Some(Divergence { stage: stage0 + 1, project_id: id.clone(), alpha }));
        }
        for &voter in supporters {
            budgets[voter - 1] -= &equal_share;
        }
    }
    Ok(None)
}
