//! The Method of Equal Shares: every voter holds an equal share b/n of the
//! budget; each round buys the project with the cheapest price per unit of
//! satisfaction, charging each supporter min(bᵢ, ρ·μ(p)).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::model::{Instance, ModelError, VoterId};
use crate::rational::{format_rational, Rational};
use crate::rules::{run_greedy_from, Outcome};
use crate::satisfaction::SatisfactionFunction;

/// The price per unit satisfaction at which a project can be bought, or
/// infinity when its supporters' remaining budgets cannot cover its cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rho {
    Finite(Rational),
    Infinite,
}

impl Rho {
    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            Rho::Finite(r) => Some(r),
            Rho::Infinite => None,
        }
    }
}

/// Result of pricing one project against a budget vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoResult {
    pub rho: Rho,
    /// Positive charges per supporter; empty when `rho` is infinite.
    pub payments: BTreeMap<VoterId, Rational>,
}

/// Solves Σᵢ min(bᵢ, ρ·μ) = cost for the minimal ρ ≥ 0.
///
/// `budgets` holds one remaining budget per voter (index voter−1). The
/// equation is piecewise linear in ρ; walking supporters in ascending
/// budget order, the first segment whose equal split fits the smallest
/// remaining budget yields the exact solution.
pub fn compute_rho(
    instance: &Instance,
    sat: &SatisfactionFunction,
    project_id: &str,
    budgets: &[Rational],
) -> Result<RhoResult, ModelError> {
    assert_eq!(budgets.len(), instance.voter_count(), "one budget per voter");
    let idx = instance
        .project_index(project_id)
        .ok_or_else(|| ModelError::UnknownProjectId(project_id.into()))?;
    let mu = sat.value_of_cost(&instance.project(idx).cost)?;
    Ok(solve_rho(&instance.project(idx).cost, &mu, instance.supporters_by_index(idx), budgets))
}

fn solve_rho(
    cost: &Rational,
    mu: &Rational,
    supporters: &[VoterId],
    budgets: &[Rational],
) -> RhoResult {
    let mut order: Vec<VoterId> = supporters.to_vec();
    order.sort_by(|&a, &b| budgets[a - 1].cmp(&budgets[b - 1]).then(a.cmp(&b)));
    let mut paid = Rational::zero();
    let mut payments = BTreeMap::new();
    for (rank, &voter) in order.iter().enumerate() {
        let remaining_voters = Rational::from_integer((order.len() - rank).into());
        let rho = (cost - &paid) / (&remaining_voters * mu);
        let equal_charge = &rho * mu;
        if equal_charge <= budgets[voter - 1] {
            for &v in &order[rank..] {
                if equal_charge.is_zero() {
                    break;
                }
                payments.insert(v, equal_charge.clone());
            }
            return RhoResult { rho: Rho::Finite(rho), payments };
        }
        let budget = budgets[voter - 1].clone();
        paid += &budget;
        if !budget.is_zero() {
            payments.insert(voter, budget);
        }
    }
    RhoResult { rho: Rho::Infinite, payments: BTreeMap::new() }
}

/// One equal-shares purchase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MesRound {
    pub project_id: String,
    pub rho: Rational,
    /// Positive charges per paying supporter; they sum to the project cost.
    pub payments: BTreeMap<VoterId, Rational>,
    /// Every voter's remaining budget after this round (index voter−1).
    pub budgets_after: Vec<Rational>,
    /// Per affordable unselected project at the start of the round: the
    /// supporters whose remaining budget falls short of an equal cost
    /// split. Only nonempty sets are recorded.
    pub budget_limited: BTreeMap<String, BTreeSet<VoterId>>,
}

/// Full record of an equal-shares run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MesTrace {
    /// b/n.
    pub initial_budget_share: Rational,
    pub rounds: Vec<MesRound>,
    /// Index into the outcome's selection order where greedy completion
    /// took over; equals the number of equal-shares purchases.
    pub completion_start_index: usize,
}

impl MesTrace {
    /// Line-oriented serialization, one round per line:
    /// `<project>;<rho>;<voter>:<amount>,...`.
    pub fn to_lines(&self) -> Vec<String> {
        self.rounds
            .iter()
            .map(|round| {
                let mut line = round.project_id.clone();
                line.push(';');
                line.push_str(&format_rational(&round.rho));
                line.push(';');
                let mut first = true;
                for (voter, amount) in &round.payments {
                    if !first {
                        line.push(',');
                    }
                    first = false;
                    line.push_str(&alloc::format!("{voter}:{}", format_rational(amount)));
                }
                line
            })
            .collect()
    }
}

/// Outcome plus trace of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MesRun {
    pub outcome: Outcome,
    pub trace: MesTrace,
}

/// Runs the Method of Equal Shares without completion.
pub fn run_mes(instance: &Instance, sat: &SatisfactionFunction) -> Result<MesRun, ModelError> {
    let n = instance.voter_count();
    let share = instance.budget() / Rational::from_integer(n.into());
    let mut budgets: Vec<Rational> = vec![share.clone(); n];
    let mut unselected: BTreeSet<usize> = (0..instance.projects().len()).collect();
    let mut spent = Rational::zero();
    let mut picks: Vec<usize> = Vec::new();
    let mut rounds: Vec<MesRound> = Vec::new();
    let mus: Vec<Rational> = instance
        .projects()
        .iter()
        .map(|p| sat.value_of_cost(&p.cost))
        .collect::<Result<_, _>>()?;
    loop {
        let mut budget_limited = BTreeMap::new();
        let mut best: Option<(usize, Rational, BTreeMap<VoterId, Rational>)> = None;
        for &idx in instance.indices_by_id() {
            if !unselected.contains(&idx) {
                continue;
            }
            let project = instance.project(idx);
            let supporters = instance.supporters_by_index(idx);
            if &spent + &project.cost <= *instance.budget() && !supporters.is_empty() {
                let split = &project.cost / Rational::from_integer(supporters.len().into());
                let limited: BTreeSet<VoterId> = supporters
                    .iter()
                    .copied()
                    .filter(|&v| budgets[v - 1] < split)
                    .collect();
                if !limited.is_empty() {
                    budget_limited.insert(project.id.clone(), limited);
                }
            }
            let result = solve_rho(&project.cost, &mus[idx], supporters, &budgets);
            if let Rho::Finite(rho) = result.rho {
                // Ascending-id iteration makes "strictly less" the
                // ascending-id tie-break.
                if best.as_ref().is_none_or(|(_, incumbent, _)| rho < *incumbent) {
                    best = Some((idx, rho, result.payments));
                }
            }
        }
        let Some((idx, rho, payments)) = best else { break };
        for (&voter, amount) in &payments {
            budgets[voter - 1] -= amount;
        }
        spent += &instance.project(idx).cost;
        unselected.remove(&idx);
        picks.push(idx);
        rounds.push(MesRound {
            project_id: instance.project(idx).id.clone(),
            rho,
            payments,
            budgets_after: budgets.clone(),
            budget_limited,
        });
    }
    let completion_start_index = picks.len();
    Ok(MesRun {
        outcome: Outcome::from_indices(instance, &picks),
        trace: MesTrace { initial_budget_share: share, rounds, completion_start_index },
    })
}

/// Runs equal shares, then makes the outcome exhaustive by running greedy
/// over the remaining projects and budget.
pub fn run_mes_completed(
    instance: &Instance,
    sat: &SatisfactionFunction,
) -> Result<MesRun, ModelError> {
    let mut run = run_mes(instance, sat)?;
    let completion = run_greedy_from(instance, sat, &run.outcome.selected, &run.outcome.total_cost)?;
    run.outcome.selected.extend(completion.outcome.selected);
    run.outcome.total_cost += completion.outcome.total_cost;
    Ok(run)
}
