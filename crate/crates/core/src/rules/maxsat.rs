//! Exact welfare maximization, solved as a 0/1 knapsack with project costs
//! as weights and per-project utilitarian welfare as profits.
//!
//! Costs and the budget are scaled by the least common multiple of their
//! denominators. Small scaled budgets go through dynamic programming over
//! the budget axis; anything past the configured caps falls back to
//! branch-and-bound with the fractional-knapsack upper bound. Ties among
//! optimal sets are broken toward the lexicographically smallest sorted id
//! list, via a forward reconstruction that includes a project exactly when
//! doing so keeps the optimum reachable (an empty continuation, reached
//! once the residual target hits zero, beats any nonempty one).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::model::{Instance, ModelError};
use crate::rational::Rational;
use crate::rules::Outcome;
use crate::satisfaction::{welfare_by_index, SatisfactionFunction};

/// Caps steering the exact solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxSatConfig {
    /// Largest scaled budget the dynamic program will take on.
    pub dp_budget_cap: u64,
    /// Largest m²·W work estimate for the DP-with-reconstruction path.
    pub dp_work_cap: u64,
    /// Whether branch-and-bound may be used past the caps.
    pub enable_branch_and_bound: bool,
}

impl Default for MaxSatConfig {
    fn default() -> Self {
        MaxSatConfig {
            dp_budget_cap: 10_000_000,
            dp_work_cap: 2_000_000_000,
            enable_branch_and_bound: true,
        }
    }
}

/// Failure of exact welfare maximization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxSatError {
    Model(ModelError),
    /// The scaled budget exceeds the DP cap and branch-and-bound is
    /// disabled.
    DpCapExceeded { cap: u64 },
    /// Brute-force oracle asked to enumerate too many projects.
    TooManyProjects { count: usize, max: usize },
}

impl fmt::Display for MaxSatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxSatError::Model(e) => write!(f, "{e}"),
            MaxSatError::DpCapExceeded { cap } => {
                write!(f, "scaled budget exceeds DP cap {cap} and branch-and-bound is disabled")
            }
            MaxSatError::TooManyProjects { count, max } => {
                write!(f, "{count} projects exceed the exhaustive-search limit {max}")
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for MaxSatError {}

impl From<ModelError> for MaxSatError {
    fn from(e: ModelError) -> Self {
        MaxSatError::Model(e)
    }
}

struct Item {
    /// Project index in the instance.
    index: usize,
    cost: Rational,
    profit: Rational,
}

fn items_by_id(instance: &Instance, sat: &SatisfactionFunction) -> Result<Vec<Item>, ModelError> {
    instance
        .indices_by_id()
        .iter()
        .map(|&index| {
            Ok(Item {
                index,
                cost: instance.project(index).cost.clone(),
                profit: welfare_by_index(sat, instance, index)?,
            })
        })
        .collect()
}

/// Runs the maximum-satisfaction rule: a feasible outcome maximizing
/// utilitarian welfare, ties broken toward the lexicographically smallest
/// id list. Selected ids are reported in ascending order.
pub fn run_maxsat(
    instance: &Instance,
    sat: &SatisfactionFunction,
    config: &MaxSatConfig,
) -> Result<Outcome, MaxSatError> {
    let items = items_by_id(instance, sat)?;
    if items.is_empty() {
        return Ok(Outcome::empty());
    }
    if let Some(scaled) = scale_for_dp(instance, &items, config) {
        let chosen = dp_solve(&scaled);
        let indices: Vec<usize> = chosen.iter().map(|&pos| items[pos].index).collect();
        return Ok(Outcome::from_indices(instance, &indices));
    }
    if !config.enable_branch_and_bound {
        return Err(MaxSatError::DpCapExceeded { cap: config.dp_budget_cap });
    }
    let chosen = bnb_solve(&items, instance.budget());
    let indices: Vec<usize> = chosen.iter().map(|&pos| items[pos].index).collect();
    Ok(Outcome::from_indices(instance, &indices))
}

/// Exhaustive-enumeration oracle with the same tie-break, limited to 20
/// projects.
pub fn brute_force_maxsat(
    instance: &Instance,
    sat: &SatisfactionFunction,
) -> Result<Outcome, MaxSatError> {
    const MAX: usize = 20;
    let items = items_by_id(instance, sat)?;
    if items.len() > MAX {
        return Err(MaxSatError::TooManyProjects { count: items.len(), max: MAX });
    }
    let mut enumeration = Enumeration {
        items: &items,
        budget: instance.budget(),
        path: Vec::new(),
        best_profit: Rational::zero(),
        best_path: Vec::new(),
    };
    enumeration.recurse(0, &Rational::zero(), &Rational::zero());
    let indices: Vec<usize> = enumeration.best_path.iter().map(|&pos| items[pos].index).collect();
    Ok(Outcome::from_indices(instance, &indices))
}

/// Exhaustive subset enumeration state; positions are in id order, so the
/// path comparison is exactly the sorted-id-list order.
struct Enumeration<'a> {
    items: &'a [Item],
    budget: &'a Rational,
    path: Vec<usize>,
    best_profit: Rational,
    best_path: Vec<usize>,
}

impl Enumeration<'_> {
    fn recurse(&mut self, pos: usize, cost: &Rational, profit: &Rational) {
        if pos == self.items.len() {
            if *profit > self.best_profit
                || (*profit == self.best_profit && self.path < self.best_path)
            {
                self.best_profit = profit.clone();
                self.best_path = self.path.clone();
            }
            return;
        }
        let item = &self.items[pos];
        let with_cost = cost + &item.cost;
        if with_cost <= *self.budget {
            self.path.push(pos);
            let with_profit = profit + &item.profit;
            self.recurse(pos + 1, &with_cost, &with_profit);
            self.path.pop();
        }
        self.recurse(pos + 1, cost, profit);
    }
}

struct ScaledItems {
    weights: Vec<u64>,
    profits: Vec<u128>,
    capacity: u64,
}

/// Scales costs and profits to integers; `None` when any cap is exceeded.
fn scale_for_dp(instance: &Instance, items: &[Item], config: &MaxSatConfig) -> Option<ScaledItems> {
    let mut weight_lcm = instance.budget().denom().clone();
    for item in items {
        weight_lcm = weight_lcm.lcm(item.cost.denom());
    }
    let capacity = to_scaled_u64(instance.budget(), &weight_lcm)?;
    if capacity > config.dp_budget_cap {
        return None;
    }
    let work = (items.len() as u64).checked_pow(2)?.checked_mul(capacity.max(1))?;
    if work > config.dp_work_cap {
        return None;
    }
    let weights: Vec<u64> =
        items.iter().map(|i| to_scaled_u64(&i.cost, &weight_lcm)).collect::<Option<_>>()?;
    let mut profit_lcm = BigInt::one();
    for item in items {
        profit_lcm = profit_lcm.lcm(item.profit.denom());
    }
    let profits: Vec<u128> = items
        .iter()
        .map(|i| ((&i.profit * Rational::from_integer(profit_lcm.clone())).to_integer()).to_u128())
        .collect::<Option<_>>()?;
    // The DP sums profits; make sure the total cannot overflow.
    profits.iter().try_fold(0u128, |acc, &p| acc.checked_add(p))?;
    Some(ScaledItems { weights, profits, capacity })
}

fn to_scaled_u64(value: &Rational, scale: &BigInt) -> Option<u64> {
    let scaled = value * Rational::from_integer(scale.clone());
    if !scaled.denom().is_one() {
        return None;
    }
    scaled.to_integer().to_u64()
}

/// Max profit over items `first..` within `capacity`.
fn suffix_max(scaled: &ScaledItems, first: usize, capacity: u64) -> u128 {
    let cap = capacity as usize;
    let mut dp = vec![0u128; cap + 1];
    for pos in first..scaled.weights.len() {
        let weight = scaled.weights[pos] as usize;
        let profit = scaled.profits[pos];
        if weight > cap {
            continue;
        }
        for w in (weight..=cap).rev() {
            let candidate = dp[w - weight] + profit;
            if candidate > dp[w] {
                dp[w] = candidate;
            }
        }
    }
    dp[cap]
}

/// DP path: computes the optimum, then reconstructs the lex-smallest
/// optimal set by walking items in id order and including one whenever the
/// optimum stays reachable (stopping once the residual target is zero).
fn dp_solve(scaled: &ScaledItems) -> Vec<usize> {
    let mut capacity = scaled.capacity;
    let mut target = suffix_max(scaled, 0, capacity);
    let mut chosen = Vec::new();
    for pos in 0..scaled.weights.len() {
        if target == 0 {
            break;
        }
        let weight = scaled.weights[pos];
        if weight <= capacity {
            let with = scaled.profits[pos] + suffix_max(scaled, pos + 1, capacity - weight);
            if with == target {
                chosen.push(pos);
                capacity -= weight;
                target -= scaled.profits[pos];
            }
        }
    }
    chosen
}

/// Branch-and-bound fallback over exact rationals.
fn bnb_solve(items: &[Item], budget: &Rational) -> Vec<usize> {
    let mut density_order: Vec<usize> = (0..items.len()).collect();
    density_order.sort_by(|&a, &b| {
        let da = &items[a].profit / &items[a].cost;
        let db = &items[b].profit / &items[b].cost;
        db.cmp(&da).then(a.cmp(&b))
    });
    let mut capacity = budget.clone();
    let mut target = bnb_max(items, &density_order, 0, &capacity);
    let mut chosen = Vec::new();
    for pos in 0..items.len() {
        if target.is_zero() {
            break;
        }
        if items[pos].cost <= capacity {
            let rest = &capacity - &items[pos].cost;
            let with = &items[pos].profit + bnb_max(items, &density_order, pos + 1, &rest);
            if with == target {
                capacity = rest;
                target -= &items[pos].profit;
                chosen.push(pos);
            }
        }
    }
    chosen
}

/// Max profit over items with position ≥ `first` within `capacity`,
/// via depth-first search in density order with the fractional bound.
fn bnb_max(items: &[Item], density_order: &[usize], first: usize, capacity: &Rational) -> Rational {
    let order: Vec<usize> = density_order.iter().copied().filter(|&p| p >= first).collect();
    // Suffix totals let whole-suffix fits short-circuit.
    let mut suffix_cost = vec![Rational::zero(); order.len() + 1];
    let mut suffix_profit = vec![Rational::zero(); order.len() + 1];
    for at in (0..order.len()).rev() {
        suffix_cost[at] = &suffix_cost[at + 1] + &items[order[at]].cost;
        suffix_profit[at] = &suffix_profit[at + 1] + &items[order[at]].profit;
    }
    let search = BnbSearch { items, order, suffix_cost, suffix_profit };
    let mut best = Rational::zero();
    search.dfs(0, capacity, &Rational::zero(), &mut best);
    best
}

struct BnbSearch<'a> {
    items: &'a [Item],
    /// Item positions in density order.
    order: Vec<usize>,
    suffix_cost: Vec<Rational>,
    suffix_profit: Vec<Rational>,
}

impl BnbSearch<'_> {
    fn fractional_bound(&self, at: usize, capacity: &Rational) -> Rational {
        let mut room = capacity.clone();
        let mut bound = Rational::zero();
        for &pos in &self.order[at..] {
            let item = &self.items[pos];
            if item.cost <= room {
                room -= &item.cost;
                bound += &item.profit;
            } else {
                bound += &item.profit * room / &item.cost;
                break;
            }
        }
        bound
    }

    fn dfs(&self, at: usize, capacity: &Rational, acc: &Rational, best: &mut Rational) {
        if *acc > *best {
            *best = acc.clone();
        }
        if at == self.order.len() {
            return;
        }
        if self.suffix_cost[at] <= *capacity {
            let all = acc + &self.suffix_profit[at];
            if all > *best {
                *best = all;
            }
            return;
        }
        if acc + self.fractional_bound(at, capacity) <= *best {
            return;
        }
        let item = &self.items[self.order[at]];
        if item.cost <= *capacity {
            let rest = capacity - &item.cost;
            let with = acc + &item.profit;
            self.dfs(at + 1, &rest, &with, best);
        }
        self.dfs(at + 1, capacity, acc, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, Project, RawInstance, ValidationMode};
    use crate::rational::{int, rat};
    use crate::testutil::table1;

    #[test]
    fn running_example_optimum() {
        let instance = table1();
        let outcome =
            run_maxsat(&instance, &SatisfactionFunction::Cost, &MaxSatConfig::default()).unwrap();
        assert_eq!(outcome.selected, vec!["p2", "p3"]);
        assert_eq!(outcome.total_cost, int(100));
    }

    #[test]
    fn everything_selected_when_budget_is_loose() {
        let raw = RawInstance {
            budget: int(100),
            projects: vec![
                Project { id: "a".into(), cost: int(10) },
                Project { id: "b".into(), cost: int(20) },
                Project { id: "c".into(), cost: int(30) },
            ],
            approvals: vec![vec!["a".into(), "b".into(), "c".into()]; 2],
        };
        let (instance, _) = validate_instance(&raw, ValidationMode::Strict).unwrap();
        let outcome =
            run_maxsat(&instance, &SatisfactionFunction::Cost, &MaxSatConfig::default()).unwrap();
        assert_eq!(outcome.selected, vec!["a", "b", "c"]);
    }

    #[test]
    fn zero_welfare_projects_join_only_when_lex_smaller() {
        // "a" has no supporters: {a, b} and {b} tie on welfare, and the
        // sorted id list [a, b] precedes [b].
        let raw = RawInstance {
            budget: int(30),
            projects: vec![
                Project { id: "a".into(), cost: int(10) },
                Project { id: "b".into(), cost: int(10) },
                Project { id: "z".into(), cost: int(10) },
            ],
            approvals: vec![vec!["b".into()]],
        };
        let (instance, _) = validate_instance(&raw, ValidationMode::Strict).unwrap();
        let outcome =
            run_maxsat(&instance, &SatisfactionFunction::Cost, &MaxSatConfig::default()).unwrap();
        // [a, b] < [b], while the trailing z would only extend the list.
        assert_eq!(outcome.selected, vec!["a", "b"]);
        let brute = brute_force_maxsat(&instance, &SatisfactionFunction::Cost).unwrap();
        assert_eq!(brute.selected, outcome.selected);
    }

    #[test]
    fn brute_force_respects_project_limit() {
        let raw = RawInstance {
            budget: int(100),
            projects: (0..21).map(|i| Project { id: format!("p{i:02}"), cost: int(1) }).collect(),
            approvals: vec![vec![]],
        };
        let (instance, _) = validate_instance(&raw, ValidationMode::Strict).unwrap();
        assert!(matches!(
            brute_force_maxsat(&instance, &SatisfactionFunction::Cost),
            Err(MaxSatError::TooManyProjects { count: 21, max: 20 })
        ));
    }

    #[test]
    fn single_project_cases() {
        let raw = RawInstance {
            budget: int(10),
            projects: vec![Project { id: "a".into(), cost: int(10) }],
            approvals: vec![vec!["a".into()]],
        };
        let (instance, _) = validate_instance(&raw, ValidationMode::Strict).unwrap();
        let outcome = brute_force_maxsat(&instance, &SatisfactionFunction::Cost).unwrap();
        assert_eq!(outcome.selected, vec!["a"]);
    }

    #[test]
    fn dp_cap_exceeded_without_bnb_is_an_error() {
        let raw = RawInstance {
            budget: int(100_000_000),
            projects: vec![Project { id: "a".into(), cost: int(1) }],
            approvals: vec![vec!["a".into()]],
        };
        let (instance, _) = validate_instance(&raw, ValidationMode::Strict).unwrap();
        let config = MaxSatConfig { enable_branch_and_bound: false, ..MaxSatConfig::default() };
        assert!(matches!(
            run_maxsat(&instance, &SatisfactionFunction::Cost, &config),
            Err(MaxSatError::DpCapExceeded { .. })
        ));
        let with_bnb = run_maxsat(&instance, &SatisfactionFunction::Cost, &MaxSatConfig::default())
            .unwrap();
        assert_eq!(with_bnb.selected, vec!["a"]);
    }

    #[test]
    fn bnb_matches_dp_on_running_example() {
        let instance = table1();
        let forced_bnb = MaxSatConfig { dp_budget_cap: 0, ..MaxSatConfig::default() };
        for sat in [SatisfactionFunction::Cost, SatisfactionFunction::Cardinality] {
            let dp = run_maxsat(&instance, &sat, &MaxSatConfig::default()).unwrap();
            let bnb = run_maxsat(&instance, &sat, &forced_bnb).unwrap();
            assert_eq!(dp.selected, bnb.selected);
        }
    }

    #[test]
    fn fractional_costs_are_scaled_exactly() {
        let raw = RawInstance {
            budget: rat(13, 2),
            projects: vec![
                Project { id: "a".into(), cost: rat(13, 4) },
                Project { id: "b".into(), cost: rat(13, 4) },
                Project { id: "c".into(), cost: rat(1, 3) },
            ],
            approvals: vec![vec!["a".into(), "b".into()], vec!["c".into()]],
        };
        let (instance, _) = validate_instance(&raw, ValidationMode::Strict).unwrap();
        let outcome =
            run_maxsat(&instance, &SatisfactionFunction::Cost, &MaxSatConfig::default()).unwrap();
        // a+b exhaust the budget exactly and dominate any set containing c.
        assert_eq!(outcome.selected, vec!["a", "b"]);
    }
}
