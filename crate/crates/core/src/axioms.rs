//! Cohesive voter groups and the EJR-up-to-one-project proportionality
//! check, with self-certifying violation witnesses.
//!
//! The checker enumerates candidate project sets T (in lexicographic id
//! order, with cost and empty-support pruning) and, for each, counts the
//! common supporters that no single unselected approved project could lift
//! past their satisfaction with T. A group of such voters of size at least
//! n·c(T)/b is itself a T-cohesive group witnessing a violation; smaller
//! groups impose weaker demands, so searching only these maximal pools is
//! exhaustive. The reduction is cross-validated against direct enumeration
//! of all (T, group) pairs in the test suite.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::model::{Instance, ModelError, VoterId};
use crate::rational::Rational;
use crate::rules::Outcome;
use crate::satisfaction::SatisfactionFunction;

/// Axiom-checking failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomError {
    Model(ModelError),
    /// The exhaustive subset enumeration is limited to 20 projects.
    TooManyProjects { count: usize, max: usize },
}

impl fmt::Display for AxiomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomError::Model(e) => write!(f, "{e}"),
            AxiomError::TooManyProjects { count, max } => {
                write!(f, "{count} projects exceed the EJR1 enumeration limit {max}")
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for AxiomError {}

impl From<ModelError> for AxiomError {
    fn from(e: ModelError) -> Self {
        AxiomError::Model(e)
    }
}

/// True iff every group member approves all of `t` and the group's
/// proportional budget share covers c(T). Empty inputs are not cohesive.
pub fn is_cohesive(
    instance: &Instance,
    t: &[&str],
    group: &[VoterId],
) -> Result<bool, ModelError> {
    if t.is_empty() || group.is_empty() {
        return Ok(false);
    }
    let t_indices = instance.resolve_ids(t.iter().copied())?;
    let mut cost = Rational::zero();
    for &idx in &t_indices {
        cost += &instance.project(idx).cost;
    }
    for &voter in group {
        let approved = instance.approvals_of(voter)?;
        if !t_indices.is_subset(approved) {
            return Ok(false);
        }
    }
    let share = Rational::from_integer(group.len().into())
        / Rational::from_integer(instance.voter_count().into())
        * instance.budget();
    Ok(cost <= share)
}

/// A violation witness: the project set T, a T-cohesive group in which no
/// voter is within one project of their satisfaction with T, and the group
/// size bound n·c(T)/b it satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ejr1Witness {
    pub t: Vec<String>,
    pub group: Vec<VoterId>,
    pub group_threshold: Rational,
}

/// Outcome of an EJR1 check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ejr1Result {
    Satisfied,
    Violated(Ejr1Witness),
}

impl Ejr1Result {
    pub fn satisfied(&self) -> bool {
        matches!(self, Ejr1Result::Satisfied)
    }

    pub fn witness(&self) -> Option<&Ejr1Witness> {
        match self {
            Ejr1Result::Satisfied => None,
            Ejr1Result::Violated(w) => Some(w),
        }
    }
}

/// Fixed-width voter bitset.
#[derive(Clone)]
struct VoterMask {
    words: Vec<u64>,
}

impl VoterMask {
    fn empty(n: usize) -> Self {
        VoterMask { words: vec![0; n.div_ceil(64)] }
    }

    fn insert(&mut self, voter: VoterId) {
        let bit = voter - 1;
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    fn intersect_with(&mut self, other: &VoterMask) {
        for (word, o) in self.words.iter_mut().zip(&other.words) {
            *word &= o;
        }
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn voters(&self) -> impl Iterator<Item = VoterId> + '_ {
        self.words.iter().enumerate().flat_map(|(word_idx, &word)| {
            (0..64).filter_map(move |bit| {
                if word & (1 << bit) != 0 {
                    Some(word_idx * 64 + bit + 1)
                } else {
                    None
                }
            })
        })
    }
}

/// Checks EJR1 of an outcome by exhaustive enumeration over candidate
/// project sets (at most 20 projects). Reports the first violation in
/// lexicographic T order, with a minimum-size witnessing group.
pub fn check_ejr1(
    instance: &Instance,
    sat: &SatisfactionFunction,
    outcome: &Outcome,
) -> Result<Ejr1Result, AxiomError> {
    const MAX: usize = 20;
    let m = instance.projects().len();
    if m > MAX {
        return Err(AxiomError::TooManyProjects { count: m, max: MAX });
    }
    let n = instance.voter_count();
    let selected = instance.resolve_ids(outcome.ids())?;
    let mu: Vec<Rational> = instance
        .projects()
        .iter()
        .map(|p| sat.value_of_cost(&p.cost))
        .collect::<Result<_, _>>()
        .map_err(ModelError::from)?;
    // μ_i(outcome) and the best single unselected approved satisfaction,
    // per voter; a voter is a witness for T iff outcome_sat + best > μ(T).
    let mut outcome_sat = vec![Rational::zero(); n];
    let mut best_unselected: Vec<Option<Rational>> = vec![None; n];
    for voter in 1..=n {
        for &idx in instance.approvals_of(voter)? {
            if selected.contains(&idx) {
                outcome_sat[voter - 1] += &mu[idx];
            } else if best_unselected[voter - 1].as_ref().is_none_or(|b| mu[idx] > *b) {
                best_unselected[voter - 1] = Some(mu[idx].clone());
            }
        }
    }
    let supporter_masks: Vec<VoterMask> = (0..m)
        .map(|idx| {
            let mut mask = VoterMask::empty(n);
            for &voter in instance.supporters_by_index(idx) {
                mask.insert(voter);
            }
            mask
        })
        .collect();
    let searcher = Searcher {
        order: instance.indices_by_id(),
        instance,
        mu: &mu,
        selected: &selected,
        supporter_masks: &supporter_masks,
        outcome_sat: &outcome_sat,
        best_unselected: &best_unselected,
        n_rat: Rational::from_integer(n.into()),
    };
    let mut all = VoterMask::empty(n);
    for voter in 1..=n {
        all.insert(voter);
    }
    let root = Frame {
        cost: Rational::zero(),
        mu_t: Rational::zero(),
        common: all,
        inside_outcome: true,
    };
    Ok(match searcher.search(0, &root, &mut Vec::new()) {
        Some(w) => Ejr1Result::Violated(w),
        None => Ejr1Result::Satisfied,
    })
}

/// DFS state: the candidate set T accumulated so far.
struct Frame {
    cost: Rational,
    mu_t: Rational,
    common: VoterMask,
    inside_outcome: bool,
}

/// Immutable context of one enumeration run.
struct Searcher<'a> {
    order: &'a [usize],
    instance: &'a Instance,
    mu: &'a [Rational],
    selected: &'a BTreeSet<usize>,
    supporter_masks: &'a [VoterMask],
    outcome_sat: &'a [Rational],
    best_unselected: &'a [Option<Rational>],
    n_rat: Rational,
}

impl Searcher<'_> {
    fn search(
        &self,
        start: usize,
        frame: &Frame,
        stack: &mut Vec<usize>,
    ) -> Option<Ejr1Witness> {
        for at in start..self.order.len() {
            let idx = self.order[at];
            let cost = &frame.cost + &self.instance.project(idx).cost;
            if cost > *self.instance.budget() {
                continue;
            }
            let mut common = frame.common.clone();
            common.intersect_with(&self.supporter_masks[idx]);
            if common.is_empty() {
                continue;
            }
            let next = Frame {
                mu_t: &frame.mu_t + &self.mu[idx],
                inside_outcome: frame.inside_outcome && self.selected.contains(&idx),
                cost,
                common,
            };
            stack.push(idx);
            if !next.inside_outcome {
                if let Some(witness) = self.violation_at(&next, stack) {
                    stack.pop();
                    return Some(witness);
                }
            }
            let found = self.search(at + 1, &next, stack);
            stack.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn violation_at(&self, frame: &Frame, stack: &[usize]) -> Option<Ejr1Witness> {
        let threshold = &self.n_rat * &frame.cost / self.instance.budget();
        let mut pool: Vec<VoterId> = Vec::new();
        for voter in frame.common.voters() {
            let witnessed = match &self.best_unselected[voter - 1] {
                Some(best) => &self.outcome_sat[voter - 1] + best > frame.mu_t,
                None => false,
            };
            if !witnessed {
                pool.push(voter);
            }
        }
        if Rational::from_integer(pool.len().into()) < threshold {
            return None;
        }
        let need = threshold
            .numer()
            .div_ceil(threshold.denom())
            .to_usize()
            .expect("group size fits");
        pool.truncate(need);
        Some(Ejr1Witness {
            t: stack.iter().map(|&i| self.instance.project(i).id.clone()).collect(),
            group: pool,
            group_threshold: threshold,
        })
    }
}
