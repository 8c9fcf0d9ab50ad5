//! The validated PB instance model: budget, costed projects, approval
//! profile, and the instance-level cost/satisfaction parameters every
//! welfare bound consumes.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_traits::Signed;

use crate::rational::{format_rational, Rational};
use crate::satisfaction::{SatError, SatisfactionFunction};

/// 1-based voter identifier.
pub type VoterId = usize;

/// A project with its exact cost in currency units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Project {
    pub id: String,
    pub cost: Rational,
}

/// An unvalidated instance as read from a file or built by a generator.
#[derive(Debug, Clone, Default)]
pub struct RawInstance {
    pub budget: Rational,
    pub projects: Vec<Project>,
    /// Per-voter approved project ids; duplicates are collapsed.
    pub approvals: Vec<Vec<String>>,
}

/// How to treat violations of the `cost ≤ budget` assumption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Reject over-budget projects and dangling approval references.
    Strict,
    /// Drop them, accumulating warnings (used by Pabulib import).
    Lenient,
}

/// Validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    NonPositiveBudget,
    DuplicateProjectId(String),
    NonPositiveCost(String),
    UnknownProjectId(String),
    UnknownVoter(VoterId),
    CostExceedsBudget { id: String, cost: Rational },
    ZeroVoters,
    Satisfaction(SatError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NonPositiveBudget => write!(f, "budget must be positive"),
            ModelError::DuplicateProjectId(id) => write!(f, "duplicate project id {id:?}"),
            ModelError::NonPositiveCost(id) => write!(f, "non-positive cost for project {id:?}"),
            ModelError::UnknownProjectId(id) => write!(f, "unknown project id {id:?}"),
            ModelError::UnknownVoter(v) => write!(f, "unknown voter {v}"),
            ModelError::CostExceedsBudget { id, cost } => {
                write!(f, "project {id:?} cost {} exceeds budget", format_rational(cost))
            }
            ModelError::ZeroVoters => write!(f, "instance has zero voters"),
            ModelError::Satisfaction(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for ModelError {}

impl From<SatError> for ModelError {
    fn from(e: SatError) -> Self {
        ModelError::Satisfaction(e)
    }
}

/// A validated, immutable PB instance.
///
/// Supporter lists and the id-sorted project permutation are precomputed at
/// validation; after that the instance is safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    budget: Rational,
    projects: Vec<Project>,
    /// Per-voter approved project indices.
    approvals: Vec<BTreeSet<usize>>,
    index_by_id: BTreeMap<String, usize>,
    /// Per-project ascending 1-based voter ids.
    supporters: Vec<Vec<VoterId>>,
    /// Project indices in ascending id order (the tie-break order).
    by_id: Vec<usize>,
}

impl Instance {
    pub fn budget(&self) -> &Rational {
        &self.budget
    }

    pub fn voter_count(&self) -> usize {
        self.approvals.len()
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn project_index(&self, id: &str) -> Option<usize> {
        self.index_by_id.get(id).copied()
    }

    pub fn project(&self, index: usize) -> &Project {
        &self.projects[index]
    }

    /// Voters approving the given project, ascending.
    pub fn supporters(&self, project_id: &str) -> Result<&[VoterId], ModelError> {
        let idx = self
            .project_index(project_id)
            .ok_or_else(|| ModelError::UnknownProjectId(project_id.to_string()))?;
        Ok(&self.supporters[idx])
    }

    pub fn supporters_by_index(&self, index: usize) -> &[VoterId] {
        &self.supporters[index]
    }

    /// Approved project indices of a voter.
    pub fn approvals_of(&self, voter: VoterId) -> Result<&BTreeSet<usize>, ModelError> {
        if voter == 0 || voter > self.approvals.len() {
            return Err(ModelError::UnknownVoter(voter));
        }
        Ok(&self.approvals[voter - 1])
    }

    /// Project indices in ascending id order.
    pub fn indices_by_id(&self) -> &[usize] {
        &self.by_id
    }

    /// Resolves a set of project ids to indices, rejecting unknown ids.
    pub fn resolve_ids<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        ids: I,
    ) -> Result<BTreeSet<usize>, ModelError> {
        ids.into_iter()
            .map(|id| {
                self.project_index(id)
                    .ok_or_else(|| ModelError::UnknownProjectId(id.to_string()))
            })
            .collect()
    }

    /// Rebuilds the raw form (used by the native emitter).
    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            budget: self.budget.clone(),
            projects: self.projects.clone(),
            approvals: self
                .approvals
                .iter()
                .map(|set| set.iter().map(|&i| self.projects[i].id.clone()).collect())
                .collect(),
        }
    }
}

/// Validates a raw instance. In lenient mode, over-budget projects and
/// approval references to unknown or dropped projects are removed with one
/// warning each; in strict mode both are errors.
pub fn validate_instance(
    raw: &RawInstance,
    mode: ValidationMode,
) -> Result<(Instance, Vec<String>), ModelError> {
    if !raw.budget.is_positive() {
        return Err(ModelError::NonPositiveBudget);
    }
    if raw.approvals.is_empty() {
        return Err(ModelError::ZeroVoters);
    }
    let mut warnings = Vec::new();
    let mut seen = BTreeSet::new();
    for project in &raw.projects {
        if !seen.insert(project.id.as_str()) {
            return Err(ModelError::DuplicateProjectId(project.id.clone()));
        }
        if !project.cost.is_positive() {
            return Err(ModelError::NonPositiveCost(project.id.clone()));
        }
    }
    let mut projects = Vec::new();
    for project in &raw.projects {
        if project.cost > raw.budget {
            match mode {
                ValidationMode::Strict => {
                    return Err(ModelError::CostExceedsBudget {
                        id: project.id.clone(),
                        cost: project.cost.clone(),
                    })
                }
                ValidationMode::Lenient => {
                    warnings.push(format!(
                        "dropped project {:?}: cost {} exceeds budget {}",
                        project.id,
                        format_rational(&project.cost),
                        format_rational(&raw.budget)
                    ));
                    continue;
                }
            }
        }
        projects.push(project.clone());
    }
    let index_by_id: BTreeMap<String, usize> =
        projects.iter().enumerate().map(|(i, p)| (p.id.clone(), i)).collect();
    let mut approvals = Vec::with_capacity(raw.approvals.len());
    for (voter_idx, ballot) in raw.approvals.iter().enumerate() {
        let mut set = BTreeSet::new();
        for id in ballot {
            match index_by_id.get(id.as_str()) {
                Some(&idx) => {
                    if !set.insert(idx) {
                        warnings.push(format!(
                            "voter {}: duplicate approval of {:?} collapsed",
                            voter_idx + 1,
                            id
                        ));
                    }
                }
                None => match mode {
                    ValidationMode::Strict => {
                        return Err(ModelError::UnknownProjectId(id.clone()))
                    }
                    ValidationMode::Lenient => warnings.push(format!(
                        "voter {}: dropped approval of unknown or removed project {:?}",
                        voter_idx + 1,
                        id
                    )),
                },
            }
        }
        approvals.push(set);
    }
    let mut supporters = vec![Vec::new(); projects.len()];
    for (voter_idx, set) in approvals.iter().enumerate() {
        for &project in set {
            supporters[project].push(voter_idx + 1);
        }
    }
    let mut by_id: Vec<usize> = (0..projects.len()).collect();
    by_id.sort_by(|&a, &b| projects[a].id.cmp(&projects[b].id));
    Ok((
        Instance { budget: raw.budget.clone(), projects, approvals, index_by_id, supporters, by_id },
        warnings,
    ))
}

/// Instance-level parameters: extreme costs, the implied committee-size
/// range, and extreme per-project satisfactions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceParams {
    pub c_min: Rational,
    pub c_max: Rational,
    /// budget / c_max — minimum committee size.
    pub k1: Rational,
    /// budget / c_min — maximum committee size.
    pub k2: Rational,
    pub mu_min: Rational,
    pub mu_max: Rational,
}

/// Computes [`InstanceParams`]; errors if the instance has no projects or
/// the satisfaction function is undefined on some cost.
pub fn instance_params(
    instance: &Instance,
    sat: &SatisfactionFunction,
) -> Result<InstanceParams, ModelError> {
    let mut costs = instance.projects().iter().map(|p| &p.cost);
    let first = costs.next().ok_or_else(|| ModelError::UnknownProjectId("<none>".into()))?;
    let (mut c_min, mut c_max) = (first.clone(), first.clone());
    for cost in costs {
        if *cost < c_min {
            c_min = cost.clone();
        }
        if *cost > c_max {
            c_max = cost.clone();
        }
    }
    let mut mu_min: Option<Rational> = None;
    let mut mu_max: Option<Rational> = None;
    for project in instance.projects() {
        let mu = sat.value_of_cost(&project.cost)?;
        if mu_min.as_ref().is_none_or(|m| mu < *m) {
            mu_min = Some(mu.clone());
        }
        if mu_max.as_ref().is_none_or(|m| mu > *m) {
            mu_max = Some(mu);
        }
    }
    Ok(InstanceParams {
        k1: instance.budget() / &c_max,
        k2: instance.budget() / &c_min,
        c_min,
        c_max,
        mu_min: mu_min.expect("nonempty"),
        mu_max: mu_max.expect("nonempty"),
    })
}
