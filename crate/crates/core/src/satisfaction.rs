//! Additive, cost-neutral satisfaction functions and the welfare quantities
//! built on them.
//!
//! A satisfaction function maps a project's cost to a strictly positive
//! satisfaction. The decreasing-normalized-satisfaction (DNS) class demands,
//! for costs `c ≤ c'`, both `μ(c) ≤ μ(c')` and `μ(c)/c ≥ μ(c')/c'`; cost and
//! cardinality satisfaction sit at the two extremes of that class.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::model::{Instance, ModelError, Project, VoterId};
use crate::rational::{format_rational, Rational};
use crate::roots::floor_sqrt_with_denom;

/// A cost-neutral satisfaction function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatisfactionFunction {
    /// μ(p) = c(p).
    Cost,
    /// μ(p) = 1.
    Cardinality,
    /// μ(p) = √c(p), rounded down to a multiple of 1/precision.
    SqrtCost { precision: u64 },
    /// Explicit cost → satisfaction table; must cover every instance cost.
    Table(BTreeMap<Rational, Rational>),
}

/// Satisfaction evaluation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatError {
    /// Table function has no entry for this cost.
    MissingTableEntry(Rational),
    /// The function produced a non-positive satisfaction for this cost.
    NonPositive(Rational),
    /// Rounded square-root satisfaction broke a DNS condition on the
    /// instance it was built for.
    SqrtNotDns { cheaper: Rational, pricier: Rational },
}

impl fmt::Display for SatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatError::MissingTableEntry(c) => {
                write!(f, "satisfaction table has no entry for cost {}", format_rational(c))
            }
            SatError::NonPositive(c) => {
                write!(f, "satisfaction of cost {} is not positive", format_rational(c))
            }
            SatError::SqrtNotDns { cheaper, pricier } => write!(
                f,
                "rounded square-root satisfaction violates DNS between costs {} and {}",
                format_rational(cheaper),
                format_rational(pricier)
            ),
        }
    }
}

#[cfg(test)]
impl std::error::Error for SatError {}

impl SatisfactionFunction {
    /// Builds a table function, rejecting non-positive satisfactions.
    pub fn table(entries: BTreeMap<Rational, Rational>) -> Result<Self, SatError> {
        for (cost, sat) in &entries {
            if !sat.is_positive() {
                return Err(SatError::NonPositive(cost.clone()));
            }
        }
        Ok(SatisfactionFunction::Table(entries))
    }

    /// Builds the rounded square-root function and verifies it is still DNS
    /// (and positive) on the given instance's costs; rounding at coarse
    /// precision can break condition (2), in which case this errors rather
    /// than silently shipping a non-DNS function.
    pub fn sqrt_cost_checked(precision: u64, instance: &Instance) -> Result<Self, SatError> {
        let sat = SatisfactionFunction::SqrtCost { precision };
        for project in instance.projects() {
            sat.value_of_cost(&project.cost)?;
        }
        let report = check_dns(&sat, instance)?;
        if let Some(violation) = report.violation {
            return Err(SatError::SqrtNotDns {
                cheaper: violation.cheaper_cost,
                pricier: violation.pricier_cost,
            });
        }
        Ok(sat)
    }

    /// μ at a given cost.
    pub fn value_of_cost(&self, cost: &Rational) -> Result<Rational, SatError> {
        let value = match self {
            SatisfactionFunction::Cost => cost.clone(),
            SatisfactionFunction::Cardinality => Rational::from_integer(BigInt::one()),
            SatisfactionFunction::SqrtCost { precision } => {
                floor_sqrt_with_denom(cost, &BigInt::from(*precision))
            }
            SatisfactionFunction::Table(entries) => entries
                .get(cost)
                .cloned()
                .ok_or_else(|| SatError::MissingTableEntry(cost.clone()))?,
        };
        if !value.is_positive() {
            return Err(SatError::NonPositive(cost.clone()));
        }
        Ok(value)
    }

    /// Short name used on the CLI and in reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            SatisfactionFunction::Cost => "cost",
            SatisfactionFunction::Cardinality => "card",
            SatisfactionFunction::SqrtCost { .. } => "sqrt",
            SatisfactionFunction::Table(_) => "table",
        }
    }
}

/// μ(p) for a single project.
pub fn sat_value(sat: &SatisfactionFunction, project: &Project) -> Result<Rational, SatError> {
    sat.value_of_cost(&project.cost)
}

/// μ_i(P'): satisfaction the voter draws from the approved part of the
/// outcome.
pub fn voter_sat<'a, I: IntoIterator<Item = &'a str>>(
    sat: &SatisfactionFunction,
    instance: &Instance,
    voter: VoterId,
    outcome: I,
) -> Result<Rational, ModelError> {
    let approved = instance.approvals_of(voter)?;
    let selected = instance.resolve_ids(outcome)?;
    let mut total = Rational::zero();
    for &idx in selected.intersection(approved) {
        total += sat.value_of_cost(&instance.project(idx).cost)?;
    }
    Ok(total)
}

/// uw_μ(P') = Σ_p |N_p| · μ(p) over the outcome.
pub fn utilitarian_welfare<'a, I: IntoIterator<Item = &'a str>>(
    sat: &SatisfactionFunction,
    instance: &Instance,
    outcome: I,
) -> Result<Rational, ModelError> {
    let selected = instance.resolve_ids(outcome)?;
    let mut total = Rational::zero();
    for idx in selected {
        total += welfare_by_index(sat, instance, idx)?;
    }
    Ok(total)
}

pub(crate) fn welfare_by_index(
    sat: &SatisfactionFunction,
    instance: &Instance,
    index: usize,
) -> Result<Rational, SatError> {
    let supporters = instance.supporters_by_index(index).len();
    Ok(sat.value_of_cost(&instance.project(index).cost)? * Rational::from_integer(supporters.into()))
}

/// v_μ(p) = |N_p| μ(p) / c(p) — welfare per unit cost.
pub fn project_value(
    sat: &SatisfactionFunction,
    instance: &Instance,
    project_id: &str,
) -> Result<Rational, ModelError> {
    let idx = instance
        .project_index(project_id)
        .ok_or_else(|| ModelError::UnknownProjectId(project_id.into()))?;
    Ok(value_by_index(sat, instance, idx)?)
}

pub(crate) fn value_by_index(
    sat: &SatisfactionFunction,
    instance: &Instance,
    index: usize,
) -> Result<Rational, SatError> {
    Ok(welfare_by_index(sat, instance, index)? / &instance.project(index).cost)
}

/// Which DNS condition a pair of costs violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DnsCondition {
    /// Satisfaction must be weakly increasing in cost.
    Monotonicity,
    /// Satisfaction per unit cost must be weakly decreasing in cost.
    PerCostDecreasing,
}

/// A witnessed DNS violation between two instance costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnsViolation {
    pub cheaper_cost: Rational,
    pub pricier_cost: Rational,
    pub condition: DnsCondition,
}

/// Result of checking the DNS conditions over an instance's costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DnsReport {
    pub violation: Option<DnsViolation>,
}

impl DnsReport {
    pub fn is_dns(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks both DNS conditions over every pair of distinct costs occurring in
/// the instance (the instance-relative observable of the global property),
/// reporting the first violating pair in ascending cost order.
pub fn check_dns(sat: &SatisfactionFunction, instance: &Instance) -> Result<DnsReport, SatError> {
    let costs: BTreeSet<&Rational> = instance.projects().iter().map(|p| &p.cost).collect();
    let costs: Vec<&Rational> = costs.into_iter().collect();
    let values: Vec<Rational> =
        costs.iter().map(|c| sat.value_of_cost(c)).collect::<Result<_, _>>()?;
    for window in 0..costs.len().saturating_sub(1) {
        let (cheap, pricey) = (costs[window], costs[window + 1]);
        let (mu_cheap, mu_pricey) = (&values[window], &values[window + 1]);
        let violated = if mu_cheap > mu_pricey {
            Some(DnsCondition::Monotonicity)
        } else if mu_cheap * pricey < mu_pricey * cheap {
            // μ(c)/c < μ(c')/c' rearranged to avoid division.
            Some(DnsCondition::PerCostDecreasing)
        } else {
            None
        };
        if let Some(condition) = violated {
            return Ok(DnsReport {
                violation: Some(DnsViolation {
                    cheaper_cost: cheap.clone(),
                    pricier_cost: pricey.clone(),
                    condition,
                }),
            });
        }
    }
    Ok(DnsReport { violation: None })
}
