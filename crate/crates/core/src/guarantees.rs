//! The closed-form utilitarian welfare bounds and the empirical ratio
//! computations they are certified against.
//!
//! All bounds are functions of the budget and the extreme project costs.
//! The equal-shares bound contains a square root and is therefore carried
//! as a certified rational bracket; every "bound holds" comparison is made
//! against the bracket's upper end, so a passing check is sound regardless
//! of the bracketing error.

use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::model::{instance_params, Instance, ModelError};
use crate::rational::Rational;
use crate::roots::{default_bracket_denom, floor_sqrt, sqrt_bracket, RootBracket};
use crate::rules::{
    first_divergence_stage, run_greedy, run_maxsat, run_mes_completed, truncated_greedy_welfare,
    Divergence, MaxSatConfig, MaxSatError, Outcome,
};
use crate::satisfaction::{check_dns, utilitarian_welfare, SatisfactionFunction};

/// Bound-computation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuaranteeError {
    /// Requires 0 < c_min ≤ c_max ≤ b.
    ParameterOrdering,
    /// The comparative equal-shares bound assumes a DNS function.
    NotDns,
    Model(ModelError),
    MaxSat(MaxSatError),
}

impl fmt::Display for GuaranteeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuaranteeError::ParameterOrdering => {
                write!(f, "parameters must satisfy 0 < c_min <= c_max <= b")
            }
            GuaranteeError::NotDns => {
                write!(f, "satisfaction function is not DNS on this instance")
            }
            GuaranteeError::Model(e) => write!(f, "{e}"),
            GuaranteeError::MaxSat(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for GuaranteeError {}

impl From<ModelError> for GuaranteeError {
    fn from(e: ModelError) -> Self {
        GuaranteeError::Model(e)
    }
}

impl From<MaxSatError> for GuaranteeError {
    fn from(e: MaxSatError) -> Self {
        GuaranteeError::MaxSat(e)
    }
}

/// The four closed-form bounds for one (b, c_min, c_max) triple, raw and
/// clamped at zero (a negative raw bound is a vacuous guarantee).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuaranteeReport {
    pub budget: Rational,
    pub c_min: Rational,
    pub c_max: Rational,
    /// b / c_max — minimum committee size.
    pub k1: Rational,
    /// b / c_min — maximum committee size.
    pub k2: Rational,
    /// (b − c_max) / b: greedy vs optimum.
    pub greedy_bound: Rational,
    /// 2·√(c_min/b) − (c_min + c_max)/b: completed equal shares vs both
    /// greedy and the optimum.
    pub mes_bound: RootBracket,
    /// (b − c_max)/b · c_min/c_max: greedy run with one DNS function,
    /// welfare measured with another.
    pub mismatch_bound: Rational,
    /// 2/⌊√k2⌋ − (c_min + x·c_max)/b: no EJR1 rule can beat this.
    pub ejr1_upper_bound: Rational,
    /// Fractional residue ⌊√k2⌋·c_min/c_max − ⌊⌊√k2⌋·c_min/c_max⌋ ∈ [0, 1).
    pub x: Rational,
    pub greedy_bound_clamped: Rational,
    pub mes_bound_clamped: RootBracket,
    pub mismatch_bound_clamped: Rational,
    pub ejr1_upper_bound_clamped: Rational,
}

fn clamp(value: &Rational) -> Rational {
    value.clone().max(Rational::zero())
}

/// Evaluates all four bounds. Square roots are exact where the radicand is
/// a perfect rational square, otherwise bracketed to width 10⁻¹².
pub fn guarantee_bounds(
    budget: &Rational,
    c_min: &Rational,
    c_max: &Rational,
) -> Result<GuaranteeReport, GuaranteeError> {
    if !(c_min.is_positive() && c_min <= c_max && c_max <= budget) {
        return Err(GuaranteeError::ParameterOrdering);
    }
    let k1 = budget / c_max;
    let k2 = budget / c_min;
    let greedy_bound = (budget - c_max) / budget;
    let root = sqrt_bracket(&(c_min / budget), &default_bracket_denom());
    let mes_bound =
        root.affine(&Rational::from_integer(2.into()), &(-(c_min + c_max) / budget));
    let mismatch_bound = &greedy_bound * c_min / c_max;
    let floor_root_k2 = Rational::from_integer(floor_sqrt(&k2));
    let scaled = &floor_root_k2 * c_min / c_max;
    let x = &scaled - Rational::from_integer(scaled.to_integer());
    let ejr1_upper_bound = Rational::from_integer(2.into()) / &floor_root_k2
        - (c_min + &x * c_max) / budget;
    Ok(GuaranteeReport {
        budget: budget.clone(),
        c_min: c_min.clone(),
        c_max: c_max.clone(),
        k1,
        k2,
        greedy_bound_clamped: clamp(&greedy_bound),
        mes_bound_clamped: mes_bound.clamped(),
        mismatch_bound_clamped: clamp(&mismatch_bound),
        ejr1_upper_bound_clamped: clamp(&ejr1_upper_bound),
        greedy_bound,
        mes_bound,
        mismatch_bound,
        ejr1_upper_bound,
        x,
    })
}

/// Bounds for a validated instance's parameters.
pub fn guarantee_bounds_for(instance: &Instance) -> Result<GuaranteeReport, GuaranteeError> {
    let params = instance_params(instance, &SatisfactionFunction::Cardinality)?;
    guarantee_bounds(instance.budget(), &params.c_min, &params.c_max)
}

/// uw_μ(outcome) / uw_μ(optimum), in [0, 1]; by convention 1 when the
/// optimum welfare is zero (nobody can be dissatisfied).
pub fn utilitarian_ratio(
    instance: &Instance,
    sat: &SatisfactionFunction,
    outcome: &Outcome,
    config: &MaxSatConfig,
) -> Result<Rational, GuaranteeError> {
    let achieved = utilitarian_welfare(sat, instance, outcome.ids())?;
    let optimum = run_maxsat(instance, sat, config)?;
    let optimum_welfare = utilitarian_welfare(sat, instance, optimum.ids())?;
    if optimum_welfare.is_zero() {
        return Ok(Rational::one());
    }
    Ok(achieved / optimum_welfare)
}

/// The truncated-prefix comparison: uw(completed MES) over the welfare of
/// greedy's first b − c_max spending units, against the rescaled bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedComparison {
    pub truncated_welfare: Rational,
    /// None when the truncated welfare is zero (vacuously satisfied).
    pub ratio: Option<Rational>,
    pub bound: RootBracket,
    pub holds: bool,
}

/// Comparison of completed equal shares against greedy on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MesGreedyComparison {
    /// uw(completed MES) / uw(greedy); 1 when greedy welfare is zero (the
    /// two outcomes then coincide).
    pub ratio: Rational,
    pub bound: RootBracket,
    /// ratio ≥ the bracket's upper end.
    pub bound_holds: bool,
    pub divergence: Option<Divergence>,
    /// Present when c_max < b.
    pub truncated: Option<TruncatedComparison>,
}

/// Compares completed equal shares to greedy under a DNS function and
/// checks both forms of the comparative bound.
pub fn comparative_mes_vs_greedy(
    instance: &Instance,
    sat: &SatisfactionFunction,
) -> Result<MesGreedyComparison, GuaranteeError> {
    if !check_dns(sat, instance).map_err(ModelError::from)?.is_dns() {
        return Err(GuaranteeError::NotDns);
    }
    let report = guarantee_bounds_for(instance)?;
    let greedy = run_greedy(instance, sat)?;
    let mes = run_mes_completed(instance, sat)?;
    let greedy_welfare = utilitarian_welfare(sat, instance, greedy.outcome.ids())?;
    let mes_welfare = utilitarian_welfare(sat, instance, mes.outcome.ids())?;
    let ratio = if greedy_welfare.is_zero() {
        Rational::one()
    } else {
        &mes_welfare / &greedy_welfare
    };
    let bound = report.mes_bound.clone();
    let bound_holds = ratio >= bound.hi;
    let divergence = first_divergence_stage(instance, sat)?;
    let truncated = if report.c_max < report.budget {
        let truncated_welfare = truncated_greedy_welfare(instance, sat)?;
        let scale = &report.budget / (&report.budget - &report.c_max);
        let truncated_bound = bound.affine(&scale, &Rational::zero());
        let (ratio, holds) = if truncated_welfare.is_zero() {
            (None, true)
        } else {
            let r = &mes_welfare / &truncated_welfare;
            let holds = r >= truncated_bound.hi;
            (Some(r), holds)
        };
        Some(TruncatedComparison { truncated_welfare, ratio, bound: truncated_bound, holds })
    } else {
        None
    };
    Ok(MesGreedyComparison { ratio, bound, bound_holds, divergence, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::testutil::table1;

    #[test]
    fn perfect_square_bound_is_exact() {
        let report = guarantee_bounds(&int(1_000_000), &int(10_000), &int(30_000)).unwrap();
        assert!(report.mes_bound.is_exact());
        assert_eq!(report.mes_bound.lo, rat(16, 100));
        assert_eq!(report.greedy_bound, rat(97, 100));
    }

    #[test]
    fn equal_cost_reduction() {
        // b = 100c, all costs c: the bound becomes 2/√k − 2/k = 0.18.
        let report = guarantee_bounds(&int(100), &int(1), &int(1)).unwrap();
        assert_eq!(report.mes_bound, RootBracket::exact(rat(18, 100)));
        assert_eq!(report.x, Rational::zero());
        // ejr1 bound reduces to 2/⌊√k⌋ − 1/k.
        assert_eq!(report.ejr1_upper_bound, rat(2, 10) - rat(1, 100));
    }

    #[test]
    fn running_example_parameters() {
        let report = guarantee_bounds(&int(100), &int(20), &int(65)).unwrap();
        assert_eq!(report.greedy_bound, rat(35, 100));
        assert_eq!(report.k1, rat(20, 13));
        assert_eq!(report.k2, int(5));
        assert!(!report.mes_bound.is_exact());
        // 2√0.2 − 0.85 ≈ 0.0444.
        assert!(report.mes_bound.hi > rat(44, 1000));
        assert!(report.mes_bound.lo < rat(45, 1000));
    }

    #[test]
    fn ejr1_bound_with_fractional_residue() {
        let report = guarantee_bounds(&int(100), &int(4), &int(25)).unwrap();
        assert_eq!(report.x, rat(4, 5));
        assert_eq!(report.ejr1_upper_bound, rat(16, 100));
    }

    #[test]
    fn negative_bounds_are_clamped() {
        let report = guarantee_bounds(&int(100), &int(99), &int(100)).unwrap();
        assert!(report.mes_bound.hi < Rational::zero());
        assert_eq!(report.mes_bound_clamped.lo, Rational::zero());
        assert_eq!(report.greedy_bound, Rational::zero());
        assert!(report.mismatch_bound.is_zero());
    }

    #[test]
    fn ordering_violations_are_rejected() {
        assert!(matches!(
            guarantee_bounds(&int(100), &int(30), &int(20)),
            Err(GuaranteeError::ParameterOrdering)
        ));
        assert!(matches!(
            guarantee_bounds(&int(100), &int(0), &int(20)),
            Err(GuaranteeError::ParameterOrdering)
        ));
        assert!(matches!(
            guarantee_bounds(&int(100), &int(20), &int(120)),
            Err(GuaranteeError::ParameterOrdering)
        ));
    }

    #[test]
    fn multiwinner_reduction_identity() {
        // 2√(c/b) − 2c/b equals 2/√k − 2/k exactly for perfect squares.
        for (k, root) in [(4i64, 2i64), (9, 3), (16, 4), (25, 5), (100, 10)] {
            let c = int(7);
            let b = int(7 * k);
            let report = guarantee_bounds(&b, &c, &c).unwrap();
            assert!(report.mes_bound.is_exact(), "k={k}");
            let expected = rat(2, 1) / int(root) - rat(2, 1) / int(k);
            assert_eq!(report.mes_bound.lo, expected, "k={k}");
        }
    }

    #[test]
    fn ratios_on_running_example() {
        let instance = table1();
        let config = MaxSatConfig::default();
        let cost = SatisfactionFunction::Cost;
        let greedy = run_greedy(&instance, &cost).unwrap();
        assert_eq!(
            utilitarian_ratio(&instance, &cost, &greedy.outcome, &config).unwrap(),
            rat(45, 46)
        );
        let mes = run_mes_completed(&instance, &cost).unwrap();
        assert_eq!(
            utilitarian_ratio(&instance, &cost, &mes.outcome, &config).unwrap(),
            rat(13, 23)
        );
        let optimum = run_maxsat(&instance, &cost, &config).unwrap();
        assert_eq!(
            utilitarian_ratio(&instance, &cost, &optimum, &config).unwrap(),
            Rational::one()
        );
    }

    #[test]
    fn comparative_bound_on_running_example() {
        let instance = table1();
        let comparison = comparative_mes_vs_greedy(&instance, &SatisfactionFunction::Cost).unwrap();
        assert_eq!(comparison.ratio, rat(26, 45));
        assert!(comparison.bound_holds);
        let divergence = comparison.divergence.unwrap();
        assert_eq!(divergence.stage, 1);
        assert_eq!(divergence.alpha, rat(12, 13));
        let truncated = comparison.truncated.unwrap();
        assert_eq!(truncated.truncated_welfare, int(210));
        assert_eq!(truncated.ratio, Some(rat(260, 210)));
        assert!(truncated.holds);
    }

    #[test]
    fn non_dns_functions_are_rejected() {
        use alloc::collections::BTreeMap;
        let instance = table1();
        let mut entries = BTreeMap::new();
        entries.insert(int(20), rat(1, 100));
        entries.insert(int(40), rat(1, 100));
        entries.insert(int(60), rat(1, 100));
        entries.insert(int(65), int(100));
        let table = SatisfactionFunction::table(entries).unwrap();
        assert!(matches!(
            comparative_mes_vs_greedy(&instance, &table),
            Err(GuaranteeError::NotDns)
        ));
    }
}
