//! Builders for the tight and worst-case instance families, plus seeded
//! random instances for falsification sweeps.
//!
//! Each constructed family returns, alongside the instance and the
//! satisfaction function(s) it prescribes, an `Expected` record stating
//! what the accompanying argument claims about rule behaviour on it (an
//! exact ratio, an upper bound, a forced outcome). The test suites execute
//! the rules and hold them to those claims exactly.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{validate_instance, Instance, ModelError, Project, RawInstance, ValidationMode};
use crate::rational::{format_rational, Rational};
use crate::roots::floor_sqrt;
use crate::satisfaction::SatisfactionFunction;

/// Generation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    Parameter(String),
    Model(ModelError),
}

impl fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorError::Parameter(msg) => write!(f, "invalid construction parameter: {msg}"),
            GeneratorError::Model(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(test)]
impl std::error::Error for GeneratorError {}

impl From<ModelError> for GeneratorError {
    fn from(e: ModelError) -> Self {
        GeneratorError::Model(e)
    }
}

fn param_err(msg: impl Into<String>) -> GeneratorError {
    GeneratorError::Parameter(msg.into())
}

/// Seeded random-instance parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    /// Inclusive voter-count range.
    pub n_range: (usize, usize),
    /// Inclusive project-count range.
    pub p_range: (usize, usize),
    pub budget: Rational,
    /// Costs are rationals with denominator at most this bound.
    pub max_cost_denominator: u32,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            seed: 0,
            n_range: (1, 12),
            p_range: (1, 10),
            budget: Rational::from_integer(100.into()),
            max_cost_denominator: 8,
        }
    }
}

/// The instance families with their parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    /// Two exhaustive outcomes; a bounded-below satisfaction makes every
    /// proportional rule (and greedy) pick the singleton worth 1/(n−1) of
    /// the optimum. Cardinality satisfaction; requires n ≥ 3, 0 < eps < 1.
    BoundedSatWorstcase { n: usize, budget: Rational, eps: Rational },
    /// Cost satisfaction with an arbitrarily cheap blocking project: the
    /// achieved ratio drops below any delta. Requires n ≥ 3, 0 < delta ≤ 1.
    VanishingSatWorstcase { n: usize, budget: Rational, delta: Rational },
    /// A non-DNS table function under which proportional rules are forced
    /// onto k cheap, near-worthless projects. Requires
    /// n ≥ b/(c_max−c_min) and n ≥ b/c_min.
    NonDnsWorstcase {
        n: usize,
        budget: Rational,
        c_min: Rational,
        c_max: Rational,
        eps: Rational,
    },
    /// Greedy forced onto x−1 slightly-oversized projects; its ratio is
    /// (n/(n−1))·(1+eps−c_max/b), approaching (b−c_max)/b from above.
    GreedyTight { x: u32, n: usize, budget: Rational, eps: Rational },
    /// n = k2 voters; singleton cohesive groups eat the budget, capping
    /// every EJR1 rule at the closed-form upper bound. Cost satisfaction.
    Ejr1Tight { budget: Rational, k1: u32, k2: u32 },
    /// Greedy steered by cardinality satisfaction while welfare is measured
    /// by cost satisfaction. `n` may be fixed or resolved by search.
    MismatchTight { budget: Rational, k1: u32, k2: u32, eps: Rational, n: Option<usize> },
    /// Equal-cost instance with budget k·cost; unanimous approvals unless
    /// seeded.
    Multiwinner { k: u32, cost: Rational, n: usize, num_projects: usize, seed: Option<u64> },
    /// Seeded random instance.
    Random(RandomSpec),
}

/// Which rule the construction's claim is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimedRule {
    /// Completed equal shares (and any EJR1 rule).
    MesCompleted,
    /// Greedy, possibly steered by `rule_fn`.
    Greedy,
}

/// The construction's claims, asserted exactly by the test harnesses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Expected {
    pub rule: Option<ClaimedRule>,
    /// Exact utilitarian ratio the claimed rule achieves.
    pub ratio: Option<Rational>,
    /// Upper bound on that ratio.
    pub ratio_at_most: Option<Rational>,
    /// Exact outcome set of the claimed rule.
    pub outcome: Option<BTreeSet<String>>,
    /// Exact optimum welfare.
    pub opt_welfare: Option<Rational>,
    /// Exact welfare of the claimed rule's outcome.
    pub welfare: Option<Rational>,
    /// Voter count chosen by a search (mismatch construction).
    pub resolved_n: Option<usize>,
}

/// A generated instance with its prescribed satisfaction function(s) and
/// the claims to verify.
#[derive(Debug, Clone)]
pub struct Generated {
    pub label: String,
    pub instance: Instance,
    /// The function welfare is measured with.
    pub sat_fn: SatisfactionFunction,
    /// The function the rule runs with, when it differs from `sat_fn`.
    pub rule_fn: Option<SatisfactionFunction>,
    pub expected: Expected,
}

fn id_width(count: usize) -> usize {
    count.max(1).to_string().len()
}

fn validated(raw: RawInstance) -> Result<Instance, GeneratorError> {
    Ok(validate_instance(&raw, ValidationMode::Strict)?.0)
}

fn usize_rat(value: usize) -> Rational {
    Rational::from_integer(value.into())
}

/// Builds the instance family and its expected record.
pub fn generate(construction: &Construction) -> Result<Generated, GeneratorError> {
    match construction {
        Construction::BoundedSatWorstcase { n, budget, eps } => {
            bounded_sat_worstcase(*n, budget, eps)
        }
        Construction::VanishingSatWorstcase { n, budget, delta } => {
            vanishing_sat_worstcase(*n, budget, delta)
        }
        Construction::NonDnsWorstcase { n, budget, c_min, c_max, eps } => {
            non_dns_worstcase(*n, budget, c_min, c_max, eps)
        }
        Construction::GreedyTight { x, n, budget, eps } => greedy_tight(*x, *n, budget, eps),
        Construction::Ejr1Tight { budget, k1, k2 } => ejr1_tight(budget, *k1, *k2),
        Construction::MismatchTight { budget, k1, k2, eps, n } => {
            mismatch_tight(budget, *k1, *k2, eps, *n)
        }
        Construction::Multiwinner { k, cost, n, num_projects, seed } => {
            multiwinner(*k, cost, *n, *num_projects, *seed)
        }
        Construction::Random(spec) => {
            let instance = gen_random(spec)?;
            Ok(Generated {
                label: format!("random(seed={})", spec.seed),
                instance,
                sat_fn: SatisfactionFunction::Cost,
                rule_fn: None,
                expected: Expected::default(),
            })
        }
    }
}

fn bounded_sat_worstcase(
    n: usize,
    budget: &Rational,
    eps: &Rational,
) -> Result<Generated, GeneratorError> {
    if n < 3 {
        return Err(param_err("bounded_sat_worstcase needs n >= 3"));
    }
    if !budget.is_positive() {
        return Err(param_err("budget must be positive"));
    }
    if !eps.is_positive() || *eps >= Rational::one() {
        // eps must stay below the satisfaction of every project, which is 1
        // under cardinality satisfaction.
        return Err(param_err("bounded_sat_worstcase needs 0 < eps < 1"));
    }
    let p2_cost = eps * budget / usize_rat(n);
    let raw = RawInstance {
        budget: budget.clone(),
        projects: vec![
            Project { id: "p1".into(), cost: budget.clone() },
            Project { id: "p2".into(), cost: p2_cost },
        ],
        approvals: (1..=n)
            .map(|voter| if voter == 1 { vec!["p2".into()] } else { vec!["p1".into()] })
            .collect(),
    };
    let ratio = Rational::one() / usize_rat(n - 1);
    Ok(Generated {
        label: format!("bounded_sat_worstcase(n={n},b={},eps={})", format_rational(budget), format_rational(eps)),
        instance: validated(raw)?,
        sat_fn: SatisfactionFunction::Cardinality,
        rule_fn: None,
        expected: Expected {
            rule: Some(ClaimedRule::MesCompleted),
            ratio: Some(ratio.clone()),
            ratio_at_most: Some(ratio),
            outcome: Some(["p2".to_string()].into_iter().collect()),
            opt_welfare: Some(usize_rat(n - 1)),
            welfare: Some(Rational::one()),
            resolved_n: None,
        },
    })
}

fn vanishing_sat_worstcase(
    n: usize,
    budget: &Rational,
    delta: &Rational,
) -> Result<Generated, GeneratorError> {
    if n < 3 {
        return Err(param_err("vanishing_sat_worstcase needs n >= 3"));
    }
    if !budget.is_positive() {
        return Err(param_err("budget must be positive"));
    }
    if !delta.is_positive() || *delta > Rational::one() {
        return Err(param_err("vanishing_sat_worstcase needs 0 < delta <= 1"));
    }
    // cost(p2) = delta·b/n < delta·b/(n−1), so the achieved ratio
    // (n−1)·cost(p2)/b = (n−1)/n · delta stays strictly below delta.
    let p2_cost = delta * budget / usize_rat(n);
    let raw = RawInstance {
        budget: budget.clone(),
        projects: vec![
            Project { id: "p1".into(), cost: budget.clone() },
            Project { id: "p2".into(), cost: p2_cost.clone() },
        ],
        approvals: (1..=n)
            .map(|voter| if voter == 1 { vec!["p1".into()] } else { vec!["p2".into()] })
            .collect(),
    };
    let ratio = usize_rat(n - 1) * &p2_cost / budget;
    Ok(Generated {
        label: format!("vanishing_sat_worstcase(n={n},b={},delta={})", format_rational(budget), format_rational(delta)),
        instance: validated(raw)?,
        sat_fn: SatisfactionFunction::Cost,
        rule_fn: None,
        expected: Expected {
            rule: Some(ClaimedRule::MesCompleted),
            ratio: Some(ratio),
            ratio_at_most: Some(delta.clone()),
            outcome: Some(["p2".to_string()].into_iter().collect()),
            opt_welfare: Some(budget.clone()),
            welfare: Some(usize_rat(n - 1) * &p2_cost),
            resolved_n: None,
        },
    })
}

fn non_dns_worstcase(
    n: usize,
    budget: &Rational,
    c_min: &Rational,
    c_max: &Rational,
    eps: &Rational,
) -> Result<Generated, GeneratorError> {
    if !(c_min.is_positive() && c_min < c_max && c_max <= budget) {
        return Err(param_err("non_dns_worstcase needs 0 < c_min < c_max <= b"));
    }
    if !eps.is_positive() {
        return Err(param_err("eps must be positive"));
    }
    let n_rat = usize_rat(n);
    if n_rat < budget / (c_max - c_min) {
        return Err(param_err("non_dns_worstcase needs n >= b/(c_max - c_min)"));
    }
    // n >= b/c_min keeps the cheap-set welfare k(n−1)·eps below n²·eps, so
    // the claimed ratio bound eps holds literally.
    if n_rat < budget / c_min {
        return Err(param_err("non_dns_worstcase needs n >= b/c_min"));
    }
    let k_rat = budget * usize_rat(n - 1) / (&n_rat * c_min);
    let k = (k_rat.numer() / k_rat.denom())
        .to_usize()
        .ok_or_else(|| param_err("cheap-project count overflows"))?;
    if k == 0 {
        return Err(param_err("construction needs at least one cheap project"));
    }
    // Exhaustiveness of the cheap set, from the floor bound and the n
    // assumption; fails only on a parameter bug.
    if usize_rat(k) * c_min <= budget - c_max {
        return Err(param_err("cheap set does not exhaust the budget"));
    }
    let n_sq = &n_rat * &n_rat;
    if eps * c_max >= &n_sq * c_min {
        return Err(param_err("eps too large: table satisfaction would be DNS"));
    }
    let width = id_width(k);
    let mut projects: Vec<Project> = (1..=k)
        .map(|j| Project { id: format!("p{j:0width$}"), cost: c_min.clone() })
        .collect();
    projects.push(Project { id: "q1".into(), cost: c_max.clone() });
    let cheap_ids: Vec<String> = (1..=k).map(|j| format!("p{j:0width$}")).collect();
    let approvals: Vec<Vec<String>> = (1..=n)
        .map(|voter| if voter == 1 { vec!["q1".into()] } else { cheap_ids.clone() })
        .collect();
    let raw = RawInstance { budget: budget.clone(), projects, approvals };
    let mut table = BTreeMap::new();
    table.insert(c_min.clone(), eps.clone());
    table.insert(c_max.clone(), n_sq);
    let sat_fn = SatisfactionFunction::table(table).map_err(ModelError::from)?;
    Ok(Generated {
        label: format!(
            "non_dns_worstcase(n={n},b={},c_min={},c_max={},eps={})",
            format_rational(budget),
            format_rational(c_min),
            format_rational(c_max),
            format_rational(eps)
        ),
        instance: validated(raw)?,
        sat_fn,
        rule_fn: None,
        expected: Expected {
            rule: Some(ClaimedRule::MesCompleted),
            ratio: None,
            ratio_at_most: Some(eps.clone()),
            outcome: Some(cheap_ids.into_iter().collect()),
            opt_welfare: None,
            welfare: Some(usize_rat(k) * usize_rat(n - 1) * eps),
            resolved_n: None,
        },
    })
}

fn greedy_tight(
    x: u32,
    n: usize,
    budget: &Rational,
    eps: &Rational,
) -> Result<Generated, GeneratorError> {
    if x < 2 || n < 2 {
        return Err(param_err("greedy_tight needs x >= 2 and n >= 2"));
    }
    if !budget.is_positive() || !eps.is_positive() {
        return Err(param_err("budget and eps must be positive"));
    }
    let x_rat = Rational::from_integer(x.into());
    let one_plus = Rational::one() + eps;
    if one_plus > x_rat {
        return Err(param_err("greedy_tight needs 1 + eps <= x so c_max <= b"));
    }
    let big_cost = &one_plus * budget / &x_rat;
    let small_cost = budget / &x_rat;
    // The claimed optimum is the n−1 supporter small set; it must beat the
    // all-approved big set.
    let big_welfare = usize_rat(n) * (&x_rat - Rational::one()) * &big_cost;
    let opt_welfare = usize_rat(n - 1) * budget;
    if big_welfare >= opt_welfare {
        return Err(param_err("greedy_tight needs (n-1)·x > n·(x-1)·(1+eps)"));
    }
    let width = id_width(x as usize);
    let mut projects = Vec::new();
    let mut big_ids = Vec::new();
    for j in 1..=(x - 1) {
        let id = format!("p{j:0width$}");
        big_ids.push(id.clone());
        projects.push(Project { id, cost: big_cost.clone() });
    }
    let mut small_ids = Vec::new();
    for j in 1..=x {
        let id = format!("q{j:0width$}");
        small_ids.push(id.clone());
        projects.push(Project { id, cost: small_cost.clone() });
    }
    let approvals: Vec<Vec<String>> = (1..=n)
        .map(|voter| {
            // Voter 1 approves only the oversized projects; everyone else
            // approves everything.
            if voter == 1 {
                big_ids.clone()
            } else {
                big_ids.iter().chain(&small_ids).cloned().collect()
            }
        })
        .collect();
    let raw = RawInstance { budget: budget.clone(), projects, approvals };
    let ratio = usize_rat(n) / usize_rat(n - 1) * (&one_plus - &big_cost / budget);
    let greedy_welfare = usize_rat(n) * usize_rat(x as usize - 1) * &big_cost;
    Ok(Generated {
        label: format!(
            "greedy_tight(x={x},n={n},b={},eps={})",
            format_rational(budget),
            format_rational(eps)
        ),
        instance: validated(raw)?,
        sat_fn: SatisfactionFunction::Cost,
        rule_fn: None,
        expected: Expected {
            rule: Some(ClaimedRule::Greedy),
            ratio: Some(ratio),
            ratio_at_most: None,
            outcome: Some(big_ids.into_iter().collect()),
            opt_welfare: Some(opt_welfare),
            welfare: Some(greedy_welfare),
            resolved_n: None,
        },
    })
}

fn ejr1_tight(budget: &Rational, k1: u32, k2: u32) -> Result<Generated, GeneratorError> {
    if k1 < 1 || k2 < 2 || k1 > k2 {
        return Err(param_err("ejr1_tight needs 1 <= k1 <= k2 and k2 >= 2"));
    }
    if !budget.is_positive() {
        return Err(param_err("budget must be positive"));
    }
    let n = k2 as usize;
    let c_max = budget / Rational::from_integer(k1.into());
    let c_min = budget / Rational::from_integer(k2.into());
    let s = floor_sqrt(&usize_rat(n))
        .to_usize()
        .expect("floor sqrt fits");
    let width = id_width(n);
    let mut projects = Vec::new();
    let mut big_ids = Vec::new();
    for j in 1..=k1 {
        let id = format!("p{j:0width$}");
        big_ids.push(id.clone());
        projects.push(Project { id, cost: c_max.clone() });
    }
    let mut singleton_ids = Vec::new();
    for j in (s + 1)..=n {
        let id = format!("q{j:0width$}");
        singleton_ids.push(id.clone());
        projects.push(Project { id, cost: c_min.clone() });
    }
    let approvals: Vec<Vec<String>> = (1..=n)
        .map(|voter| {
            if voter <= s {
                big_ids.clone()
            } else {
                vec![format!("q{voter:0width$}")]
            }
        })
        .collect();
    let raw = RawInstance { budget: budget.clone(), projects, approvals };
    // Exhaustive proportional outcomes hold all singletons plus however
    // many big projects the remaining s/n budget share admits.
    let bigs_selected = (s * k1 as usize) / n;
    let opt_welfare = usize_rat(s) * budget;
    let welfare =
        usize_rat(n - s) * &c_min + usize_rat(s) * usize_rat(bigs_selected) * &c_max;
    let ratio = &welfare / &opt_welfare;
    let outcome: BTreeSet<String> = big_ids
        .iter()
        .take(bigs_selected)
        .cloned()
        .chain(singleton_ids.iter().cloned())
        .collect();
    Ok(Generated {
        label: format!("ejr1_tight(b={},k1={k1},k2={k2})", format_rational(budget)),
        instance: validated(raw)?,
        sat_fn: SatisfactionFunction::Cost,
        rule_fn: None,
        expected: Expected {
            rule: Some(ClaimedRule::MesCompleted),
            ratio: Some(ratio),
            ratio_at_most: None,
            outcome: Some(outcome),
            opt_welfare: Some(opt_welfare),
            welfare: Some(welfare),
            resolved_n: None,
        },
    })
}

fn mismatch_tight(
    budget: &Rational,
    k1: u32,
    k2: u32,
    eps: &Rational,
    n: Option<usize>,
) -> Result<Generated, GeneratorError> {
    if k1 < 1 || k2 <= k1 {
        return Err(param_err("mismatch_tight needs 1 <= k1 < k2"));
    }
    if !budget.is_positive() || !eps.is_positive() {
        return Err(param_err("budget and eps must be positive"));
    }
    let c_max = budget / Rational::from_integer(k1.into());
    if *eps >= c_max {
        return Err(param_err("mismatch_tight needs eps < c_max"));
    }
    let c_min = (budget - &c_max + eps) / Rational::from_integer(k2.into());
    if c_min > c_max {
        return Err(param_err("mismatch_tight parameters make c_min exceed c_max"));
    }
    let cost_ratio = &c_min / &c_max;
    let is_fractional = |candidate: usize| {
        let product = usize_rat(candidate) * &cost_ratio;
        !product.denom().is_one()
    };
    let resolved_n = match n {
        Some(n) => {
            if n < 2 {
                return Err(param_err("mismatch_tight needs n >= 2"));
            }
            if !is_fractional(n) {
                return Err(param_err("n·c_min/c_max must not be an integer"));
            }
            n
        }
        None => {
            // Smallest n where the ceiling overshoot stays within eps·c_min/c_max;
            // the overshoot cycles with period denom(c_min/c_max).
            let period = cost_ratio
                .denom()
                .to_usize()
                .ok_or_else(|| param_err("cost ratio denominator too large"))?;
            let limit = eps * &cost_ratio;
            (2..=2 * period.max(2))
                .find(|&candidate| {
                    if !is_fractional(candidate) {
                        return false;
                    }
                    let product = usize_rat(candidate) * &cost_ratio;
                    let ceil = Rational::from_integer(
                        product.numer().div_ceil(product.denom()),
                    );
                    &ceil - &product <= limit
                })
                .ok_or_else(|| {
                    param_err("no voter count satisfies the ceiling condition; increase eps")
                })?
        }
    };
    let n = resolved_n;
    let product = usize_rat(n) * &cost_ratio;
    let supporters = product
        .numer()
        .div_ceil(product.denom())
        .to_usize()
        .ok_or_else(|| param_err("supporter count overflows"))?;
    if supporters > n {
        return Err(param_err("supporter count exceeds the electorate"));
    }
    let big_width = id_width(k1 as usize);
    let small_width = id_width(k2 as usize);
    let mut projects = Vec::new();
    let mut big_ids = Vec::new();
    for j in 1..=k1 {
        let id = format!("p{j:0big_width$}");
        big_ids.push(id.clone());
        projects.push(Project { id, cost: c_max.clone() });
    }
    let mut small_ids = Vec::new();
    for j in 1..=k2 {
        let id = format!("q{j:0small_width$}");
        small_ids.push(id.clone());
        projects.push(Project { id, cost: c_min.clone() });
    }
    let approvals: Vec<Vec<String>> = (1..=n)
        .map(|voter| {
            if voter <= supporters {
                big_ids.iter().chain(&small_ids).cloned().collect()
            } else {
                big_ids.clone()
            }
        })
        .collect();
    let raw = RawInstance { budget: budget.clone(), projects, approvals };
    // Greedy under cardinality takes every small project and then cannot
    // afford a big one; measured with cost satisfaction that is worth
    // s·(b − c_max + eps) against the all-big optimum n·b.
    let greedy_welfare = usize_rat(supporters) * (budget - &c_max + eps);
    let opt_welfare = usize_rat(n) * budget;
    let ratio = &greedy_welfare / &opt_welfare;
    Ok(Generated {
        label: format!(
            "mismatch_tight(b={},k1={k1},k2={k2},eps={},n={n})",
            format_rational(budget),
            format_rational(eps)
        ),
        instance: validated(raw)?,
        sat_fn: SatisfactionFunction::Cost,
        rule_fn: Some(SatisfactionFunction::Cardinality),
        expected: Expected {
            rule: Some(ClaimedRule::Greedy),
            ratio: Some(ratio),
            ratio_at_most: None,
            outcome: Some(small_ids.into_iter().collect()),
            opt_welfare: Some(opt_welfare),
            welfare: Some(greedy_welfare),
            resolved_n: Some(n),
        },
    })
}

fn multiwinner(
    k: u32,
    cost: &Rational,
    n: usize,
    num_projects: usize,
    seed: Option<u64>,
) -> Result<Generated, GeneratorError> {
    if k < 1 || n < 1 || num_projects < 1 {
        return Err(param_err("multiwinner needs k, n, and num_projects >= 1"));
    }
    if !cost.is_positive() {
        return Err(param_err("cost must be positive"));
    }
    let budget = Rational::from_integer(k.into()) * cost;
    let width = id_width(num_projects);
    let ids: Vec<String> = (1..=num_projects).map(|j| format!("p{j:0width$}")).collect();
    let projects: Vec<Project> =
        ids.iter().map(|id| Project { id: id.clone(), cost: cost.clone() }).collect();
    let approvals: Vec<Vec<String>> = match seed {
        None => vec![ids.clone(); n],
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| ids.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
                .collect()
        }
    };
    let raw = RawInstance { budget, projects, approvals };
    let expected = if seed.is_none() {
        Expected {
            rule: Some(ClaimedRule::MesCompleted),
            ratio: Some(Rational::one()),
            ..Expected::default()
        }
    } else {
        Expected::default()
    };
    Ok(Generated {
        label: format!("multiwinner(k={k},c={},n={n},m={num_projects})", format_rational(cost)),
        instance: validated(raw)?,
        sat_fn: SatisfactionFunction::Cost,
        rule_fn: None,
        expected,
    })
}

/// Generates a reproducible random instance: bounded-denominator costs in
/// (0, budget], approval sets drawn uniformly (each project approved with
/// probability 1/2, so empty ballots occur).
pub fn gen_random(spec: &RandomSpec) -> Result<Instance, GeneratorError> {
    if spec.n_range.0 < 1 || spec.n_range.0 > spec.n_range.1 {
        return Err(param_err("voter range must be nonempty and start at 1 or more"));
    }
    if spec.p_range.0 < 1 || spec.p_range.0 > spec.p_range.1 {
        return Err(param_err("project range must be nonempty and start at 1 or more"));
    }
    if spec.max_cost_denominator < 1 {
        return Err(param_err("denominator bound must be at least 1"));
    }
    if !spec.budget.is_positive() {
        return Err(param_err("budget must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = rng.gen_range(spec.n_range.0..=spec.n_range.1);
    let m = rng.gen_range(spec.p_range.0..=spec.p_range.1);
    let width = id_width(m);
    let mut projects = Vec::with_capacity(m);
    for j in 1..=m {
        let denom = rng.gen_range(1..=spec.max_cost_denominator) as i64;
        let max_numer = (&spec.budget * Rational::from_integer(denom.into()))
            .to_integer()
            .to_i64()
            .filter(|&v| v >= 1)
            .ok_or_else(|| param_err("budget too large for random cost sampling"))?;
        let numer = rng.gen_range(1..=max_numer);
        projects.push(Project {
            id: format!("p{j:0width$}"),
            cost: Rational::new(numer.into(), denom.into()),
        });
    }
    let approvals: Vec<Vec<String>> = (0..n)
        .map(|_| projects.iter().filter(|_| rng.gen_bool(0.5)).map(|p| p.id.clone()).collect())
        .collect();
    validated(RawInstance { budget: spec.budget.clone(), projects, approvals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn bounded_construction_matches_spec_numbers() {
        let generated = generate(&Construction::BoundedSatWorstcase {
            n: 10,
            budget: int(100),
            eps: rat(9, 10),
        })
        .unwrap();
        let instance = &generated.instance;
        assert_eq!(instance.projects()[0].cost, int(100));
        assert_eq!(instance.projects()[1].cost, int(9));
        assert_eq!(instance.supporters("p1").unwrap().len(), 9);
        assert_eq!(instance.supporters("p2").unwrap(), &[1]);
        assert_eq!(generated.expected.ratio, Some(rat(1, 9)));
    }

    #[test]
    fn bounded_construction_rejects_bad_parameters() {
        assert!(generate(&Construction::BoundedSatWorstcase {
            n: 2,
            budget: int(100),
            eps: rat(1, 2),
        })
        .is_err());
        assert!(generate(&Construction::BoundedSatWorstcase {
            n: 10,
            budget: int(100),
            eps: int(1),
        })
        .is_err());
    }

    #[test]
    fn vanishing_construction_stays_below_delta() {
        let generated = generate(&Construction::VanishingSatWorstcase {
            n: 10,
            budget: int(100),
            delta: rat(1, 1000),
        })
        .unwrap();
        let ratio = generated.expected.ratio.unwrap();
        assert!(ratio < rat(1, 1000));
        assert_eq!(ratio, rat(9, 10_000));
    }

    #[test]
    fn non_dns_construction_validates_and_fails_dns() {
        use crate::satisfaction::check_dns;
        let generated = generate(&Construction::NonDnsWorstcase {
            n: 25,
            budget: int(100),
            c_min: int(4),
            c_max: int(25),
            eps: rat(1, 1000),
        })
        .unwrap();
        assert_eq!(generated.instance.projects().len(), 25); // 24 cheap + 1 expensive
        let report = check_dns(&generated.sat_fn, &generated.instance).unwrap();
        assert!(!report.is_dns());
        assert!(generate(&Construction::NonDnsWorstcase {
            n: 4,
            budget: int(100),
            c_min: int(4),
            c_max: int(25),
            eps: rat(1, 1000),
        })
        .is_err());
    }

    #[test]
    fn ejr1_tight_matches_hand_computation() {
        let generated =
            generate(&Construction::Ejr1Tight { budget: int(100), k1: 4, k2: 25 }).unwrap();
        assert_eq!(generated.instance.voter_count(), 25);
        assert_eq!(generated.instance.projects().len(), 24);
        assert_eq!(generated.expected.ratio, Some(rat(4, 25)));
        assert_eq!(generated.expected.opt_welfare, Some(int(500)));
        assert_eq!(generated.expected.welfare, Some(int(80)));
    }

    #[test]
    fn mismatch_resolves_voter_count_by_search() {
        let generated = generate(&Construction::MismatchTight {
            budget: int(100),
            k1: 4,
            k2: 25,
            eps: rat(1, 100),
            n: None,
        })
        .unwrap();
        let n = generated.expected.resolved_n.unwrap();
        assert_eq!(generated.instance.voter_count(), n);
        // The resolved n satisfies the ceiling condition.
        let r = rat(7501, 2500) / int(25);
        let product = usize_rat(n) * &r;
        let ceil = Rational::from_integer(product.numer().div_ceil(product.denom()));
        assert!(&ceil - &product <= rat(1, 100) * &r);
    }

    #[test]
    fn mismatch_with_explicit_voter_count() {
        let generated = generate(&Construction::MismatchTight {
            budget: int(100),
            k1: 4,
            k2: 25,
            eps: rat(1, 100),
            n: Some(1000),
        })
        .unwrap();
        // s = ceil(1000 · (7501/2500)/25) = 121.
        assert_eq!(generated.instance.supporters("q01").unwrap().len(), 121);
        assert_eq!(generated.expected.ratio, Some(rat(121, 1000) * rat(7501, 100) / int(100)));
    }

    #[test]
    fn multiwinner_unanimous_instance() {
        let generated = generate(&Construction::Multiwinner {
            k: 4,
            cost: int(25),
            n: 2,
            num_projects: 6,
            seed: None,
        })
        .unwrap();
        assert_eq!(generated.instance.budget(), &int(100));
        assert_eq!(generated.expected.ratio, Some(Rational::one()));
    }

    #[test]
    fn random_instances_are_reproducible_and_valid() {
        let spec = RandomSpec { seed: 42, ..RandomSpec::default() };
        let a = gen_random(&spec).unwrap();
        let b = gen_random(&spec).unwrap();
        assert_eq!(a, b);
        for project in a.projects() {
            assert!(project.cost.is_positive());
            assert!(project.cost <= *a.budget());
        }
    }

    #[test]
    fn integer_denominator_bound_gives_integer_costs() {
        let spec = RandomSpec { seed: 7, max_cost_denominator: 1, ..RandomSpec::default() };
        let instance = gen_random(&spec).unwrap();
        for project in instance.projects() {
            assert!(project.cost.denom().is_one());
        }
    }
}
