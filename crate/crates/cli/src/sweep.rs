//! The batch experiment engine: evaluates every (instance, satisfaction
//! function, rule) cell, checks the welfare bounds that apply to it, and
//! assembles the report in deterministic source order regardless of the
//! parallelism degree.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Result};
use num_traits::{One, Zero};

use pb_core::axioms::check_ejr1;
use pb_core::generators::{generate, Construction, Generated};
use pb_core::guarantees::{guarantee_bounds, GuaranteeReport};
use pb_core::model::{instance_params, Instance, ValidationMode};
use pb_core::rational::Rational;
use pb_core::rules::{
    brute_force_maxsat, run_greedy, run_maxsat, run_mes, run_mes_completed, MaxSatConfig, MesRun,
    Outcome,
};
use pb_core::satisfaction::{check_dns, utilitarian_welfare, SatisfactionFunction};

use crate::native::parse_native;
use crate::pabulib::parse_pabulib;
use crate::report::{Flag, SweepRecord};
use crate::satspec::SatChoice;

/// The rules a sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Greedy,
    Mes,
    MesGreedy,
    MaxSat,
}

impl RuleKind {
    pub const ALL: [RuleKind; 4] =
        [RuleKind::Greedy, RuleKind::Mes, RuleKind::MesGreedy, RuleKind::MaxSat];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Greedy => "greedy",
            RuleKind::Mes => "mes",
            RuleKind::MesGreedy => "mes-greedy",
            RuleKind::MaxSat => "maxsat",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "greedy" => Ok(RuleKind::Greedy),
            "mes" => Ok(RuleKind::Mes),
            "mes-greedy" => Ok(RuleKind::MesGreedy),
            "maxsat" => Ok(RuleKind::MaxSat),
            other => bail!("unknown rule {other:?}; expected greedy, mes, mes-greedy, or maxsat"),
        }
    }
}

/// One instance source.
#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Construction(Box<Construction>),
}

impl From<Construction> for Source {
    fn from(construction: Construction) -> Self {
        Source::Construction(Box::new(construction))
    }
}

/// Which checks each cell performs.
#[derive(Debug, Clone, Copy)]
pub struct Checks {
    pub bounds: bool,
    pub ejr1: bool,
    pub oracle: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks { bounds: true, ejr1: false, oracle: false }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub sources: Vec<Source>,
    pub sat_fns: Vec<SatChoice>,
    pub rule_sat: Option<SatChoice>,
    pub rules: Vec<RuleKind>,
    pub checks: Checks,
    pub jobs: usize,
    pub maxsat: MaxSatConfig,
    pub mode: ValidationMode,
}

/// Records in source order, diagnostics, and the exit-relevant flags.
type SourceResult = (Vec<SweepRecord>, Vec<String>);

#[derive(Debug, Default)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub messages: Vec<String>,
    pub any_error: bool,
    pub any_violation: bool,
}

/// Expands a path argument: a literal file, or a single-`*` glob over its
/// parent directory (matches are sorted).
pub fn expand_source_path(pattern: &Path) -> Result<Vec<PathBuf>> {
    let text = pattern.to_string_lossy();
    if !text.contains('*') {
        return Ok(vec![pattern.to_path_buf()]);
    }
    let parent = pattern.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = pattern
        .file_name()
        .ok_or_else(|| anyhow!("glob {text:?} has no file name component"))?
        .to_string_lossy()
        .into_owned();
    let (prefix, suffix) = name
        .split_once('*')
        .ok_or_else(|| anyhow!("glob marker must be in the file name: {text:?}"))?;
    if suffix.contains('*') {
        bail!("only a single * is supported: {text:?}");
    }
    let mut matches: Vec<PathBuf> = std::fs::read_dir(parent)?
        .filter_map(|entry| entry.ok())
        .map(|entry| entry.path())
        .filter(|path| {
            path.file_name()
                .map(|f| {
                    let f = f.to_string_lossy();
                    f.starts_with(prefix) && f.ends_with(suffix) && f.len() >= prefix.len() + suffix.len()
                })
                .unwrap_or(false)
        })
        .collect();
    matches.sort();
    if matches.is_empty() {
        bail!("glob {text:?} matched nothing");
    }
    Ok(matches)
}

/// Loads an instance file by extension: `.pb` is Pabulib (always lenient),
/// `.pbi` native (mode applies).
pub fn load_instance_file(
    path: &Path,
    mode: ValidationMode,
) -> Result<(Instance, Vec<String>, String)> {
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned());
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!("reading {}: {e}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("pb") => {
            let import = parse_pabulib(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            Ok((import.instance, import.warnings, id))
        }
        Some("pbi") => {
            let (instance, warnings) =
                parse_native(&text, mode).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            Ok((instance, warnings, id))
        }
        other => bail!(
            "{}: unknown instance extension {:?} (expected .pb or .pbi)",
            path.display(),
            other.unwrap_or("")
        ),
    }
}

/// Prepared per-source work: the instance plus the satisfaction pairs to
/// evaluate. Constructions that prescribe their own function(s) override
/// the sweep-level list.
struct Prepared {
    id: String,
    instance: Instance,
    /// (measure fn name, measure fn, rule fn when different).
    pairs: Vec<(String, SatisfactionFunction, Option<SatisfactionFunction>)>,
}

fn construction_prescribes_sat(construction: &Construction) -> bool {
    !matches!(construction, Construction::Multiwinner { .. } | Construction::Random(_))
}

fn prepare(config: &SweepConfig, source: &Source, messages: &mut Vec<String>) -> Result<Prepared> {
    match source {
        Source::File(path) => {
            let (instance, warnings, id) = load_instance_file(path, config.mode)?;
            for warning in warnings {
                messages.push(format!("{id}: {warning}"));
            }
            let mut pairs = Vec::new();
            for choice in &config.sat_fns {
                let sat = choice.for_instance(&instance)?;
                let rule_fn = match &config.rule_sat {
                    Some(rule_choice) if rule_choice != choice => {
                        Some(rule_choice.for_instance(&instance)?)
                    }
                    _ => None,
                };
                pairs.push((choice.name(), sat, rule_fn));
            }
            Ok(Prepared { id, instance, pairs })
        }
        Source::Construction(construction) => {
            let Generated { label, instance, sat_fn, rule_fn, .. } = generate(construction)
                .map_err(|e| anyhow!("{e}"))?;
            let pairs = if construction_prescribes_sat(construction) {
                vec![(sat_fn.kind_name().to_string(), sat_fn, rule_fn)]
            } else {
                let mut pairs = Vec::new();
                for choice in &config.sat_fns {
                    let sat = choice.for_instance(&instance)?;
                    let rule_fn = match &config.rule_sat {
                        Some(rule_choice) if rule_choice != choice => {
                            Some(rule_choice.for_instance(&instance)?)
                        }
                        _ => None,
                    };
                    pairs.push((choice.name(), sat, rule_fn));
                }
                pairs
            };
            Ok(Prepared { id: label, instance, pairs })
        }
    }
}

fn error_record(id: &str, sat_fn: &str, rule: &str, instance: Option<&Instance>) -> SweepRecord {
    SweepRecord {
        instance_id: id.to_string(),
        n: instance.map_or(0, Instance::voter_count),
        num_projects: instance.map_or(0, |i| i.projects().len()),
        budget: instance.map_or_else(Rational::zero, |i| i.budget().clone()),
        c_min: None,
        c_max: None,
        k1: None,
        k2: None,
        sat_fn: sat_fn.to_string(),
        rule: rule.to_string(),
        uw: None,
        uw_opt: None,
        ratio: None,
        greedy_bound: None,
        mes_bound_hi: None,
        mismatch_bound: None,
        ejr1_upper_bound: None,
        bound_holds: Flag::Error,
        ejr1_satisfied: Flag::Error,
    }
}

/// Every equal-shares purchase has value at least n·μ_min/b under the
/// function that drove the run.
fn min_value_lemma_holds(
    instance: &Instance,
    rule_fn: &SatisfactionFunction,
    run: &MesRun,
) -> Result<bool> {
    if instance.projects().is_empty() {
        return Ok(true);
    }
    let params = instance_params(instance, rule_fn).map_err(|e| anyhow!("{e}"))?;
    let floor = Rational::from_integer(instance.voter_count().into()) * &params.mu_min
        / instance.budget();
    for round in &run.trace.rounds {
        let value = pb_core::satisfaction::project_value(rule_fn, instance, &round.project_id)
            .map_err(|e| anyhow!("{e}"))?;
        if value < floor {
            return Ok(false);
        }
    }
    Ok(true)
}

struct CellContext<'a> {
    config: &'a SweepConfig,
    prepared: &'a Prepared,
    sat_name: &'a str,
    sat: &'a SatisfactionFunction,
    rule_fn: Option<&'a SatisfactionFunction>,
    bounds: Option<&'a GuaranteeReport>,
    /// Optimum under the measuring function.
    opt_outcome: &'a Outcome,
    opt_welfare: &'a Rational,
    /// Greedy outcome under the measuring function (for the comparative
    /// bound).
    greedy_welfare_same_fn: &'a Rational,
}

fn evaluate_cell(
    ctx: &CellContext<'_>,
    rule: RuleKind,
    messages: &mut Vec<String>,
) -> Result<SweepRecord> {
    let instance = &ctx.prepared.instance;
    let effective = ctx.rule_fn.unwrap_or(ctx.sat);
    let mismatched = ctx.rule_fn.is_some();
    let mut mes_run: Option<MesRun> = None;
    let outcome: Outcome = match rule {
        RuleKind::Greedy => run_greedy(instance, effective).map_err(|e| anyhow!("{e}"))?.outcome,
        RuleKind::Mes => {
            let run = run_mes(instance, effective).map_err(|e| anyhow!("{e}"))?;
            let outcome = run.outcome.clone();
            mes_run = Some(run);
            outcome
        }
        RuleKind::MesGreedy => {
            let run = run_mes_completed(instance, effective).map_err(|e| anyhow!("{e}"))?;
            let outcome = run.outcome.clone();
            mes_run = Some(run);
            outcome
        }
        RuleKind::MaxSat => {
            if mismatched {
                run_maxsat(instance, effective, &ctx.config.maxsat).map_err(|e| anyhow!("{e}"))?
            } else {
                ctx.opt_outcome.clone()
            }
        }
    };
    let uw = utilitarian_welfare(ctx.sat, instance, outcome.ids()).map_err(|e| anyhow!("{e}"))?;
    let ratio = if ctx.opt_welfare.is_zero() {
        Rational::one()
    } else {
        &uw / ctx.opt_welfare
    };
    let sat_is_dns = check_dns(ctx.sat, instance).map_err(|e| anyhow!("{e}"))?.is_dns();
    let bound_holds = if !ctx.config.checks.bounds {
        Flag::Skipped
    } else {
        match (rule, ctx.bounds) {
            (_, None) => Flag::Skipped,
            (RuleKind::MaxSat, Some(_)) => Flag::True,
            (RuleKind::Greedy, Some(bounds)) => {
                if mismatched {
                    let rule_is_dns =
                        check_dns(effective, instance).map_err(|e| anyhow!("{e}"))?.is_dns();
                    if sat_is_dns && rule_is_dns {
                        Flag::from_bool(ratio >= bounds.mismatch_bound)
                    } else {
                        Flag::Skipped
                    }
                } else {
                    // The knapsack-style greedy guarantee holds for any
                    // satisfaction function.
                    Flag::from_bool(ratio >= bounds.greedy_bound)
                }
            }
            (RuleKind::Mes, Some(_)) => {
                let run = mes_run.as_ref().expect("mes rule ran");
                Flag::from_bool(min_value_lemma_holds(instance, effective, run)?)
            }
            (RuleKind::MesGreedy, Some(bounds)) => {
                let run = mes_run.as_ref().expect("mes rule ran");
                let mut holds = min_value_lemma_holds(instance, effective, run)?;
                if holds && !mismatched && sat_is_dns {
                    // Comparative and combined guarantees, plus the
                    // truncated-prefix variant when c_max < b.
                    if !ctx.greedy_welfare_same_fn.is_zero() {
                        let against_greedy = &uw / ctx.greedy_welfare_same_fn;
                        holds &= against_greedy >= bounds.mes_bound.hi;
                    }
                    holds &= ratio >= bounds.mes_bound.hi;
                    if bounds.c_max < bounds.budget {
                        let truncated =
                            pb_core::rules::truncated_greedy_welfare(instance, ctx.sat)
                                .map_err(|e| anyhow!("{e}"))?;
                        if !truncated.is_zero() {
                            let scale = &bounds.budget / (&bounds.budget - &bounds.c_max);
                            let truncated_bound = &bounds.mes_bound.hi * scale;
                            holds &= &uw / &truncated >= truncated_bound;
                        }
                    }
                }
                Flag::from_bool(holds)
            }
        }
    };
    let ejr1_satisfied = if !ctx.config.checks.ejr1 {
        Flag::Skipped
    } else if instance.projects().len() > 20 {
        messages.push(format!(
            "{}: ejr1 check skipped ({} projects exceed the enumeration limit)",
            ctx.prepared.id,
            instance.projects().len()
        ));
        Flag::Skipped
    } else {
        match check_ejr1(instance, effective, &outcome) {
            Ok(result) => Flag::from_bool(result.satisfied()),
            Err(e) => {
                messages.push(format!("{}: ejr1 check failed: {e}", ctx.prepared.id));
                Flag::Error
            }
        }
    };
    let mut bound_holds = bound_holds;
    if ctx.config.checks.oracle
        && rule == RuleKind::MaxSat
        && instance.projects().len() <= 15
    {
        let brute = brute_force_maxsat(instance, effective).map_err(|e| anyhow!("{e}"))?;
        let brute_uw = utilitarian_welfare(effective, instance, brute.ids())
            .map_err(|e| anyhow!("{e}"))?;
        let fast_uw = utilitarian_welfare(effective, instance, outcome.ids())
            .map_err(|e| anyhow!("{e}"))?;
        if brute_uw != fast_uw {
            messages.push(format!(
                "{}: maxsat disagrees with the brute-force oracle",
                ctx.prepared.id
            ));
            bound_holds = Flag::Error;
        }
    }
    Ok(SweepRecord {
        instance_id: ctx.prepared.id.clone(),
        n: instance.voter_count(),
        num_projects: instance.projects().len(),
        budget: instance.budget().clone(),
        c_min: ctx.bounds.map(|b| b.c_min.clone()),
        c_max: ctx.bounds.map(|b| b.c_max.clone()),
        k1: ctx.bounds.map(|b| b.k1.clone()),
        k2: ctx.bounds.map(|b| b.k2.clone()),
        sat_fn: ctx.sat_name.to_string(),
        rule: rule.name().to_string(),
        uw: Some(uw),
        uw_opt: Some(ctx.opt_welfare.clone()),
        ratio: Some(ratio),
        greedy_bound: ctx.bounds.map(|b| b.greedy_bound.clone()),
        mes_bound_hi: ctx.bounds.map(|b| b.mes_bound.hi.clone()),
        mismatch_bound: ctx.bounds.map(|b| b.mismatch_bound.clone()),
        ejr1_upper_bound: ctx.bounds.map(|b| b.ejr1_upper_bound.clone()),
        bound_holds,
        ejr1_satisfied,
    })
}

fn evaluate_source(config: &SweepConfig, source: &Source) -> SourceResult {
    let mut messages = Vec::new();
    let mut records = Vec::new();
    let prepared = match prepare(config, source, &mut messages) {
        Ok(prepared) => prepared,
        Err(e) => {
            let id = match source {
                Source::File(path) => path.to_string_lossy().into_owned(),
                Source::Construction(c) => format!("{c:?}"),
            };
            messages.push(format!("{id}: {e}"));
            records.push(error_record(&id, "", "", None));
            return (records, messages);
        }
    };
    let bounds = instance_params(&prepared.instance, &SatisfactionFunction::Cardinality)
        .ok()
        .and_then(|params| {
            guarantee_bounds(prepared.instance.budget(), &params.c_min, &params.c_max).ok()
        });
    for (sat_name, sat, rule_fn) in &prepared.pairs {
        // The measured optimum and same-function greedy welfare are shared
        // across the rules of this pair.
        let shared = (|| -> Result<(Outcome, Rational, Rational)> {
            let optimum = run_maxsat(&prepared.instance, sat, &config.maxsat)
                .map_err(|e| anyhow!("{e}"))?;
            let opt_welfare = utilitarian_welfare(sat, &prepared.instance, optimum.ids())
                .map_err(|e| anyhow!("{e}"))?;
            let greedy = run_greedy(&prepared.instance, sat).map_err(|e| anyhow!("{e}"))?;
            let greedy_welfare =
                utilitarian_welfare(sat, &prepared.instance, greedy.outcome.ids())
                    .map_err(|e| anyhow!("{e}"))?;
            Ok((optimum, opt_welfare, greedy_welfare))
        })();
        let (opt_outcome, opt_welfare, greedy_welfare_same_fn) = match shared {
            Ok(pair) => pair,
            Err(e) => {
                messages.push(format!("{}: {e}", prepared.id));
                for rule in &config.rules {
                    records.push(error_record(
                        &prepared.id,
                        sat_name,
                        rule.name(),
                        Some(&prepared.instance),
                    ));
                }
                continue;
            }
        };
        let ctx = CellContext {
            config,
            prepared: &prepared,
            sat_name,
            sat,
            rule_fn: rule_fn.as_ref(),
            bounds: bounds.as_ref(),
            opt_outcome: &opt_outcome,
            opt_welfare: &opt_welfare,
            greedy_welfare_same_fn: &greedy_welfare_same_fn,
        };
        for &rule in &config.rules {
            match evaluate_cell(&ctx, rule, &mut messages) {
                Ok(record) => records.push(record),
                Err(e) => {
                    messages.push(format!("{}: {}: {e}", prepared.id, rule.name()));
                    records.push(error_record(
                        &prepared.id,
                        sat_name,
                        rule.name(),
                        Some(&prepared.instance),
                    ));
                }
            }
        }
    }
    (records, messages)
}

/// Runs the sweep, evaluating sources concurrently up to `jobs` and merging
/// results in source order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    if config.sources.is_empty() {
        bail!("sweep needs at least one instance source");
    }
    if config.rules.is_empty() {
        bail!("sweep needs at least one rule");
    }
    if config.sat_fns.is_empty() {
        bail!("sweep needs at least one satisfaction function");
    }
    let jobs = config.jobs.clamp(1, config.sources.len().max(1));
    let slots: Mutex<Vec<Option<SourceResult>>> = Mutex::new(vec![None; config.sources.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= config.sources.len() {
                    break;
                }
                let result = evaluate_source(config, &config.sources[index]);
                slots.lock().expect("worker poisoned the result lock")[index] = Some(result);
            });
        }
    });
    let mut output = SweepOutput::default();
    for slot in slots.into_inner().expect("workers finished") {
        let (records, messages) = slot.expect("every source evaluated");
        output.messages.extend(messages);
        for record in records {
            if record.bound_holds == Flag::Error || record.ejr1_satisfied == Flag::Error {
                output.any_error = true;
            }
            if record.bound_holds == Flag::False {
                output.any_violation = true;
            }
            output.records.push(record);
        }
    }
    Ok(output)
}

/// Exit code of a sweep: 3 when any bound was falsified (the strongest
/// signal the tool can emit), 2 when any evaluation errored, 0 otherwise.
pub fn sweep_exit_code(output: &SweepOutput) -> i32 {
    if output.any_violation {
        3
    } else if output.any_error {
        2
    } else {
        0
    }
}
