//! Command-line surface: `solve`, `ratio`, `bounds`, `check-ejr1`,
//! `generate`, and `sweep`, all emitting deterministic structured records.
//!
//! Exit codes: 0 success, 2 validation or usage error, 3 when a sweep row
//! falsifies a welfare bound (`bound_holds=false`).

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};

use pb_core::axioms::check_ejr1;
use pb_core::generators::{generate, ClaimedRule, Construction};
use pb_core::guarantees::{guarantee_bounds, GuaranteeReport};
use pb_core::model::{instance_params, Instance, ValidationMode};
use pb_core::rational::{format_decimal, format_rational, parse_rational, Rational};
use pb_core::rules::{
    run_greedy, run_maxsat, run_mes, run_mes_completed, MaxSatConfig, MesRun, Outcome,
};
use pb_core::satisfaction::{utilitarian_welfare, SatisfactionFunction};

use crate::constructions::parse_construction_spec;
use crate::native::emit_native;
use crate::report::emit_report;
use crate::satspec::{SatChoice, DEFAULT_SQRT_PRECISION};
use crate::sweep::{
    expand_source_path, load_instance_file, run_sweep, sweep_exit_code, Checks, RuleKind, Source,
    SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "pbtool",
    version,
    about = "Participatory budgeting rules, proportionality checks, and welfare bounds over exact rationals"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one rule on one instance and print the outcome.
    Solve(SolveArgs),
    /// Run one rule and report its utilitarian ratio against the optimum.
    Ratio(SolveArgs),
    /// Evaluate the closed-form welfare bounds.
    Bounds(BoundsArgs),
    /// Check an outcome for EJR up to one project.
    CheckEjr1(CheckArgs),
    /// Build a constructed instance family and write it as native format.
    Generate(GenerateArgs),
    /// Evaluate instances × satisfaction functions × rules into a CSV report.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct InstanceOpts {
    /// Instance file: .pb (Pabulib, always lenient) or .pbi (native).
    #[arg(long)]
    instance: PathBuf,
    /// Reject over-budget projects and dangling references (.pbi default).
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    /// Drop them with warnings instead.
    #[arg(long)]
    lenient: bool,
}

impl InstanceOpts {
    fn mode(&self) -> ValidationMode {
        if self.lenient {
            ValidationMode::Lenient
        } else {
            ValidationMode::Strict
        }
    }

    fn load(&self) -> Result<(Instance, String)> {
        let (instance, warnings, id) = load_instance_file(&self.instance, self.mode())?;
        for warning in warnings {
            eprintln!("warning: {id}: {warning}");
        }
        Ok((instance, id))
    }
}

#[derive(Args)]
struct SatOpts {
    /// Satisfaction function: cost | card | sqrt | table:<path>.
    #[arg(long, default_value = "cost")]
    sat: String,
    /// Separate function steering the rule (welfare still measured by --sat).
    #[arg(long)]
    rule_sat: Option<String>,
    /// Denominator bound for the rounded square-root function.
    #[arg(long, default_value_t = DEFAULT_SQRT_PRECISION)]
    sqrt_precision: u64,
}

impl SatOpts {
    fn measure(&self) -> Result<SatChoice> {
        SatChoice::parse(&self.sat, self.sqrt_precision)
    }

    fn rule_choice(&self) -> Result<Option<SatChoice>> {
        self.rule_sat
            .as_deref()
            .map(|spec| SatChoice::parse(spec, self.sqrt_precision))
            .transpose()
    }
}

#[derive(Args)]
struct MaxSatOpts {
    /// Largest scaled budget the exact dynamic program accepts.
    #[arg(long, default_value_t = 10_000_000)]
    dp_cap: u64,
    /// Disable the branch-and-bound fallback past the cap.
    #[arg(long)]
    no_bnb: bool,
}

impl MaxSatOpts {
    fn config(&self) -> MaxSatConfig {
        MaxSatConfig {
            dp_budget_cap: self.dp_cap,
            enable_branch_and_bound: !self.no_bnb,
            ..MaxSatConfig::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceOpts,
    /// Rule to run: greedy | mes | mes-greedy | maxsat.
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    sat: SatOpts,
    #[command(flatten)]
    maxsat: MaxSatOpts,
    /// Print the equal-shares trace (one round per line).
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Read b, c_min, c_max from an instance file.
    #[arg(long, conflicts_with_all = ["budget", "c_min", "c_max"])]
    instance: Option<PathBuf>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    c_min: Option<String>,
    #[arg(long)]
    c_max: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    instance: InstanceOpts,
    /// Rule whose outcome is checked.
    #[arg(long, default_value = "mes-greedy")]
    rule: String,
    #[command(flatten)]
    sat: SatOpts,
    #[command(flatten)]
    maxsat: MaxSatOpts,
}

#[derive(Args)]
struct GenerateArgs {
    /// Construction spec, e.g. ejr1_tight:b=100:k1=4:k2=25 (single cell).
    #[arg(long)]
    construction: String,
    /// Output path for the native-format instance.
    #[arg(long)]
    out: PathBuf,
    /// Seed for `random` specs without an explicit one.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Instance files or single-`*` globs (repeatable).
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    /// Construction specs with parameter grids (repeatable).
    #[arg(long = "construction")]
    constructions: Vec<String>,
    /// Satisfaction functions to measure with (repeatable).
    #[arg(long = "sat", default_values_t = [String::from("cost")])]
    sats: Vec<String>,
    /// Separate function steering the rules.
    #[arg(long)]
    rule_sat: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SQRT_PRECISION)]
    sqrt_precision: u64,
    /// Rules to run (repeatable; default: all four).
    #[arg(long = "rule")]
    rules: Vec<String>,
    /// Checks to perform: bounds | ejr1 | oracle (repeatable).
    #[arg(long = "check", default_values_t = [String::from("bounds")])]
    checks: Vec<String>,
    /// Parallelism degree.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for `random` specs without an explicit one.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "lenient")]
    strict: bool,
    #[arg(long)]
    lenient: bool,
    #[command(flatten)]
    maxsat: MaxSatOpts,
}

pub fn run() -> Result<i32> {
    match Cli::parse().command {
        Cmd::Solve(args) => solve(args, false),
        Cmd::Ratio(args) => solve(args, true),
        Cmd::Bounds(args) => bounds(args),
        Cmd::CheckEjr1(args) => check(args),
        Cmd::Generate(args) => generate_cmd(args),
        Cmd::Sweep(args) => sweep(args),
    }
}

fn ratio_cell(value: &Rational) -> String {
    format!("{} ({})", format_rational(value), format_decimal(value, 12))
}

fn run_rule(
    rule: RuleKind,
    instance: &Instance,
    sat: &SatisfactionFunction,
    config: &MaxSatConfig,
) -> Result<(Outcome, Option<MesRun>)> {
    Ok(match rule {
        RuleKind::Greedy => (run_greedy(instance, sat).map_err(|e| anyhow!("{e}"))?.outcome, None),
        RuleKind::Mes => {
            let run = run_mes(instance, sat).map_err(|e| anyhow!("{e}"))?;
            (run.outcome.clone(), Some(run))
        }
        RuleKind::MesGreedy => {
            let run = run_mes_completed(instance, sat).map_err(|e| anyhow!("{e}"))?;
            (run.outcome.clone(), Some(run))
        }
        RuleKind::MaxSat => (run_maxsat(instance, sat, config).map_err(|e| anyhow!("{e}"))?, None),
    })
}

fn solve(args: SolveArgs, with_ratio: bool) -> Result<i32> {
    let rule = RuleKind::parse(&args.rule)?;
    if args.trace && !matches!(rule, RuleKind::Mes | RuleKind::MesGreedy) {
        bail!("--trace applies to the mes and mes-greedy rules");
    }
    let (instance, id) = args.instance.load()?;
    let measure_choice = args.sat.measure()?;
    let measure = measure_choice.for_instance(&instance)?;
    let rule_choice = args.sat.rule_choice()?;
    let effective = match &rule_choice {
        Some(choice) => choice.for_instance(&instance)?,
        None => measure.clone(),
    };
    let config = args.maxsat.config();
    let (outcome, mes_run) = run_rule(rule, &instance, &effective, &config)?;
    let uw = utilitarian_welfare(&measure, &instance, outcome.ids()).map_err(|e| anyhow!("{e}"))?;
    println!("instance: {id}");
    println!("rule: {}", rule.name());
    println!("sat: {}", measure_choice.name());
    if let Some(choice) = &rule_choice {
        println!("rule_sat: {}", choice.name());
    }
    println!("selected: {}", outcome.selected.join(","));
    println!("total_cost: {}", format_rational(&outcome.total_cost));
    println!("uw: {}", format_rational(&uw));
    if with_ratio {
        let optimum = run_maxsat(&instance, &measure, &config).map_err(|e| anyhow!("{e}"))?;
        let uw_opt =
            utilitarian_welfare(&measure, &instance, optimum.ids()).map_err(|e| anyhow!("{e}"))?;
        use num_traits::{One, Zero};
        let ratio = if uw_opt.is_zero() { Rational::one() } else { &uw / &uw_opt };
        println!("uw_opt: {}", format_rational(&uw_opt));
        println!("ratio: {}", ratio_cell(&ratio));
    }
    if args.trace {
        let run = mes_run.expect("trace implies an equal-shares rule");
        println!("trace:");
        for line in run.trace.to_lines() {
            println!("{line}");
        }
        println!("completion_start_index: {}", run.trace.completion_start_index);
    }
    Ok(0)
}

fn print_bounds(report: &GuaranteeReport) {
    println!("b: {}", format_rational(&report.budget));
    println!("c_min: {}", format_rational(&report.c_min));
    println!("c_max: {}", format_rational(&report.c_max));
    println!("k1: {}", format_rational(&report.k1));
    println!("k2: {}", format_rational(&report.k2));
    println!("x: {}", format_rational(&report.x));
    println!("greedy_bound: {}", ratio_cell(&report.greedy_bound));
    println!("mes_bound_exact: {}", report.mes_bound.is_exact());
    println!("mes_bound_lo: {}", ratio_cell(&report.mes_bound.lo));
    println!("mes_bound_hi: {}", ratio_cell(&report.mes_bound.hi));
    println!("mismatch_bound: {}", ratio_cell(&report.mismatch_bound));
    println!("ejr1_upper_bound: {}", ratio_cell(&report.ejr1_upper_bound));
    println!("greedy_bound_clamped: {}", ratio_cell(&report.greedy_bound_clamped));
    println!("mes_bound_hi_clamped: {}", ratio_cell(&report.mes_bound_clamped.hi));
    println!("mismatch_bound_clamped: {}", ratio_cell(&report.mismatch_bound_clamped));
    println!("ejr1_upper_bound_clamped: {}", ratio_cell(&report.ejr1_upper_bound_clamped));
}

fn bounds(args: BoundsArgs) -> Result<i32> {
    let report = if let Some(path) = &args.instance {
        let (instance, _, _) = load_instance_file(path, ValidationMode::Strict)?;
        let params = instance_params(&instance, &SatisfactionFunction::Cardinality)
            .map_err(|e| anyhow!("{e}"))?;
        guarantee_bounds(instance.budget(), &params.c_min, &params.c_max)
            .map_err(|e| anyhow!("{e}"))?
    } else {
        let get = |name: &str, value: &Option<String>| -> Result<Rational> {
            let literal = value
                .as_ref()
                .ok_or_else(|| anyhow!("either --instance or --budget/--c-min/--c-max; missing --{name}"))?;
            parse_rational(literal).map_err(|e| anyhow!("--{name}: {e}"))
        };
        let budget = get("budget", &args.budget)?;
        let c_min = get("c-min", &args.c_min)?;
        let c_max = get("c-max", &args.c_max)?;
        guarantee_bounds(&budget, &c_min, &c_max).map_err(|e| anyhow!("{e}"))?
    };
    print_bounds(&report);
    Ok(0)
}

fn check(args: CheckArgs) -> Result<i32> {
    let rule = RuleKind::parse(&args.rule)?;
    let (instance, id) = args.instance.load()?;
    let measure_choice = args.sat.measure()?;
    let rule_choice = args.sat.rule_choice()?;
    let effective = match &rule_choice {
        Some(choice) => choice.for_instance(&instance)?,
        None => measure_choice.for_instance(&instance)?,
    };
    let config = args.maxsat.config();
    let (outcome, _) = run_rule(rule, &instance, &effective, &config)?;
    let result = check_ejr1(&instance, &effective, &outcome).map_err(|e| anyhow!("{e}"))?;
    println!("instance: {id}");
    println!("rule: {}", rule.name());
    println!("sat: {}", rule_choice.unwrap_or(measure_choice).name());
    println!("selected: {}", outcome.selected.join(","));
    println!("ejr1_satisfied: {}", result.satisfied());
    if let Some(witness) = result.witness() {
        println!("witness_t: {}", witness.t.join(","));
        println!(
            "witness_group: {}",
            witness.group.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        );
        println!("witness_group_threshold: {}", format_rational(&witness.group_threshold));
    }
    Ok(0)
}

fn generate_cmd(args: GenerateArgs) -> Result<i32> {
    let mut constructions = parse_construction_spec(&args.construction, args.seed)?;
    if constructions.len() != 1 {
        bail!(
            "generate takes a single construction cell; this spec expands to {} (use sweep for grids)",
            constructions.len()
        );
    }
    let construction: Construction = constructions.remove(0);
    let generated = generate(&construction).map_err(|e| anyhow!("{e}"))?;
    fs::write(&args.out, emit_native(&generated.instance))?;
    println!("label: {}", generated.label);
    println!("out: {}", args.out.display());
    println!("n: {}", generated.instance.voter_count());
    println!("num_projects: {}", generated.instance.projects().len());
    println!("sat: {}", generated.sat_fn.kind_name());
    if let Some(rule_fn) = &generated.rule_fn {
        println!("rule_sat: {}", rule_fn.kind_name());
    }
    let expected = &generated.expected;
    if let Some(rule) = expected.rule {
        let name = match rule {
            ClaimedRule::MesCompleted => "mes-greedy",
            ClaimedRule::Greedy => "greedy",
        };
        println!("claim_rule: {name}");
    }
    if let Some(ratio) = &expected.ratio {
        println!("expected_ratio: {}", ratio_cell(ratio));
    }
    if let Some(bound) = &expected.ratio_at_most {
        println!("expected_ratio_at_most: {}", ratio_cell(bound));
    }
    if let Some(outcome) = &expected.outcome {
        println!(
            "expected_outcome: {}",
            outcome.iter().cloned().collect::<Vec<_>>().join(",")
        );
    }
    if let Some(welfare) = &expected.welfare {
        println!("expected_welfare: {}", format_rational(welfare));
    }
    if let Some(welfare) = &expected.opt_welfare {
        println!("expected_opt_welfare: {}", format_rational(welfare));
    }
    if let Some(n) = expected.resolved_n {
        println!("resolved_n: {n}");
    }
    Ok(0)
}

fn sweep(args: SweepArgs) -> Result<i32> {
    let mut sources = Vec::new();
    for pattern in &args.instances {
        for path in expand_source_path(pattern)? {
            sources.push(Source::File(path));
        }
    }
    for spec in &args.constructions {
        for construction in parse_construction_spec(spec, args.seed)? {
            sources.push(construction.into());
        }
    }
    let sat_fns = args
        .sats
        .iter()
        .map(|spec| SatChoice::parse(spec, args.sqrt_precision))
        .collect::<Result<Vec<_>>>()?;
    let rule_sat = args
        .rule_sat
        .as_deref()
        .map(|spec| SatChoice::parse(spec, args.sqrt_precision))
        .transpose()?;
    let rules = if args.rules.is_empty() {
        RuleKind::ALL.to_vec()
    } else {
        args.rules.iter().map(|name| RuleKind::parse(name)).collect::<Result<Vec<_>>>()?
    };
    let mut checks = Checks { bounds: false, ejr1: false, oracle: false };
    for check in &args.checks {
        match check.as_str() {
            "bounds" => checks.bounds = true,
            "ejr1" => checks.ejr1 = true,
            "oracle" => checks.oracle = true,
            other => bail!("unknown check {other:?}; expected bounds, ejr1, or oracle"),
        }
    }
    let mode = if args.lenient { ValidationMode::Lenient } else { ValidationMode::Strict };
    let config = SweepConfig {
        sources,
        sat_fns,
        rule_sat,
        rules,
        checks,
        jobs: args.jobs.max(1),
        maxsat: args.maxsat.config(),
        mode,
    };
    let output = run_sweep(&config)?;
    for message in &output.messages {
        eprintln!("warning: {message}");
    }
    let csv = emit_report(&output.records);
    match &args.out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    match sweep_exit_code(&output) {
        3 => {
            eprintln!("error: at least one welfare bound was falsified (bound_holds=false)");
            Ok(3)
        }
        2 => {
            eprintln!("error: at least one evaluation failed; see warnings above");
            Ok(2)
        }
        code => Ok(code),
    }
}
