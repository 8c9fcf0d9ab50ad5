//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them). Every tolerance is pinned
//! here; rational comparisons are exact unless a criterion states a
//! numeric margin.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use pb_core::axioms::{check_ejr1, is_cohesive};
use pb_core::generators::{gen_random, generate, Construction, RandomSpec};
use pb_core::guarantees::{guarantee_bounds, utilitarian_ratio};
use pb_core::model::{validate_instance, Instance, Project, RawInstance, ValidationMode};
use pb_core::rational::{int, rat, Rational};
use pb_core::rules::{
    brute_force_maxsat, run_greedy, run_maxsat, run_mes_completed, MaxSatConfig,
};
use pb_core::satisfaction::{check_dns, utilitarian_welfare, SatisfactionFunction};

fn criterion(number: u32, name: &str, run: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(()) => println!("criterion {number} ({name}): PASS"),
        Err(payload) => {
            println!("criterion {number} ({name}): FAIL");
            std::panic::resume_unwind(payload);
        }
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn table1() -> Instance {
    let raw = RawInstance {
        budget: int(100),
        projects: vec![
            Project { id: "p1".into(), cost: int(65) },
            Project { id: "p2".into(), cost: int(60) },
            Project { id: "p3".into(), cost: int(40) },
            Project { id: "p4".into(), cost: int(20) },
            Project { id: "p5".into(), cost: int(20) },
        ],
        approvals: vec![
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["p1".into(), "p2".into(), "p3".into()],
            vec!["p1".into(), "p2".into()],
            vec!["p1".into(), "p2".into()],
            vec!["p1".into(), "p4".into()],
            vec!["p3".into(), "p4".into()],
            vec!["p4".into()],
            vec!["p5".into()],
            vec!["p5".into()],
        ],
    };
    validate_instance(&raw, ValidationMode::Strict).unwrap().0
}

fn welfare(instance: &Instance, sat: &SatisfactionFunction, ids: &[String]) -> Rational {
    utilitarian_welfare(sat, instance, ids.iter().map(String::as_str)).unwrap()
}

#[test]
fn criterion_1_running_example_reproduction() {
    criterion(1, "running-example reproduction", || {
        let start = Instant::now();
        let instance = table1();
        let cost = SatisfactionFunction::Cost;
        let config = MaxSatConfig::default();

        let greedy = run_greedy(&instance, &cost).unwrap().outcome;
        assert_eq!(greedy.id_set(), ["p1", "p4"].into_iter().collect());
        assert_eq!(welfare(&instance, &cost, &greedy.selected), int(450));

        let optimum = run_maxsat(&instance, &cost, &config).unwrap();
        assert_eq!(optimum.id_set(), ["p2", "p3"].into_iter().collect());
        assert_eq!(welfare(&instance, &cost, &optimum.selected), int(460));

        let mes = run_mes_completed(&instance, &cost).unwrap().outcome;
        assert_eq!(mes.id_set(), ["p3", "p4", "p5"].into_iter().collect());
        assert_eq!(welfare(&instance, &cost, &mes.selected), int(260));

        assert_eq!(utilitarian_ratio(&instance, &cost, &greedy, &config).unwrap(), rat(45, 46));
        assert_eq!(utilitarian_ratio(&instance, &cost, &mes, &config).unwrap(), rat(13, 23));
        assert!(start.elapsed() < Duration::from_secs(1), "must complete within 1s");
    });
}

#[test]
fn criterion_2_running_example_ejr1() {
    criterion(2, "running-example EJR1", || {
        let start = Instant::now();
        let instance = table1();
        let cost = SatisfactionFunction::Cost;
        let greedy = run_greedy(&instance, &cost).unwrap().outcome;
        let result = check_ejr1(&instance, &cost, &greedy).unwrap();
        let witness = result.witness().expect("greedy outcome must be violated");
        assert_eq!(witness.t, vec!["p5"]);
        assert_eq!(witness.group, vec![9, 10]);
        assert!(is_cohesive(&instance, &["p5"], &witness.group).unwrap());

        let mes = run_mes_completed(&instance, &cost).unwrap().outcome;
        assert!(check_ejr1(&instance, &cost, &mes).unwrap().satisfied());
        assert!(start.elapsed() < Duration::from_secs(1), "must complete within 1s");
    });
}

#[test]
fn criterion_3_theorem_falsification_sweep() {
    criterion(3, "theorem falsification sweep", || {
        let start = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("sweep.csv");
        let output = Command::new(env!("CARGO_BIN_EXE_pbtool"))
            .args([
                "sweep",
                "--construction",
                "random:seed=0..999:n_min=1:n_max=12:p_min=1:p_max=10:denom=8",
                "--sat",
                "cost",
                "--sat",
                "card",
                "--sat",
                "sqrt",
                "--rule",
                "greedy",
                "--rule",
                "mes",
                "--rule",
                "mes-greedy",
                "--rule",
                "maxsat",
                "--check",
                "bounds",
                "--jobs",
                "4",
                "--out",
            ])
            .arg(&out)
            .output()
            .expect("binary runs");
        assert_eq!(
            output.status.code(),
            Some(0),
            "sweep exit code; stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let csv = std::fs::read_to_string(&out).unwrap();
        let mut rows = 0usize;
        for line in csv.lines().skip(1) {
            rows += 1;
            let fields: Vec<&str> = line.split(',').collect();
            let bound_holds = fields[fields.len() - 2];
            assert_eq!(bound_holds, "true", "bound falsified in row: {line}");
        }
        assert_eq!(rows, 1000 * 3 * 4, "expected one row per instance, function, and rule");
        assert!(start.elapsed() < Duration::from_secs(120), "must complete within 2 minutes");
    });
}

#[test]
fn criterion_4_ejr1_bound_tightness() {
    criterion(4, "EJR1 bound tightness", || {
        let config = MaxSatConfig::default();
        let generated =
            generate(&Construction::Ejr1Tight { budget: int(100), k1: 4, k2: 25 }).unwrap();
        let mes = run_mes_completed(&generated.instance, &generated.sat_fn).unwrap().outcome;
        let ratio =
            utilitarian_ratio(&generated.instance, &generated.sat_fn, &mes, &config).unwrap();
        assert_eq!(ratio, rat(4, 25));
        assert_eq!(ratio, rat(16, 100));
        let report = guarantee_bounds(&int(100), &int(4), &int(25)).unwrap();
        assert_eq!(ratio, report.ejr1_upper_bound, "the point must sit exactly on the bound");

        for k1 in 2i64..=5 {
            for k2 in [9i64, 16, 25, 36] {
                let generated = generate(&Construction::Ejr1Tight {
                    budget: int(100),
                    k1: k1 as u32,
                    k2: k2 as u32,
                })
                .unwrap();
                let mes =
                    run_mes_completed(&generated.instance, &generated.sat_fn).unwrap().outcome;
                let ratio =
                    utilitarian_ratio(&generated.instance, &generated.sat_fn, &mes, &config)
                        .unwrap();
                let report =
                    guarantee_bounds(&int(100), &(int(100) / int(k2)), &(int(100) / int(k1)))
                        .unwrap();
                assert!(
                    ratio <= report.ejr1_upper_bound,
                    "k1={k1} k2={k2}: ratio {ratio} exceeds bound {}",
                    report.ejr1_upper_bound
                );
            }
        }
    });
}

#[test]
fn criterion_5_negative_result_constructions() {
    criterion(5, "worst-case constructions", || {
        let config = MaxSatConfig::default();
        for n in [5usize, 10, 50] {
            let generated = generate(&Construction::BoundedSatWorstcase {
                n,
                budget: int(100),
                eps: rat(9, 10),
            })
            .unwrap();
            let mes = run_mes_completed(&generated.instance, &generated.sat_fn).unwrap().outcome;
            let ratio =
                utilitarian_ratio(&generated.instance, &generated.sat_fn, &mes, &config).unwrap();
            assert_eq!(ratio, rat(1, (n - 1) as i64), "n={n}");
            let greedy = run_greedy(&generated.instance, &generated.sat_fn).unwrap().outcome;
            let greedy_ratio =
                utilitarian_ratio(&generated.instance, &generated.sat_fn, &greedy, &config)
                    .unwrap();
            assert_eq!(greedy_ratio, rat(1, (n - 1) as i64), "n={n}");
        }

        let generated = generate(&Construction::VanishingSatWorstcase {
            n: 10,
            budget: int(100),
            delta: rat(1, 1000),
        })
        .unwrap();
        let mes = run_mes_completed(&generated.instance, &generated.sat_fn).unwrap().outcome;
        let ratio =
            utilitarian_ratio(&generated.instance, &generated.sat_fn, &mes, &config).unwrap();
        assert!(ratio < rat(1, 1000), "vanishing ratio {ratio} must stay below delta");

        let generated = generate(&Construction::NonDnsWorstcase {
            n: 25,
            budget: int(100),
            c_min: int(4),
            c_max: int(25),
            eps: rat(1, 1000),
        })
        .unwrap();
        assert!(
            !check_dns(&generated.sat_fn, &generated.instance).unwrap().is_dns(),
            "the table function must fail the DNS check"
        );
        let mes = run_mes_completed(&generated.instance, &generated.sat_fn).unwrap().outcome;
        let ratio =
            utilitarian_ratio(&generated.instance, &generated.sat_fn, &mes, &config).unwrap();
        assert!(ratio <= rat(1, 1000), "non-DNS ratio {ratio} must be at most eps");
    });
}

#[test]
fn criterion_6_greedy_tightness_convergence() {
    criterion(6, "greedy guarantee tightness", || {
        let config = MaxSatConfig::default();
        let generated = generate(&Construction::GreedyTight {
            x: 10,
            n: 1000,
            budget: int(100),
            eps: rat(1, 100),
        })
        .unwrap();
        let greedy = run_greedy(&generated.instance, &generated.sat_fn).unwrap().outcome;
        let observed =
            utilitarian_ratio(&generated.instance, &generated.sat_fn, &greedy, &config).unwrap();
        // (n/(n−1))·(1 + eps − c_max/b) with c_max = (1+eps)·b/x.
        let formula = int(1000) / int(999) * (int(1) + rat(1, 100) - rat(101, 1000));
        assert_eq!(observed, formula, "observed ratio must match the closed form exactly");
        let bound = (int(100) - rat(101, 10)) / int(100);
        assert!(observed > bound, "must approach the bound from above");
        assert!(&observed - &bound < rat(2, 100), "must sit within 2e-2 of the bound");
    });
}

#[test]
fn criterion_7_closed_form_spot_checks() {
    criterion(7, "closed-form spot checks", || {
        let report = guarantee_bounds(&int(1_000_000), &int(10_000), &int(30_000)).unwrap();
        assert!(report.mes_bound.is_exact(), "perfect square case must be exact");
        assert_eq!(report.mes_bound.lo, rat(16, 100));

        let equal = guarantee_bounds(&int(100), &int(1), &int(1)).unwrap();
        assert!(equal.mes_bound.is_exact());
        assert_eq!(equal.mes_bound.lo, rat(18, 100));

        for (k, root) in [(4i64, 2i64), (9, 3), (16, 4), (25, 5), (100, 10)] {
            let c = int(13);
            let b = int(13 * k);
            let report = guarantee_bounds(&b, &c, &c).unwrap();
            assert!(report.mes_bound.is_exact(), "k={k}");
            let multiwinner_form = rat(2, 1) / int(root) - rat(2, 1) / int(k);
            assert_eq!(report.mes_bound.lo, multiwinner_form, "k={k}: identity must hold exactly");
        }
    });
}

#[test]
fn criterion_8_maxsat_oracle_equivalence() {
    criterion(8, "exact optimizer vs oracle", || {
        let start = Instant::now();
        let config = MaxSatConfig::default();
        for seed in 0..200u64 {
            let instance = gen_random(&RandomSpec {
                seed,
                n_range: (1, 12),
                p_range: (1, 15),
                max_cost_denominator: 6,
                ..RandomSpec::default()
            })
            .unwrap();
            let cost = SatisfactionFunction::Cost;
            let fast = run_maxsat(&instance, &cost, &config).unwrap();
            let brute = brute_force_maxsat(&instance, &cost).unwrap();
            assert_eq!(
                welfare(&instance, &cost, &fast.selected),
                welfare(&instance, &cost, &brute.selected),
                "seed {seed}"
            );
        }
        assert!(start.elapsed() < Duration::from_secs(60), "must complete within 1 minute");
    });
}

#[test]
fn criterion_9_mismatched_satisfaction_guarantee() {
    criterion(9, "mismatched-satisfaction guarantee", || {
        let config = MaxSatConfig::default();
        let cost = SatisfactionFunction::Cost;
        let card = SatisfactionFunction::Cardinality;
        for seed in 0..1000u64 {
            let instance = gen_random(&RandomSpec { seed, ..RandomSpec::default() }).unwrap();
            let greedy = run_greedy(&instance, &card).unwrap().outcome;
            let ratio = utilitarian_ratio(&instance, &cost, &greedy, &config).unwrap();
            let c_min = instance.projects().iter().map(|p| &p.cost).min();
            let c_max = instance.projects().iter().map(|p| &p.cost).max();
            let (Some(c_min), Some(c_max)) = (c_min, c_max) else { continue };
            let bound = (instance.budget() - c_max) / instance.budget() * c_min / c_max;
            assert!(ratio >= bound, "seed {seed}: ratio {ratio} below mismatch bound {bound}");
        }

        let generated = generate(&Construction::MismatchTight {
            budget: int(100),
            k1: 4,
            k2: 25,
            eps: rat(1, 100),
            n: Some(1000),
        })
        .unwrap();
        let rule_fn = generated.rule_fn.clone().unwrap();
        let greedy = run_greedy(&generated.instance, &rule_fn).unwrap().outcome;
        let observed =
            utilitarian_ratio(&generated.instance, &generated.sat_fn, &greedy, &config).unwrap();
        let c_min = rat(7501, 2500);
        let c_max = int(25);
        let bound = (int(100) - &c_max) / int(100) * &c_min / &c_max;
        assert!(observed >= bound);
        assert!(
            &observed - &bound <= bound.clone() / int(20),
            "observed {observed} must be within 5% of the bound {bound}"
        );
    });
}

#[test]
fn criterion_10_io_round_trips() {
    criterion(10, "I/O round trips", || {
        // Pabulib fixture reproduces the running example exactly.
        let text = std::fs::read_to_string(fixture("table1.pb")).unwrap();
        let import = pb_cli::pabulib::parse_pabulib(&text).unwrap();
        assert!(import.warnings.is_empty());
        assert_eq!(import.instance, table1());

        // Native format round-trips byte-identically.
        let native = std::fs::read_to_string(fixture("table1.pbi")).unwrap();
        let (instance, _) =
            pb_cli::native::parse_native(&native, ValidationMode::Strict).unwrap();
        assert_eq!(instance, table1());
        assert_eq!(pb_cli::native::emit_native(&instance), native);

        // The sweep CSV is golden-file stable.
        let golden = std::fs::read_to_string(fixture("golden/table1_sweep.csv")).unwrap();
        let output = Command::new(env!("CARGO_BIN_EXE_pbtool"))
            .args([
                "sweep",
                "--instance",
                fixture("table1.pb").to_str().unwrap(),
                "--sat",
                "cost",
                "--rule",
                "greedy",
                "--rule",
                "mes-greedy",
                "--rule",
                "maxsat",
                "--check",
                "bounds",
                "--check",
                "ejr1",
            ])
            .output()
            .expect("binary runs");
        assert_eq!(output.status.code(), Some(0));
        assert_eq!(String::from_utf8(output.stdout).unwrap(), golden);
    });
}

