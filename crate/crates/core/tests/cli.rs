use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BASE: &str = "\
z = 0.3
n_t = 3
judg_n = 3
j_t = 2
papers_n = 200
in_prop = 0.5
fp_cost = 1
fn_cost = 1
price_p = 0.02
";

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn config(&self, extra: &str) -> PathBuf {
        let path = self.dir.path().join(format!("cfg{}.cfg", extra.len()));
        std::fs::write(&path, format!("{BASE}{extra}")).unwrap();
        path
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(args: &[&str], config: Option<&Path>, out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_crowdscreen"));
    cmd.args(args);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    cmd.output().unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn analyze_writes_price_per_paper() {
    let f = Fixture::new();
    let out = f.out("a");
    let o = run(
        &["analyze", "--mode", "both"],
        Some(&f.config("")),
        Some(&out),
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&out.join("analyze.csv"));
    assert_eq!(rows[0][0], "mode");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        assert!((row[7].parse::<f64>().unwrap() - 0.078).abs() < 1e-12);
    }
    assert_eq!(rows[1][0], "exact");
    assert_eq!(rows[2][0], "paper");
}

#[test]
fn missing_config_flag_is_usage_error() {
    let o = run(&["analyze"], None, None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--config"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let o = run(&["frobnicate"], None, None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_required_key_is_named() {
    let f = Fixture::new();
    let path = f.out("broken.cfg");
    std::fs::write(&path, BASE.replace("papers_n = 200\n", "")).unwrap();
    let o = run(&["analyze"], Some(&path), None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("papers_n"));
}

#[test]
fn unknown_key_reports_line() {
    let f = Fixture::new();
    let o = run(&["analyze"], Some(&f.config("colour = blue\n")), None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 10") && err.contains("colour"), "{err}");
}

#[test]
fn simulate_requires_seed() {
    let f = Fixture::new();
    let cfg = f.config("");
    let o = run(&["simulate"], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    let o = run(&["simulate", "--seed", "3"], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn infeasible_budget_exits_2() {
    let f = Fixture::new();
    let o = run(&["optimize"], Some(&f.config("budget = 1\n")), None);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["curve", "--budgets", "1,50"], Some(&f.config("")), None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worker_starvation_exits_3() {
    let f = Fixture::new();
    let out = f.out("s");
    let o = run(
        &["simulate"],
        Some(&f.config("seed = 1\nmax_workers = 5\n")),
        Some(&out),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(out.join("outcome.csv").exists());
}

#[test]
fn curve_flag_overrides_config_budgets() {
    let f = Fixture::new();
    let out = f.out("c");
    let o = run(
        &["curve", "--budgets", "30,10,30,60"],
        Some(&f.config("budgets = 5\n")),
        Some(&out),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate"));
    let rows = read_csv(&out.join("curve.csv"));
    let budgets: Vec<f64> = rows[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(budgets, vec![10.0, 30.0, 60.0]);
    assert_eq!(read_csv(&out.join("sweep.csv")).len(), 12);
}

fn triple(row: &[String]) -> (String, String, String) {
    (row[2].clone(), row[3].clone(), row[4].clone())
}

#[test]
fn one_iterative_round_matches_single_run() {
    let f = Fixture::new();
    let cfg = f.config("budget = 20\nseed = 4\nrounds = 1\n");
    let (a, b) = (f.out("single"), f.out("iter"));
    assert_eq!(
        run(&["optimize", "--strategy", "single"], Some(&cfg), Some(&a))
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(
            &["optimize", "--strategy", "iterative"],
            Some(&cfg),
            Some(&b)
        )
        .status
        .code(),
        Some(0)
    );
    let single = read_csv(&a.join("optimize.csv"));
    let iter = read_csv(&b.join("optimize.csv"));
    assert_eq!(iter.len(), 2);
    assert_eq!(triple(&single[1]), triple(&iter[1]));
}

#[test]
fn horizontal_baseline_uses_single_run_parameters() {
    let f = Fixture::new();
    let cfg = f.config("budget = 20\nseed = 4\nbaseline_fraction = 0.999\n");
    let (a, b) = (f.out("single"), f.out("hz"));
    run(&["optimize"], Some(&cfg), Some(&a));
    let o = run(
        &["optimize", "--strategy", "horizontal"],
        Some(&cfg),
        Some(&b),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let single = read_csv(&a.join("optimize.csv"));
    let hz = read_csv(&b.join("optimize.csv"));
    assert_eq!(hz[1][0], "phase1");
    assert_eq!(triple(&single[1]), triple(&hz[1]));
}

#[test]
fn seeds_change_simulated_votes() {
    let f = Fixture::new();
    let cfg = f.config("replications = 3\n");
    let (a, b) = (f.out("s1"), f.out("s2"));
    run(&["simulate", "--seed", "1"], Some(&cfg), Some(&a));
    run(&["simulate", "--seed", "2"], Some(&cfg), Some(&b));
    let x = std::fs::read(a.join("replications.csv")).unwrap();
    let y = std::fs::read(b.join("replications.csv")).unwrap();
    assert_ne!(x, y);
}

#[test]
fn invalid_dataset_rows_are_listed() {
    let f = Fixture::new();
    let data = f.out("papers.csv");
    std::fs::write(
        &data,
        "id,gold_label,difficulty\na,include,easy\nb,unsure,easy\nc,exclude,tricky\n",
    )
    .unwrap();
    let cfg = f.config(&format!("seed = 1\ndataset = {}\n", data.display()));
    let o = run(&["simulate"], Some(&cfg), None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("line 4"), "{err}");
}

#[test]
fn simulate_uses_supplied_dataset() {
    let f = Fixture::new();
    let data = f.out("papers.csv");
    std::fs::write(&data, "id,gold_label,difficulty,title\na,include,easy,First\nb,exclude,average,Second\nc,exclude,easy,Third\n").unwrap();
    let cfg = f.config(&format!("seed = 1\ndataset = {}\n", data.display()));
    let out = f.out("o");
    assert_eq!(
        run(&["simulate"], Some(&cfg), Some(&out)).status.code(),
        Some(0)
    );
    let rows = read_csv(&out.join("outcome.csv"));
    assert_eq!(rows.len(), 4);
    let ids: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ids, ["a", "b", "c"]);
}
