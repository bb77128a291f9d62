//! Command implementations behind the `crowdscreen` binary.
//!
//! Every command returns a [`CommandOutput`]: a human-readable summary for
//! standard output, warnings for standard error, the CSV files it wrote and
//! an exit [`Status`]. Nothing here touches the process directly, so the
//! commands are testable in-process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analytic::{assess, expected_accuracy, surviving_cheater_fraction, Mode, DEFAULT_THETA};
use crate::config::RunConfig;
use crate::dataset::{
    load_dataset, synthesize_dataset, write_curve, write_outcome, write_rows, PaperDataset,
};
use crate::error::{Error, Result};
use crate::model::{gold_labels, WorkerPopulation};
use crate::optimizer::{
    loss_vs_tests, optimize_iterative, optimize_single_run, run_horizontal, tradeoff_curve,
    OptimizationResult, SimulatedSource,
};
use crate::simulator::{
    simulate_quiz_population, simulate_replications, summarize, QuizRegime, SimulationConfig,
};

/// Process exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Usage or configuration error, or a failed validation check.
    Error,
    Infeasible,
    Starvation,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Error => 1,
            Status::Infeasible => 2,
            Status::Starvation => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub summary: String,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
    pub status: Status,
}

impl CommandOutput {
    fn new() -> Self {
        CommandOutput {
            summary: String::new(),
            warnings: Vec::new(),
            files: Vec::new(),
            status: Status::Success,
        }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    fn file(&mut self, out: Option<&Path>, name: &str) -> Result<Option<PathBuf>> {
        let Some(dir) = out else { return Ok(None) };
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = dir.join(name);
        self.files.push(path.clone());
        Ok(Some(path))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Single,
    Iterative,
    Horizontal,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "single" => Ok(Strategy::Single),
            "iterative" => Ok(Strategy::Iterative),
            "horizontal" => Ok(Strategy::Horizontal),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

fn fmt(v: f64) -> String {
    v.to_string()
}

/// Model quantities for the configured triple, one row per mode.
pub fn cmd_analyze(cfg: &RunConfig, modes: &[Mode], out: Option<&Path>) -> Result<CommandOutput> {
    let mut o = CommandOutput::new();
    let problem = cfg.problem()?;
    let params = cfg.task_params()?;
    let mut rows = Vec::new();
    o.line(format!(
        "z={} N_t={} J={} J_t={} theta={} CR={} UC={} N_l={} papers={}",
        cfg.z,
        params.n_tests,
        params.judgments_per_paper,
        params.exclusion_threshold,
        problem.theta_i,
        problem.cost_ratio,
        problem.unit_cost,
        params.labels_per_worker,
        problem.papers_n
    ));
    o.line(format!(
        "{:<6} {:>9} {:>9} {:>10} {:>10} {:>10} {:>11} {:>8} {:>10}",
        "mode", "z_s", "a_s", "P(FE)", "P(FI)", "loss/paper", "total_loss", "PPP", "budget"
    ));
    for &mode in modes {
        let a = assess(cfg.z, &problem, &params, mode)?;
        o.line(format!(
            "{:<6} {:>9.6} {:>9.6} {:>10.6} {:>10.6} {:>10.6} {:>11.4} {:>8.4} {:>10.4}",
            mode.as_str(),
            a.posterior.surviving_cheater_fraction,
            a.posterior.expected_accuracy,
            a.p_false_exclusion,
            a.p_false_inclusion,
            a.loss_per_paper,
            a.total_loss,
            a.price_per_paper,
            a.total_price
        ));
        rows.push(vec![
            mode.to_string(),
            fmt(a.posterior.surviving_cheater_fraction),
            fmt(a.posterior.expected_accuracy),
            fmt(a.p_false_exclusion),
            fmt(a.p_false_inclusion),
            fmt(a.loss_per_paper),
            fmt(a.total_loss),
            fmt(a.price_per_paper),
            fmt(a.total_price),
        ]);
    }
    if let Some(path) = o.file(out, "analyze.csv")? {
        write_rows(
            path,
            &[
                "mode",
                "z_s",
                "a_s",
                "p_fe",
                "p_fi",
                "loss_per_paper",
                "total_loss",
                "ppp",
                "total_budget",
            ],
            rows,
        )?;
    }
    Ok(o)
}

/// Budget-vs-loss curve plus a loss-vs-N_t sweep at the configured `J`.
pub fn cmd_curve(cfg: &RunConfig, budgets: &[f64], out: Option<&Path>) -> Result<CommandOutput> {
    let mut o = CommandOutput::new();
    let budgets = if budgets.is_empty() {
        &cfg.budgets[..]
    } else {
        budgets
    };
    if budgets.is_empty() {
        return Err(Error::MissingKey("budgets".into()));
    }
    let mut sorted = budgets.to_vec();
    sorted.sort_by(f64::total_cmp);
    let before = sorted.len();
    sorted.dedup();
    if sorted.len() < before {
        o.warnings.push(format!(
            "dropped {} duplicate budget(s)",
            before - sorted.len()
        ));
    }
    let problem = cfg.problem()?;
    let space = cfg.search_space();
    let points = tradeoff_curve(&problem, cfg.z, &space, &sorted)?;
    o.line(format!(
        "{:>10} {:>4} {:>3} {:>4} {:>12} {:>10}",
        "budget", "N_t", "J", "J_t", "loss/paper", "PPP"
    ));
    for p in &points {
        match p.choice {
            Some(c) => o.line(format!(
                "{:>10.4} {:>4} {:>3} {:>4} {:>12.6} {:>10.4}",
                p.budget,
                c.params.n_tests,
                c.params.judgments_per_paper,
                c.params.exclusion_threshold,
                c.expected_loss_per_paper,
                c.expected_price_per_paper
            )),
            None => {
                o.line(format!("{:>10.4}  infeasible", p.budget));
                o.status = o.status.worst(Status::Infeasible);
            }
        }
    }
    if let Some(path) = o.file(out, "curve.csv")? {
        write_curve(&points, path)?;
    }

    let sweep_budget = cfg.budget.unwrap_or(*sorted.last().expect("nonempty"));
    let sweep = loss_vs_tests(&problem, cfg.z, cfg.judg_n, &space, sweep_budget)?;
    if let Some(path) = o.file(out, "sweep.csv")? {
        write_rows(
            path,
            &[
                "n_tests",
                "judgments",
                "exclusion_threshold",
                "expected_loss",
                "expected_price",
                "feasible",
            ],
            sweep.iter().map(|s| {
                vec![
                    s.n_tests.to_string(),
                    cfg.judg_n.to_string(),
                    s.exclusion_threshold.to_string(),
                    fmt(s.loss),
                    fmt(s.price),
                    s.feasible.to_string(),
                ]
            }),
        )?;
    }
    Ok(o)
}

fn dataset_for(cfg: &RunConfig, seed: u64) -> Result<PaperDataset> {
    match &cfg.dataset {
        Some(path) => load_dataset(path),
        None => synthesize_dataset(cfg.papers_n, cfg.in_prop, cfg.easy_fraction, seed),
    }
}

/// Replicated task simulation.
pub fn cmd_simulate(cfg: &RunConfig, out: Option<&Path>) -> Result<CommandOutput> {
    let mut o = CommandOutput::new();
    let seed = cfg.require_seed()?;
    let data = dataset_for(cfg, seed)?;
    let problem = cfg.problem()?.with_papers(data.len());
    let sim = SimulationConfig {
        quiz_regime: cfg.quiz_regime,
        max_workers: cfg.max_workers,
        ..SimulationConfig::new(
            cfg.population()?,
            cfg.task_params()?,
            data.items.clone(),
            &problem,
            seed,
        )
        .with_replications(cfg.replications)
    };
    let runs = simulate_replications(&sim)?;
    let s = summarize(&runs);

    o.line(format!(
        "papers={} replications={} seed={} (dataset: {})",
        data.len(),
        s.replications,
        seed,
        data.source
    ));
    let row = |name: &str, st: crate::simulator::Stat| {
        format!("{name:<10} mean {:>10.6}  sd {:>10.6}", st.mean, st.std_dev)
    };
    o.line(row("acc_res", s.accuracy));
    o.line(row("fp", s.false_inclusion_rate));
    o.line(row("fn", s.false_exclusion_rate));
    o.line(row("loss", s.loss_per_paper));
    o.line(row("budget", s.realized_cost));
    o.line(row("ccp", s.cost_per_classified_paper));
    if s.incomplete > 0 {
        o.warnings.push(format!(
            "{} replication(s) hit max_workers = {} before finishing; results are partial",
            s.incomplete, cfg.max_workers
        ));
        o.status = Status::Starvation;
    }

    if let Some(path) = o.file(out, "outcome.csv")? {
        write_outcome(&runs[0].decisions, &gold_labels(&data.items), path)?;
    }
    if let Some(path) = o.file(out, "replications.csv")? {
        write_rows(
            path,
            &[
                "replication",
                "decided",
                "acc_res",
                "fp",
                "fn",
                "fp_ls",
                "fn_ls",
                "loss_per_paper",
                "budget",
                "complete",
            ],
            runs.iter().enumerate().map(|(i, r)| {
                let m = r.metrics;
                let get = |f: fn(&crate::model::EvaluationMetrics) -> f64| {
                    m.as_ref().map_or(String::new(), |m| fmt(f(m)))
                };
                vec![
                    i.to_string(),
                    m.map_or(0, |m| m.decided).to_string(),
                    get(|m| m.accuracy),
                    get(|m| m.false_inclusion_rate),
                    get(|m| m.false_exclusion_rate),
                    m.map_or(String::new(), |m| {
                        fmt(m.false_inclusions as f64 * cfg.fp_cost)
                    }),
                    m.map_or(String::new(), |m| {
                        fmt(m.false_exclusions as f64 * cfg.fn_cost)
                    }),
                    get(|m| m.loss_per_paper),
                    fmt(r.realized_cost),
                    r.complete.to_string(),
                ]
            }),
        )?;
    }
    Ok(o)
}

const OPTIMIZE_HEADER: [&str; 8] = [
    "step",
    "theta",
    "n_tests",
    "judgments",
    "exclusion_threshold",
    "expected_loss",
    "expected_price",
    "feasible",
];

fn result_row(step: &str, r: &OptimizationResult) -> Vec<String> {
    match r.choice {
        Some(c) => vec![
            step.to_string(),
            fmt(r.theta_i),
            c.params.n_tests.to_string(),
            c.params.judgments_per_paper.to_string(),
            c.params.exclusion_threshold.to_string(),
            fmt(c.expected_loss_per_paper),
            fmt(c.expected_price_per_paper),
            "true".into(),
        ],
        None => vec![
            step.to_string(),
            fmt(r.theta_i),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            "false".into(),
        ],
    }
}

fn describe(step: &str, r: &OptimizationResult) -> String {
    match r.choice {
        Some(c) => format!(
            "{step:<8} theta={:.4}  N_t={} J={} J_t={}  loss/paper={:.6}  PPP={:.4}",
            r.theta_i,
            c.params.n_tests,
            c.params.judgments_per_paper,
            c.params.exclusion_threshold,
            c.expected_loss_per_paper,
            c.expected_price_per_paper
        ),
        None => format!(
            "{step:<8} theta={:.4}  infeasible under budget {:.4}",
            r.theta_i, r.budget
        ),
    }
}

/// Parameter optimization under the configured budget.
pub fn cmd_optimize(
    cfg: &RunConfig,
    strategy: Strategy,
    out: Option<&Path>,
) -> Result<CommandOutput> {
    let mut o = CommandOutput::new();
    let budget = cfg.require_budget()?;
    let space = cfg.search_space();
    let mut rows: Vec<Vec<String>> = Vec::new();

    match strategy {
        Strategy::Single => {
            let problem = cfg.problem()?;
            let r = optimize_single_run(&problem, cfg.z, &space, budget, DEFAULT_THETA)?;
            o.line(describe("single", &r));
            if !r.feasible() {
                o.status = Status::Infeasible;
            }
            rows.push(result_row("single", &r));
        }
        Strategy::Iterative | Strategy::Horizontal => {
            let seed = cfg.require_seed()?;
            let data = dataset_for(cfg, seed)?;
            let problem = cfg.problem()?.with_papers(data.len());
            let mut source = SimulatedSource::new(cfg.population()?, &problem, seed);
            source.quiz_regime = cfg.quiz_regime;
            source.max_workers = cfg.max_workers;
            let attempt = if strategy == Strategy::Iterative {
                optimize_iterative(
                    &problem,
                    cfg.z,
                    &space,
                    budget,
                    cfg.rounds,
                    &data.items,
                    &mut source,
                )
                .map(|it| {
                    for (i, round) in it.rounds.iter().enumerate() {
                        let step = format!("round{}", i + 1);
                        o.line(describe(&step, &round.result));
                        rows.push(result_row(&step, &round.result));
                    }
                    let trace: Vec<String> =
                        it.theta_trace.iter().map(|t| format!("{t:.4}")).collect();
                    o.line(format!("theta trace: {}", trace.join(" -> ")));
                    o.line(format!(
                        "post-run J_t at final theta: {}",
                        it.retuned_threshold
                    ));
                    o.warnings.extend(it.warnings);
                })
            } else {
                run_horizontal(
                    &problem,
                    cfg.z,
                    &space,
                    budget,
                    cfg.baseline_fraction,
                    &data.items,
                    &mut source,
                )
                .map(|h| {
                    o.line(describe("phase1", &h.phase1.result));
                    rows.push(result_row("phase1", &h.phase1.result));
                    if let Some(e) = h.theta_estimate {
                        o.line(format!(
                            "theta estimate from {} baseline papers: {:.4}",
                            h.phase1.papers, e.theta
                        ));
                    }
                    if let Some(p2) = &h.phase2 {
                        o.line(describe("phase2", &p2.result));
                        rows.push(result_row("phase2", &p2.result));
                        if !p2.result.feasible() {
                            o.status = Status::Infeasible;
                        }
                    }
                    if let Some(m) = h.metrics {
                        o.line(format!(
                            "realized: loss/paper={:.6} accuracy={:.4} cost={:.4}",
                            m.loss_per_paper, m.accuracy, h.realized_cost
                        ));
                    }
                    o.warnings.extend(h.warnings);
                })
            };
            match attempt {
                Ok(()) => {}
                Err(Error::Infeasible { budget }) => {
                    o.line(format!(
                        "infeasible: no parameter triple fits budget {budget:.4}"
                    ));
                    o.status = Status::Infeasible;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if let Some(path) = o.file(out, "optimize.csv")? {
        write_rows(path, &OPTIMIZE_HEADER, rows)?;
    }
    Ok(o)
}

/// Analytic-vs-simulation agreement checks for the configured `z`, `N_t`,
/// `J` and `J_t`, on the population the closed form assumes.
pub fn cmd_validate(cfg: &RunConfig, out: Option<&Path>) -> Result<CommandOutput> {
    let mut o = CommandOutput::new();
    let seed = cfg.require_seed()?;
    let population = WorkerPopulation::analytic(cfg.z)?;
    let mut params = cfg.task_params()?;
    params.tests_per_page = 0;
    let papers = synthesize_dataset(cfg.validation_papers, cfg.in_prop, 0.5, seed)?;
    let problem = cfg.problem()?.with_papers(papers.len());
    let sim = SimulationConfig::new(population, params, papers.items, &problem, seed)
        .with_replications(cfg.validation_replications)
        .with_quiz_regime(QuizRegime::AllCorrect);

    let quiz = simulate_quiz_population(&sim, cfg.quiz_samples)?;
    let z_s = surviving_cheater_fraction(cfg.z, params.n_tests, Mode::Exact)?;
    let a_s = expected_accuracy(cfg.z, params.n_tests, Mode::Exact)?;
    let runs = simulate_replications(&sim)?;
    let simulated = summarize(&runs).loss_per_paper.mean;
    let analytic = assess(cfg.z, &problem, &params, Mode::Exact)?.loss_per_paper;

    let checks = [
        (
            "surviving_cheater_fraction",
            z_s,
            quiz.surviving_cheater_fraction,
            0.01,
            false,
        ),
        (
            "surviving_accuracy_mean",
            a_s,
            quiz.surviving_accuracy_mean,
            0.01,
            false,
        ),
        ("loss_per_paper", analytic, simulated, 0.2, true),
    ];
    let mut rows = Vec::new();
    for (name, expected, observed, tol, relative) in checks {
        let gap = if relative {
            (observed - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
        } else {
            (observed - expected).abs()
        };
        let pass = gap <= tol;
        let kind = if relative { "rel" } else { "abs" };
        o.line(format!(
            "[{}] {name}: analytic {expected:.6}  simulated {observed:.6}  ({kind} gap {gap:.4} <= {tol})",
            if pass { "PASS" } else { "FAIL" }
        ));
        if !pass {
            o.status = Status::Error;
        }
        rows.push(vec![
            name.to_string(),
            fmt(expected),
            fmt(observed),
            format!("{kind}:{tol}"),
            pass.to_string(),
        ]);
    }
    if let Some(path) = o.file(out, "validate.csv")? {
        write_rows(
            path,
            &["check", "analytic", "simulated", "tolerance", "pass"],
            rows,
        )?;
    }
    let mut text = String::new();
    let _ = write!(text, "quiz: {} of {} passed", quiz.passed, quiz.samples);
    o.line(text);
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = "z = 0.3\nn_t = 3\njudg_n = 3\nj_t = 2\npapers_n = 100\nin_prop = 0.5\nfp_cost = 1\nfn_cost = 1\nprice_p = 0.02\nn_l = 10\n";

    #[test]
    fn analyze_reports_price_and_loss() {
        let cfg = RunConfig::parse(CFG).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let o = cmd_analyze(&cfg, &[Mode::Exact], Some(dir.path())).unwrap();
        let csv = fs::read_to_string(dir.path().join("analyze.csv")).unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        let ppp: f64 = row[7].parse().unwrap();
        assert!((ppp - 0.078).abs() < 1e-12);
        let loss: f64 = row[5].parse().unwrap();
        let a = expected_accuracy(0.3, 3, Mode::Exact).unwrap();
        assert!((loss - crate::analytic::rule_loss(a, 3, 2, 0.5, 1.0).unwrap()).abs() < 1e-15);
        assert_eq!(o.status, Status::Success);
    }

    #[test]
    fn analyze_without_cheaters() {
        let cfg = RunConfig::parse(&CFG.replace("z = 0.3", "z = 0")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        cmd_analyze(&cfg, &[Mode::Exact, Mode::Paper], Some(dir.path())).unwrap();
        let csv = fs::read_to_string(dir.path().join("analyze.csv")).unwrap();
        for line in csv.lines().skip(1) {
            assert_eq!(line.split(',').nth(1), Some("0"));
        }
    }

    #[test]
    fn curve_dedups_and_flags() {
        let cfg = RunConfig::parse(CFG).unwrap();
        let o = cmd_curve(&cfg, &[5.0, 1.0, 5.0, 20.0], None).unwrap();
        assert_eq!(o.warnings.len(), 1);
        assert_eq!(o.status, Status::Infeasible);
        let o = cmd_curve(&cfg, &[5.0, 20.0], None).unwrap();
        assert_eq!(o.status, Status::Success);
    }

    #[test]
    fn randomized_commands_need_seed() {
        let cfg = RunConfig::parse(CFG).unwrap();
        assert!(matches!(cmd_simulate(&cfg, None), Err(Error::MissingKey(k)) if k == "seed"));
    }

    #[test]
    fn optimize_single_infeasible() {
        let cfg = RunConfig::parse(&format!("{CFG}budget = 0.5\n")).unwrap();
        let o = cmd_optimize(&cfg, Strategy::Single, None).unwrap();
        assert_eq!(o.status, Status::Infeasible);
    }

    #[test]
    fn starvation_status() {
        let cfg = RunConfig::parse(&format!("{CFG}seed = 1\nmax_workers = 3\n")).unwrap();
        let o = cmd_simulate(&cfg, None).unwrap();
        assert_eq!(o.status, Status::Starvation);
    }
}
