//! Budget-constrained parameter search and multi-run strategies.
//!
//! The search is exhaustive over `(N_t, J, J_t)`: the grids involved are a
//! few hundred points, and exhaustiveness is what makes the result checkable.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    exclude_given_include, expected_accuracy, include_given_exclude, price_per_paper, rule_loss,
    Mode, DEFAULT_THETA,
};
use crate::error::{invalid, Error, Result};
use crate::model::{
    classify_count, evaluate, gold_labels, Decisions, EvaluationMetrics, Label, PageLayout,
    PaperItem, RunOutcome, ScreeningProblem, TaskParameters, VoteMatrix, WorkerPopulation,
};
use crate::simulator::{simulate_task_run, stream_rng, QuizRegime, SimulationConfig};

/// Largest `J` a search space may contain.
pub const MAX_JUDGMENTS: u32 = 25;
/// Relative gap below which two losses count as tied.
pub const LOSS_TIE_TOLERANCE: f64 = 1e-12;
/// Relative slack allowed when comparing a planned spend with a budget.
pub const BUDGET_SLACK: f64 = 1e-9;
/// Bounds applied to every theta estimate.
pub const THETA_CLAMP: (f64, f64) = (0.01, 0.99);
/// Minimum `1 - P(excl|incl) - P(incl|excl)` for a usable theta estimate.
pub const MIN_INFORMATIVENESS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub n_tests: RangeInclusive<u32>,
    pub judgments: RangeInclusive<u32>,
    /// Accuracy model used to turn `N_t` into `ā_s`.
    pub mode: Mode,
    /// Fixed, not searched.
    pub labels_per_worker: u32,
    /// Copied into every returned [`TaskParameters`].
    pub layout: PageLayout,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            n_tests: 0..=10,
            judgments: 1..=9,
            mode: Mode::Exact,
            labels_per_worker: TaskParameters::DEFAULT_LABELS_PER_WORKER,
            layout: PageLayout::default(),
        }
    }
}

impl SearchSpace {
    pub fn new(n_tests: RangeInclusive<u32>, judgments: RangeInclusive<u32>, mode: Mode) -> Self {
        SearchSpace {
            n_tests,
            judgments,
            mode,
            ..SearchSpace::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tests.is_empty() {
            return Err(invalid(
                "n_t range",
                format!("{:?}", self.n_tests),
                "empty range",
            ));
        }
        if self.judgments.is_empty() || *self.judgments.start() == 0 {
            return Err(invalid(
                "j range",
                format!("{:?}", self.judgments),
                "need 1 <= min <= max",
            ));
        }
        if *self.judgments.end() > MAX_JUDGMENTS {
            return Err(invalid(
                "j range",
                format!("{:?}", self.judgments),
                "max J is 25",
            ));
        }
        if self.labels_per_worker == 0 {
            return Err(invalid("n_l", 0, "must be at least 1"));
        }
        Ok(())
    }

    fn params(&self, n_tests: u32, judgments: u32, exclusion_threshold: u32) -> TaskParameters {
        TaskParameters {
            n_tests,
            judgments_per_paper: judgments,
            exclusion_threshold,
            labels_per_worker: self.labels_per_worker,
            ..TaskParameters::from_layout(self.layout)
        }
    }
}

/// A feasible grid point with its expected loss and price per paper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub params: TaskParameters,
    pub expected_loss_per_paper: f64,
    pub expected_price_per_paper: f64,
}

impl Choice {
    fn key(&self) -> (u32, u32, u32) {
        (
            self.params.judgments_per_paper,
            self.params.n_tests,
            self.params.exclusion_threshold,
        )
    }
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= LOSS_TIE_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Preference order: lower loss, then lower price, then lower `J`, then
/// lower `N_t`, then lower `J_t`. Losses and prices within
/// [`LOSS_TIE_TOLERANCE`] compare equal.
pub fn compare_choices(a: &Choice, b: &Choice) -> Ordering {
    let (la, lb) = (a.expected_loss_per_paper, b.expected_loss_per_paper);
    if !tied(la, lb) {
        return la.total_cmp(&lb);
    }
    let (pa, pb) = (a.expected_price_per_paper, b.expected_price_per_paper);
    if !tied(pa, pb) {
        return pa.total_cmp(&pb);
    }
    a.key().cmp(&b.key())
}

pub fn within_budget(price_per_paper: f64, papers_n: usize, budget: f64) -> bool {
    price_per_paper * papers_n as f64 <= budget * (1.0 + BUDGET_SLACK)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub budget: f64,
    pub theta_i: f64,
    /// `None` when no grid point fits the budget.
    pub choice: Option<Choice>,
    pub evaluated: usize,
}

impl OptimizationResult {
    pub fn feasible(&self) -> bool {
        self.choice.is_some()
    }

    pub fn best_params(&self) -> Option<TaskParameters> {
        self.choice.map(|c| c.params)
    }

    pub fn require(&self) -> Result<Choice> {
        self.choice.ok_or(Error::Infeasible {
            budget: self.budget,
        })
    }
}

/// Best `(N_t, J, J_t)` for a single run at a fixed inclusion prior.
pub fn optimize_single_run(
    problem: &ScreeningProblem,
    cheater_fraction: f64,
    space: &SearchSpace,
    budget: f64,
    theta_i: f64,
) -> Result<OptimizationResult> {
    problem.validate()?;
    space.validate()?;
    if budget.is_nan() || budget <= 0.0 {
        return Err(invalid("budget", budget, "must be positive"));
    }
    let mut best: Option<Choice> = None;
    let mut evaluated = 0;
    for n_tests in space.n_tests.clone() {
        let a_bar = expected_accuracy(cheater_fraction, n_tests, space.mode)?;
        for j in space.judgments.clone() {
            let price = price_per_paper(problem.unit_cost, j, n_tests, space.labels_per_worker)?;
            if !within_budget(price, problem.papers_n, budget) {
                continue;
            }
            for j_t in 1..=j {
                evaluated += 1;
                let candidate = Choice {
                    params: space.params(n_tests, j, j_t),
                    expected_loss_per_paper: rule_loss(a_bar, j, j_t, theta_i, problem.cost_ratio)?,
                    expected_price_per_paper: price,
                };
                if best.is_none_or(|b| compare_choices(&candidate, &b) == Ordering::Less) {
                    best = Some(candidate);
                }
            }
        }
    }
    Ok(OptimizationResult {
        budget,
        theta_i,
        choice: best,
        evaluated,
    })
}

/// Best exclusion threshold for fixed `(N_t, J)`.
pub fn best_threshold(
    a_bar: f64,
    judgments: u32,
    theta_i: f64,
    cost_ratio: f64,
) -> Result<(u32, f64)> {
    let mut best = (1, rule_loss(a_bar, judgments, 1, theta_i, cost_ratio)?);
    for j_t in 2..=judgments {
        let loss = rule_loss(a_bar, judgments, j_t, theta_i, cost_ratio)?;
        if loss < best.1 && !tied(loss, best.1) {
            best = (j_t, loss);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    /// Observed share of include decisions.
    pub include_fraction: f64,
    /// Bias-corrected estimate before clamping.
    pub raw: f64,
    /// `raw` clamped to [`THETA_CLAMP`].
    pub theta: f64,
}

/// Corrects an observed include fraction for classification error.
pub fn estimate_theta_from_fraction(
    include_fraction: f64,
    a_bar: f64,
    judgments: u32,
    exclusion_threshold: u32,
) -> Result<ThetaEstimate> {
    let p_ei = exclude_given_include(a_bar, judgments, exclusion_threshold)?;
    let p_ie = include_given_exclude(a_bar, judgments, exclusion_threshold, Mode::Exact)?;
    let informativeness = 1.0 - p_ei - p_ie;
    if informativeness <= MIN_INFORMATIVENESS {
        return Err(Error::UnreliableEstimate { informativeness });
    }
    let raw = (include_fraction - p_ie) / informativeness;
    Ok(ThetaEstimate {
        include_fraction,
        raw,
        theta: raw.clamp(THETA_CLAMP.0, THETA_CLAMP.1),
    })
}

pub fn estimate_theta(
    decisions: &Decisions,
    a_bar: f64,
    judgments: u32,
    exclusion_threshold: u32,
) -> Result<ThetaEstimate> {
    if decisions.is_empty() {
        return Err(Error::NoDecisions);
    }
    let included = decisions.values().filter(|d| **d == Label::Include).count();
    estimate_theta_from_fraction(
        included as f64 / decisions.len() as f64,
        a_bar,
        judgments,
        exclusion_threshold,
    )
}

/// Votes collected for one paper.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub exclusion_votes: u32,
    pub votes: u32,
}

/// What a data source returns for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceRun {
    pub tallies: BTreeMap<String, Tally>,
    pub realized_cost: f64,
    pub complete: bool,
    /// Full simulator output when the source is the simulator.
    pub outcome: Option<RunOutcome>,
}

impl SourceRun {
    /// Classifies every paper that received at least one vote.
    pub fn decisions(&self, exclusion_threshold: u32) -> Decisions {
        self.tallies
            .iter()
            .filter(|(_, t)| t.votes > 0)
            .map(|(id, t)| {
                (
                    id.clone(),
                    classify_count(t.exclusion_votes, exclusion_threshold),
                )
            })
            .collect()
    }
}

/// Produces votes for a batch of papers under given task parameters.
pub trait DecisionSource {
    fn run(&mut self, params: &TaskParameters, papers: &[PaperItem]) -> Result<SourceRun>;
}

/// Runs the task simulator; each call is a fresh replication.
#[derive(Debug, Clone)]
pub struct SimulatedSource {
    pub population: WorkerPopulation,
    pub unit_cost: f64,
    pub cost_ratio: f64,
    pub quiz_regime: QuizRegime,
    pub seed: u64,
    pub max_workers: u64,
    next_replication: u64,
}

impl SimulatedSource {
    pub fn new(population: WorkerPopulation, problem: &ScreeningProblem, seed: u64) -> Self {
        SimulatedSource {
            population,
            unit_cost: problem.unit_cost,
            cost_ratio: problem.cost_ratio,
            quiz_regime: QuizRegime::AllCorrect,
            seed,
            max_workers: SimulationConfig::DEFAULT_MAX_WORKERS,
            next_replication: 0,
        }
    }

    /// Replication index used by the next call.
    pub fn starting_at(mut self, replication: u64) -> Self {
        self.next_replication = replication;
        self
    }
}

impl DecisionSource for SimulatedSource {
    fn run(&mut self, params: &TaskParameters, papers: &[PaperItem]) -> Result<SourceRun> {
        let config = SimulationConfig {
            population: self.population,
            params: *params,
            papers: papers.to_vec(),
            unit_cost: self.unit_cost,
            cost_ratio: self.cost_ratio,
            quiz_regime: self.quiz_regime,
            replications: 1,
            seed: self.seed,
            max_workers: self.max_workers,
        };
        let outcome = simulate_task_run(&config, self.next_replication)?;
        self.next_replication += 1;
        let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
        for (id, votes) in outcome.votes.trusted_by_paper() {
            if votes.len() == params.judgments_per_paper as usize {
                tallies.insert(id.to_string(), tally(&votes));
            }
        }
        Ok(SourceRun {
            tallies,
            realized_cost: outcome.realized_cost,
            complete: outcome.complete,
            outcome: Some(outcome),
        })
    }
}

fn tally(votes: &[Label]) -> Tally {
    Tally {
        exclusion_votes: votes.iter().filter(|v| **v == Label::Exclude).count() as u32,
        votes: votes.len() as u32,
    }
}

/// Every vote is independently correct with a fixed probability.
#[derive(Debug, Clone)]
pub struct BernoulliSource {
    pub accuracy: f64,
    pub unit_cost: f64,
    pub seed: u64,
    next_replication: u64,
}

impl BernoulliSource {
    pub fn new(accuracy: f64, unit_cost: f64, seed: u64) -> Self {
        BernoulliSource {
            accuracy,
            unit_cost,
            seed,
            next_replication: 0,
        }
    }
}

impl DecisionSource for BernoulliSource {
    fn run(&mut self, params: &TaskParameters, papers: &[PaperItem]) -> Result<SourceRun> {
        let mut rng = stream_rng(self.seed, self.next_replication, 0);
        self.next_replication += 1;
        let mut tallies = BTreeMap::new();
        for p in papers {
            let votes: Vec<Label> = (0..params.judgments_per_paper)
                .map(|_| {
                    if rng.gen::<f64>() < self.accuracy {
                        p.gold_label
                    } else {
                        p.gold_label.flipped()
                    }
                })
                .collect();
            tallies.insert(p.id.clone(), tally(&votes));
        }
        let ppp = price_per_paper(
            self.unit_cost,
            params.judgments_per_paper,
            params.n_tests,
            params.labels_per_worker,
        )?;
        Ok(SourceRun {
            tallies,
            realized_cost: ppp * papers.len() as f64,
            complete: true,
            outcome: None,
        })
    }
}

/// Replays previously collected votes; the task parameters only set the
/// price of each counted label.
#[derive(Debug, Clone)]
pub struct RecordedVotes {
    pub votes: VoteMatrix,
    pub unit_cost: f64,
}

impl DecisionSource for RecordedVotes {
    fn run(&mut self, params: &TaskParameters, papers: &[PaperItem]) -> Result<SourceRun> {
        let by_paper = self.votes.trusted_by_paper();
        let mut tallies = BTreeMap::new();
        let mut labels = 0u32;
        for p in papers {
            if let Some(votes) = by_paper.get(p.id.as_str()) {
                labels += votes.len() as u32;
                tallies.insert(p.id.clone(), tally(votes));
            }
        }
        let rate = price_per_paper(self.unit_cost, 1, params.n_tests, params.labels_per_worker)?;
        Ok(SourceRun {
            tallies,
            realized_cost: rate * labels as f64,
            complete: true,
            outcome: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub theta_used: f64,
    pub result: OptimizationResult,
    pub decided: usize,
    pub estimate: Option<ThetaEstimate>,
    pub realized_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeOutcome {
    /// Optimization of the last round.
    pub result: OptimizationResult,
    /// Starting prior followed by the estimate after each round.
    pub theta_trace: Vec<f64>,
    pub rounds: Vec<RoundRecord>,
    /// Best `J_t` for the last run's `(N_t, J)` at the final estimate; the
    /// only knob left once votes are in.
    pub retuned_threshold: u32,
    /// Last run's votes reclassified with `retuned_threshold`.
    pub final_decisions: Decisions,
    pub warnings: Vec<String>,
}

/// Repeats optimize → run → re-estimate theta for `rounds` rounds, starting
/// from theta = 0.5. Each round optimizes the full triple at the current
/// estimate; an unreliable estimate keeps the previous theta.
pub fn optimize_iterative(
    problem: &ScreeningProblem,
    cheater_fraction: f64,
    space: &SearchSpace,
    budget: f64,
    rounds: u32,
    papers: &[PaperItem],
    source: &mut dyn DecisionSource,
) -> Result<IterativeOutcome> {
    if rounds == 0 {
        return Err(invalid("rounds", 0, "must be at least 1"));
    }
    let problem = problem.with_papers(papers.len().max(1));
    let mut theta = DEFAULT_THETA;
    let mut trace = vec![theta];
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut last = None;

    for round in 0..rounds {
        let result = optimize_single_run(&problem, cheater_fraction, space, budget, theta)?;
        let choice = result.require()?;
        let p = choice.params;
        let run = source.run(&p, papers)?;
        let decisions = run.decisions(p.exclusion_threshold);
        let a_bar = expected_accuracy(cheater_fraction, p.n_tests, space.mode)?;
        let estimate = match estimate_theta(
            &decisions,
            a_bar,
            p.judgments_per_paper,
            p.exclusion_threshold,
        ) {
            Ok(e) => {
                theta = e.theta;
                Some(e)
            }
            Err(e @ (Error::UnreliableEstimate { .. } | Error::NoDecisions)) => {
                warnings.push(format!("round {}: {e}; keeping theta = {theta}", round + 1));
                None
            }
            Err(e) => return Err(e),
        };
        trace.push(theta);
        records.push(RoundRecord {
            theta_used: result.theta_i,
            result: result.clone(),
            decided: decisions.len(),
            estimate,
            realized_cost: run.realized_cost,
        });
        last = Some((result, run, a_bar));
    }

    let (result, run, a_bar) = last.expect("rounds >= 1");
    let p = result.require()?.params;
    let (retuned, _) = best_threshold(a_bar, p.judgments_per_paper, theta, problem.cost_ratio)?;
    Ok(IterativeOutcome {
        final_decisions: run.decisions(retuned),
        retuned_threshold: retuned,
        result,
        theta_trace: trace,
        rounds: records,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub papers: usize,
    pub budget: f64,
    pub theta_used: f64,
    pub result: OptimizationResult,
    pub realized_cost: f64,
    pub decided: usize,
}

impl PhaseReport {
    /// Planned spend: price per paper times papers.
    pub fn planned_cost(&self) -> f64 {
        self.result
            .choice
            .map_or(0.0, |c| c.expected_price_per_paper * self.papers as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalOutcome {
    pub phase1: PhaseReport,
    pub theta_estimate: Option<ThetaEstimate>,
    /// `None` when the baseline covers every paper.
    pub phase2: Option<PhaseReport>,
    pub decisions: Decisions,
    pub metrics: Option<EvaluationMetrics>,
    pub realized_cost: f64,
    pub warnings: Vec<String>,
}

impl HorizontalOutcome {
    /// Model-expected total loss of both phases if the true inclusion rate is `theta`.
    pub fn expected_total_loss(
        &self,
        theta: f64,
        cheater_fraction: f64,
        cost_ratio: f64,
        mode: Mode,
    ) -> Result<f64> {
        let mut total = 0.0;
        for phase in std::iter::once(&self.phase1).chain(self.phase2.as_ref()) {
            if let Some(c) = phase.result.choice {
                total += phase.papers as f64
                    * expected_loss_of(&c.params, cheater_fraction, theta, cost_ratio, mode)?;
            }
        }
        Ok(total)
    }
}

/// Model-expected loss per paper of fixed parameters at a given inclusion rate.
pub fn expected_loss_of(
    params: &TaskParameters,
    cheater_fraction: f64,
    theta: f64,
    cost_ratio: f64,
    mode: Mode,
) -> Result<f64> {
    let a_bar = expected_accuracy(cheater_fraction, params.n_tests, mode)?;
    rule_loss(
        a_bar,
        params.judgments_per_paper,
        params.exclusion_threshold,
        theta,
        cost_ratio,
    )
}

/// Two-phase strategy: screen a baseline share of the papers with
/// theta = 0.5 parameters, estimate theta from those decisions, then
/// re-optimize for the rest with whatever budget is left.
pub fn run_horizontal(
    problem: &ScreeningProblem,
    cheater_fraction: f64,
    space: &SearchSpace,
    budget: f64,
    baseline_fraction: f64,
    papers: &[PaperItem],
    source: &mut dyn DecisionSource,
) -> Result<HorizontalOutcome> {
    if !(baseline_fraction > 0.0 && baseline_fraction < 1.0) {
        return Err(invalid(
            "baseline_fraction",
            baseline_fraction,
            "must lie in (0, 1)",
        ));
    }
    if papers.is_empty() {
        return Err(invalid("papers", 0, "need at least one paper"));
    }
    let n = papers.len();
    let n1 = ((baseline_fraction * n as f64).ceil() as usize).clamp(1, n);
    let budget1 = budget * n1 as f64 / n as f64;
    let mut warnings = Vec::new();

    let res1 = optimize_single_run(
        &problem.with_papers(n1),
        cheater_fraction,
        space,
        budget1,
        DEFAULT_THETA,
    )?;
    let p1 = res1.require()?.params;
    let run1 = source.run(&p1, &papers[..n1])?;
    let mut decisions = run1.decisions(p1.exclusion_threshold);
    let a1 = expected_accuracy(cheater_fraction, p1.n_tests, space.mode)?;
    let estimate = match estimate_theta(
        &decisions,
        a1,
        p1.judgments_per_paper,
        p1.exclusion_threshold,
    ) {
        Ok(e) => Some(e),
        Err(e @ (Error::UnreliableEstimate { .. } | Error::NoDecisions)) => {
            warnings.push(format!(
                "baseline: {e}; phase 2 keeps theta = {DEFAULT_THETA}"
            ));
            None
        }
        Err(e) => return Err(e),
    };
    let phase1 = PhaseReport {
        papers: n1,
        budget: budget1,
        theta_used: DEFAULT_THETA,
        result: res1,
        realized_cost: run1.realized_cost,
        decided: decisions.len(),
    };
    let mut realized = run1.realized_cost;

    let phase2 = if n1 < n {
        let theta = estimate.map_or(DEFAULT_THETA, |e| e.theta);
        let budget2 = budget - run1.realized_cost;
        let rest = &papers[n1..];
        let res2 = if budget2 > 0.0 {
            optimize_single_run(
                &problem.with_papers(rest.len()),
                cheater_fraction,
                space,
                budget2,
                theta,
            )?
        } else {
            OptimizationResult {
                budget: budget2,
                theta_i: theta,
                choice: None,
                evaluated: 0,
            }
        };
        let (realized2, decided2) = match res2.choice {
            Some(c) => {
                let run2 = source.run(&c.params, rest)?;
                let d2 = run2.decisions(c.params.exclusion_threshold);
                let count = d2.len();
                decisions.extend(d2);
                (run2.realized_cost, count)
            }
            None => {
                warnings.push(format!(
                    "phase 2 infeasible with remaining budget {budget2:.4}; {} papers undecided",
                    rest.len()
                ));
                (0.0, 0)
            }
        };
        realized += realized2;
        Some(PhaseReport {
            papers: rest.len(),
            budget: budget2,
            theta_used: theta,
            result: res2,
            realized_cost: realized2,
            decided: decided2,
        })
    } else {
        None
    };

    let metrics = if decisions.is_empty() {
        None
    } else {
        Some(evaluate(
            &decisions,
            &gold_labels(papers),
            problem.cost_ratio,
            realized,
        )?)
    };
    Ok(HorizontalOutcome {
        phase1,
        theta_estimate: estimate,
        phase2,
        decisions,
        metrics,
        realized_cost: realized,
        warnings,
    })
}

/// One row of a budget-vs-loss curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub budget: f64,
    /// `None` when infeasible.
    pub choice: Option<Choice>,
}

impl TradeoffPoint {
    pub fn feasible(&self) -> bool {
        self.choice.is_some()
    }

    pub fn loss(&self) -> Option<f64> {
        self.choice.map(|c| c.expected_loss_per_paper)
    }
}

/// Optimizes every budget (sorted ascending, duplicates dropped).
///
/// When a larger budget's optimum only ties the previous point's loss
/// within [`LOSS_TIE_TOLERANCE`] but is numerically larger, the previous
/// choice (still feasible) is kept so the loss column never increases.
pub fn tradeoff_curve(
    problem: &ScreeningProblem,
    cheater_fraction: f64,
    space: &SearchSpace,
    budgets: &[f64],
) -> Result<Vec<TradeoffPoint>> {
    if budgets.is_empty() {
        return Err(invalid("budgets", "[]", "need at least one budget"));
    }
    let mut sorted = budgets.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut points: Vec<TradeoffPoint> = Vec::with_capacity(sorted.len());
    for budget in sorted {
        let mut choice =
            optimize_single_run(problem, cheater_fraction, space, budget, problem.theta_i)?.choice;
        if let (Some(prev), Some(cur)) = (points.last().and_then(|p| p.choice), choice) {
            if cur.expected_loss_per_paper > prev.expected_loss_per_paper {
                choice = Some(prev);
            }
        }
        points.push(TradeoffPoint { budget, choice });
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n_tests: u32,
    pub exclusion_threshold: u32,
    pub loss: f64,
    pub price: f64,
    pub feasible: bool,
}

/// Loss as a function of quiz length at a fixed `J` (best `J_t` at each
/// point), with feasibility under `budget`.
pub fn loss_vs_tests(
    problem: &ScreeningProblem,
    cheater_fraction: f64,
    judgments: u32,
    space: &SearchSpace,
    budget: f64,
) -> Result<Vec<SweepPoint>> {
    space.validate()?;
    space
        .n_tests
        .clone()
        .map(|n_tests| {
            let a_bar = expected_accuracy(cheater_fraction, n_tests, space.mode)?;
            let (j_t, loss) =
                best_threshold(a_bar, judgments, problem.theta_i, problem.cost_ratio)?;
            let price = price_per_paper(
                problem.unit_cost,
                judgments,
                n_tests,
                space.labels_per_worker,
            )?;
            Ok(SweepPoint {
                n_tests,
                exclusion_threshold: j_t,
                loss,
                price,
                feasible: within_budget(price, problem.papers_n, budget),
            })
        })
        .collect()
}
