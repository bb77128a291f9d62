//! Monte-Carlo model of the quiz filter and of page-based task execution
//! with running trust scores.
//!
//! Every worker gets its own ChaCha8 stream keyed by
//! `(seed, replication, worker id)`, so a replication's outcome never depends
//! on how many other replications run or in what order.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::price_per_paper;
use crate::error::{invalid, Result};
use crate::model::{
    classify_count, evaluate, gold_labels, Decisions, Difficulty, Label, PaperItem, RunOutcome,
    ScreeningProblem, TaskParameters, VoteEntry, VoteMatrix, WorkerKind, WorkerPopulation,
    WorkerRecord,
};

/// Replication key reserved for quiz-only population studies.
const QUIZ_STREAM_KEY: u64 = u64::MAX;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent generator for one `(seed, replication, stream)` triple.
pub fn stream_rng(seed: u64, replication: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(replication)));
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuizRegime {
    /// Pass iff every quiz question is answered correctly.
    #[default]
    AllCorrect,
    /// Pass iff the fraction answered correctly reaches the trust threshold.
    Threshold,
}

impl fmt::Display for QuizRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuizRegime::AllCorrect => "all_correct",
            QuizRegime::Threshold => "threshold",
        })
    }
}

impl FromStr for QuizRegime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "all_correct" => Ok(QuizRegime::AllCorrect),
            "threshold" => Ok(QuizRegime::Threshold),
            other => Err(format!(
                "unknown quiz regime `{other}` (expected all_correct|threshold)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimWorker {
    pub id: u64,
    pub kind: WorkerKind,
    pub base_accuracy: f64,
    pub trust: f64,
    pub test_correct: u32,
    pub test_seen: u32,
}

impl SimWorker {
    fn record_test(&mut self, correct: bool) {
        self.test_seen += 1;
        if correct {
            self.test_correct += 1;
        }
        self.trust = self.test_correct as f64 / self.test_seen as f64;
    }
}

pub fn sample_worker<R: Rng + ?Sized>(
    population: &WorkerPopulation,
    id: u64,
    rng: &mut R,
) -> SimWorker {
    let (kind, base_accuracy) = if rng.gen::<f64>() < population.cheater_fraction {
        if rng.gen::<f64>() < population.smart_cheater_share {
            (WorkerKind::SmartCheater, population.smart_cheater_accuracy)
        } else {
            (WorkerKind::RandomCheater, 0.5)
        }
    } else {
        let (lo, hi) = (
            population.honest_accuracy_low,
            population.honest_accuracy_high,
        );
        let a = if lo < hi { rng.gen_range(lo..hi) } else { lo };
        (WorkerKind::Trustworthy, a)
    };
    SimWorker {
        id,
        kind,
        base_accuracy,
        trust: 1.0,
        test_correct: 0,
        test_seen: 0,
    }
}

/// Probability that `worker` labels an item of the given difficulty correctly.
pub fn effective_accuracy(worker: &SimWorker, difficulty: Difficulty, easy_delta: f64) -> f64 {
    match (worker.kind, difficulty) {
        (WorkerKind::RandomCheater, _) => 0.5,
        (_, Difficulty::Average) => worker.base_accuracy,
        (_, Difficulty::Easy) => (worker.base_accuracy + easy_delta).min(1.0),
    }
}

fn random_difficulty<R: Rng + ?Sized>(rng: &mut R) -> Difficulty {
    if rng.gen::<bool>() {
        Difficulty::Easy
    } else {
        Difficulty::Average
    }
}

/// Synthesizes gold test items, each equally likely easy or average.
pub fn synthesize_test_items<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Vec<Difficulty> {
    (0..n).map(|_| random_difficulty(rng)).collect()
}

/// Puts the worker through the quiz, updating its test counters and trust.
pub fn run_quiz<R: Rng + ?Sized>(
    worker: &mut SimWorker,
    quiz_items: &[Difficulty],
    regime: QuizRegime,
    trust_threshold: f64,
    easy_delta: f64,
    rng: &mut R,
) -> bool {
    let mut all_correct = true;
    for &d in quiz_items {
        let correct = rng.gen::<f64>() < effective_accuracy(worker, d, easy_delta);
        all_correct &= correct;
        worker.record_test(correct);
    }
    match regime {
        QuizRegime::AllCorrect => all_correct,
        QuizRegime::Threshold => worker.trust >= trust_threshold,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub population: WorkerPopulation,
    pub params: TaskParameters,
    pub papers: Vec<PaperItem>,
    pub unit_cost: f64,
    pub cost_ratio: f64,
    pub quiz_regime: QuizRegime,
    pub replications: u32,
    pub seed: u64,
    /// Cap on workers drawn per replication.
    pub max_workers: u64,
}

impl SimulationConfig {
    pub const DEFAULT_MAX_WORKERS: u64 = 1_000_000;

    pub fn new(
        population: WorkerPopulation,
        params: TaskParameters,
        papers: Vec<PaperItem>,
        problem: &ScreeningProblem,
        seed: u64,
    ) -> Self {
        SimulationConfig {
            population,
            params,
            papers,
            unit_cost: problem.unit_cost,
            cost_ratio: problem.cost_ratio,
            quiz_regime: QuizRegime::AllCorrect,
            replications: 1,
            seed,
            max_workers: Self::DEFAULT_MAX_WORKERS,
        }
    }

    pub fn with_replications(mut self, replications: u32) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_quiz_regime(mut self, regime: QuizRegime) -> Self {
        self.quiz_regime = regime;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.population.validate()?;
        self.params.validate()?;
        if self.replications == 0 {
            return Err(invalid("replications", 0, "must be at least 1"));
        }
        if self.unit_cost.is_nan() || self.unit_cost <= 0.0 {
            return Err(invalid("price_p", self.unit_cost, "must be positive"));
        }
        if self.cost_ratio.is_nan() || self.cost_ratio <= 0.0 {
            return Err(invalid("cost_ratio", self.cost_ratio, "must be positive"));
        }
        Ok(())
    }

    fn new_worker(&self, replication: u64, id: u64) -> (SimWorker, ChaCha8Rng, bool) {
        let mut rng = stream_rng(self.seed, replication, id);
        let mut worker = sample_worker(&self.population, id, &mut rng);
        let quiz = synthesize_test_items(self.params.n_tests, &mut rng);
        let passed = run_quiz(
            &mut worker,
            &quiz,
            self.quiz_regime,
            self.params.trust_threshold,
            self.population.easy_delta,
            &mut rng,
        );
        (worker, rng, passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuizReport {
    pub samples: u64,
    pub passed: u64,
    pub pass_rate: f64,
    /// Per-kind pass rates; `None` when no worker of that kind was drawn.
    pub pass_rate_random_cheater: Option<f64>,
    pub pass_rate_smart_cheater: Option<f64>,
    pub pass_rate_trustworthy: Option<f64>,
    pub surviving_cheater_fraction: f64,
    pub surviving_accuracy_mean: f64,
    /// Ten equal bins of survivor base accuracy over [0.5, 1].
    pub accuracy_histogram: Vec<HistogramBin>,
}

const HISTOGRAM_BINS: usize = 10;

/// Draws `n_samples` workers and puts each through the configured quiz.
pub fn simulate_quiz_population(config: &SimulationConfig, n_samples: u64) -> Result<QuizReport> {
    config.validate()?;
    if n_samples == 0 {
        return Err(invalid("n_samples", 0, "must be at least 1"));
    }
    let draws: Vec<(WorkerKind, f64, bool)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let (w, _, passed) = config.new_worker(QUIZ_STREAM_KEY, i);
            (w.kind, w.base_accuracy, passed)
        })
        .collect();

    let mut seen = [0u64; 3];
    let mut pass = [0u64; 3];
    let mut acc_sum = 0.0;
    let mut cheaters = 0u64;
    let mut bins = vec![0u64; HISTOGRAM_BINS];
    for &(kind, acc, passed) in &draws {
        let k = kind as usize;
        seen[k] += 1;
        if passed {
            pass[k] += 1;
            acc_sum += acc;
            if kind.is_cheater() {
                cheaters += 1;
            }
            let b = (((acc - 0.5) / 0.5) * HISTOGRAM_BINS as f64).floor() as isize;
            bins[b.clamp(0, HISTOGRAM_BINS as isize - 1) as usize] += 1;
        }
    }
    let passed: u64 = pass.iter().sum();
    let rate = |k: WorkerKind| {
        let k = k as usize;
        (seen[k] > 0).then(|| pass[k] as f64 / seen[k] as f64)
    };
    let (z_s, mean) = if passed > 0 {
        (cheaters as f64 / passed as f64, acc_sum / passed as f64)
    } else {
        (0.0, 0.0)
    };
    let width = 0.5 / HISTOGRAM_BINS as f64;
    Ok(QuizReport {
        samples: n_samples,
        passed,
        pass_rate: passed as f64 / n_samples as f64,
        pass_rate_random_cheater: rate(WorkerKind::RandomCheater),
        pass_rate_smart_cheater: rate(WorkerKind::SmartCheater),
        pass_rate_trustworthy: rate(WorkerKind::Trustworthy),
        surviving_cheater_fraction: z_s,
        surviving_accuracy_mean: mean,
        accuracy_histogram: bins
            .into_iter()
            .enumerate()
            .map(|(i, count)| HistogramBin {
                low: 0.5 + i as f64 * width,
                high: 0.5 + (i + 1) as f64 * width,
                count,
            })
            .collect(),
    })
}

struct CastVote {
    paper: usize,
    worker: u64,
    vote: Label,
    trusted: bool,
}

/// Runs one replication of the screening task.
///
/// Quiz survivors arrive one at a time and label pages of `papers_per_page`
/// papers still short of trusted votes, plus `tests_per_page` gold tests,
/// until they have given `labels_per_worker` labels or no work is left.
/// Trust is refreshed after each page; a worker whose trust falls below the
/// threshold loses every vote it cast, and those papers go back in the queue.
/// All quiz survivors are paid for the papers they labeled.
pub fn simulate_task_run(config: &SimulationConfig, replication: u64) -> Result<RunOutcome> {
    config.validate()?;
    if config.papers.is_empty() {
        return Err(invalid("papers", 0, "need at least one paper"));
    }
    let params = &config.params;
    let papers = &config.papers;
    let needed = params.judgments_per_paper as usize;
    let delta = config.population.easy_delta;
    let pay_rate = price_per_paper(
        config.unit_cost,
        1,
        params.n_tests,
        params.labels_per_worker,
    )?;

    let mut counted: Vec<Vec<usize>> = vec![Vec::with_capacity(needed); papers.len()];
    let mut in_queue = vec![true; papers.len()];
    let mut queue: VecDeque<usize> = (0..papers.len()).collect();
    let mut votes: Vec<CastVote> = Vec::new();
    let mut workers = Vec::new();
    let mut drawn = 0u64;
    let mut realized_cost = 0.0;
    let mut complete = true;

    while !queue.is_empty() {
        if drawn >= config.max_workers {
            complete = false;
            break;
        }
        let id = drawn;
        drawn += 1;
        let (mut worker, mut rng, passed) = config.new_worker(replication, id);
        if !passed {
            continue;
        }

        let mut trajectory = vec![worker.trust];
        let mut mine: Vec<usize> = Vec::new();
        let mut voted: HashSet<usize> = HashSet::new();
        let mut labels = 0u32;
        let mut trusted = true;

        while labels < params.labels_per_worker && !queue.is_empty() {
            let want = params
                .papers_per_page
                .min(params.labels_per_worker - labels) as usize;
            let mut page = Vec::with_capacity(want);
            let mut skipped = Vec::new();
            let scan = queue.len();
            for _ in 0..scan {
                if page.len() == want {
                    break;
                }
                let p = queue.pop_front().expect("scan bounded by queue length");
                if voted.contains(&p) {
                    skipped.push(p);
                } else {
                    page.push(p);
                }
            }
            for &p in skipped.iter().rev() {
                queue.push_front(p);
            }
            if page.is_empty() {
                break;
            }

            for &p in &page {
                voted.insert(p);
                let acc = effective_accuracy(&worker, papers[p].difficulty, delta);
                let gold = papers[p].gold_label;
                let vote = if rng.gen::<f64>() < acc {
                    gold
                } else {
                    gold.flipped()
                };
                votes.push(CastVote {
                    paper: p,
                    worker: id,
                    vote,
                    trusted: true,
                });
                mine.push(votes.len() - 1);
                counted[p].push(votes.len() - 1);
                if counted[p].len() < needed {
                    queue.push_back(p);
                } else {
                    in_queue[p] = false;
                }
            }
            labels += page.len() as u32;
            realized_cost += page.len() as f64 * pay_rate;

            for _ in 0..params.tests_per_page {
                let d = random_difficulty(&mut rng);
                let correct = rng.gen::<f64>() < effective_accuracy(&worker, d, delta);
                worker.record_test(correct);
            }
            trajectory.push(worker.trust);

            if worker.trust < params.trust_threshold {
                trusted = false;
                for &vi in &mine {
                    votes[vi].trusted = false;
                    let p = votes[vi].paper;
                    counted[p].retain(|&x| x != vi);
                    if !in_queue[p] {
                        in_queue[p] = true;
                        queue.push_back(p);
                    }
                }
                break;
            }
        }

        workers.push(WorkerRecord {
            id,
            kind: worker.kind,
            base_accuracy: worker.base_accuracy,
            trust_trajectory: trajectory,
            labels,
            trusted,
        });
    }

    let mut decisions = Decisions::new();
    for (p, vs) in counted.iter().enumerate() {
        if vs.len() == needed {
            let excl = vs
                .iter()
                .filter(|&&vi| votes[vi].vote == Label::Exclude)
                .count();
            decisions.insert(
                papers[p].id.clone(),
                classify_count(excl as u32, params.exclusion_threshold),
            );
        }
    }
    let metrics = if decisions.is_empty() {
        None
    } else {
        Some(evaluate(
            &decisions,
            &gold_labels(papers),
            config.cost_ratio,
            realized_cost,
        )?)
    };
    let entries = votes
        .into_iter()
        .map(|v| VoteEntry {
            paper_id: papers[v.paper].id.clone(),
            worker_id: v.worker,
            vote: v.vote,
            trusted: v.trusted,
        })
        .collect();

    Ok(RunOutcome {
        decisions,
        metrics,
        realized_cost,
        votes: VoteMatrix::from_entries(entries)?,
        workers,
        workers_drawn: drawn,
        complete,
    })
}

/// Runs `config.replications` independent replications in parallel.
pub fn simulate_replications(config: &SimulationConfig) -> Result<Vec<RunOutcome>> {
    config.validate()?;
    (0..config.replications as u64)
        .into_par_iter()
        .map(|r| simulate_task_run(config, r))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std_dev: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        if values.is_empty() {
            return Stat::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Stat {
            mean,
            std_dev: var.sqrt(),
        }
    }

    /// Standard error of the mean for `n` observations.
    pub fn std_error(&self, n: usize) -> f64 {
        self.std_dev / (n as f64).sqrt()
    }
}

/// Replication means and standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub replications: usize,
    pub incomplete: usize,
    pub accuracy: Stat,
    pub false_exclusion_rate: Stat,
    pub false_inclusion_rate: Stat,
    pub loss_per_paper: Stat,
    pub realized_cost: Stat,
    pub cost_per_classified_paper: Stat,
}

pub fn summarize(outcomes: &[RunOutcome]) -> ReplicationSummary {
    let metrics: Vec<_> = outcomes.iter().filter_map(|o| o.metrics).collect();
    let col = |f: fn(&crate::model::EvaluationMetrics) -> f64| {
        Stat::of(&metrics.iter().map(f).collect::<Vec<_>>())
    };
    ReplicationSummary {
        replications: outcomes.len(),
        incomplete: outcomes.iter().filter(|o| !o.complete).count(),
        accuracy: col(|m| m.accuracy),
        false_exclusion_rate: col(|m| m.false_exclusion_rate),
        false_inclusion_rate: col(|m| m.false_inclusion_rate),
        loss_per_paper: col(|m| m.loss_per_paper),
        realized_cost: Stat::of(&outcomes.iter().map(|o| o.realized_cost).collect::<Vec<_>>()),
        cost_per_classified_paper: col(|m| m.cost_per_classified_paper),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{self, Mode};

    fn papers(n: usize) -> Vec<PaperItem> {
        (0..n)
            .map(|i| {
                let label = if i % 2 == 0 {
                    Label::Include
                } else {
                    Label::Exclude
                };
                let diff = if i % 3 == 0 {
                    Difficulty::Easy
                } else {
                    Difficulty::Average
                };
                PaperItem::new(format!("p{i}"), label, diff)
            })
            .collect()
    }

    fn config(
        pop: WorkerPopulation,
        params: TaskParameters,
        n: usize,
        seed: u64,
    ) -> SimulationConfig {
        let problem = ScreeningProblem::new(n, 0.5, 1.0, 0.02).unwrap();
        SimulationConfig::new(pop, params, papers(n), &problem, seed)
    }

    #[test]
    fn degenerate_worker_draws() {
        let mut rng = stream_rng(1, 0, 0);
        let mut pop = WorkerPopulation::analytic(1.0).unwrap();
        for i in 0..100 {
            let w = sample_worker(&pop, i, &mut rng);
            assert_eq!(w.kind, WorkerKind::RandomCheater);
            assert_eq!(w.base_accuracy, 0.5);
        }
        pop.cheater_fraction = 0.0;
        pop.honest_accuracy_low = 0.8;
        pop.honest_accuracy_high = 0.8;
        let w = sample_worker(&pop, 0, &mut rng);
        assert_eq!((w.kind, w.base_accuracy), (WorkerKind::Trustworthy, 0.8));
    }

    #[test]
    fn cheater_share_converges() {
        let pop = WorkerPopulation::analytic(0.5).unwrap();
        let mut rng = stream_rng(7, 0, 0);
        let n = 1_000_000;
        let cheaters = (0..n)
            .filter(|&i| sample_worker(&pop, i, &mut rng).kind.is_cheater())
            .count();
        assert!((cheaters as f64 / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn effective_accuracy_rules() {
        let mk = |kind, a| SimWorker {
            id: 0,
            kind,
            base_accuracy: a,
            trust: 1.0,
            test_correct: 0,
            test_seen: 0,
        };
        let honest = mk(WorkerKind::Trustworthy, 0.85);
        assert!((effective_accuracy(&honest, Difficulty::Easy, 0.1) - 0.95).abs() < 1e-12);
        assert_eq!(effective_accuracy(&honest, Difficulty::Average, 0.1), 0.85);
        let cheat = mk(WorkerKind::RandomCheater, 0.5);
        assert_eq!(effective_accuracy(&cheat, Difficulty::Easy, 0.1), 0.5);
        let strong = mk(WorkerKind::Trustworthy, 0.95);
        assert_eq!(effective_accuracy(&strong, Difficulty::Easy, 0.1), 1.0);
        let smart = mk(WorkerKind::SmartCheater, 0.6);
        assert!((effective_accuracy(&smart, Difficulty::Easy, 0.1) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn quiz_outcomes() {
        let mut rng = stream_rng(3, 0, 0);
        let items = vec![Difficulty::Average; 8];
        let mut perfect = SimWorker {
            id: 0,
            kind: WorkerKind::Trustworthy,
            base_accuracy: 1.0,
            trust: 1.0,
            test_correct: 0,
            test_seen: 0,
        };
        assert!(run_quiz(
            &mut perfect,
            &items,
            QuizRegime::AllCorrect,
            0.5,
            0.0,
            &mut rng
        ));
        assert_eq!((perfect.test_correct, perfect.test_seen), (8, 8));

        let n = 200_000;
        let mut passes = 0;
        for _ in 0..n {
            let mut w = SimWorker {
                kind: WorkerKind::RandomCheater,
                base_accuracy: 0.5,
                ..perfect.clone()
            };
            w.test_correct = 0;
            w.test_seen = 0;
            if run_quiz(
                &mut w,
                &items[..3],
                QuizRegime::AllCorrect,
                0.5,
                0.0,
                &mut rng,
            ) {
                passes += 1;
            }
        }
        // binomial sd = sqrt(0.125 * 0.875 / 2e5) ≈ 7.4e-4
        assert!((passes as f64 / n as f64 - 0.125).abs() < 0.003);
    }

    #[test]
    fn quiz_population_matches_pass_probability() {
        let params = TaskParameters::new(3, 3, 2).unwrap();
        let cfg = config(WorkerPopulation::analytic(0.3).unwrap(), params, 10, 11);
        let r = simulate_quiz_population(&cfg, 1_000_000).unwrap();
        let p = analytic::pass_probability(0.3, 3, Mode::Exact).unwrap();
        assert!((r.pass_rate - p).abs() < 0.002, "{} vs {p}", r.pass_rate);
        let z_s = analytic::surviving_cheater_fraction(0.3, 3, Mode::Exact).unwrap();
        assert!((r.surviving_cheater_fraction - z_s).abs() < 0.005);
        assert_eq!(
            r.accuracy_histogram.iter().map(|b| b.count).sum::<u64>(),
            r.passed
        );
    }

    #[test]
    fn quiz_population_edge_and_determinism() {
        let params = TaskParameters::new(0, 1, 1).unwrap();
        let cfg = config(WorkerPopulation::analytic(0.0).unwrap(), params, 1, 5);
        assert_eq!(simulate_quiz_population(&cfg, 1000).unwrap().pass_rate, 1.0);
        let params = TaskParameters::new(4, 1, 1).unwrap();
        let cfg = config(
            WorkerPopulation::simulation(0.4, 0.5).unwrap(),
            params,
            1,
            5,
        );
        let a = simulate_quiz_population(&cfg, 20_000).unwrap();
        let b = simulate_quiz_population(&cfg, 20_000).unwrap();
        assert_eq!(a, b);
        assert!(a.pass_rate_smart_cheater.unwrap() > a.pass_rate_random_cheater.unwrap());
    }

    #[test]
    fn perfect_workers_make_no_errors() {
        let mut pop = WorkerPopulation::analytic(0.0).unwrap();
        pop.honest_accuracy_low = 1.0;
        let params = TaskParameters::new(2, 3, 2).unwrap();
        let out = simulate_task_run(&config(pop, params, 200, 1), 0).unwrap();
        let m = out.metrics.unwrap();
        assert!(out.complete);
        assert_eq!(m.decided, 200);
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.false_exclusion_rate + m.false_inclusion_rate, 0.0);
        // no distrust: every label is a counted label
        let ppp = analytic::price_per_paper(0.02, 3, 2, 10).unwrap();
        assert!((out.realized_cost - 200.0 * ppp).abs() < 1e-9);
    }

    #[test]
    fn votes_are_unique_and_capped() {
        let pop = WorkerPopulation::simulation(0.3, 0.3).unwrap();
        let params = TaskParameters::new(2, 5, 3)
            .unwrap()
            .with_layout(crate::model::PageLayout {
                papers_per_page: 4,
                tests_per_page: 1,
                trust_threshold: 0.7,
            });
        let out = simulate_task_run(&config(pop, params, 60, 9), 2).unwrap();
        for (_, votes) in out.votes.trusted_by_paper() {
            assert_eq!(votes.len(), 5);
        }
        assert_eq!(out.decisions.len(), 60);
    }

    #[test]
    fn distrust_costs_extra() {
        let pop = WorkerPopulation::simulation(0.5, 0.0).unwrap();
        let params = TaskParameters::new(1, 3, 2)
            .unwrap()
            .with_layout(crate::model::PageLayout {
                papers_per_page: 2,
                tests_per_page: 2,
                trust_threshold: 0.8,
            });
        let out = simulate_task_run(&config(pop, params, 100, 4), 0).unwrap();
        assert!(out.workers.iter().any(|w| !w.trusted));
        let ppp = analytic::price_per_paper(0.02, 3, 1, 10).unwrap();
        assert!(out.realized_cost > 100.0 * ppp);
        for w in out.workers.iter().filter(|w| w.trusted) {
            assert!(*w.trust_trajectory.last().unwrap() >= 0.8);
        }
        let distrusted: HashSet<u64> = out
            .workers
            .iter()
            .filter(|w| !w.trusted)
            .map(|w| w.id)
            .collect();
        for e in out.votes.entries() {
            assert_eq!(e.trusted, !distrusted.contains(&e.worker_id));
        }
    }

    #[test]
    fn worker_cap_flags_incomplete() {
        let pop = WorkerPopulation::analytic(0.0).unwrap();
        let params = TaskParameters::new(0, 3, 2).unwrap();
        let mut cfg = config(pop, params, 100, 1);
        cfg.max_workers = 5;
        let out = simulate_task_run(&cfg, 0).unwrap();
        assert!(!out.complete);
        assert!(out.decisions.len() < 100);
        assert_eq!(out.workers_drawn, 5);
    }

    #[test]
    fn replications_are_order_independent() {
        let pop = WorkerPopulation::simulation(0.3, 0.5).unwrap();
        let params = TaskParameters::new(3, 3, 2).unwrap();
        let cfg = config(pop, params, 50, 21).with_replications(4);
        let all = simulate_replications(&cfg).unwrap();
        assert_eq!(all[2], simulate_task_run(&cfg, 2).unwrap());
        assert_ne!(all[0].votes, all[1].votes);
        let s = summarize(&all);
        assert_eq!(s.replications, 4);
    }

    #[test]
    fn stat_basics() {
        let s = Stat::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std_dev - 1.0).abs() < 1e-12);
        assert_eq!(Stat::of(&[]).mean, 0.0);
    }
}
