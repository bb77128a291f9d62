//! Shared domain vocabulary: worker populations, screening problems, task
//! parameters, votes, decisions and evaluation metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, invalid, Error, Result};

/// Binary screening label. Used for gold labels, votes and decisions alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Include,
    Exclude,
}

impl Label {
    pub fn flipped(self) -> Label {
        match self {
            Label::Include => Label::Exclude,
            Label::Exclude => Label::Include,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Include => "include",
            Label::Exclude => "exclude",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "include" => Ok(Label::Include),
            "exclude" => Ok(Label::Exclude),
            other => Err(format!(
                "unknown label `{other}` (expected include|exclude)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Average,
}

impl Difficulty {
    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Average => "average",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Difficulty {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "easy" => Ok(Difficulty::Easy),
            "average" => Ok(Difficulty::Average),
            other => Err(format!(
                "unknown difficulty `{other}` (expected easy|average)"
            )),
        }
    }
}

/// The kind of a crowd worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkerKind {
    RandomCheater,
    SmartCheater,
    Trustworthy,
}

impl WorkerKind {
    pub fn is_cheater(self) -> bool {
        !matches!(self, WorkerKind::Trustworthy)
    }
}

/// Parameters of the incoming crowd.
///
/// A worker is a cheater with probability `cheater_fraction`. A cheater is
/// "smart" with probability `smart_cheater_share` and then answers with
/// `smart_cheater_accuracy`; otherwise it answers at random (accuracy 0.5).
/// Honest workers draw their accuracy uniformly from
/// `[honest_accuracy_low, honest_accuracy_high]`. Easy items add
/// `easy_delta` to the accuracy of non-random workers, capped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkerPopulation {
    pub cheater_fraction: f64,
    pub smart_cheater_share: f64,
    pub smart_cheater_accuracy: f64,
    pub honest_accuracy_low: f64,
    pub honest_accuracy_high: f64,
    pub easy_delta: f64,
}

impl WorkerPopulation {
    /// The population the closed-form model assumes: random cheaters only,
    /// honest accuracy uniform on (0.5, 1) and no easy-item bonus.
    pub fn analytic(cheater_fraction: f64) -> Result<Self> {
        let p = WorkerPopulation {
            cheater_fraction,
            smart_cheater_share: 0.0,
            smart_cheater_accuracy: 0.6,
            honest_accuracy_low: 0.5,
            honest_accuracy_high: 1.0,
            easy_delta: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// The population used in the quiz and task simulations: honest accuracy
    /// uniform on (0.6, 1), smart cheaters at 0.6 and an easy bonus of 0.1.
    pub fn simulation(cheater_fraction: f64, smart_cheater_share: f64) -> Result<Self> {
        let p = WorkerPopulation {
            cheater_fraction,
            smart_cheater_share,
            smart_cheater_accuracy: 0.6,
            honest_accuracy_low: 0.6,
            honest_accuracy_high: 1.0,
            easy_delta: 0.1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("z", self.cheater_fraction)?;
        check_probability("smart_cheater_share", self.smart_cheater_share)?;
        if !(0.5..=1.0).contains(&self.smart_cheater_accuracy) {
            return Err(invalid(
                "smart_cheater_accuracy",
                self.smart_cheater_accuracy,
                "must lie in [0.5, 1]",
            ));
        }
        let (lo, hi) = (self.honest_accuracy_low, self.honest_accuracy_high);
        if !(0.5..=1.0).contains(&lo) || !(0.5..=1.0).contains(&hi) || lo > hi {
            return Err(invalid(
                "honest_accuracy",
                format!("[{lo}, {hi}]"),
                "need 0.5 <= low <= high <= 1",
            ));
        }
        if !(0.0..=0.5).contains(&self.easy_delta) {
            return Err(invalid(
                "easy_delta",
                self.easy_delta,
                "must lie in [0, 0.5]",
            ));
        }
        Ok(())
    }
}

/// Review-side inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreeningProblem {
    pub papers_n: usize,
    /// Prior probability that a paper should be included.
    pub theta_i: f64,
    /// Cost of a false exclusion in units of a false inclusion.
    pub cost_ratio: f64,
    /// Price paid per label.
    pub unit_cost: f64,
}

impl ScreeningProblem {
    pub fn new(papers_n: usize, theta_i: f64, cost_ratio: f64, unit_cost: f64) -> Result<Self> {
        let p = ScreeningProblem {
            papers_n,
            theta_i,
            cost_ratio,
            unit_cost,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.papers_n == 0 {
            return Err(invalid("papers_n", 0, "must be at least 1"));
        }
        check_probability("theta_i", self.theta_i)?;
        if !(self.cost_ratio > 0.0 && self.cost_ratio.is_finite()) {
            return Err(invalid("cost_ratio", self.cost_ratio, "must be positive"));
        }
        if !(self.unit_cost > 0.0 && self.unit_cost.is_finite()) {
            return Err(invalid("unit_cost", self.unit_cost, "must be positive"));
        }
        Ok(())
    }

    /// Same problem restricted to `papers_n` papers.
    pub fn with_papers(&self, papers_n: usize) -> ScreeningProblem {
        ScreeningProblem { papers_n, ..*self }
    }
}

/// Page layout and trust knobs that only matter to the task simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageLayout {
    pub papers_per_page: u32,
    pub tests_per_page: u32,
    pub trust_threshold: f64,
}

impl Default for PageLayout {
    fn default() -> Self {
        PageLayout {
            papers_per_page: 5,
            tests_per_page: 0,
            trust_threshold: 0.5,
        }
    }
}

/// The knobs of a screening task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskParameters {
    /// Initial quiz questions (N_t).
    pub n_tests: u32,
    /// Trusted votes collected per paper (J).
    pub judgments_per_paper: u32,
    /// Exclusion votes needed to exclude (J_t).
    pub exclusion_threshold: u32,
    /// Valid non-test labels per trusted worker (N_l).
    pub labels_per_worker: u32,
    pub papers_per_page: u32,
    pub tests_per_page: u32,
    pub trust_threshold: f64,
}

impl TaskParameters {
    pub const DEFAULT_LABELS_PER_WORKER: u32 = 10;

    /// A task with the given triple, `N_l = 10` and the default page layout.
    pub fn new(n_tests: u32, judgments_per_paper: u32, exclusion_threshold: u32) -> Result<Self> {
        let p = TaskParameters {
            n_tests,
            judgments_per_paper,
            exclusion_threshold,
            labels_per_worker: Self::DEFAULT_LABELS_PER_WORKER,
            ..TaskParameters::from_layout(PageLayout::default())
        };
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn from_layout(layout: PageLayout) -> TaskParameters {
        TaskParameters {
            n_tests: 0,
            judgments_per_paper: 1,
            exclusion_threshold: 1,
            labels_per_worker: Self::DEFAULT_LABELS_PER_WORKER,
            papers_per_page: layout.papers_per_page,
            tests_per_page: layout.tests_per_page,
            trust_threshold: layout.trust_threshold,
        }
    }

    pub fn with_labels_per_worker(mut self, n: u32) -> Self {
        self.labels_per_worker = n;
        self
    }

    pub fn with_layout(mut self, layout: PageLayout) -> Self {
        self.papers_per_page = layout.papers_per_page;
        self.tests_per_page = layout.tests_per_page;
        self.trust_threshold = layout.trust_threshold;
        self
    }

    pub fn layout(&self) -> PageLayout {
        PageLayout {
            papers_per_page: self.papers_per_page,
            tests_per_page: self.tests_per_page,
            trust_threshold: self.trust_threshold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.judgments_per_paper == 0 {
            return Err(invalid("judg_n", 0, "must be at least 1"));
        }
        if self.exclusion_threshold == 0 || self.exclusion_threshold > self.judgments_per_paper {
            return Err(invalid(
                "j_t",
                self.exclusion_threshold,
                "need 1 <= exclusion threshold <= judgments per paper",
            ));
        }
        if self.labels_per_worker == 0 {
            return Err(invalid("n_l", 0, "must be at least 1"));
        }
        if self.papers_per_page == 0 {
            return Err(invalid("p_page", 0, "must be at least 1"));
        }
        if !(0.5..=1.0).contains(&self.trust_threshold) {
            return Err(invalid(
                "trsh",
                self.trust_threshold,
                "must lie in [0.5, 1]",
            ));
        }
        Ok(())
    }
}

/// A candidate paper with its ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperItem {
    pub id: String,
    pub gold_label: Label,
    pub difficulty: Difficulty,
    /// Carried opaquely; the model never reads text.
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default, rename = "abstract")]
    pub abstract_text: Option<String>,
}

impl PaperItem {
    pub fn new(id: impl Into<String>, gold_label: Label, difficulty: Difficulty) -> Self {
        PaperItem {
            id: id.into(),
            gold_label,
            difficulty,
            title: None,
            abstract_text: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteEntry {
    pub paper_id: String,
    pub worker_id: u64,
    pub vote: Label,
    pub trusted: bool,
}

/// All votes of a run, one per (paper, worker) pair.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteMatrix {
    entries: Vec<VoteEntry>,
}

impl VoteMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matrix, rejecting a second vote by the same worker on the same paper.
    pub fn from_entries(entries: Vec<VoteEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert((e.paper_id.as_str(), e.worker_id)) {
                return Err(invalid(
                    "vote",
                    format!("{}/{}", e.paper_id, e.worker_id),
                    "duplicate vote for (paper, worker)",
                ));
            }
        }
        Ok(VoteMatrix { entries })
    }

    pub fn entries(&self) -> &[VoteEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Trusted votes grouped by paper.
    pub fn trusted_by_paper(&self) -> BTreeMap<&str, Vec<Label>> {
        let mut out: BTreeMap<&str, Vec<Label>> = BTreeMap::new();
        for e in self.entries.iter().filter(|e| e.trusted) {
            out.entry(e.paper_id.as_str()).or_default().push(e.vote);
        }
        out
    }
}

/// Decision per paper id. Ordered so that every report is deterministic.
pub type Decisions = BTreeMap<String, Label>;

/// Gold label per paper id.
pub fn gold_labels(papers: &[PaperItem]) -> BTreeMap<String, Label> {
    papers
        .iter()
        .map(|p| (p.id.clone(), p.gold_label))
        .collect()
}

/// Excludes iff at least `exclusion_threshold` votes say exclude.
pub fn classify(votes: &[Label], exclusion_threshold: u32) -> Result<Label> {
    if votes.is_empty() {
        return Err(Error::NoVotes);
    }
    if exclusion_threshold == 0 || exclusion_threshold as usize > votes.len() {
        return Err(invalid(
            "exclusion_threshold",
            exclusion_threshold,
            "need 1 <= threshold <= number of votes",
        ));
    }
    let excl = votes.iter().filter(|v| **v == Label::Exclude).count();
    Ok(classify_count(excl as u32, exclusion_threshold))
}

pub(crate) fn classify_count(exclusion_votes: u32, exclusion_threshold: u32) -> Label {
    if exclusion_votes >= exclusion_threshold {
        Label::Exclude
    } else {
        Label::Include
    }
}

/// Quality and cost of a set of decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationMetrics {
    pub decided: usize,
    pub false_exclusions: usize,
    pub false_inclusions: usize,
    pub accuracy: f64,
    pub false_exclusion_rate: f64,
    pub false_inclusion_rate: f64,
    /// `FE_rate * cost_ratio + FI_rate`.
    pub loss_per_paper: f64,
    /// Realized cost per decided paper (CCP).
    pub cost_per_classified_paper: f64,
}

pub fn evaluate(
    decisions: &Decisions,
    gold: &BTreeMap<String, Label>,
    cost_ratio: f64,
    realized_cost: f64,
) -> Result<EvaluationMetrics> {
    if decisions.is_empty() {
        return Err(Error::NoDecisions);
    }
    let (mut fe, mut fi) = (0usize, 0usize);
    for (id, decision) in decisions {
        let truth = gold.get(id).ok_or_else(|| Error::MissingGold(id.clone()))?;
        match (truth, decision) {
            (Label::Include, Label::Exclude) => fe += 1,
            (Label::Exclude, Label::Include) => fi += 1,
            _ => {}
        }
    }
    let n = decisions.len();
    let fe_rate = fe as f64 / n as f64;
    let fi_rate = fi as f64 / n as f64;
    Ok(EvaluationMetrics {
        decided: n,
        false_exclusions: fe,
        false_inclusions: fi,
        accuracy: (n - fe - fi) as f64 / n as f64,
        false_exclusion_rate: fe_rate,
        false_inclusion_rate: fi_rate,
        loss_per_paper: fe_rate * cost_ratio + fi_rate,
        cost_per_classified_paper: realized_cost / n as f64,
    })
}

/// Trust history of one worker who passed the quiz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerRecord {
    pub id: u64,
    pub kind: WorkerKind,
    pub base_accuracy: f64,
    /// Trust after the quiz, then after every labeled page.
    pub trust_trajectory: Vec<f64>,
    pub labels: u32,
    pub trusted: bool,
}

/// Result of one simulated (or replayed) screening run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub decisions: Decisions,
    /// `None` when no paper could be decided.
    pub metrics: Option<EvaluationMetrics>,
    /// Total paid, including workers whose votes were later discarded.
    pub realized_cost: f64,
    pub votes: VoteMatrix,
    pub workers: Vec<WorkerRecord>,
    /// Workers drawn from the population, including those who failed the quiz.
    pub workers_drawn: u64,
    /// False when the worker cap was hit before every paper was decided.
    pub complete: bool,
}

impl RunOutcome {
    pub fn trust_trajectories(&self) -> impl Iterator<Item = (u64, &[f64])> {
        self.workers
            .iter()
            .map(|w| (w.id, w.trust_trajectory.as_slice()))
    }

    /// Share of aggregated (trusted) votes that came from cheaters.
    pub fn cheater_vote_fraction(&self) -> f64 {
        let kinds: BTreeMap<u64, WorkerKind> =
            self.workers.iter().map(|w| (w.id, w.kind)).collect();
        let (mut cheat, mut total) = (0usize, 0usize);
        for e in self.votes.entries().iter().filter(|e| e.trusted) {
            total += 1;
            if kinds.get(&e.worker_id).is_some_and(|k| k.is_cheater()) {
                cheat += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            cheat as f64 / total as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Exclude as E, Include as I};

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&[E, E, I], 2).unwrap(), E);
        assert_eq!(classify(&[I, I, I], 1).unwrap(), I);
        assert_eq!(classify(&[E, I, I, E], 3).unwrap(), I);
    }

    #[test]
    fn classify_errors() {
        assert!(matches!(classify(&[], 1), Err(Error::NoVotes)));
        assert!(classify(&[E], 0).is_err());
        assert!(classify(&[E, I], 3).is_err());
    }

    #[test]
    fn threshold_extremes() {
        // J_t = 1: any exclusion vote excludes. J_t = J: unanimity.
        assert_eq!(classify(&[I, I, E], 1).unwrap(), E);
        assert_eq!(classify(&[E, E, I], 3).unwrap(), I);
        assert_eq!(classify(&[E, E, E], 3).unwrap(), E);
    }

    fn labels(n: usize, excl: &[usize]) -> (Decisions, BTreeMap<String, Label>) {
        let gold: BTreeMap<_, _> = (0..n).map(|i| (format!("p{i}"), I)).collect();
        let dec = (0..n)
            .map(|i| (format!("p{i}"), if excl.contains(&i) { E } else { I }))
            .collect();
        (dec, gold)
    }

    #[test]
    fn evaluate_counts_rates() {
        let mut gold = BTreeMap::new();
        let mut dec = Decisions::new();
        for i in 0..100 {
            let id = format!("p{i}");
            let truth = if i < 50 { I } else { E };
            gold.insert(id.clone(), truth);
            // 3 false exclusions among the first 50, 5 false inclusions among the rest
            let d = match i {
                0..=2 => E,
                50..=54 => I,
                _ => truth,
            };
            dec.insert(id, d);
        }
        let m = evaluate(&dec, &gold, 10.0, 9.0).unwrap();
        assert!((m.false_exclusion_rate - 0.03).abs() < 1e-12);
        assert!((m.false_inclusion_rate - 0.05).abs() < 1e-12);
        assert!((m.loss_per_paper - 0.35).abs() < 1e-12);
        assert!((m.cost_per_classified_paper - 0.09).abs() < 1e-12);
        assert!((m.accuracy + m.false_exclusion_rate + m.false_inclusion_rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_boundaries() {
        let (dec, gold) = labels(10, &[]);
        let m = evaluate(&dec, &gold, 3.0, 1.0).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.loss_per_paper, 0.0);

        let (dec, gold) = labels(10, &(0..10).collect::<Vec<_>>());
        let m = evaluate(&dec, &gold, 1.0, 1.0).unwrap();
        assert_eq!(m.false_exclusion_rate, 1.0);
        assert_eq!(m.loss_per_paper, 1.0);
    }

    #[test]
    fn evaluate_errors() {
        let gold = BTreeMap::new();
        assert!(matches!(
            evaluate(&Decisions::new(), &gold, 1.0, 0.0),
            Err(Error::NoDecisions)
        ));
        let mut dec = Decisions::new();
        dec.insert("x".into(), I);
        assert!(
            matches!(evaluate(&dec, &gold, 1.0, 0.0), Err(Error::MissingGold(id)) if id == "x")
        );
    }

    #[test]
    fn vote_matrix_rejects_duplicates() {
        let e = |p: &str, w| VoteEntry {
            paper_id: p.into(),
            worker_id: w,
            vote: I,
            trusted: true,
        };
        assert!(VoteMatrix::from_entries(vec![e("a", 1), e("a", 2), e("b", 1)]).is_ok());
        assert!(VoteMatrix::from_entries(vec![e("a", 1), e("a", 1)]).is_err());
    }

    #[test]
    fn population_validation() {
        assert!(WorkerPopulation::analytic(0.3).is_ok());
        assert!(WorkerPopulation::analytic(1.2).is_err());
        let mut p = WorkerPopulation::simulation(0.2, 0.5).unwrap();
        p.honest_accuracy_low = 0.8;
        p.honest_accuracy_high = 0.8;
        assert!(p.validate().is_ok());
        p.honest_accuracy_low = 0.9;
        assert!(p.validate().is_err());
    }

    #[test]
    fn task_parameter_validation() {
        assert!(TaskParameters::new(3, 3, 2).is_ok());
        assert!(TaskParameters::new(3, 3, 4).is_err());
        assert!(TaskParameters::new(3, 0, 0).is_err());
        assert!(TaskParameters::new(3, 3, 2)
            .unwrap()
            .with_labels_per_worker(0)
            .validate()
            .is_err());
    }
}
