use std::collections::BTreeMap;

use crowdscreen::analytic::price_per_paper;
use crowdscreen::dataset::synthesize_dataset;
use crowdscreen::model::{PageLayout, ScreeningProblem, TaskParameters, WorkerPopulation};
use crowdscreen::simulator::{
    simulate_quiz_population, simulate_replications, simulate_task_run, QuizRegime,
    SimulationConfig,
};

fn setup(
    population: WorkerPopulation,
    params: TaskParameters,
    papers: usize,
    seed: u64,
) -> SimulationConfig {
    let data = synthesize_dataset(papers, 0.4, 0.5, seed).unwrap();
    let problem = ScreeningProblem::new(papers, 0.4, 3.0, 0.02).unwrap();
    SimulationConfig::new(population, params, data.items, &problem, seed)
}

fn strict_layout(tests_per_page: u32) -> TaskParameters {
    TaskParameters::new(2, 3, 2)
        .unwrap()
        .with_labels_per_worker(40)
        .with_layout(PageLayout {
            tests_per_page,
            trust_threshold: 0.75,
            ..PageLayout::default()
        })
}

#[test]
fn in_task_tests_push_out_cheater_votes() {
    let pop = WorkerPopulation::simulation(0.4, 0.5).unwrap();
    let share = |tests| {
        let runs =
            simulate_replications(&setup(pop, strict_layout(tests), 300, 21).with_replications(10))
                .unwrap();
        runs.iter().map(|r| r.cheater_vote_fraction()).sum::<f64>() / runs.len() as f64
    };
    let (none, one, two) = (share(0), share(1), share(2));
    assert!(one < none && two < one, "{none} {one} {two}");
}

#[test]
fn smart_cheaters_pass_quiz_at_their_accuracy() {
    let pop = WorkerPopulation::simulation(1.0, 1.0).unwrap();
    let params = TaskParameters::new(3, 1, 1).unwrap();
    let report = simulate_quiz_population(&setup(pop, params, 1, 5), 100_000).unwrap();
    // half the items are easy, where accuracy gains 0.1
    let expected = 0.65f64.powi(3);
    assert!((report.pass_rate_smart_cheater.unwrap() - expected).abs() < 0.01);
    assert!(report.pass_rate_random_cheater.is_none());
    assert_eq!(report.surviving_cheater_fraction, 1.0);
}

#[test]
fn threshold_quiz_admits_partial_scores() {
    let pop = WorkerPopulation::analytic(1.0).unwrap();
    let params = TaskParameters::new(4, 1, 1).unwrap();
    let config = setup(pop, params, 1, 6).with_quiz_regime(QuizRegime::Threshold);
    let report = simulate_quiz_population(&config, 100_000).unwrap();
    // random cheaters need at least 2 of 4 right: (6 + 4 + 1) / 16
    assert!(
        (report.pass_rate - 11.0 / 16.0).abs() < 0.01,
        "{}",
        report.pass_rate
    );
}

#[test]
fn decided_papers_have_exactly_j_trusted_votes() {
    let pop = WorkerPopulation::simulation(0.3, 0.5).unwrap();
    let run = simulate_task_run(&setup(pop, strict_layout(2), 200, 8), 0).unwrap();
    assert!(run.complete);
    let trusted = run.votes.trusted_by_paper();
    assert_eq!(run.decisions.len(), 200);
    for id in run.decisions.keys() {
        assert_eq!(trusted[id.as_str()].len(), 3);
    }
    let trusted_workers: BTreeMap<u64, bool> =
        run.workers.iter().map(|w| (w.id, w.trusted)).collect();
    for v in run.votes.entries() {
        assert_eq!(v.trusted, trusted_workers[&v.worker_id]);
    }
}

#[test]
fn trust_trajectories_stay_in_range() {
    let pop = WorkerPopulation::simulation(0.3, 0.5).unwrap();
    let run = simulate_task_run(&setup(pop, strict_layout(1), 200, 9), 0).unwrap();
    for w in &run.workers {
        assert!(w.trust_trajectory.iter().all(|t| (0.0..=1.0).contains(t)));
        let last = *w.trust_trajectory.last().unwrap();
        assert_eq!(w.trusted, last >= 0.75, "worker {}", w.id);
    }
    assert!(run.workers.iter().any(|w| !w.trusted));
}

#[test]
fn cost_counts_every_paid_label() {
    let pop = WorkerPopulation::simulation(0.3, 0.5).unwrap();
    let params = strict_layout(2);
    let run = simulate_task_run(&setup(pop, params, 150, 10), 0).unwrap();
    let labels: u32 = run.workers.iter().map(|w| w.labels).sum();
    let rate = price_per_paper(0.02, 1, params.n_tests, params.labels_per_worker).unwrap();
    assert!((run.realized_cost - rate * labels as f64).abs() < 1e-9);
    assert_eq!(labels as usize, run.votes.len());
}

#[test]
fn replications_are_reproducible_and_distinct() {
    let pop = WorkerPopulation::simulation(0.3, 0.2).unwrap();
    let config = setup(pop, TaskParameters::new(3, 3, 2).unwrap(), 100, 12).with_replications(3);
    let a = simulate_replications(&config).unwrap();
    let b = simulate_replications(&config).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].votes, a[1].votes);
    assert_eq!(a[2], simulate_task_run(&config, 2).unwrap());
}
