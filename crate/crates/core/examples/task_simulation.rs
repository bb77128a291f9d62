//! Full task simulation with smart cheaters, easy/average papers and
//! in-task test questions, summarized over replications.

use crowdscreen::dataset::synthesize_dataset;
use crowdscreen::model::{PageLayout, ScreeningProblem, TaskParameters, WorkerPopulation};
use crowdscreen::simulator::{simulate_replications, summarize, SimulationConfig};

fn main() -> crowdscreen::Result<()> {
    let data = synthesize_dataset(500, 0.3, 0.5, 3)?;
    let problem = ScreeningProblem::new(data.len(), 0.3, 5.0, 0.02)?;
    let population = WorkerPopulation::simulation(0.3, 0.5)?;
    for tests_per_page in [0, 1, 2] {
        let params = TaskParameters::new(2, 3, 2)?
            .with_labels_per_worker(40)
            .with_layout(PageLayout {
                tests_per_page,
                trust_threshold: 0.75,
                ..PageLayout::default()
            });
        let config = SimulationConfig::new(population, params, data.items.clone(), &problem, 3)
            .with_replications(20);
        let runs = simulate_replications(&config)?;
        let cheater_share =
            runs.iter().map(|r| r.cheater_vote_fraction()).sum::<f64>() / runs.len() as f64;
        let s = summarize(&runs);
        println!(
            "tests/page={tests_per_page}: accuracy {:.4} ± {:.4}, loss/paper {:.4}, cost {:.2}, cheater votes {:.3}",
            s.accuracy.mean, s.accuracy.std_dev, s.loss_per_paper.mean, s.realized_cost.mean, cheater_share
        );
    }
    Ok(())
}
