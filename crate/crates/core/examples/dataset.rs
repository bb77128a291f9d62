//! Writing, validating and reloading a paper dataset, then recording an
//! outcome file for a simulated run over it.

use crowdscreen::dataset::{load_dataset, synthesize_dataset, write_dataset, write_outcome};
use crowdscreen::model::{ScreeningProblem, TaskParameters, WorkerPopulation};
use crowdscreen::simulator::{simulate_task_run, SimulationConfig};

fn main() -> crowdscreen::Result<()> {
    let dir = std::env::temp_dir().join("crowdscreen-dataset-example");
    let papers_csv = dir.join("papers.csv");
    std::fs::create_dir_all(&dir).map_err(|source| crowdscreen::Error::Io {
        path: dir.clone(),
        source,
    })?;

    write_dataset(&synthesize_dataset(200, 0.4, 0.5, 1)?, &papers_csv)?;
    let data = load_dataset(&papers_csv)?;
    println!(
        "loaded {} papers, empirical inclusion rate {:.3}",
        data.len(),
        data.theta_empirical
    );

    let bad = dir.join("bad.csv");
    std::fs::write(
        &bad,
        "id,gold_label,difficulty\np1,include,easy\np1,maybe,hard\n",
    )
    .map_err(|source| crowdscreen::Error::Io {
        path: bad.clone(),
        source,
    })?;
    if let Err(e) = load_dataset(&bad) {
        println!("rejected: {e}");
    }

    let problem = ScreeningProblem::new(data.len(), data.theta_empirical, 1.0, 0.02)?;
    let config = SimulationConfig::new(
        WorkerPopulation::analytic(0.2)?,
        TaskParameters::new(3, 3, 2)?,
        data.items.clone(),
        &problem,
        1,
    );
    let run = simulate_task_run(&config, 0)?;
    let outcome = dir.join("outcome.csv");
    write_outcome(&run.decisions, &data.gold(), &outcome)?;
    println!("wrote {}", outcome.display());
    Ok(())
}
