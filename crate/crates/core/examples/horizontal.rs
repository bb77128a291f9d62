//! Two-phase screening: a baseline sample estimates the inclusion rate,
//! then the remaining papers are screened with re-optimized parameters.

use crowdscreen::analytic::{Mode, DEFAULT_THETA};
use crowdscreen::dataset::synthesize_dataset;
use crowdscreen::model::{ScreeningProblem, WorkerPopulation};
use crowdscreen::optimizer::{
    expected_loss_of, optimize_single_run, run_horizontal, SearchSpace, SimulatedSource,
};

fn main() -> crowdscreen::Result<()> {
    let (z, theta_true, papers_n) = (0.3, 0.8, 2000);
    let budget = 0.12 * papers_n as f64;
    let data = synthesize_dataset(papers_n, theta_true, 0.5, 5)?;
    let problem = ScreeningProblem::new(papers_n, theta_true, 5.0, 0.02)?;
    let space = SearchSpace::default();

    let mut source = SimulatedSource::new(WorkerPopulation::analytic(z)?, &problem, 5);
    let h = run_horizontal(&problem, z, &space, budget, 0.1, &data.items, &mut source)?;
    if let Some(e) = h.theta_estimate {
        println!(
            "baseline of {} papers estimates theta = {:.3}",
            h.phase1.papers, e.theta
        );
    }
    let planned = h.expected_total_loss(theta_true, z, 5.0, Mode::Exact)?;

    let single = optimize_single_run(&problem, z, &space, budget, DEFAULT_THETA)?.require()?;
    let single_loss =
        papers_n as f64 * expected_loss_of(&single.params, z, theta_true, 5.0, Mode::Exact)?;
    println!("expected total loss: horizontal {planned:.1}, single run {single_loss:.1}");
    if let Some(m) = h.metrics {
        println!(
            "realized loss/paper {:.4}, spent {:.2} of {budget:.2}",
            m.loss_per_paper, h.realized_cost
        );
    }
    for w in h.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
