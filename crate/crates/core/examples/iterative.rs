//! Repeated optimize-then-estimate rounds that converge on the inclusion rate.

use crowdscreen::dataset::synthesize_dataset;
use crowdscreen::model::{evaluate, ScreeningProblem, WorkerPopulation};
use crowdscreen::optimizer::{optimize_iterative, SearchSpace, SimulatedSource};

fn main() -> crowdscreen::Result<()> {
    let data = synthesize_dataset(1000, 0.2, 0.5, 9)?;
    let problem = ScreeningProblem::new(data.len(), 0.2, 5.0, 0.02)?;
    let mut source = SimulatedSource::new(WorkerPopulation::analytic(0.3)?, &problem, 9);
    let out = optimize_iterative(
        &problem,
        0.3,
        &SearchSpace::default(),
        100.0,
        3,
        &data.items,
        &mut source,
    )?;
    for (i, r) in out.rounds.iter().enumerate() {
        let c = r.result.require()?;
        println!(
            "round {}: theta {:.3} -> N_t={} J={} J_t={}, {} decided",
            i + 1,
            r.theta_used,
            c.params.n_tests,
            c.params.judgments_per_paper,
            c.params.exclusion_threshold,
            r.decided
        );
    }
    println!("theta trace {:?}", out.theta_trace);
    let m = evaluate(&out.final_decisions, &data.gold(), 5.0, 0.0)?;
    println!(
        "final J_t {} gives accuracy {:.4}",
        out.retuned_threshold, m.accuracy
    );
    Ok(())
}
