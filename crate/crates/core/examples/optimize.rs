//! Cheapest-loss parameter triple for a fixed budget.

use crowdscreen::analytic::DEFAULT_THETA;
use crowdscreen::model::ScreeningProblem;
use crowdscreen::optimizer::{optimize_single_run, SearchSpace};

fn main() -> crowdscreen::Result<()> {
    let problem = ScreeningProblem::new(1000, 0.5, 5.0, 0.02)?;
    let space = SearchSpace::default();
    for budget in [30.0, 60.0, 120.0, 240.0] {
        let result = optimize_single_run(&problem, 0.3, &space, budget, DEFAULT_THETA)?;
        match result.choice {
            Some(c) => println!(
                "budget {budget:>6.1}: N_t={} J={} J_t={} loss/paper={:.4} PPP={:.4} ({} triples checked)",
                c.params.n_tests,
                c.params.judgments_per_paper,
                c.params.exclusion_threshold,
                c.expected_loss_per_paper,
                c.expected_price_per_paper,
                result.evaluated
            ),
            None => println!("budget {budget:>6.1}: infeasible"),
        }
    }
    Ok(())
}
