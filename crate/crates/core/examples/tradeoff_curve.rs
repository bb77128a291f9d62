//! Budget versus minimal expected loss, and loss versus quiz length at fixed J.

use crowdscreen::model::ScreeningProblem;
use crowdscreen::optimizer::{loss_vs_tests, tradeoff_curve, SearchSpace};

fn main() -> crowdscreen::Result<()> {
    let problem = ScreeningProblem::new(1000, 0.3, 5.0, 0.02)?;
    let space = SearchSpace::default();
    let budgets: Vec<f64> = (1..=12).map(|k| 10.0 * k as f64).collect();
    for p in tradeoff_curve(&problem, 0.3, &space, &budgets)? {
        match p.choice {
            Some(c) => println!(
                "{:>6.1}  loss {:.4}  (N_t={}, J={}, J_t={})",
                p.budget,
                c.expected_loss_per_paper,
                c.params.n_tests,
                c.params.judgments_per_paper,
                c.params.exclusion_threshold
            ),
            None => println!("{:>6.1}  infeasible", p.budget),
        }
    }
    println!();
    for s in loss_vs_tests(&problem, 0.3, 3, &space, 90.0)? {
        println!(
            "N_t={:>2}  J_t={}  loss {:.4}  price {:.4}  {}",
            s.n_tests,
            s.exclusion_threshold,
            s.loss,
            s.price,
            if s.feasible { "" } else { "over budget" }
        );
    }
    Ok(())
}
