//! Closed-form screening quality for one parameter triple, in both accuracy models.
//!
//! ```text
//! cargo run --example analyze
//! ```

use crowdscreen::analytic::{assess, Mode};
use crowdscreen::model::{ScreeningProblem, TaskParameters};

fn main() -> crowdscreen::Result<()> {
    let problem = ScreeningProblem::new(1000, 0.5, 5.0, 0.02)?;
    let params = TaskParameters::new(3, 3, 2)?;
    for mode in [Mode::Exact, Mode::Paper] {
        let a = assess(0.3, &problem, &params, mode)?;
        println!(
            "{mode:>5}: z_s={:.4} a_s={:.4} P(FE)={:.4} P(FI)={:.4} loss/paper={:.4} PPP={:.3} budget={:.1}",
            a.posterior.surviving_cheater_fraction,
            a.posterior.expected_accuracy,
            a.p_false_exclusion,
            a.p_false_inclusion,
            a.loss_per_paper,
            a.price_per_paper,
            a.total_price,
        );
    }
    Ok(())
}
