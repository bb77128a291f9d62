//! How a qualification quiz reshapes the worker pool: simulated survivors
//! against the closed form, for a few quiz lengths.

use crowdscreen::analytic::{expected_accuracy, surviving_cheater_fraction, Mode};
use crowdscreen::model::{ScreeningProblem, TaskParameters, WorkerPopulation};
use crowdscreen::simulator::{simulate_quiz_population, SimulationConfig};

fn main() -> crowdscreen::Result<()> {
    let z = 0.3;
    let problem = ScreeningProblem::new(1, 0.5, 1.0, 0.02)?;
    println!("N_t  pass_rate  z_s(sim)  z_s(model)  a_s(sim)  a_s(model)");
    for n_tests in [0, 1, 3, 5, 10] {
        let params = TaskParameters::new(n_tests, 3, 2)?;
        let config = SimulationConfig::new(
            WorkerPopulation::analytic(z)?,
            params,
            Vec::new(),
            &problem,
            11,
        );
        let report = simulate_quiz_population(&config, 50_000)?;
        println!(
            "{n_tests:>3}  {:>9.4}  {:>8.4}  {:>10.4}  {:>8.4}  {:>10.4}",
            report.pass_rate,
            report.surviving_cheater_fraction,
            surviving_cheater_fraction(z, n_tests, Mode::Exact)?,
            report.surviving_accuracy_mean,
            expected_accuracy(z, n_tests, Mode::Exact)?,
        );
    }
    Ok(())
}
