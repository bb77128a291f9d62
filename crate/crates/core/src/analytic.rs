//! Closed-form screening model.
//!
//! Worker accuracy follows a mixture of an atom of weight `z` at 0.5
//! (random cheaters) and a uniform density `2(1 - z)` on (0.5, 1). A quiz of
//! `N_t` gold questions, all of which must be answered correctly, filters the
//! population; the survivors' expected accuracy `ā_s` drives binomial error
//! probabilities for a `J`-vote, `J_t`-threshold classification rule.
//!
//! Two variants are provided. [`Mode::Exact`] is straight Bayes under the
//! uniform prior: an honest worker with accuracy `a` passes with probability
//! `a^N_t`. [`Mode::Paper`] keeps the commonly cited closed forms: the
//! pass-probability term `(2/(N_t+1))(1 - 1/(2^N_t + 1))`, the
//! `Beta(1 + N_t, 1)` survivor density in the scaled variable `2a - 1`, the
//! mean `0.5 + 0.5 (1+N_t)/(2+N_t)`, and a false-inclusion sum that starts
//! at `J - J_t`. The two agree at `N_t = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, invalid, Error, Result};
use crate::model::{ScreeningProblem, TaskParameters};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    #[default]
    Exact,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Paper => "paper",
            Mode::Exact => "exact",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "paper" => Ok(Mode::Paper),
            "exact" => Ok(Mode::Exact),
            other => Err(format!("unknown mode `{other}` (expected paper|exact)")),
        }
    }
}

/// Prior assumed for the inclusion rate when nothing is known.
pub const DEFAULT_THETA: f64 = 0.5;

/// Prior density at `a`: the continuous part plus, at exactly 0.5, the
/// weight of the cheater atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorDensity {
    pub continuous: f64,
    pub atom: Option<f64>,
}

pub fn accuracy_prior_density(a: f64, z: f64) -> Result<PriorDensity> {
    check_support(a)?;
    check_probability("z", z)?;
    Ok(PriorDensity {
        continuous: 2.0 * (1.0 - z),
        atom: (a == 0.5).then_some(z),
    })
}

fn check_support(a: f64) -> Result<()> {
    if (0.5..=1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::OutsideSupport(a))
    }
}

/// `∫_{0.5}^{1} 2 a^k da`.
pub(crate) fn honest_moment(k: u32) -> f64 {
    2.0 * (1.0 - 0.5f64.powi(k as i32 + 1)) / (k as f64 + 1.0)
}

/// Probability that an honest worker passes `n_tests` questions.
pub fn honest_pass_probability(n_tests: u32, mode: Mode) -> f64 {
    match mode {
        Mode::Exact => honest_moment(n_tests),
        Mode::Paper => {
            let n = n_tests as f64;
            2.0 / (n + 1.0) * (1.0 - 1.0 / (2f64.powi(n_tests as i32) + 1.0))
        }
    }
}

pub fn pass_probability(z: f64, n_tests: u32, mode: Mode) -> Result<f64> {
    check_probability("z", z)?;
    Ok(z * 0.5f64.powi(n_tests as i32) + (1.0 - z) * honest_pass_probability(n_tests, mode))
}

/// Fraction of cheaters among quiz survivors (`z_s`).
pub fn surviving_cheater_fraction(z: f64, n_tests: u32, mode: Mode) -> Result<f64> {
    let pass = pass_probability(z, n_tests, mode)?;
    Ok(z * 0.5f64.powi(n_tests as i32) / pass)
}

/// Continuous part of the survivor accuracy density at `a`.
pub fn survivor_density(a: f64, z_s: f64, n_tests: u32, mode: Mode) -> Result<f64> {
    check_support(a)?;
    check_probability("z_s", z_s)?;
    let k = n_tests as i32;
    Ok(match mode {
        Mode::Exact => (1.0 - z_s) * a.powi(k) * 2.0 / honest_moment(n_tests),
        Mode::Paper => 2.0 * (1.0 - z_s) * (n_tests as f64 + 1.0) * (2.0 * a - 1.0).powi(k),
    })
}

/// Mean accuracy of honest quiz survivors.
pub fn honest_survivor_mean(n_tests: u32, mode: Mode) -> f64 {
    match mode {
        Mode::Exact => honest_moment(n_tests + 1) / honest_moment(n_tests),
        Mode::Paper => {
            let n = n_tests as f64;
            0.5 + 0.5 * (1.0 + n) / (2.0 + n)
        }
    }
}

/// Expected accuracy `ā_s` of a worker who survived the quiz.
///
/// Both modes weight the cheater atom with the Bayes survivor fraction; they
/// differ in the honest survivors' mean.
pub fn expected_accuracy(z: f64, n_tests: u32, mode: Mode) -> Result<f64> {
    let z_s = surviving_cheater_fraction(z, n_tests, Mode::Exact)?;
    Ok(z_s * 0.5 + (1.0 - z_s) * honest_survivor_mean(n_tests, mode))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivorPosterior {
    pub surviving_cheater_fraction: f64,
    pub n_tests: u32,
    pub mode: Mode,
    pub expected_accuracy: f64,
}

impl SurvivorPosterior {
    pub fn new(z: f64, n_tests: u32, mode: Mode) -> Result<Self> {
        Ok(SurvivorPosterior {
            surviving_cheater_fraction: surviving_cheater_fraction(z, n_tests, mode)?,
            n_tests,
            mode,
            expected_accuracy: expected_accuracy(z, n_tests, mode)?,
        })
    }
}

/// `Σ_{k=from}^{n} C(n,k) p^k (1-p)^{n-k}`.
pub fn binomial_upper_tail(p: f64, n: u32, from: u32) -> f64 {
    if from > n {
        return 0.0;
    }
    let q = 1.0 - p;
    let mut ln_coef = 0.0;
    let mut sum = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_coef += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        if k >= from {
            sum += ln_coef.exp() * p.powi(k as i32) * q.powi((n - k) as i32);
        }
    }
    sum
}

fn check_rule(a_bar: f64, j: u32, j_t: u32) -> Result<()> {
    check_support(a_bar)?;
    if j == 0 || j_t == 0 || j_t > j {
        return Err(invalid("j_t", j_t, "need 1 <= J_t <= J"));
    }
    Ok(())
}

/// `P(decision = exclude | truth = include)`: at least `J_t` of `J` votes wrong.
pub fn exclude_given_include(a_bar: f64, j: u32, j_t: u32) -> Result<f64> {
    check_rule(a_bar, j, j_t)?;
    Ok(binomial_upper_tail(1.0 - a_bar, j, j_t))
}

/// `P(decision = include | truth = exclude)`.
///
/// Exact: fewer than `J_t` exclusion votes, i.e. at least `J - J_t + 1` wrong
/// inclusion votes. Paper: the sum starts at `J - J_t`.
pub fn include_given_exclude(a_bar: f64, j: u32, j_t: u32, mode: Mode) -> Result<f64> {
    check_rule(a_bar, j, j_t)?;
    let from = match mode {
        Mode::Exact => j - j_t + 1,
        Mode::Paper => j - j_t,
    };
    Ok(binomial_upper_tail(1.0 - a_bar, j, from))
}

pub fn false_exclusion_prob(a_bar: f64, j: u32, j_t: u32, theta_i: f64) -> Result<f64> {
    check_probability("theta_i", theta_i)?;
    Ok(theta_i * exclude_given_include(a_bar, j, j_t)?)
}

pub fn false_inclusion_prob(a_bar: f64, j: u32, j_t: u32, theta_i: f64, mode: Mode) -> Result<f64> {
    check_probability("theta_i", theta_i)?;
    Ok((1.0 - theta_i) * include_given_exclude(a_bar, j, j_t, mode)?)
}

pub fn expected_loss_per_paper(p_fe: f64, p_fi: f64, cost_ratio: f64) -> f64 {
    p_fe * cost_ratio + p_fi
}

pub fn total_loss(loss_per_paper: f64, papers_n: usize) -> f64 {
    loss_per_paper * papers_n as f64
}

/// Decision-consistent expected loss for one paper.
pub fn rule_loss(a_bar: f64, j: u32, j_t: u32, theta_i: f64, cost_ratio: f64) -> Result<f64> {
    let fe = false_exclusion_prob(a_bar, j, j_t, theta_i)?;
    let fi = false_inclusion_prob(a_bar, j, j_t, theta_i, Mode::Exact)?;
    Ok(expected_loss_per_paper(fe, fi, cost_ratio))
}

/// Price per classified paper: `UC · J · (N_l + N_t) / N_l`.
pub fn price_per_paper(
    unit_cost: f64,
    judgments: u32,
    n_tests: u32,
    labels_per_worker: u32,
) -> Result<f64> {
    if labels_per_worker == 0 {
        return Err(invalid("n_l", 0, "must be at least 1"));
    }
    let nl = labels_per_worker as f64;
    Ok(unit_cost * judgments as f64 * (nl + n_tests as f64) / nl)
}

pub fn task_budget(price_per_paper: f64, papers_n: usize) -> f64 {
    price_per_paper * papers_n as f64
}

/// Everything the model says about one configured task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub mode: Mode,
    pub posterior: SurvivorPosterior,
    pub p_false_exclusion: f64,
    pub p_false_inclusion: f64,
    pub loss_per_paper: f64,
    pub total_loss: f64,
    pub price_per_paper: f64,
    pub total_price: f64,
}

/// Evaluates a task configuration entirely within one mode.
pub fn assess(
    z: f64,
    problem: &ScreeningProblem,
    params: &TaskParameters,
    mode: Mode,
) -> Result<Assessment> {
    problem.validate()?;
    params.validate()?;
    let posterior = SurvivorPosterior::new(z, params.n_tests, mode)?;
    let (j, j_t) = (params.judgments_per_paper, params.exclusion_threshold);
    let a = posterior.expected_accuracy;
    let fe = false_exclusion_prob(a, j, j_t, problem.theta_i)?;
    let fi = false_inclusion_prob(a, j, j_t, problem.theta_i, mode)?;
    let loss = expected_loss_per_paper(fe, fi, problem.cost_ratio);
    let ppp = price_per_paper(
        problem.unit_cost,
        j,
        params.n_tests,
        params.labels_per_worker,
    )?;
    Ok(Assessment {
        mode,
        posterior,
        p_false_exclusion: fe,
        p_false_inclusion: fi,
        loss_per_paper: loss,
        total_loss: total_loss(loss, problem.papers_n),
        price_per_paper: ppp,
        total_price: task_budget(ppp, problem.papers_n),
    })
}
