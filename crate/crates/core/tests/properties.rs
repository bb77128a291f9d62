use crowdscreen::analytic::{
    binomial_upper_tail, exclude_given_include, expected_accuracy, false_exclusion_prob,
    false_inclusion_prob, include_given_exclude, price_per_paper, rule_loss,
    surviving_cheater_fraction, Mode,
};
use crowdscreen::config::RunConfig;
use crowdscreen::model::{classify, Label, ScreeningProblem};
use crowdscreen::optimizer::{estimate_theta_from_fraction, tradeoff_curve, SearchSpace};
use proptest::prelude::*;

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Exact), Just(Mode::Paper)]
}

fn enumerate(a: f64, j: u32, j_t: u32, theta: f64) -> (f64, f64) {
    let (mut fe, mut fi) = (0.0, 0.0);
    for pattern in 0u32..(1 << j) {
        let wrong = pattern.count_ones();
        let p = (1.0 - a).powi(wrong as i32) * a.powi((j - wrong) as i32);
        // truth include: wrong votes are exclusions
        if wrong >= j_t {
            fe += theta * p;
        }
        // truth exclude: correct votes are exclusions
        if j - wrong < j_t {
            fi += (1.0 - theta) * p;
        }
    }
    (fe, fi)
}

proptest! {
    #[test]
    fn more_exclusion_votes_never_include(j in 1u32..12, j_t in 1u32..12, excl in 0u32..12) {
        prop_assume!(j_t <= j && excl < j);
        let votes = |n: u32| -> Vec<Label> {
            (0..j).map(|k| if k < n { Label::Exclude } else { Label::Include }).collect()
        };
        if classify(&votes(excl), j_t).unwrap() == Label::Exclude {
            prop_assert_eq!(classify(&votes(excl + 1), j_t).unwrap(), Label::Exclude);
        }
        if j_t < j && classify(&votes(excl), j_t + 1).unwrap() == Label::Exclude {
            prop_assert_eq!(classify(&votes(excl), j_t).unwrap(), Label::Exclude);
        }
    }

    #[test]
    fn price_is_monotone(uc in 0.001f64..1.0, j in 1u32..20, n_t in 0u32..20, n_l in 1u32..50) {
        let p = price_per_paper(uc, j, n_t, n_l).unwrap();
        prop_assert!(price_per_paper(uc * 1.5, j, n_t, n_l).unwrap() > p);
        prop_assert!(price_per_paper(uc, j + 1, n_t, n_l).unwrap() > p);
        prop_assert!(price_per_paper(uc, j, n_t + 1, n_l).unwrap() > p);
        prop_assert!(price_per_paper(uc, j, n_t, n_l + 1).unwrap() <= p * (1.0 + 1e-12));
    }

    #[test]
    fn quiz_filters_cheaters(z in 0.0f64..=1.0, n_t in 0u32..15, m in mode()) {
        let now = surviving_cheater_fraction(z, n_t, m).unwrap();
        let next = surviving_cheater_fraction(z, n_t + 1, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&now));
        prop_assert!(next <= now + 1e-15);
    }

    #[test]
    fn survivor_accuracy_rises_with_quiz_length(z in 0.0f64..1.0, n_t in 0u32..15) {
        let now = expected_accuracy(z, n_t, Mode::Exact).unwrap();
        let next = expected_accuracy(z, n_t + 1, Mode::Exact).unwrap();
        prop_assert!((0.5..=1.0).contains(&now));
        prop_assert!(next >= now - 1e-15);
    }

    #[test]
    fn error_probabilities_match_enumeration(a in 0.5f64..=1.0, j in 1u32..10, j_t in 1u32..10, theta in 0.0f64..=1.0) {
        prop_assume!(j_t <= j);
        let (fe, fi) = enumerate(a, j, j_t, theta);
        prop_assert!((false_exclusion_prob(a, j, j_t, theta).unwrap() - fe).abs() < 1e-12);
        prop_assert!((false_inclusion_prob(a, j, j_t, theta, Mode::Exact).unwrap() - fi).abs() < 1e-12);
    }

    #[test]
    fn upper_tail_is_a_probability(p in 0.0f64..=1.0, n in 0u32..30, from in 0u32..32) {
        let t = binomial_upper_tail(p, n, from);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t));
        prop_assert!(binomial_upper_tail(p, n, from + 1) <= t + 1e-12);
    }

    #[test]
    fn loss_is_bounded(a in 0.5f64..=1.0, j in 1u32..10, j_t in 1u32..10, theta in 0.0f64..=1.0, cr in 0.1f64..20.0) {
        prop_assume!(j_t <= j);
        let loss = rule_loss(a, j, j_t, theta, cr).unwrap();
        prop_assert!(loss >= 0.0 && loss <= cr.max(1.0) + 1e-12);
    }

    #[test]
    fn theta_inversion_recovers_prior(a in 0.7f64..0.99, j in 1u32..8, j_t in 1u32..8, theta in 0.01f64..0.99) {
        prop_assume!(j_t <= j);
        let p_ei = exclude_given_include(a, j, j_t).unwrap();
        let p_ie = include_given_exclude(a, j, j_t, Mode::Exact).unwrap();
        prop_assume!(1.0 - p_ei - p_ie > 0.05);
        let q = theta * (1.0 - p_ei) + (1.0 - theta) * p_ie;
        let est = estimate_theta_from_fraction(q, a, j, j_t).unwrap();
        prop_assert!((est.raw - theta).abs() < 1e-12);
    }

    #[test]
    fn tradeoff_loss_never_increases(
        z in 0.0f64..0.6,
        theta in 0.05f64..0.95,
        cr in 0.5f64..10.0,
        papers in 50usize..2000,
        mut budgets in proptest::collection::vec(0.0f64..0.4, 1..12),
    ) {
        let problem = ScreeningProblem::new(papers, theta, cr, 0.02).unwrap();
        for b in budgets.iter_mut() {
            *b *= papers as f64;
        }
        let points = tradeoff_curve(&problem, z, &SearchSpace::default(), &budgets).unwrap();
        prop_assert!(points.windows(2).all(|w| w[0].budget < w[1].budget));
        let losses: Vec<f64> = points.iter().filter_map(|p| p.loss()).collect();
        prop_assert!(losses.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn config_round_trips(z in 0.0f64..1.0, n_t in 0u32..10, j in 1u32..9, seed in any::<u64>(), budget in 1.0f64..500.0) {
        let text = format!(
            "z = {z}\nn_t = {n_t}\njudg_n = {j}\npapers_n = 100\nin_prop = 0.4\nfp_cost = 1\nfn_cost = 3\nprice_p = 0.02\nseed = {seed}\nbudget = {budget}\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(RunConfig::parse(&cfg.to_config_string()).unwrap(), cfg);
    }
}
