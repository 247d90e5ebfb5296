//! Statistical checks of the closed-form estimator moments against sampling.

mod common;

use adm::channel::SymbolVector;
use adm::estimation::{
    concentration_moments, estimate_ratios, estimate_total_concentration, interval_probabilities,
    ratio_moments,
};
use adm::kinetics::{build_panel, separation_matrix};
use adm::montecarlo::{run_estimates, sample_observation};
use adm::rng::{exponential, StreamKey};
use adm::SystemConfig;
use common::{moments, variance_se, SplitMix};

#[test]
fn ratio_variance_matches_multinomial_sampling() {
    let panel = build_panel(2, 0.1, 10.0, 5.0, 3.0).unwrap();
    let sep = separation_matrix(&panel).unwrap();
    let alpha = [0.5, 0.5];
    let n_r = 1000;
    let (_, var) = ratio_moments(&sep, &alpha, n_r).unwrap();

    let p = interval_probabilities(&sep, &alpha).unwrap();
    let mut rng = SplitMix(2024);
    let draws: Vec<Vec<f64>> = (0..100_000)
        .map(|_| estimate_ratios(&sep, &rng.multinomial(n_r, &p), n_r).unwrap())
        .collect();
    for l in 0..2 {
        let xs: Vec<f64> = draws.iter().map(|d| d[l]).collect();
        let (mean, sample_var, se) = moments(&xs);
        assert!((mean - alpha[l]).abs() < 3.0 * se);
        assert!(
            (sample_var - var[l]).abs() < 3.0 * variance_se(&xs),
            "component {l}: sample {sample_var} vs closed form {}",
            var[l]
        );
    }
}

#[test]
fn total_estimator_moments_match_sampling() {
    let (c_tot, n_r, k_on) = (7.3, 1000usize, 0.1);
    let key = StreamKey::new(5);
    let xs: Vec<f64> = (0..10_000u64)
        .map(|t| {
            let mut rng = key.trial(t);
            let t_u: f64 = (0..n_r).map(|_| exponential(&mut rng, k_on * c_tot)).sum();
            estimate_total_concentration(t_u, n_r, k_on).unwrap()
        })
        .collect();
    let (mean, var, se) = moments(&xs);
    assert!((mean - c_tot).abs() < 3.0 * se, "mean {mean}");
    let want = c_tot * c_tot / (n_r as f64 - 2.0);
    assert!((var - want).abs() < 3.0 * variance_se(&xs), "var {var} vs {want}");
}

#[test]
fn single_ligand_bound_durations_are_exponential() {
    let panel = build_panel(1, 0.1, 10.0, 5.0, 3.0).unwrap();
    let obs = sample_observation(&[2.0], &panel, 100_000, &mut StreamKey::new(8).trial(0)).unwrap();
    let mean = obs.bound_durations().iter().sum::<f64>() / 1e5;
    assert!((mean * 10.0 - 1.0).abs() < 0.01, "mean {mean}");
}

#[test]
fn interval_fractions_follow_separation_matrix() {
    let panel = build_panel(4, 0.1, 10.0, 3.0, 3.0).unwrap();
    let sep = separation_matrix(&panel).unwrap();
    let c = [1.0, 3.0, 0.5, 2.5];
    let alpha: Vec<f64> = c.iter().map(|x| x / 7.0).collect();
    let p = interval_probabilities(&sep, &alpha).unwrap();
    let n = 100_000usize;
    let obs = sample_observation(&c, &panel, n, &mut StreamKey::new(9).trial(0)).unwrap();
    for (l, (&count, &pl)) in obs.interval_counts().iter().zip(&p).enumerate() {
        let frac = count as f64 / n as f64;
        let se = (pl * (1.0 - pl) / n as f64).sqrt();
        assert!((frac - pl).abs() < 3.0 * se, "interval {l}: {frac} vs {pl}");
    }
}

#[test]
fn concentration_estimates_are_unbiased_at_default_config() {
    let system = SystemConfig::default().build().unwrap();
    let ones = SymbolVector::ones(5);
    let ests = run_estimates(&system, &ones, 10_000, 31, None).unwrap();
    let c = adm::channel::received_concentrations(&ones, &system.channel).unwrap();
    for i in 0..5 {
        let xs: Vec<f64> = ests.iter().map(|e| e.concentrations[i]).collect();
        let (mean, _, se) = moments(&xs);
        assert!((mean - c[i]).abs() < 3.0 * se, "channel {i}: {mean} vs {}", c[i]);
    }
}

#[test]
fn concentration_variance_matches_sampling_at_default_config() {
    let system = SystemConfig::default().build().unwrap();
    // A mixed symbol vector exercises unequal ratios.
    let s = SymbolVector::new(vec![1, 0, 1, 1, 0]).unwrap();
    let c = adm::channel::received_concentrations(&s, &system.channel).unwrap();
    let closed = concentration_moments(&c, &system.panel, &system.sep, 1000).unwrap();
    let ests = run_estimates(&system, &s, 100_000, 77, None).unwrap();
    for i in 0..5 {
        let xs: Vec<f64> = ests.iter().map(|e| e.concentrations[i]).collect();
        let (_, var, _) = moments(&xs);
        let se = variance_se(&xs);
        assert!(
            (var - closed.variance[i]).abs() < 3.0 * se,
            "channel {i}: sample {var} vs closed {} (se {se})",
            closed.variance[i]
        );
    }
}
