//! Event-level Monte Carlo receiver.
//!
//! Each receptor contributes one unbound duration, drawn at the total binding
//! rate `k_on * c_tot`, and one bound duration: the binding ligand is chosen in
//! proportion to its concentration and the duration is exponential at that
//! ligand's unbinding rate. The stationary laws are sampled directly, so no
//! transient is simulated. Trials run the estimator and the analytical
//! thresholds end to end, giving an independent check of the closed forms.

use std::io::Write;

use rand_core::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{received_concentrations, SymbolVector};
use crate::config::Scenario;
use crate::detection::VarianceMode;
use crate::error::{AdmError, Result};
use crate::estimation::{estimate_detailed, ConcentrationEstimate, TrialObservation};
use crate::kinetics::{interval_thresholds, LigandPanel};
use crate::rng::{exponential, uniform, StreamKey};

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    pub system: Scenario,
}

impl TrialConfig {
    pub fn new(system: Scenario, trials: usize, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(AdmError::param("trials", "at least one trial is required"));
        }
        Ok(TrialConfig {
            seed,
            trials,
            system,
        })
    }
}

/// Row-major `trials x M` matrices of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub channels: usize,
    pub thresholds: Vec<f64>,
    pub true_bits: Vec<u8>,
    pub estimates: Vec<f64>,
    pub bit_errors: Vec<u8>,
}

impl TrialResult {
    pub fn trials(&self) -> usize {
        self.true_bits.len().checked_div(self.channels).unwrap_or(0)
    }

    fn row<'a, T>(&self, m: &'a [T], t: usize) -> &'a [T] {
        &m[t * self.channels..(t + 1) * self.channels]
    }

    pub fn bits_row(&self, t: usize) -> &[u8] {
        self.row(&self.true_bits, t)
    }

    pub fn estimates_row(&self, t: usize) -> &[f64] {
        self.row(&self.estimates, t)
    }

    pub fn errors_row(&self, t: usize) -> &[u8] {
        self.row(&self.bit_errors, t)
    }

    /// One line per trial: `trial,s_1..s_M,chat_1..chat_M,err_1..err_M`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let m = self.channels;
        let mut header = vec!["trial".to_string()];
        header.extend((1..=m).map(|i| format!("s_{i}")));
        header.extend((1..=m).map(|i| format!("chat_{i}")));
        header.extend((1..=m).map(|i| format!("err_{i}")));
        writeln!(out, "{}", header.join(","))?;
        for t in 0..self.trials() {
            write!(out, "{t}")?;
            for b in self.bits_row(t) {
                write!(out, ",{b}")?;
            }
            for c in self.estimates_row(t) {
                write!(out, ",{c:.9e}")?;
            }
            for e in self.errors_row(t) {
                write!(out, ",{e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Observed error rates with binomial 3-sigma half-widths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalBep {
    pub per_channel: Vec<f64>,
    pub mean: f64,
    pub half_widths: Vec<f64>,
    /// `3 sqrt(p (1 - p) / trials)` at the mean rate.
    pub mean_half_width: f64,
    pub trials: usize,
}

/// Draws the stationary bound/unbound durations of `n_r` receptors exposed
/// to concentrations `c`. Consumes exactly three `u64` per receptor.
pub fn sample_observation<R: RngCore + ?Sized>(
    c: &[f64],
    panel: &LigandPanel,
    n_r: usize,
    rng: &mut R,
) -> Result<TrialObservation> {
    if n_r <= 2 {
        return Err(AdmError::InsufficientReceptors(n_r));
    }
    if c.len() != panel.len() {
        return Err(AdmError::InvalidInput(format!(
            "expected {} concentrations, got {}",
            panel.len(),
            c.len()
        )));
    }
    if c.iter().any(|&x| !(x >= 0.0)) {
        return Err(AdmError::InvalidInput("concentrations must be nonnegative".into()));
    }
    let c_tot: f64 = c.iter().sum();
    if !(c_tot > 0.0) {
        return Err(AdmError::NoBinding);
    }

    let m = panel.len();
    let mut cdf = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &ci in c {
        acc += ci / c_tot;
        cdf.push(acc);
    }
    let thresholds = interval_thresholds(panel);
    let binding_rate = panel.k_on() * c_tot;
    let k_off = panel.k_off();

    let mut bound = Vec::with_capacity(n_r);
    let mut counts = vec![0u64; m];
    let mut t_u = 0.0;
    for _ in 0..n_r {
        t_u += exponential(rng, binding_rate);
        let u = uniform(rng);
        let ligand = cdf
            .iter()
            .position(|&f| u < f)
            .unwrap_or_else(|| c.iter().rposition(|&x| x > 0.0).unwrap_or(m - 1));
        let tau = exponential(rng, k_off[ligand]);
        // thresholds[0] = 0 and thresholds[m] = inf bracket every duration.
        let bin = thresholds[1..m].partition_point(|&t| t <= tau);
        counts[bin] += 1;
        bound.push(tau);
    }
    TrialObservation::new(bound, t_u, counts)
}

/// Analytical thresholds for the receiver. With `N1 == N0` the symbols are
/// indistinguishable and the common mean is used.
pub fn receiver_thresholds(system: &Scenario, mode: VarianceMode) -> Result<Vec<f64>> {
    match system.mean_bep(mode) {
        Ok(report) => Ok(report.thresholds()),
        Err(AdmError::NonSeparable { .. }) if system.channel.n1 == system.channel.n0 => {
            let c = received_concentrations(&SymbolVector::zeros(system.channels()), &system.channel)?;
            Ok(c)
        }
        Err(e) => Err(e),
    }
}

struct TrialRow {
    bits: Vec<u8>,
    estimates: Vec<f64>,
    errors: Vec<u8>,
}

fn run_one(
    key: &StreamKey,
    t: usize,
    system: &Scenario,
    thresholds: &[f64],
) -> Result<TrialRow> {
    let m = system.channels();
    let mut rng = key.trial(t as u64);
    let s = SymbolVector::from_mask(rng.next_u64(), m);
    let c = received_concentrations(&s, &system.channel)?;
    let obs = sample_observation(&c, &system.panel, system.receptors(), &mut rng)?;
    let est = estimate_detailed(&obs, &system.panel, &system.sep)?;
    let errors = s
        .bits()
        .iter()
        .zip(&est.concentrations)
        .zip(thresholds)
        .map(|((&b, &ch), &lambda)| u8::from(u8::from(ch > lambda) != b))
        .collect();
    Ok(TrialRow {
        bits: s.bits().to_vec(),
        estimates: est.concentrations,
        errors,
    })
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| AdmError::InvalidInput(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Simulates `cfg.trials` uniformly random symbol vectors on the global pool.
pub fn run_trials(cfg: &TrialConfig, mode: VarianceMode) -> Result<TrialResult> {
    run_trials_with_workers(cfg, mode, None)
}

/// As [`run_trials`], on a dedicated pool of `workers` threads when given.
/// The result does not depend on the worker count.
pub fn run_trials_with_workers(
    cfg: &TrialConfig,
    mode: VarianceMode,
    workers: Option<usize>,
) -> Result<TrialResult> {
    let system = &cfg.system;
    let thresholds = receiver_thresholds(system, mode)?;
    let key = StreamKey::new(cfg.seed);
    let rows = with_workers(workers, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_one(&key, t, system, &thresholds))
            .collect::<Result<Vec<_>>>()
    })??;

    let m = system.channels();
    let mut result = TrialResult {
        channels: m,
        thresholds,
        true_bits: Vec::with_capacity(cfg.trials * m),
        estimates: Vec::with_capacity(cfg.trials * m),
        bit_errors: Vec::with_capacity(cfg.trials * m),
    };
    for row in rows {
        result.true_bits.extend(row.bits);
        result.estimates.extend(row.estimates);
        result.bit_errors.extend(row.errors);
    }
    Ok(result)
}

/// Repeats the estimator `trials` times for one fixed symbol vector.
pub fn run_estimates(
    system: &Scenario,
    symbols: &SymbolVector,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ConcentrationEstimate>> {
    if symbols.len() != system.channels() {
        return Err(AdmError::InvalidInput(format!(
            "expected {} bits, got {}",
            system.channels(),
            symbols.len()
        )));
    }
    let c = received_concentrations(symbols, &system.channel)?;
    let key = StreamKey::new(seed);
    with_workers(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = key.trial(t as u64);
                rng.next_u64();
                let obs = sample_observation(&c, &system.panel, system.receptors(), &mut rng)?;
                estimate_detailed(&obs, &system.panel, &system.sep)
            })
            .collect::<Result<Vec<_>>>()
    })?
}

/// Per-channel and mean error rates with 3-sigma binomial half-widths.
pub fn empirical_bep(result: &TrialResult) -> EmpiricalBep {
    let m = result.channels;
    let trials = result.trials();
    let n = trials.max(1) as f64;
    let mut errors = vec![0u64; m];
    for t in 0..trials {
        for (acc, &e) in errors.iter_mut().zip(result.errors_row(t)) {
            *acc += u64::from(e);
        }
    }
    let per_channel: Vec<f64> = errors.iter().map(|&e| e as f64 / n).collect();
    let half = |p: f64| 3.0 * (p * (1.0 - p) / n).sqrt();
    let half_widths = per_channel.iter().map(|&p| half(p)).collect();
    let mean = if m == 0 {
        0.0
    } else {
        per_channel.iter().sum::<f64>() / m as f64
    };
    EmpiricalBep {
        per_channel,
        mean,
        half_widths,
        mean_half_width: half(mean),
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;
    use crate::kinetics::build_panel;

    fn result_from_errors(channels: usize, errors: Vec<u8>) -> TrialResult {
        let n = errors.len();
        TrialResult {
            channels,
            thresholds: vec![0.0; channels],
            true_bits: vec![0; n],
            estimates: vec![0.0; n],
            bit_errors: errors,
        }
    }

    #[test]
    fn empirical_all_zero() {
        let r = result_from_errors(3, vec![0; 30]);
        let e = empirical_bep(&r);
        assert_eq!(e.per_channel, vec![0.0; 3]);
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.half_widths, vec![0.0; 3]);
    }

    #[test]
    fn empirical_alternating() {
        let errors: Vec<u8> = (0..1000).flat_map(|t| [(t % 2) as u8, 0]).collect();
        let e = empirical_bep(&result_from_errors(2, errors));
        assert_eq!(e.per_channel, vec![0.5, 0.0]);
        assert!((e.half_widths[0] - 0.047_434_164_902_525_69).abs() < 1e-12);
        assert_eq!(e.mean, 0.25);
    }

    #[test]
    fn sample_observation_is_deterministic() {
        let panel = build_panel(3, 0.1, 10.0, 5.0, 3.0).unwrap();
        let c = [1.0, 2.0, 3.0];
        let key = StreamKey::new(99);
        let a = sample_observation(&c, &panel, 50, &mut key.trial(5)).unwrap();
        let b = sample_observation(&c, &panel, 50, &mut key.trial(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.interval_counts().iter().sum::<u64>(), 50);
    }

    #[test]
    fn sample_observation_errors() {
        let panel = build_panel(2, 0.1, 10.0, 5.0, 3.0).unwrap();
        let mut rng = StreamKey::new(0).trial(0);
        assert!(matches!(
            sample_observation(&[0.0, 0.0], &panel, 10, &mut rng),
            Err(AdmError::NoBinding)
        ));
        assert!(sample_observation(&[1.0, 1.0], &panel, 2, &mut rng).is_err());
    }

    #[test]
    fn counts_bin_by_thresholds() {
        let panel = build_panel(3, 0.1, 10.0, 5.0, 3.0).unwrap();
        let t = interval_thresholds(&panel);
        let obs = sample_observation(&[1.0, 1.0, 1.0], &panel, 500, &mut StreamKey::new(3).trial(0))
            .unwrap();
        let mut counts = vec![0u64; 3];
        for &tau in obs.bound_durations() {
            let bin = (0..3).find(|&i| t[i] <= tau && tau < t[i + 1]).unwrap();
            counts[bin] += 1;
        }
        assert_eq!(counts, obs.interval_counts());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let system = SystemConfig {
            receptors: 100,
            channels: 3,
            ..Default::default()
        }
        .build()
        .unwrap();
        let cfg = TrialConfig::new(system, 300, 17).unwrap();
        let a = run_trials_with_workers(&cfg, VarianceMode::Paper, Some(1)).unwrap();
        let b = run_trials_with_workers(&cfg, VarianceMode::Paper, Some(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials(), 300);
    }

    #[test]
    fn identical_symbols_fall_back_to_common_mean() {
        let system = SystemConfig {
            receptors: 50,
            channels: 2,
            n0: 5e5,
            n1: 5e5,
            ..Default::default()
        }
        .build()
        .unwrap();
        let th = receiver_thresholds(&system, VarianceMode::Paper).unwrap();
        assert!((th[0] - th[1]).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let r = TrialResult {
            channels: 2,
            thresholds: vec![1.0, 1.0],
            true_bits: vec![1, 0],
            estimates: vec![2.5, 0.125],
            bit_errors: vec![0, 1],
        };
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "trial,s_1,s_2,chat_1,chat_2,err_1,err_2\n0,1,0,2.500000000e0,1.250000000e-1,0,1\n"
        );
    }
}
