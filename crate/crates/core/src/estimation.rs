//! Concentration estimators built from receptor bound/unbound durations.
//!
//! The total concentration comes from the summed unbound time `T_u` of the
//! `N_R` receptors; the concentration ratios come from counting bound durations
//! per threshold interval and inverting the separation matrix. Their product is
//! the per-ligand estimate. Every estimator has a closed-form mean and variance
//! here, used by the detector.

use nalgebra::{DMatrix, DVector};

use crate::error::{AdmError, Result};
use crate::kinetics::{LigandPanel, SeparationMatrix};

const SIMPLEX_TOL: f64 = 1e-9;

/// Closed-form mean and variance of the per-ligand concentration estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorMoments {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Durations recorded by `N_R` receptors during one observation window.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialObservation {
    bound_durations: Vec<f64>,
    total_unbound_time: f64,
    interval_counts: Vec<u64>,
}

impl TrialObservation {
    pub fn new(
        bound_durations: Vec<f64>,
        total_unbound_time: f64,
        interval_counts: Vec<u64>,
    ) -> Result<Self> {
        if !(total_unbound_time.is_finite() && total_unbound_time > 0.0) {
            return Err(AdmError::InvalidObservation(format!(
                "total unbound time must be positive, got {total_unbound_time}"
            )));
        }
        if bound_durations.iter().any(|&t| !(t >= 0.0)) {
            return Err(AdmError::InvalidObservation(
                "bound durations must be nonnegative".into(),
            ));
        }
        let sum: u64 = interval_counts.iter().sum();
        if sum != bound_durations.len() as u64 {
            return Err(AdmError::InconsistentCounts {
                sum,
                receptors: bound_durations.len(),
            });
        }
        Ok(TrialObservation {
            bound_durations,
            total_unbound_time,
            interval_counts,
        })
    }

    pub fn receptors(&self) -> usize {
        self.bound_durations.len()
    }

    pub fn bound_durations(&self) -> &[f64] {
        &self.bound_durations
    }

    pub fn total_unbound_time(&self) -> f64 {
        self.total_unbound_time
    }

    pub fn interval_counts(&self) -> &[u64] {
        &self.interval_counts
    }
}

fn require_receptors(n_r: usize) -> Result<()> {
    if n_r <= 2 {
        Err(AdmError::InsufficientReceptors(n_r))
    } else {
        Ok(())
    }
}

/// Unbiased total-concentration estimate `(N_R - 1) / (k_on T_u)`.
pub fn estimate_total_concentration(t_u: f64, n_r: usize, k_on: f64) -> Result<f64> {
    require_receptors(n_r)?;
    if !(t_u.is_finite() && t_u > 0.0) {
        return Err(AdmError::InvalidObservation(format!(
            "total unbound time must be positive, got {t_u}"
        )));
    }
    if !(k_on > 0.0) {
        return Err(AdmError::param("k_on", format!("must be positive, got {k_on}")));
    }
    Ok((n_r as f64 - 1.0) / (k_on * t_u))
}

/// `(c_tot, c_tot^2 / (N_R - 2))`.
pub fn total_concentration_moments(c_tot: f64, n_r: usize) -> Result<(f64, f64)> {
    require_receptors(n_r)?;
    if !(c_tot >= 0.0) {
        return Err(AdmError::InvalidInput(format!(
            "total concentration must be nonnegative, got {c_tot}"
        )));
    }
    Ok((c_tot, c_tot * c_tot / (n_r as f64 - 2.0)))
}

/// Interval occupation probabilities `p = S alpha`.
pub fn interval_probabilities(sep: &SeparationMatrix, alpha: &[f64]) -> Result<Vec<f64>> {
    if alpha.len() != sep.dim() {
        return Err(AdmError::InvalidInput(format!(
            "expected {} ratios, got {}",
            sep.dim(),
            alpha.len()
        )));
    }
    if alpha.iter().any(|&a| !(a >= 0.0)) {
        return Err(AdmError::InvalidInput("ratios must be nonnegative".into()));
    }
    let total: f64 = alpha.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(AdmError::InvalidInput(format!(
            "ratios must sum to 1, got {total}"
        )));
    }
    let p = sep.s() * DVector::from_column_slice(alpha);
    Ok(p.iter().copied().collect())
}

/// Multinomial mean `p N_R` and covariance of the interval counts.
pub fn count_moments(p: &[f64], n_r: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = n_r as f64;
    let mean = p.iter().map(|&pi| pi * n).collect();
    let cov = DMatrix::from_fn(p.len(), p.len(), |i, j| {
        if i == j {
            p[i] * (1.0 - p[i]) * n
        } else {
            -p[i] * p[j] * n
        }
    });
    (mean, cov)
}

/// Method-of-moments ratio estimate `W n / N_R`. Components are not clamped and
/// may fall outside `[0, 1]`.
pub fn estimate_ratios(sep: &SeparationMatrix, n: &[u64], n_r: usize) -> Result<Vec<f64>> {
    if n.len() != sep.dim() {
        return Err(AdmError::InvalidInput(format!(
            "expected {} interval counts, got {}",
            sep.dim(),
            n.len()
        )));
    }
    let sum: u64 = n.iter().sum();
    if n_r == 0 || sum != n_r as u64 {
        return Err(AdmError::InconsistentCounts { sum, receptors: n_r });
    }
    let scale = 1.0 / n_r as f64;
    let w = sep.w();
    Ok((0..sep.dim())
        .map(|l| {
            n.iter()
                .enumerate()
                .map(|(i, &ni)| w[(l, i)] * ni as f64)
                .sum::<f64>()
                * scale
        })
        .collect())
}

/// Mean and per-component variance of the ratio estimator.
pub fn ratio_moments(
    sep: &SeparationMatrix,
    alpha: &[f64],
    n_r: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n_r == 0 {
        return Err(AdmError::InsufficientReceptors(0));
    }
    let p = interval_probabilities(sep, alpha)?;
    let (_, cov) = count_moments(&p, n_r);
    let w = sep.w();
    let m = sep.dim();
    let inv_n2 = 1.0 / (n_r as f64 * n_r as f64);
    let variance = (0..m)
        .map(|l| {
            let row = w.row(l);
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    acc += row[i] * row[j] * cov[(i, j)];
                }
            }
            // The quadratic form is PSD; clip rounding below zero.
            (acc * inv_n2).max(0.0)
        })
        .collect();
    Ok((alpha.to_vec(), variance))
}

/// Intermediate and final results of one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationEstimate {
    pub total: f64,
    pub ratios: Vec<f64>,
    pub concentrations: Vec<f64>,
}

/// `c_hat = c_tot_hat * alpha_hat`, keeping the two factors.
pub fn estimate_detailed(
    obs: &TrialObservation,
    panel: &LigandPanel,
    sep: &SeparationMatrix,
) -> Result<ConcentrationEstimate> {
    let n_r = obs.receptors();
    let total = estimate_total_concentration(obs.total_unbound_time, n_r, panel.k_on())?;
    let ratios = estimate_ratios(sep, &obs.interval_counts, n_r)?;
    let concentrations = ratios.iter().map(|&a| total * a).collect();
    Ok(ConcentrationEstimate {
        total,
        ratios,
        concentrations,
    })
}

/// Per-ligand concentration estimate `c_hat = c_tot_hat * alpha_hat`.
pub fn estimate_concentrations(
    obs: &TrialObservation,
    panel: &LigandPanel,
    sep: &SeparationMatrix,
) -> Result<Vec<f64>> {
    estimate_detailed(obs, panel, sep).map(|e| e.concentrations)
}

/// Closed-form moments of `c_hat` for true concentrations `c`, treating the
/// total and ratio estimators as independent.
pub fn concentration_moments(
    c: &[f64],
    panel: &LigandPanel,
    sep: &SeparationMatrix,
    n_r: usize,
) -> Result<EstimatorMoments> {
    require_receptors(n_r)?;
    if c.len() != panel.len() || c.len() != sep.dim() {
        return Err(AdmError::InvalidInput(format!(
            "expected {} concentrations, got {}",
            panel.len(),
            c.len()
        )));
    }
    if c.iter().any(|&x| !(x >= 0.0)) {
        return Err(AdmError::InvalidInput(
            "concentrations must be nonnegative".into(),
        ));
    }
    let c_tot: f64 = c.iter().sum();
    if !(c_tot > 0.0) {
        return Err(AdmError::DegenerateChannel);
    }
    let alpha: Vec<f64> = c.iter().map(|&x| x / c_tot).collect();
    let (mean_tot, var_tot) = total_concentration_moments(c_tot, n_r)?;
    let (mean_alpha, var_alpha) = ratio_moments(sep, &alpha, n_r)?;
    let variance = mean_alpha
        .iter()
        .zip(&var_alpha)
        .map(|(&ea, &va)| var_tot * va + var_tot * ea * ea + va * mean_tot * mean_tot)
        .collect();
    Ok(EstimatorMoments {
        mean: c.to_vec(),
        variance,
    })
}
