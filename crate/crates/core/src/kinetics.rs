//! Ligand panel kinetics and the bound-duration separation matrix.
//!
//! A panel holds `M` ligand types sharing one association rate `k_on` and
//! having geometrically spaced unbinding rates `k_off[i] = k_off_base / gamma^i`,
//! so index 0 is the weakest binder. Bound durations are exponential with the
//! unbinding rate of whichever ligand occupies the receptor; binning them at
//! thresholds `T_i = v / k_off[i-1]` gives the column-stochastic matrix `S`
//! whose entry `(i, j)` is the probability that a ligand-`j` bound duration
//! lands in interval `i`.

use nalgebra::DMatrix;

use crate::error::{AdmError, Result};

/// Default association rate, um^3 s^-1.
pub const DEFAULT_K_ON: f64 = 0.1;
/// Default unbinding rate of the weakest binder, s^-1.
pub const DEFAULT_K_OFF_BASE: f64 = 10.0;
/// Default threshold proportionality constant.
pub const DEFAULT_V: f64 = 3.0;
/// Condition number above which `S` is rejected.
pub const DEFAULT_CONDITION_CEILING: f64 = 1e12;

/// The `M` ligand types multiplexed over a single promiscuous receptor type.
#[derive(Debug, Clone, PartialEq)]
pub struct LigandPanel {
    k_on: f64,
    k_off: Vec<f64>,
    gamma: f64,
    v: f64,
}

impl LigandPanel {
    /// Number of ligand types, equal to the number of multiplexed channels.
    pub fn len(&self) -> usize {
        self.k_off.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_off.is_empty()
    }

    pub fn k_on(&self) -> f64 {
        self.k_on
    }

    /// Unbinding rates, strictly decreasing.
    pub fn k_off(&self) -> &[f64] {
        &self.k_off
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    /// Dissociation constant `k_off[i] / k_on` of ligand `i`.
    pub fn dissociation_constant(&self, i: usize) -> f64 {
        self.k_off[i] / self.k_on
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(AdmError::param(name, format!("must be positive and finite, got {x}")))
    }
}

/// Builds a gamma-uniform panel: `k_off[i] = k_off_base / gamma^i`.
pub fn build_panel(
    channels: usize,
    k_on: f64,
    k_off_base: f64,
    gamma: f64,
    v: f64,
) -> Result<LigandPanel> {
    if channels == 0 {
        return Err(AdmError::param("M", "at least one ligand type is required"));
    }
    positive("k_on", k_on)?;
    positive("k_off_base", k_off_base)?;
    positive("v", v)?;
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(AdmError::param("gamma", format!("must exceed 1, got {gamma}")));
    }
    let mut k_off = Vec::with_capacity(channels);
    let mut k = k_off_base;
    for _ in 0..channels {
        k_off.push(k);
        k /= gamma;
    }
    Ok(LigandPanel {
        k_on,
        k_off,
        gamma,
        v,
    })
}

/// Equilibrium probability that a receptor is bound under the ligand mixture `c`.
pub fn bound_probability(panel: &LigandPanel, c: &[f64]) -> Result<f64> {
    if c.len() != panel.len() {
        return Err(AdmError::InvalidInput(format!(
            "expected {} concentrations, got {}",
            panel.len(),
            c.len()
        )));
    }
    if let Some(bad) = c.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(AdmError::InvalidInput(format!(
            "concentrations must be nonnegative and finite, got {bad}"
        )));
    }
    let occupancy: f64 = c
        .iter()
        .enumerate()
        .map(|(i, &ci)| ci / panel.dissociation_constant(i))
        .sum();
    Ok(occupancy / (1.0 + occupancy))
}

/// Interval boundaries `[0, v/k_off[0], ..., v/k_off[M-2], +inf]`.
pub fn interval_thresholds(panel: &LigandPanel) -> Vec<f64> {
    let m = panel.len();
    let mut t = Vec::with_capacity(m + 1);
    t.push(0.0);
    t.extend(panel.k_off[..m - 1].iter().map(|&k| panel.v / k));
    t.push(f64::INFINITY);
    t
}

/// `S`, its inverse `W` and the conditioning of `S`.
#[derive(Debug, Clone)]
pub struct SeparationMatrix {
    s: DMatrix<f64>,
    w: DMatrix<f64>,
    condition_number: f64,
    thresholds: Vec<f64>,
}

impl SeparationMatrix {
    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// Ratio of the largest to the smallest singular value of `S`.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }
}

/// Separation matrix with the default condition-number ceiling.
pub fn separation_matrix(panel: &LigandPanel) -> Result<SeparationMatrix> {
    separation_matrix_with_ceiling(panel, DEFAULT_CONDITION_CEILING)
}

pub fn separation_matrix_with_ceiling(
    panel: &LigandPanel,
    ceiling: f64,
) -> Result<SeparationMatrix> {
    let m = panel.len();
    let thresholds = interval_thresholds(panel);
    let s = DMatrix::from_fn(m, m, |i, j| {
        let k = panel.k_off[j];
        (-k * thresholds[i]).exp() - (-k * thresholds[i + 1]).exp()
    });

    let sv = s.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let ill = AdmError::IllConditioned {
        gamma: panel.gamma,
        channels: m,
        condition: condition_number,
        ceiling,
    };
    if !(condition_number <= ceiling) {
        return Err(ill);
    }
    let w = s.clone().lu().try_inverse().ok_or(ill)?;

    Ok(SeparationMatrix {
        s,
        w,
        condition_number,
        thresholds,
    })
}
