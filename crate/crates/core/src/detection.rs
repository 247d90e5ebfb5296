//! Bit-conditioned Gaussian moments, ML thresholds and bit error probability.
//!
//! The estimate of channel `i` depends on every transmitted bit, not only its
//! own, because the other ligands change both the total concentration and the
//! ratio mix. Conditioning on `s_i` therefore averages over the `2^(M-1)`
//! patterns of the other channels, all equally likely.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{received_concentrations, ChannelConfig, SymbolVector};
use crate::error::{AdmError, Result};
use crate::estimation::{concentration_moments, EstimatorMoments};
use crate::kinetics::{LigandPanel, SeparationMatrix};

/// Largest `M` for which the `2^(M-1)` enumeration is attempted.
pub const DEFAULT_ENUMERATION_CEILING: usize = 20;

const EQUAL_VARIANCE_RTOL: f64 = 1e-9;
const GOLDEN_RTOL: f64 = 1e-12;

/// How the conditional variance is aggregated over interfering bit patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceMode {
    /// Average of the per-pattern variances.
    #[default]
    Paper,
    /// Complete law of total variance: also adds the spread of the
    /// per-pattern means.
    Full,
}

impl fmt::Display for VarianceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarianceMode::Paper => "paper",
            VarianceMode::Full => "full",
        })
    }
}

impl FromStr for VarianceMode {
    type Err = AdmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(VarianceMode::Paper),
            "full" => Ok(VarianceMode::Full),
            other => Err(AdmError::Config(format!(
                "variance mode must be `paper` or `full`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianMoments {
    pub fn new(mean: f64, variance: f64) -> Self {
        GaussianMoments { mean, variance }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Detector state for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDecision {
    pub threshold: f64,
    pub bep: f64,
    pub moments0: GaussianMoments,
    pub moments1: GaussianMoments,
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Estimator moments for every full symbol vector, indexed by bit mask
/// (channel `i` carries bit `(mask >> i) & 1`).
#[derive(Debug, Clone)]
pub struct PatternTable {
    channels: usize,
    moments: Vec<EstimatorMoments>,
}

impl PatternTable {
    pub fn build(
        panel: &LigandPanel,
        sep: &SeparationMatrix,
        cfg: &ChannelConfig,
        n_r: usize,
        ceiling: usize,
    ) -> Result<Self> {
        let m = panel.len();
        check_ceiling(m, ceiling)?;
        let moments = (0..1u64 << m)
            .map(|mask| pattern_moments(mask, panel, sep, cfg, n_r))
            .collect::<Result<Vec<_>>>()?;
        Ok(PatternTable {
            channels: m,
            moments,
        })
    }

    pub fn get(&self, mask: u64) -> &EstimatorMoments {
        &self.moments[mask as usize]
    }

    pub fn conditional(&self, channel: usize, bit: u8, mode: VarianceMode) -> GaussianMoments {
        aggregate(self.channels, channel, bit, mode, |mask| {
            let m = self.get(mask);
            (m.mean[channel], m.variance[channel])
        })
    }
}

fn check_ceiling(m: usize, ceiling: usize) -> Result<()> {
    if m > ceiling || m > 63 {
        Err(AdmError::TooManyChannels {
            channels: m,
            ceiling,
        })
    } else {
        Ok(())
    }
}

fn pattern_moments(
    mask: u64,
    panel: &LigandPanel,
    sep: &SeparationMatrix,
    cfg: &ChannelConfig,
    n_r: usize,
) -> Result<EstimatorMoments> {
    let s = SymbolVector::from_mask(mask, panel.len());
    let c = received_concentrations(&s, cfg)?;
    concentration_moments(&c, panel, sep, n_r)
}

/// Full bit mask with `bit` at `channel` and `rest` spread over the others.
fn insert_bit(rest: u64, channel: usize, bit: u8) -> u64 {
    let low = rest & ((1u64 << channel) - 1);
    let high = (rest >> channel) << (channel + 1);
    low | high | (u64::from(bit) << channel)
}

fn aggregate(
    channels: usize,
    channel: usize,
    bit: u8,
    mode: VarianceMode,
    mut per_pattern: impl FnMut(u64) -> (f64, f64),
) -> GaussianMoments {
    let count = 1u64 << (channels - 1);
    let weight = 1.0 / count as f64;
    let samples: Vec<(f64, f64)> = (0..count)
        .map(|rest| per_pattern(insert_bit(rest, channel, bit)))
        .collect();
    let mean = samples.iter().map(|s| s.0).sum::<f64>() * weight;
    let mut variance = samples.iter().map(|s| s.1).sum::<f64>() * weight;
    if mode == VarianceMode::Full {
        variance += samples
            .iter()
            .map(|s| (s.0 - mean) * (s.0 - mean))
            .sum::<f64>()
            * weight;
    }
    GaussianMoments { mean, variance }
}

/// Moments of channel `channel`'s (0-based) estimate given its own bit.
#[allow(clippy::too_many_arguments)]
pub fn conditional_moments(
    channel: usize,
    bit: u8,
    panel: &LigandPanel,
    sep: &SeparationMatrix,
    cfg: &ChannelConfig,
    n_r: usize,
    mode: VarianceMode,
) -> Result<GaussianMoments> {
    conditional_moments_with_ceiling(
        channel,
        bit,
        panel,
        sep,
        cfg,
        n_r,
        mode,
        DEFAULT_ENUMERATION_CEILING,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn conditional_moments_with_ceiling(
    channel: usize,
    bit: u8,
    panel: &LigandPanel,
    sep: &SeparationMatrix,
    cfg: &ChannelConfig,
    n_r: usize,
    mode: VarianceMode,
    ceiling: usize,
) -> Result<GaussianMoments> {
    let m = panel.len();
    check_ceiling(m, ceiling)?;
    if channel >= m {
        return Err(AdmError::InvalidInput(format!(
            "channel index {channel} out of range for {m} channels"
        )));
    }
    if bit > 1 {
        return Err(AdmError::InvalidInput(format!("bit must be 0 or 1, got {bit}")));
    }
    let mut failure = None;
    let moments = aggregate(m, channel, bit, mode, |mask| {
        match pattern_moments(mask, panel, sep, cfg, n_r) {
            Ok(em) => (em.mean[channel], em.variance[channel]),
            Err(e) => {
                failure.get_or_insert(e);
                (f64::NAN, f64::NAN)
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(moments),
    }
}

fn check_moments(m0: &GaussianMoments, m1: &GaussianMoments) -> Result<()> {
    for m in [m0, m1] {
        if !(m.variance > 0.0 && m.variance.is_finite()) {
            return Err(AdmError::InvalidMoments(format!(
                "variance must be positive, got {}",
                m.variance
            )));
        }
        if !m.mean.is_finite() {
            return Err(AdmError::InvalidMoments(format!(
                "mean must be finite, got {}",
                m.mean
            )));
        }
    }
    Ok(())
}

/// ML threshold between two Gaussian hypotheses with equal priors: the
/// density crossing between the means that minimizes the error probability.
pub fn optimal_threshold(m0: &GaussianMoments, m1: &GaussianMoments) -> Result<f64> {
    check_moments(m0, m1)?;
    if !(m1.mean > m0.mean) {
        return Err(AdmError::NonSeparable {
            mean0: m0.mean,
            mean1: m1.mean,
        });
    }
    let (v0, v1) = (m0.variance, m1.variance);
    let d = m1.mean - m0.mean;
    let gamma = v1 - v0;
    if gamma.abs() < EQUAL_VARIANCE_RTOL * v0.max(v1) {
        return Ok(0.5 * (m0.mean + m1.mean));
    }
    // Root of the crossing quadratic, rationalized so that the division by
    // (v1 - v0) cancels analytically:
    //   lambda - mu0 = v0 (d^2 + 2 v1 L) / (s0 s1 sqrt(D) + v0 d),
    //   L = ln(s1/s0), D = d^2 + 2 (v1 - v0) L.
    let log_ratio = 0.5 * (v1 / v0).ln();
    let disc = d * d + 2.0 * gamma * log_ratio;
    let lambda = if disc >= 0.0 {
        let denom = (v0 * v1 * disc).sqrt() + v0 * d;
        m0.mean + v0 * (d * d + 2.0 * v1 * log_ratio) / denom
    } else {
        f64::NAN
    };
    if lambda.is_finite() {
        Ok(lambda)
    } else {
        Ok(golden_section_threshold(m0, m1))
    }
}

/// Minimizes the error probability over `[mu0, mu1]` by golden-section search.
pub fn golden_section_threshold(m0: &GaussianMoments, m1: &GaussianMoments) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |x: f64| bep_unchecked(m0, m1, x);
    let (mut a, mut b) = (m0.mean, m1.mean);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let scale = m0.mean.abs().max(m1.mean.abs()).max(f64::MIN_POSITIVE);
    while (b - a).abs() > GOLDEN_RTOL * scale {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn bep_unchecked(m0: &GaussianMoments, m1: &GaussianMoments, lambda: f64) -> f64 {
    0.25 * (erfc((lambda - m0.mean) / (2.0 * m0.variance).sqrt())
        + erfc((m1.mean - lambda) / (2.0 * m1.variance).sqrt()))
}

/// Error probability of the threshold detector `c_hat > lambda` with equal priors.
pub fn channel_bep(m0: &GaussianMoments, m1: &GaussianMoments, lambda: f64) -> Result<f64> {
    check_moments(m0, m1)?;
    Ok(bep_unchecked(m0, m1, lambda))
}

/// Per-channel decisions and mean error probability of the analytical receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BepReport {
    pub channels: Vec<ChannelDecision>,
    pub mean_bep: f64,
}

impl BepReport {
    pub fn per_channel(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.bep).collect()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.threshold).collect()
    }
}

/// Runs moments, threshold and BEP for every channel and averages.
pub fn mean_bep(
    panel: &LigandPanel,
    sep: &SeparationMatrix,
    cfg: &ChannelConfig,
    n_r: usize,
    mode: VarianceMode,
) -> Result<BepReport> {
    mean_bep_with_ceiling(panel, sep, cfg, n_r, mode, DEFAULT_ENUMERATION_CEILING)
}

pub fn mean_bep_with_ceiling(
    panel: &LigandPanel,
    sep: &SeparationMatrix,
    cfg: &ChannelConfig,
    n_r: usize,
    mode: VarianceMode,
    ceiling: usize,
) -> Result<BepReport> {
    let table = PatternTable::build(panel, sep, cfg, n_r, ceiling)?;
    let channels = (0..panel.len())
        .map(|i| {
            let moments0 = table.conditional(i, 0, mode);
            let moments1 = table.conditional(i, 1, mode);
            let threshold = optimal_threshold(&moments0, &moments1)?;
            let bep = channel_bep(&moments0, &moments1, threshold)?;
            Ok(ChannelDecision {
                threshold,
                bep,
                moments0,
                moments1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_bep = channels.iter().map(|c| c.bep).sum::<f64>() / channels.len() as f64;
    Ok(BepReport { channels, mean_bep })
}

/// Error probability of channel `channel` at `threshold` when the estimate is
/// modelled as the equal-weight mixture of the per-pattern Gaussians rather
/// than a single Gaussian. Diagnostic only; not used by the receiver.
pub fn mixture_bep(table: &PatternTable, channel: usize, threshold: f64) -> f64 {
    let count = 1u64 << (table.channels - 1);
    let mut miss = [0.0f64; 2];
    for (bit, acc) in miss.iter_mut().enumerate() {
        for rest in 0..count {
            let m = table.get(insert_bit(rest, channel, bit as u8));
            let z = (threshold - m.mean[channel]) / (2.0 * m.variance[channel]).sqrt();
            *acc += if bit == 0 { 0.5 * erfc(z) } else { 0.5 * erfc(-z) };
        }
    }
    0.5 * (miss[0] + miss[1]) / count as f64
}
