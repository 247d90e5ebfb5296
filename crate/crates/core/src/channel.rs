//! B-CSK transmitter and the peak-sampled diffusion channel.

use std::f64::consts::PI;

use crate::error::{AdmError, Result};

/// One transmitted bit per multiplexed channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolVector(Vec<u8>);

impl SymbolVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(AdmError::InvalidInput(format!("bits must be 0 or 1, got {b}")));
        }
        Ok(SymbolVector(bits))
    }

    /// Channel `i` carries bit `(mask >> i) & 1`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        SymbolVector((0..len).map(|i| ((mask >> i) & 1) as u8).collect())
    }

    pub fn zeros(len: usize) -> Self {
        SymbolVector(vec![0; len])
    }

    pub fn ones(len: usize) -> Self {
        SymbolVector(vec![1; len])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Transmitter-receiver geometry and the B-CSK molecule budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Transmitter-receiver distance, um.
    pub distance: f64,
    /// Molecules released for bit 0.
    pub n0: f64,
    /// Molecules released for bit 1.
    pub n1: f64,
}

impl ChannelConfig {
    /// `N1 == N0` is accepted so that indistinguishable symbols can be simulated;
    /// analytical detection rejects it later.
    pub fn new(distance: f64, n0: f64, n1: f64) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0) {
            return Err(AdmError::param("distance", format!("must be positive, got {distance}")));
        }
        if !(n0.is_finite() && n0 >= 0.0) {
            return Err(AdmError::param("n0", format!("must be nonnegative, got {n0}")));
        }
        if !(n1.is_finite() && n1 >= n0) {
            return Err(AdmError::param("n1", format!("must be at least n0 = {n0}, got {n1}")));
        }
        Ok(ChannelConfig { distance, n0, n1 })
    }
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            distance: 20.0,
            n0: 2e5,
            n1: 1e6,
        }
    }
}

/// Peak value of the channel impulse response at distance `r` (um), in um^-3.
pub fn peak_cir(r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(AdmError::param("distance", format!("must be positive, got {r}")));
    }
    Ok((2.0 * PI * r * r / 3.0).powf(-1.5) * (-1.5f64).exp())
}

/// Released molecule count per channel.
pub fn transmit_vector(s: &SymbolVector, cfg: &ChannelConfig) -> Vec<f64> {
    s.bits()
        .iter()
        .map(|&b| if b == 1 { cfg.n1 } else { cfg.n0 })
        .collect()
}

/// Concentration of each ligand type at the receptors, molecules um^-3.
pub fn received_concentrations(s: &SymbolVector, cfg: &ChannelConfig) -> Result<Vec<f64>> {
    let h = peak_cir(cfg.distance)?;
    Ok(transmit_vector(s, cfg).into_iter().map(|n| h * n).collect())
}
