//! Affinity-division multiplexing over a single promiscuous receptor type.
//!
//! Each multiplexed channel uses its own ligand type and B-CSK modulation. The
//! receiver estimates every ligand concentration from receptor bound and
//! unbound durations, then thresholds each estimate. This crate provides:
//!
//! - [`kinetics`]: ligand panels and the bound-duration separation matrix
//! - [`estimation`]: total, ratio and per-ligand concentration estimators and
//!   their closed-form moments
//! - [`channel`]: the B-CSK transmitter and peak-sampled channel gain
//! - [`detection`]: bit-conditioned moments, ML thresholds, bit error probability
//! - [`montecarlo`]: an event-level receptor simulator that checks the above
//! - [`sweep`]: one-axis parameter sweeps with CSV and SVG output
//!
//! ```
//! use adm::config::SystemConfig;
//!
//! let system = SystemConfig::default().build().unwrap();
//! let report = system.mean_bep(system.config.variance_mode).unwrap();
//! assert!(report.mean_bep > 0.0 && report.mean_bep < 0.5);
//! ```

pub mod channel;
pub mod config;
pub mod detection;
pub mod error;
pub mod estimation;
pub mod kinetics;
pub mod montecarlo;
pub mod rng;
pub mod sweep;

pub use config::{Scenario, SystemConfig};
pub use detection::VarianceMode;
pub use error::{AdmError, Result};
