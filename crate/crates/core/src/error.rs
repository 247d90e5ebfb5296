use thiserror::Error;

/// Errors raised across the analytical pipeline, the simulator and the CLI.
#[derive(Debug, Error)]
pub enum AdmError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "separation matrix is ill-conditioned (condition number {condition:.3e} exceeds {ceiling:.3e}) \
         for gamma = {gamma} and M = {channels}"
    )]
    IllConditioned {
        gamma: f64,
        channels: usize,
        condition: f64,
        ceiling: f64,
    },

    #[error("at least 3 receptors are required, got {0}")]
    InsufficientReceptors(usize),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("interval counts sum to {sum}, expected {receptors}")]
    InconsistentCounts { sum: u64, receptors: usize },

    #[error("total received concentration is zero; concentration ratios are undefined")]
    DegenerateChannel,

    #[error("{channels} channels exceed the enumeration ceiling of {ceiling}")]
    TooManyChannels { channels: usize, ceiling: usize },

    #[error("bit-1 mean {mean1} does not exceed bit-0 mean {mean0}")]
    NonSeparable { mean0: f64, mean1: f64 },

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("no ligand present, receptors never bind")]
    NoBinding,

    #[error("sweep point {axis} = {value} failed: {source}")]
    SweepPoint {
        axis: &'static str,
        value: f64,
        #[source]
        source: Box<AdmError>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl AdmError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        AdmError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the CLI: 2 for bad configuration,
    /// 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            AdmError::IllConditioned { .. } => 3,
            AdmError::SweepPoint { source, .. } => source.exit_code(),
            AdmError::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, AdmError>;
