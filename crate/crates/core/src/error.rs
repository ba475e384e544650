use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {index} out of range for {num_modes} modes")]
    ModeOutOfRange { index: usize, num_modes: usize },

    #[error("beam splitter couples mode {0} to itself")]
    DuplicateModes(usize),

    #[error("transmittance {0} outside [0, 1]")]
    InvalidTransmittance(f64),

    #[error("non-finite parameter {0}")]
    NonFinite(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("signal has no nonzero coefficient")]
    EmptySignal,

    #[error("detected photons ({detected}) differ from ancilla photons ({ancilla})")]
    SumMismatch { detected: u32, ancilla: u32 },

    #[error("profile dimension {profile} does not match target dimension {target}")]
    TargetDimension { profile: usize, target: usize },

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("preset `{preset}` takes {expected} {what} values, got {actual}")]
    Arity {
        preset: String,
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("heralding is impossible for this signal (all c_n γ_n vanish)")]
    ImpossibleHerald,

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
