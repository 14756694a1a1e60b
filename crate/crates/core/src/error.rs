use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}, {z}) lies outside the Bloch ball (norm {norm})")]
    OutsideBall { x: f64, y: f64, z: f64, norm: f64 },

    #[error("probability {name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate acts on qubit {0} more than once")]
    RepeatedQubit(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("post-selection succeeded with probability {0:e}; output state undefined")]
    ZeroProbability(f64),

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("no distillation possible: the round map has no stable low-error fixed point")]
    NoDistillation,

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}
