use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("circuit needs at least one qubit")]
    NoQubits,
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("repeated operand qubit {0}")]
    RepeatedOperand(usize),
    #[error("angle parameters must be finite")]
    NonFiniteAngle,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not unitary (error {0:.3e})")]
    NotUnitary(f64),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("outcome has zero probability ({0:.3e})")]
    ZeroProbability(f64),
    #[error("invalid qubit selection: {0}")]
    InvalidSelection(String),
    #[error("invalid qubit assignment: {0}")]
    InvalidAssignment(String),
    #[error("invalid optical element: {0}")]
    InvalidElement(String),
    #[error("layer {layer}: elements overlap on mode {mode}")]
    OverlappingLayer { layer: usize, mode: usize },
    #[error("invalid mode selector: {0}")]
    InvalidMode(String),
    #[error("netlist format: {0}")]
    Format(String),
}
