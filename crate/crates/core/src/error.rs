use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("index {index} out of range for {len} {what}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("generator does not produce a unitary: {0}")]
    NonUnitaryGenerator(String),

    #[error("integrals are not Hermitian at (p, q, r, s) = ({p}, {q}, {r}, {s}): {value} vs conj {partner}")]
    NonHermitianIntegrals {
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        value: num_complex::Complex64,
        partner: num_complex::Complex64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("system too large: {n_qubits} qubits exceeds the limit of {limit}")]
    TooLarge { n_qubits: usize, limit: usize },

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("FCIDUMP parse error at line {line}: {reason}")]
    Fcidump { line: usize, reason: String },

    #[error("CETE did not converge at t = {time}: fidelity {fidelity:.3e} below cutoff {target:.3e} ({reason})")]
    NonConvergence {
        time: f64,
        fidelity: f64,
        target: f64,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
