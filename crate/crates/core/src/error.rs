//! Error type shared by all simulation modules.

use thiserror::Error;

use crate::protocols::Trajectory;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// A simulation error.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A scalar parameter was NaN or infinite.
    #[error("value must be finite, got {0}")]
    NonFinite(f64),
    /// A polarization outside [-1, 1].
    #[error("polarization must lie in [-1, 1], got {0}")]
    PolarizationOutOfRange(f64),
    /// `|P| = 1` corresponds to an infinite thermal bias.
    #[error("|polarization| = 1 has no finite thermal bias")]
    UnitPolarization,
    /// A register larger than the supported maximum.
    #[error("register of {requested} qubits exceeds the {max}-qubit capacity")]
    CapacityExceeded { requested: usize, max: usize },
    /// A qubit index outside the register.
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    /// An inconsistent register layout.
    #[error("invalid register layout: {0}")]
    InvalidLayout(String),
    /// An index map that is not a bijection.
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
    /// A state whose entries violate the population-vector invariants.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// A density matrix violating Hermiticity, unit trace, or positivity.
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    /// Mismatched operand sizes.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    /// A precondition violated by an argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An iteration that hit its cap before meeting the convergence tolerance.
    /// Carries the trajectory recorded up to that point.
    #[error("did not converge within {} iterations (last polarization {})",
            trajectory.iterations_run(), trajectory.final_polarization().value())]
    NonConvergence { trajectory: Box<Trajectory> },
}
