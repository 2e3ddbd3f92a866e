//! Simulation of heat-bath algorithmic cooling (HBAC) on small spin
//! registers.
//!
//! HBAC pumps polarization into a target spin by alternating two steps: an
//! entropy-compressing permutation of the register's basis states, and a
//! reset channel that re-thermalizes designated reset spins against a bath.
//! Because both steps act on the diagonal of the density matrix alone, the
//! register state is kept as a [`PopulationVector`] — the diagonal — and
//! every protocol runs on it directly. [`DensityMatrix`] carries full complex
//! matrices purely so that this reduction can be checked against honest
//! matrix conjugation.
//!
//! The [`protocols`] module implements the cooling schemes (a fixed
//! three-spin compression circuit and the partner-pairing algorithm with one
//! or two reset spins), their analytic cooling limits, and the iteration
//! driver with convergence detection. The [`noise`] module layers a
//! phenomenological imperfection model on top.

pub mod density;
pub mod error;
pub mod layout;
pub mod noise;
pub mod permutation;
pub mod polarization;
pub mod population;
pub mod protocols;

pub use density::{hermitian_eigenvalues, DensityMatrix, MAX_DENSITY_QUBITS};
pub use error::{Error, Result};
pub use layout::{RegisterLayout, MAX_QUBITS};
pub use noise::{apply_noise, iterate_noisy, noisy_asymptote, NoiseSpec};
pub use permutation::Permutation;
pub use polarization::{Epsilon, Polarization};
pub use population::PopulationVector;
pub use protocols::{
    asymptote, compare_protocols, fixed_circuit_map, hbac_limit, iterate,
    polarization_from_rotation, ppa_sort_permutation, u_e_permutation, CoolingLimit,
    ProtocolComparison, ProtocolKind, ProtocolSpec, Trajectory, TrajectoryPoint,
    ASYMPTOTE_TOL, DEFAULT_CONVERGENCE_TOL, DEFAULT_MAX_ITERATIONS,
};
