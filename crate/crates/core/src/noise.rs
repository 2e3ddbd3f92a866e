//! Phenomenological imperfection model: per-iteration target depolarization,
//! compression-gate infidelity, and imperfect reset. These only degrade the
//! protocol; a spec of `(gamma = 0, fidelity = 1, efficiency = 1)` reproduces
//! the ideal trajectories bit for bit.

use crate::error::{Error, Result};
use crate::polarization::Polarization;
use crate::population::PopulationVector;
use crate::protocols::{converged_polarization, run_protocol, ProtocolSpec, Trajectory};

/// Imperfection parameters, all in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Target depolarization per iteration: the target marginal shrinks to
    /// `(1 - gamma) * P` after each compression.
    gamma: f64,
    /// Compression applied as `f * permuted + (1 - f) * unpermuted`.
    gate_fidelity: f64,
    /// Achieved reset polarization scaled to `eta * tanh(eps)`.
    reset_efficiency: f64,
}

impl NoiseSpec {
    pub fn new(gamma: f64, gate_fidelity: f64, reset_efficiency: f64) -> Result<Self> {
        for (name, value) in [
            ("gamma", gamma),
            ("gate_fidelity", gate_fidelity),
            ("reset_efficiency", reset_efficiency),
        ] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        Ok(NoiseSpec { gamma, gate_fidelity, reset_efficiency })
    }

    pub fn noiseless() -> Self {
        NoiseSpec { gamma: 0.0, gate_fidelity: 1.0, reset_efficiency: 1.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.gamma == 0.0 && self.gate_fidelity == 1.0 && self.reset_efficiency == 1.0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gate_fidelity(&self) -> f64 {
        self.gate_fidelity
    }

    pub fn reset_efficiency(&self) -> f64 {
        self.reset_efficiency
    }
}

/// Depolarizes the target spin: mixes the state with its target-bit-averaged
/// version, `p'(x) = (1 - gamma) p(x) + gamma (p(x) + p(x ^ target)) / 2`.
/// Marginals of the other qubits are untouched; the target polarization
/// shrinks to `(1 - gamma) * P`.
pub fn apply_noise(state: &PopulationVector, spec: &NoiseSpec) -> PopulationVector {
    if spec.gamma == 0.0 {
        return state.clone();
    }
    let mask = state.layout().bit_mask(state.layout().target_index());
    let probs = state.probabilities();
    let mixed = probs
        .iter()
        .enumerate()
        .map(|(i, &p)| (1.0 - spec.gamma) * p + spec.gamma * (p + probs[i ^ mask]) / 2.0)
        .collect();
    PopulationVector::from_computed(state.layout().clone(), mixed)
}

/// The iteration driver with the imperfection model switched on: reset
/// efficiency scales each reset bias, gate infidelity mixes the compression,
/// and target depolarization follows each compression.
pub fn iterate_noisy(
    spec: &ProtocolSpec,
    noise: &NoiseSpec,
    initial: &PopulationVector,
) -> Result<Trajectory> {
    run_protocol(spec, initial, Some(noise))
}

/// Converged target polarization under the imperfect protocol, from a
/// maximally mixed start. Never exceeds the noiseless asymptote. Uses the
/// same stationarity criterion as [`crate::protocols::asymptote`].
pub fn noisy_asymptote(protocol: &ProtocolSpec, noise: &NoiseSpec) -> Result<Polarization> {
    converged_polarization(protocol, Some(noise))
}
