//! Diagonal register states as population vectors, with thermal-state
//! construction, tensor composition, marginals, reset channels, and
//! basis-permutation application.

use crate::error::{Error, Result};
use crate::layout::{RegisterLayout, MAX_QUBITS};
use crate::permutation::Permutation;
use crate::polarization::{Epsilon, Polarization};

/// Tolerance for the sum-to-one invariant at construction from raw data.
const SUM_TOL: f64 = 1e-12;
/// Normalization drift beyond this after internal arithmetic is a bug, not
/// something to renormalize away.
const DRIFT_TOL: f64 = 1e-9;
/// Entries above this (tiny negative) are clamped to zero; below it they are
/// rejected.
const NEG_TOL: f64 = -1e-15;

/// The diagonal of a spin-register density matrix in the computational basis:
/// a normalized, nonnegative vector of `2^k` populations.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationVector {
    probs: Vec<f64>,
    layout: RegisterLayout,
}

impl PopulationVector {
    pub fn new(layout: RegisterLayout, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != layout.dimension() {
            return Err(Error::DimensionMismatch {
                expected: layout.dimension(),
                actual: probs.len(),
            });
        }
        let mut clamped = probs;
        let mut sum = 0.0;
        for p in &mut clamped {
            if !p.is_finite() {
                return Err(Error::InvalidState(format!("non-finite population {p}")));
            }
            if *p < NEG_TOL {
                return Err(Error::InvalidState(format!("negative population {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
            sum += *p;
        }
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidState(format!(
                "populations sum to {sum}, expected 1 within {SUM_TOL:e}"
            )));
        }
        Ok(PopulationVector { probs: clamped, layout })
    }

    /// Constructor for internally computed results. Clamps sub-`NEG_TOL`-free
    /// rounding negatives and panics on real normalization drift.
    pub(crate) fn from_computed(layout: RegisterLayout, mut probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), layout.dimension());
        let mut sum = 0.0;
        for p in &mut probs {
            assert!(
                *p >= NEG_TOL,
                "internal error: operation produced negative population {p}"
            );
            if *p < 0.0 {
                *p = 0.0;
            }
            sum += *p;
        }
        assert!(
            (sum - 1.0).abs() <= DRIFT_TOL,
            "internal error: normalization drifted to {sum}"
        );
        PopulationVector { probs, layout }
    }

    /// The maximally mixed state: every population `1/2^k`.
    pub fn uniform(layout: RegisterLayout) -> Self {
        let dim = layout.dimension();
        PopulationVector { probs: vec![1.0 / dim as f64; dim], layout }
    }

    /// The pure basis state `|index>`.
    pub fn basis_state(layout: RegisterLayout, index: usize) -> Result<Self> {
        let dim = layout.dimension();
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        Ok(PopulationVector { probs, layout })
    }

    /// A single spin equilibrated at bias `eps`: populations
    /// `[e^eps, e^-eps] / (e^eps + e^-eps)`, so its polarization is
    /// `tanh(eps)`.
    pub fn thermal_qubit(eps: Epsilon) -> Self {
        let p0 = 1.0 / (1.0 + (-2.0 * eps.value()).exp());
        PopulationVector {
            probs: vec![p0, 1.0 - p0],
            layout: RegisterLayout::single_qubit(),
        }
    }

    /// A single spin with the given polarization: populations `(1 +- P)/2`.
    pub fn polarized_qubit(p: Polarization) -> Self {
        let v = p.value();
        PopulationVector {
            probs: vec![(1.0 + v) / 2.0, (1.0 - v) / 2.0],
            layout: RegisterLayout::single_qubit(),
        }
    }

    /// Kronecker product of the parts, in layout bit order (the first part
    /// supplies the most significant bits).
    pub fn tensor(parts: &[PopulationVector], layout: RegisterLayout) -> Result<Self> {
        let total_qubits: usize = parts.iter().map(|p| p.layout.num_qubits()).sum();
        if total_qubits > MAX_QUBITS {
            return Err(Error::CapacityExceeded { requested: total_qubits, max: MAX_QUBITS });
        }
        if total_qubits != layout.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: layout.dimension(),
                actual: 1 << total_qubits,
            });
        }
        let mut probs = vec![1.0];
        for part in parts {
            let mut next = Vec::with_capacity(probs.len() * part.probs.len());
            for &a in &probs {
                for &b in &part.probs {
                    next.push(a * b);
                }
            }
            probs = next;
        }
        Ok(PopulationVector::from_computed(layout, probs))
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability_sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Polarization `p0 - p1` of one qubit, where `p0` (`p1`) is the total
    /// probability of that qubit's bit being 0 (1).
    pub fn marginal_polarization(&self, qubit: usize) -> Result<Polarization> {
        if qubit >= self.layout.num_qubits() {
            return Err(Error::QubitOutOfRange { qubit, num_qubits: self.layout.num_qubits() });
        }
        let mask = self.layout.bit_mask(qubit);
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            if i & mask == 0 {
                p0 += p;
            } else {
                p1 += p;
            }
        }
        Ok(Polarization::from_computed(p0 - p1))
    }

    /// Traces out each listed qubit and replaces it with a fresh thermal spin
    /// at the given bias. Marginals of the remaining qubits, including their
    /// mutual correlations, are untouched.
    pub fn reset_channel(&self, resets: &[(usize, Epsilon)]) -> Result<Self> {
        let num_qubits = self.layout.num_qubits();
        let mut reset_mask = 0usize;
        for &(q, _) in resets {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
            }
            let mask = self.layout.bit_mask(q);
            if reset_mask & mask != 0 {
                return Err(Error::InvalidArgument(format!("qubit {q} reset twice")));
            }
            reset_mask |= mask;
        }
        let keep_mask = (self.layout.dimension() - 1) & !reset_mask;

        // Marginal over the kept qubits, keyed by the kept bits in place.
        let mut kept = vec![0.0; self.layout.dimension()];
        for (i, &p) in self.probs.iter().enumerate() {
            kept[i & keep_mask] += p;
        }

        // Per-qubit thermal populations, indexed by bit value.
        let thermal: Vec<(usize, [f64; 2])> = resets
            .iter()
            .map(|&(q, eps)| {
                let t = PopulationVector::thermal_qubit(eps);
                (q, [t.probs[0], t.probs[1]])
            })
            .collect();

        let mut probs = Vec::with_capacity(self.probs.len());
        for i in 0..self.probs.len() {
            let mut p = kept[i & keep_mask];
            for &(q, t) in &thermal {
                p *= t[self.layout.bit_of(i, q)];
            }
            probs.push(p);
        }
        Ok(PopulationVector::from_computed(self.layout.clone(), probs))
    }

    /// Relocates populations: the output at `perm(i)` is the input at `i`.
    pub fn apply_permutation(&self, perm: &Permutation) -> Result<Self> {
        if perm.len() != self.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                actual: perm.len(),
            });
        }
        let mut probs = vec![0.0; self.probs.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            probs[perm.target_of(i)] = p;
        }
        Ok(PopulationVector { probs, layout: self.layout.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(p: f64) -> Epsilon {
        Polarization::new(p).unwrap().epsilon().unwrap()
    }

    #[test]
    fn thermal_qubit_at_zero_bias_is_mixed() {
        let t = PopulationVector::thermal_qubit(Epsilon::ZERO);
        assert_eq!(t.probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn thermal_qubit_population_split() {
        let t = PopulationVector::thermal_qubit(eps(0.2));
        assert!((t.probabilities()[0] - 0.6).abs() < 1e-15);
        assert!((t.probabilities()[1] - 0.4).abs() < 1e-15);

        let t = PopulationVector::thermal_qubit(eps(0.3));
        assert!((t.probabilities()[0] - 0.65).abs() < 1e-15);
        assert!((t.probabilities()[1] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn thermal_qubit_polarization_is_tanh_of_bias() {
        let e = Epsilon::new(0.7).unwrap();
        let t = PopulationVector::thermal_qubit(e);
        let p = t.marginal_polarization(0).unwrap().value();
        assert!((p - 0.7f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn tensor_of_pure_states() {
        let zero = PopulationVector::new(RegisterLayout::single_qubit(), vec![1.0, 0.0]).unwrap();
        let layout = RegisterLayout::new(2, 0, vec![]).unwrap();
        let t = PopulationVector::tensor(&[zero.clone(), zero], layout).unwrap();
        assert_eq!(t.probabilities(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_of_mixed_states_is_uniform() {
        let mixed = PopulationVector::uniform(RegisterLayout::single_qubit());
        let layout = RegisterLayout::new(2, 0, vec![]).unwrap();
        let t = PopulationVector::tensor(&[mixed.clone(), mixed], layout).unwrap();
        assert_eq!(t.probabilities(), &[0.25; 4]);
    }

    #[test]
    fn tensor_entry_is_product_of_parts() {
        let q = PopulationVector::thermal_qubit(eps(0.2));
        let t = PopulationVector::tensor(
            &[q.clone(), q.clone(), q],
            RegisterLayout::three_spin(),
        )
        .unwrap();
        assert!((t.probabilities()[0] - 0.216).abs() < 1e-15);
        assert!((t.probability_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_overflow_is_capacity_error() {
        let q = PopulationVector::uniform(RegisterLayout::new(7, 0, vec![]).unwrap());
        let layout = RegisterLayout::new(12, 0, vec![]).unwrap();
        let err = PopulationVector::tensor(&[q.clone(), q], layout).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { requested: 14, .. }));
    }

    #[test]
    fn marginal_of_uniform_state_is_zero() {
        let u = PopulationVector::uniform(RegisterLayout::three_spin());
        for q in 0..3 {
            assert_eq!(u.marginal_polarization(q).unwrap().value(), 0.0);
        }
    }

    #[test]
    fn marginal_of_product_state_matches_factors() {
        let q = PopulationVector::thermal_qubit(eps(0.2));
        let t = PopulationVector::tensor(
            &[q.clone(), q.clone(), q],
            RegisterLayout::three_spin(),
        )
        .unwrap();
        assert!((t.marginal_polarization(0).unwrap().value() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn marginal_of_pure_state() {
        let s = PopulationVector::basis_state(RegisterLayout::three_spin(), 0).unwrap();
        assert_eq!(s.marginal_polarization(2).unwrap().value(), 1.0);
    }

    #[test]
    fn marginal_rejects_out_of_range_qubit() {
        let u = PopulationVector::uniform(RegisterLayout::three_spin());
        assert!(matches!(
            u.marginal_polarization(3),
            Err(Error::QubitOutOfRange { qubit: 3, num_qubits: 3 })
        ));
    }

    #[test]
    fn reset_of_pure_state_mixes_one_qubit() {
        let s = PopulationVector::basis_state(RegisterLayout::three_spin(), 0).unwrap();
        let r = s.reset_channel(&[(1, Epsilon::ZERO)]).unwrap();
        assert_eq!(r.probabilities()[0], 0.5);
        assert_eq!(r.probabilities()[2], 0.5);
        assert_eq!(r.probability_sum(), 1.0);
    }

    #[test]
    fn reset_pins_marginals_to_thermal_values() {
        let s = PopulationVector::basis_state(RegisterLayout::three_spin(), 5).unwrap();
        let r = s.reset_channel(&[(1, eps(0.2)), (2, eps(0.2))]).unwrap();
        assert!((r.marginal_polarization(1).unwrap().value() - 0.2).abs() < 1e-12);
        assert!((r.marginal_polarization(2).unwrap().value() - 0.2).abs() < 1e-12);
        // target untouched
        assert!((r.marginal_polarization(0).unwrap().value() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn reset_preserves_correlations_among_kept_qubits() {
        // a state correlating qubits 0 and 2; resetting qubit 1 must keep
        // their joint distribution, not just the single-qubit marginals
        let layout = RegisterLayout::three_spin();
        let probs = vec![0.31, 0.02, 0.2, 0.03, 0.04, 0.22, 0.05, 0.13];
        let state = PopulationVector::new(layout.clone(), probs).unwrap();
        let reset = state.reset_channel(&[(1, eps(0.4))]).unwrap();

        let joint = |s: &PopulationVector, a: usize, c: usize| -> f64 {
            s.probabilities()
                .iter()
                .enumerate()
                .filter(|&(i, _)| {
                    layout.bit_of(i, 0) == a && layout.bit_of(i, 2) == c
                })
                .map(|(_, &p)| p)
                .sum()
        };
        for a in 0..2 {
            for c in 0..2 {
                assert!(
                    (joint(&state, a, c) - joint(&reset, a, c)).abs() < 1e-15,
                    "joint ({a}, {c}) changed"
                );
            }
        }
    }

    #[test]
    fn reset_is_idempotent() {
        let u = PopulationVector::uniform(RegisterLayout::three_spin());
        let resets = [(1, eps(0.35)), (2, eps(0.1))];
        let once = u.reset_channel(&resets).unwrap();
        let twice = once.reset_channel(&resets).unwrap();
        for (a, b) in once.probabilities().iter().zip(twice.probabilities()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn reset_rejects_duplicate_qubit() {
        let u = PopulationVector::uniform(RegisterLayout::three_spin());
        assert!(matches!(
            u.reset_channel(&[(1, Epsilon::ZERO), (1, Epsilon::ZERO)]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn identity_permutation_is_a_no_op() {
        let u = PopulationVector::uniform(RegisterLayout::three_spin());
        let out = u.apply_permutation(&Permutation::identity(8)).unwrap();
        assert_eq!(out, u);
    }

    #[test]
    fn transposition_swaps_two_entries() {
        let layout = RegisterLayout::three_spin();
        let probs: Vec<f64> = vec![0.3, 0.2, 0.15, 0.05, 0.1, 0.08, 0.07, 0.05];
        let s = PopulationVector::new(layout, probs.clone()).unwrap();
        let t = Permutation::transposition(8, 3, 4).unwrap();
        let out = s.apply_permutation(&t).unwrap();
        assert_eq!(out.probabilities()[3], probs[4]);
        assert_eq!(out.probabilities()[4], probs[3]);
        for i in [0, 1, 2, 5, 6, 7] {
            assert_eq!(out.probabilities()[i], probs[i]);
        }
    }

    #[test]
    fn permutation_of_wrong_size_is_rejected() {
        let u = PopulationVector::uniform(RegisterLayout::three_spin());
        assert!(u.apply_permutation(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn construction_rejects_bad_vectors() {
        let layout = RegisterLayout::single_qubit();
        assert!(PopulationVector::new(layout.clone(), vec![0.5, 0.5, 0.0]).is_err());
        assert!(PopulationVector::new(layout.clone(), vec![0.7, 0.4]).is_err());
        assert!(PopulationVector::new(layout.clone(), vec![-0.1, 1.1]).is_err());
        assert!(PopulationVector::new(layout.clone(), vec![f64::NAN, 1.0]).is_err());
        // a rounding-level negative is clamped to zero
        let s = PopulationVector::new(layout, vec![-1e-16, 1.0]).unwrap();
        assert_eq!(s.probabilities()[0], 0.0);
    }
}
