//! Register layout: qubit ordering and role assignment.

use crate::error::{Error, Result};

/// Largest register the population-vector engine will allocate (4096 entries).
pub const MAX_QUBITS: usize = 12;

/// Qubit ordering and role assignment of a spin register.
///
/// Qubit 0 is the most significant bit of a basis-state index: for a 3-qubit
/// register the basis state `|abc>` has index `4a + 2b + c`, with `a` the
/// bit of qubit 0. One qubit is the target (the spin being cooled) and the
/// `reset_indices` qubits are re-thermalized against the bath.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    num_qubits: usize,
    target_index: usize,
    reset_indices: Vec<usize>,
}

impl RegisterLayout {
    pub fn new(num_qubits: usize, target_index: usize, reset_indices: Vec<usize>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidLayout("register needs at least one qubit".into()));
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::CapacityExceeded { requested: num_qubits, max: MAX_QUBITS });
        }
        if target_index >= num_qubits {
            return Err(Error::QubitOutOfRange { qubit: target_index, num_qubits });
        }
        let mut seen = vec![false; num_qubits];
        seen[target_index] = true;
        for &q in &reset_indices {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
            }
            if seen[q] {
                return Err(Error::InvalidLayout(format!(
                    "qubit {q} assigned twice (target and reset roles must be disjoint)"
                )));
            }
            seen[q] = true;
        }
        Ok(RegisterLayout { num_qubits, target_index, reset_indices })
    }

    /// A lone qubit, its own target.
    pub fn single_qubit() -> Self {
        RegisterLayout { num_qubits: 1, target_index: 0, reset_indices: Vec::new() }
    }

    /// The three-spin register used by the cooling protocols: qubit 0 is the
    /// target, qubits 1 and 2 are the reset spins.
    pub fn three_spin() -> Self {
        RegisterLayout { num_qubits: 3, target_index: 0, reset_indices: vec![1, 2] }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of basis states, `2^k`.
    pub fn dimension(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn reset_indices(&self) -> &[usize] {
        &self.reset_indices
    }

    /// Qubits that are cooled rather than re-thermalized.
    pub fn computation_count(&self) -> usize {
        self.num_qubits - self.reset_indices.len()
    }

    /// Bit mask selecting `qubit` within a basis-state index.
    pub fn bit_mask(&self, qubit: usize) -> usize {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        1 << (self.num_qubits - 1 - qubit)
    }

    /// The value (0 or 1) of `qubit` within basis-state `index`.
    pub fn bit_of(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.num_qubits - 1 - qubit)) & 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_spin_layout_matches_bit_convention() {
        let layout = RegisterLayout::three_spin();
        assert_eq!(layout.dimension(), 8);
        assert_eq!(layout.bit_mask(0), 4);
        assert_eq!(layout.bit_mask(1), 2);
        assert_eq!(layout.bit_mask(2), 1);
        // |100> is index 4, |011> is index 3
        assert_eq!(layout.bit_of(4, 0), 1);
        assert_eq!(layout.bit_of(4, 1), 0);
        assert_eq!(layout.bit_of(3, 0), 0);
        assert_eq!(layout.bit_of(3, 1), 1);
        assert_eq!(layout.bit_of(3, 2), 1);
        assert_eq!(layout.computation_count(), 1);
    }

    #[test]
    fn rejects_overlapping_roles() {
        assert!(RegisterLayout::new(3, 0, vec![0, 1]).is_err());
        assert!(RegisterLayout::new(3, 0, vec![1, 1]).is_err());
        assert!(RegisterLayout::new(3, 3, vec![1]).is_err());
        assert!(RegisterLayout::new(3, 0, vec![5]).is_err());
    }

    #[test]
    fn rejects_oversized_register() {
        let err = RegisterLayout::new(MAX_QUBITS + 1, 0, vec![]).unwrap_err();
        assert_eq!(err, Error::CapacityExceeded { requested: 13, max: 12 });
    }
}
