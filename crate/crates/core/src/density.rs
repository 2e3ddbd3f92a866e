//! Full complex density matrices.
//!
//! The protocols in this crate run entirely on population vectors. This
//! module exists to check that doing so loses nothing: conjugating a density
//! matrix by a basis permutation and reading off the diagonal must agree with
//! permuting the diagonal directly, whatever the off-diagonal elements are.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::permutation::Permutation;
use crate::population::PopulationVector;

/// Matrices are only used on small registers; beyond this the `dim^2` storage
/// and `dim^3` conjugation stop being test-path material.
pub const MAX_DENSITY_QUBITS: usize = 6;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// A `2^k x 2^k` complex density matrix: Hermitian, unit trace, positive
/// semidefinite (up to a small eigenvalue floor).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: RegisterLayout,
    dim: usize,
    /// Row-major entries.
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(layout: RegisterLayout, entries: Vec<Complex64>) -> Result<Self> {
        if layout.num_qubits() > MAX_DENSITY_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: layout.num_qubits(),
                max: MAX_DENSITY_QUBITS,
            });
        }
        let dim = layout.dimension();
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        for i in 0..dim {
            for j in i..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                if (a - b.conj()).norm() > HERMITICITY_TOL {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        let trace: Complex64 = (0..dim).map(|i| entries[i * dim + i]).sum();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}, expected 1")));
        }
        let min_eig = hermitian_eigenvalues(&entries, dim)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::InvalidDensityMatrix(format!(
                "not positive semidefinite: smallest eigenvalue {min_eig}"
            )));
        }
        Ok(DensityMatrix { layout, dim, entries })
    }

    /// The diagonal matrix with the given populations.
    pub fn from_diagonal(state: &PopulationVector) -> Result<Self> {
        let layout = state.layout().clone();
        if layout.num_qubits() > MAX_DENSITY_QUBITS {
            return Err(Error::CapacityExceeded {
                requested: layout.num_qubits(),
                max: MAX_DENSITY_QUBITS,
            });
        }
        let dim = layout.dimension();
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for (i, &p) in state.probabilities().iter().enumerate() {
            entries[i * dim + i] = Complex64::new(p, 0.0);
        }
        Ok(DensityMatrix { layout, dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// The diagonal as a population vector.
    pub fn diagonal(&self) -> PopulationVector {
        let probs = (0..self.dim).map(|i| self.entry(i, i).re).collect();
        PopulationVector::from_computed(self.layout.clone(), probs)
    }

    /// `diag(U rho U^dag)` for the permutation matrix `U` of `perm`, computed
    /// by building `U` and multiplying the matrices out. This is deliberately
    /// the pedestrian route; `PopulationVector::apply_permutation` is the
    /// shortcut it gets compared against.
    pub fn diagonal_of_conjugation(&self, perm: &Permutation) -> Result<PopulationVector> {
        if perm.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: perm.len() });
        }
        let dim = self.dim;
        // U |i> = |perm(i)>, so U[perm(i)][i] = 1.
        let mut u = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            u[perm.target_of(i) * dim + i] = Complex64::ONE;
        }
        let u_dag = adjoint(&u, dim);
        let product = matmul(&matmul(&u, &self.entries, dim), &u_dag, dim);
        let probs = (0..dim).map(|i| product[i * dim + i].re).collect();
        Ok(PopulationVector::from_computed(self.layout.clone(), probs))
    }
}

fn adjoint(m: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = m[i * dim + j].conj();
        }
    }
    out
}

fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == Complex64::ZERO {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix (row-major, `dim x dim`), ascending.
///
/// Cyclic Jacobi: each rotation zeroes one off-diagonal pair, sweeps repeat
/// until the off-diagonal mass is negligible. Plenty for the matrix sizes
/// this crate touches.
pub fn hermitian_eigenvalues(entries: &[Complex64], dim: usize) -> Vec<f64> {
    assert_eq!(entries.len(), dim * dim, "matrix shape mismatch");
    let mut a = entries.to_vec();
    let scale: f64 = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p * dim + q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                jacobi_rotate(&mut a, dim, p, q);
            }
        }
    }

    let mut eigs: Vec<f64> = (0..dim).map(|i| a[i * dim + i].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eigs
}

/// One complex Jacobi rotation zeroing `a[p][q]` (and `a[q][p]`).
fn jacobi_rotate(a: &mut [Complex64], dim: usize, p: usize, q: usize) {
    let apq = a[p * dim + q];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let phase = apq / g;
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Unitary restricted to the (p, q) plane:
    //   V = [[c, s], [-s * conj(phase), c * conj(phase)]]
    let v21 = -s * phase.conj();
    let v22 = c * phase.conj();

    // Column update: A <- A V.
    for k in 0..dim {
        let akp = a[k * dim + p];
        let akq = a[k * dim + q];
        a[k * dim + p] = akp * c + akq * v21;
        a[k * dim + q] = akp * s + akq * v22;
    }
    // Row update: A <- V^dag A.
    for k in 0..dim {
        let apk = a[p * dim + k];
        let aqk = a[q * dim + k];
        a[p * dim + k] = apk * c + aqk * v21.conj();
        a[q * dim + k] = apk * s + aqk * v22.conj();
    }
}
