//! Deterministic small dense complex linear algebra: products, tensor
//! products, spectral decompositions, SVD, matrix exponentials, partial
//! traces, Haar-random unitaries and direct sums.

pub mod eig;
pub mod matrix;
pub mod random;
pub mod state;
pub mod structure;
pub mod svd;
pub mod unitary;

pub use eig::{
    angle_of, eig_hermitian, eig_unitary_matrix, exp_i_hermitian, RealSpectrum, Spectrum,
};
pub use matrix::{vec_kron_all, Matrix};
pub use state::{DensityMatrix, PureState};
pub use structure::PartyStructure;
pub use svd::{svd, Svd};
pub use unitary::{gates, UnitaryGate};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Kronecker product, `(A ⊗ B)[(i,k),(j,l)] = A[i,j]·B[k,l]`.
pub fn tensor(a: &Matrix, b: &Matrix) -> Matrix {
    a.kron(b)
}

/// `Tr(V†U)` — the overlap whose vanishing makes two gates one-shot
/// distinguishable.
pub fn trace_product(u: &Matrix, v: &Matrix) -> Result<Complex64> {
    if !u.is_square() || !v.is_square() || u.rows() != v.rows() {
        return Err(Error::DimensionMismatch(format!(
            "trace_product needs equal square matrices, got {}x{} and {}x{}",
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..u.rows() {
        for k in 0..u.rows() {
            acc += v.at(k, i).conj() * u.at(k, i);
        }
    }
    Ok(acc)
}

/// Spectral decomposition of a unitary gate.
pub fn eig_unitary(u: &UnitaryGate, tol: &Tolerances) -> Result<Spectrum> {
    eig_unitary_matrix(u.matrix(), tol)
}

/// Seeded Haar-random unitary on a single party of the given dimension.
pub fn haar_random_unitary(dim: usize, seed: u64) -> UnitaryGate {
    let m = random::haar_random_matrix(dim, seed);
    UnitaryGate::new_unchecked(m, PartyStructure::single(dim))
}

/// Block-diagonal ancilla extension `U ⊕ I_k`.
pub fn direct_sum(u: &UnitaryGate, k: usize) -> UnitaryGate {
    u.direct_sum(k)
}
