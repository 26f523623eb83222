//! Unitary gates with party structure, and the standard gate zoo.

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::linalg::structure::PartyStructure;
use crate::tol::Tolerances;

/// A unitary matrix together with the tensor-factor structure it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryGate {
    matrix: Matrix,
    structure: PartyStructure,
}

impl UnitaryGate {
    pub fn new(matrix: Matrix, structure: PartyStructure, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != structure.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} does not match party dimension {}",
                matrix.rows(),
                matrix.cols(),
                structure.total_dim()
            )));
        }
        if !matrix.all_finite() {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        matrix.check_unitary(tol.unitarity)?;
        Ok(UnitaryGate { matrix, structure })
    }

    /// Wraps without the unitarity check; for matrices produced internally
    /// from verified unitary factors.
    pub(crate) fn new_unchecked(matrix: Matrix, structure: PartyStructure) -> Self {
        UnitaryGate { matrix, structure }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn structure(&self) -> &PartyStructure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn adjoint(&self) -> UnitaryGate {
        UnitaryGate {
            matrix: self.matrix.adjoint(),
            structure: self.structure.clone(),
        }
    }

    /// `U† · other`, the relative gate whose spectrum decides
    /// distinguishability.
    pub fn relative(&self, other: &UnitaryGate) -> Result<Matrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "gates of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.matrix.adjoint().matmul(&other.matrix))
    }

    /// Block-diagonal extension `U ⊕ I_k` on a single merged party.
    pub fn direct_sum(&self, k: usize) -> UnitaryGate {
        if k == 0 {
            return self.clone();
        }
        UnitaryGate {
            matrix: self.matrix.direct_sum_identity(k),
            structure: PartyStructure::single(self.dim() + k),
        }
    }

    pub fn tensor(&self, other: &UnitaryGate) -> UnitaryGate {
        UnitaryGate {
            matrix: self.matrix.kron(&other.matrix),
            structure: self.structure.concat(&other.structure),
        }
    }
}

/// Standard named gates.
pub mod gates {
    use super::*;
    use crate::linalg::matrix::{c, cr, Matrix, I, ONE, ZERO};

    pub fn pauli_x() -> Matrix {
        Matrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]])
    }

    pub fn pauli_y() -> Matrix {
        Matrix::from_rows(vec![vec![ZERO, -I], vec![I, ZERO]])
    }

    pub fn pauli_z() -> Matrix {
        Matrix::diagonal(&[ONE, cr(-1.0)])
    }

    pub fn hadamard() -> Matrix {
        let r = 1.0 / 2.0f64.sqrt();
        Matrix::from_rows(vec![vec![cr(r), cr(r)], vec![cr(r), cr(-r)]])
    }

    pub fn phase(theta: f64) -> Matrix {
        Matrix::diagonal(&[ONE, Complex64::from_polar(1.0, theta)])
    }

    pub fn cnot() -> Matrix {
        Matrix::from_rows(vec![
            vec![ONE, ZERO, ZERO, ZERO],
            vec![ZERO, ONE, ZERO, ZERO],
            vec![ZERO, ZERO, ZERO, ONE],
            vec![ZERO, ZERO, ONE, ZERO],
        ])
    }

    pub fn cz() -> Matrix {
        Matrix::diagonal(&[ONE, ONE, ONE, cr(-1.0)])
    }

    /// Swap of two parties with equal local dimension `d`.
    pub fn swap(d: usize) -> Matrix {
        let mut m = Matrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                m.set(i * d + j, j * d + i, ONE);
            }
        }
        m
    }

    /// `exp(i(hx σx⊗σx + hy σy⊗σy + hz σz⊗σz))` in closed form; the three
    /// terms commute.
    pub fn canonical_core(hx: f64, hy: f64, hz: f64) -> Matrix {
        let eiz = Complex64::from_polar(1.0, hz);
        let eimz = Complex64::from_polar(1.0, -hz);
        let cm = (hx - hy).cos();
        let sm = (hx - hy).sin();
        let cp = (hx + hy).cos();
        let sp = (hx + hy).sin();
        Matrix::from_rows(vec![
            vec![eiz * cm, ZERO, ZERO, eiz * c(0.0, sm)],
            vec![ZERO, eimz * cp, eimz * c(0.0, sp), ZERO],
            vec![ZERO, eimz * c(0.0, sp), eimz * cp, ZERO],
            vec![eiz * c(0.0, sm), ZERO, ZERO, eiz * cm],
        ])
    }

    use num_complex::Complex64;

    pub fn two_qubit(m: Matrix) -> UnitaryGate {
        UnitaryGate::new_unchecked(m, PartyStructure::qubits(2))
    }
}
