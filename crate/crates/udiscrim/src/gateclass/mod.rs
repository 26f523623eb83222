//! Structural gate analysis: operator-Schmidt primitivity testing, the
//! two-qubit canonical decomposition and numerical Lie-algebra closure.

pub mod kak;
pub mod lie;

pub use kak::{canonical_class, kak_decompose, KakDecomposition};
pub use lie::{lie_closure, multiparty_classify, LieClosureReport};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{cr, Matrix};
use crate::linalg::structure::{ravel, unravel, PartyStructure};
use crate::linalg::svd::svd;
use crate::linalg::unitary::{gates, UnitaryGate};
use crate::tol::Tolerances;

/// Structural class of a gate.
#[derive(Debug, Clone)]
pub enum GateClass {
    /// `U = A ⊗ B` with the extracted local factors.
    Product { factor_a: Matrix, factor_b: Matrix },
    /// `U = (A ⊗ B) · SWAP` with the extracted local factors.
    ProductSwap { factor_a: Matrix, factor_b: Matrix },
    /// Generates exactly the product group over the partition blocks, up to
    /// a structure-preserving party permutation.
    PartitionPrimitive {
        partition: Vec<Vec<usize>>,
        permutation: Vec<usize>,
    },
    /// Generates the full unitary group together with local gates.
    Imprimitive,
}

impl GateClass {
    pub fn label(&self) -> &'static str {
        match self {
            GateClass::Product { .. } => "Product",
            GateClass::ProductSwap { .. } => "ProductSwap",
            GateClass::PartitionPrimitive { .. } => "PartitionPrimitive",
            GateClass::Imprimitive => "Imprimitive",
        }
    }
}

/// Realigns a gate across a bipartition: the index shuffle
/// `((i,k),(j,l)) → ((i,j),(k,l))` that turns product operators into rank-1
/// matrices.
pub fn realign(m: &Matrix, structure: &PartyStructure, side_a: &[usize]) -> Result<Matrix> {
    structure.check_subset(side_a)?;
    let n = structure.n_parties();
    let mut a_sorted = side_a.to_vec();
    a_sorted.sort_unstable();
    let b_side: Vec<usize> = (0..n).filter(|p| !a_sorted.contains(p)).collect();
    if b_side.is_empty() {
        return Err(Error::InvalidParties(
            "cut must leave both sides nonempty".into(),
        ));
    }
    let dims = structure.dims();
    let a_dims: Vec<usize> = a_sorted.iter().map(|&p| dims[p]).collect();
    let b_dims: Vec<usize> = b_side.iter().map(|&p| dims[p]).collect();
    let da: usize = a_dims.iter().product();
    let db: usize = b_dims.iter().product();
    let total = structure.total_dim();
    assert_eq!(m.rows(), total);

    let mut out = Matrix::zeros(da * da, db * db);
    for row in 0..total {
        let rd = unravel(dims, row);
        let ia = ravel(&a_dims, &a_sorted.iter().map(|&p| rd[p]).collect::<Vec<_>>());
        let ib = ravel(&b_dims, &b_side.iter().map(|&p| rd[p]).collect::<Vec<_>>());
        for col in 0..total {
            let cd = unravel(dims, col);
            let ja = ravel(&a_dims, &a_sorted.iter().map(|&p| cd[p]).collect::<Vec<_>>());
            let jb = ravel(&b_dims, &b_side.iter().map(|&p| cd[p]).collect::<Vec<_>>());
            out.set(ia * da + ja, ib * db + jb, m.at(row, col));
        }
    }
    Ok(out)
}

/// Operator Schmidt rank and singular values across a bipartition.
pub fn schmidt_rank(
    u: &UnitaryGate,
    side_a: &[usize],
    tol: &Tolerances,
) -> Result<(usize, Vec<f64>)> {
    let r = realign(u.matrix(), u.structure(), side_a)?;
    let d = svd(&r, tol)?;
    let rank = d.s.iter().filter(|&&s| s > tol.rank_cut).count();
    Ok((rank, d.s))
}

fn unvec(x: &[Complex64], d: usize) -> Matrix {
    Matrix::from_fn(d, d, |i, j| x[i * d + j])
}

/// Attempts `m = A ⊗ B` factor extraction from the leading singular pair of
/// the realignment. Returns the factors and the reconstruction error.
pub fn extract_product(
    m: &Matrix,
    structure: &PartyStructure,
    tol: &Tolerances,
) -> Result<(Matrix, Matrix, f64)> {
    if structure.n_parties() != 2 {
        return Err(Error::InvalidParties(
            "product extraction expects exactly two parties".into(),
        ));
    }
    let (da, db) = (structure.dims()[0], structure.dims()[1]);
    let r = realign(m, structure, &[0])?;
    let d = svd(&r, tol)?;
    let s = d.s[0];
    let x = d.u.col(0);
    let y = d.v.col(0);
    let mut a = unvec(&x, da).scale(cr((da as f64).sqrt()));
    let mut b = unvec(&y.iter().map(|v| v.conj()).collect::<Vec<_>>(), db)
        .scale(cr(s / (da as f64).sqrt()));
    // Deterministic phase split: the largest-modulus entry of A real positive.
    let mut best = (0usize, 0usize, 0.0f64);
    for i in 0..da {
        for j in 0..da {
            let v = a.at(i, j).norm();
            if v > best.2 {
                best = (i, j, v);
            }
        }
    }
    if best.2 > 0.0 {
        let phase = a.at(best.0, best.1) / cr(best.2);
        a = a.scale(phase.conj());
        b = b.scale(phase);
    }
    let err = a.kron(&b).max_abs_diff(m);
    Ok((a, b, err))
}

/// Two-party classifier: Product, ProductSwap (equal local dimensions only)
/// or Imprimitive, with factors verified by reconstruction.
pub fn classify_two_party(u: &UnitaryGate, tol: &Tolerances) -> Result<GateClass> {
    if u.structure().n_parties() != 2 {
        return Err(Error::InvalidParties(format!(
            "classify_two_party expects 2 parties, got {}",
            u.structure().n_parties()
        )));
    }
    let (a, b, err) = extract_product(u.matrix(), u.structure(), tol)?;
    if err <= tol.product_recon {
        return Ok(GateClass::Product {
            factor_a: a,
            factor_b: b,
        });
    }
    let dims = u.structure().dims();
    if dims[0] == dims[1] {
        let swapped = u.matrix().matmul(&gates::swap(dims[0]));
        let (a, b, err) = extract_product(&swapped, u.structure(), tol)?;
        if err <= tol.product_recon {
            return Ok(GateClass::ProductSwap {
                factor_a: a,
                factor_b: b,
            });
        }
    }
    Ok(GateClass::Imprimitive)
}
