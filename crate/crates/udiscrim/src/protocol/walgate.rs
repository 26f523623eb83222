//! Alice-side measurement basis rendering Bob's conditional states pairwise
//! orthogonal, so two orthogonal pure states can be told apart with one
//! round of classical communication.
//!
//! Finding the basis is a zero-diagonal unitary similarity problem for
//! `G = conj(Ψ0)·Ψ1ᵀ` (trace zero by orthogonality): cyclic 2×2 analytic
//! eliminations average the diagonal to zero, with seeded random restarts as
//! a fallback.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{cr, Matrix, ONE, ZERO};
use crate::linalg::random::haar_random_matrix;
use crate::linalg::state::PureState;
use crate::tol::Tolerances;

/// Alice measurement basis together with its certified cost
/// `Σ_k |⟨η_k|ν_k⟩|²`.
#[derive(Debug, Clone)]
pub struct WalgateBasis {
    /// Columns are Alice's measurement vectors.
    pub alice_basis: Matrix,
    pub certified_cost: f64,
}

/// Reshapes a state into an Alice×Bob amplitude matrix after moving the
/// listed parties to the front.
pub fn bipartition_matrix(psi: &PureState, alice_parties: &[usize]) -> (Matrix, usize, usize) {
    let n = psi.structure().n_parties();
    let mut order: Vec<usize> = alice_parties.to_vec();
    for p in 0..n {
        if !alice_parties.contains(&p) {
            order.push(p);
        }
    }
    let grouped = psi.permute_parties(&order);
    let da: usize = alice_parties
        .iter()
        .map(|&p| psi.structure().dims()[p])
        .product();
    let db = grouped.dim() / da;
    let m = Matrix::from_fn(da, db, |a, b| grouped.amps()[a * db + b]);
    (m, da, db)
}

/// Unit vector `z` with `z†Bz = 0` for a traceless 2×2 block.
fn zero_vector_2x2(b00: Complex64, b01: Complex64, b10: Complex64) -> (Complex64, Complex64) {
    let a = b00;
    if a.norm() < 1e-300 {
        return (ONE, ZERO);
    }
    let p = b01 * a.conj();
    let q = b10 * a.conj();
    let phi = (p.im + q.im).atan2(q.re - p.re);
    let e_phi = Complex64::from_polar(1.0, phi);
    let k = b01 * e_phi + b10 * e_phi.conj();
    let mu = (k * a.conj()).re / a.norm();
    let theta = 0.5 * (-2.0 * a.norm()).atan2(mu);
    (cr(theta.cos()), Complex64::from_polar(theta.sin(), phi))
}

fn diag_cost(m: &Matrix) -> f64 {
    (0..m.rows()).map(|k| m.at(k, k).norm_sqr()).sum()
}

/// For rank-one `G = x·yᵀ` (product-form outputs) the similarity is closed
/// form: with the first basis vector along `x`, every diagonal entry
/// vanishes except the first, which equals `Tr G` — the input overlap.
fn rank_one_similarity(g: &Matrix) -> Option<(Matrix, f64)> {
    let n = g.rows();
    if n < 2 {
        return None;
    }
    let (mut bi, mut bj, mut best) = (0usize, 0usize, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let v = g.at(i, j).norm();
            if v > best {
                best = v;
                (bi, bj) = (i, j);
            }
        }
    }
    if best == 0.0 {
        // zero matrix: any basis works
        return Some((Matrix::identity(n), 0.0));
    }
    let x: Vec<Complex64> = (0..n).map(|i| g.at(i, bj)).collect();
    let pivot = g.at(bi, bj);
    let y: Vec<Complex64> = (0..n).map(|j| g.at(bi, j) / pivot).collect();
    // residual of the rank-one model
    let mut resid = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            resid = resid.max((g.at(i, j) - x[i] * y[j]).norm());
        }
    }
    if resid > 1e-12 * (1.0 + best) {
        return None;
    }
    // Orthonormal basis starting along x (Gram–Schmidt over the standard
    // basis, deterministic).
    let nx = crate::linalg::matrix::vec_norm(&x);
    let mut cols: Vec<Vec<Complex64>> = vec![crate::linalg::matrix::vec_scale(
        &x,
        cr(1.0 / nx),
    )];
    let mut e = 0usize;
    while cols.len() < n {
        let mut cand = vec![ZERO; n];
        cand[e] = ONE;
        e += 1;
        for b in &cols {
            let overlap = crate::linalg::matrix::vec_inner(b, &cand);
            cand = crate::linalg::matrix::vec_sub(
                &cand,
                &crate::linalg::matrix::vec_scale(b, overlap),
            );
        }
        let ncand = crate::linalg::matrix::vec_norm(&cand);
        if ncand > 1e-6 {
            cols.push(crate::linalg::matrix::vec_scale(&cand, cr(1.0 / ncand)));
        }
    }
    let s = Matrix::from_cols(&cols);
    let cost = diag_cost(&s.adjoint().matmul(g).matmul(&s));
    Some((s, cost))
}

/// Unitary `S` making the diagonal of `S†GS` vanish up to the trace floor,
/// by cyclic 2×2 analytic eliminations (pair diagonals average to zero).
fn zero_diagonal_similarity(g: &Matrix, start: Option<Matrix>) -> (Matrix, f64) {
    let n = g.rows();
    let s0 = start.unwrap_or_else(|| Matrix::identity(n));
    let cur0 = s0.adjoint().matmul(g).matmul(&s0);
    // Work on raw row-major slices.
    let mut cur: Vec<Complex64> = cur0.data().to_vec();
    let mut s: Vec<Complex64> = s0.data().to_vec();
    // The diagonal converges to Tr(G)/n, which orthogonality makes tiny.
    let floor = g.trace().norm() / n as f64;
    let target = (floor + 1e-14 * (1.0 + g.max_norm())).max(1e-15);
    for _sweep in 0..200 {
        let worst = (0..n).map(|k| cur[k * n + k].norm()).fold(0.0, f64::max);
        if worst <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let dp = cur[p * n + p];
                let dq = cur[q * n + q];
                // pairs already at the floor have nothing to trade
                if dp.norm() <= target * 0.5 && dq.norm() <= target * 0.5 {
                    continue;
                }
                let half_trace = (dp + dq) * cr(0.5);
                let (z0, z1) = zero_vector_2x2(dp - half_trace, cur[p * n + q], cur[q * n + p]);
                // Z = [z, z⊥] embedded at (p, q).
                let (w0, w1) = (-z1.conj(), z0.conj());
                for i in 0..n {
                    let cip = cur[i * n + p];
                    let ciq = cur[i * n + q];
                    cur[i * n + p] = cip * z0 + ciq * z1;
                    cur[i * n + q] = cip * w0 + ciq * w1;
                }
                let (z0c, z1c, w0c, w1c) = (z0.conj(), z1.conj(), w0.conj(), w1.conj());
                for j in 0..n {
                    let cpj = cur[p * n + j];
                    let cqj = cur[q * n + j];
                    cur[p * n + j] = z0c * cpj + z1c * cqj;
                    cur[q * n + j] = w0c * cpj + w1c * cqj;
                }
                for i in 0..n {
                    let sip = s[i * n + p];
                    let siq = s[i * n + q];
                    s[i * n + p] = sip * z0 + siq * z1;
                    s[i * n + q] = sip * w0 + siq * w1;
                }
            }
        }
    }
    let cost: f64 = (0..n).map(|k| cur[k * n + k].norm_sqr()).sum();
    let s = Matrix::from_fn(n, n, |i, j| s[i * n + j]);
    (s, cost)
}

/// Finds Alice's basis for two orthogonal pure states across the given cut.
pub fn walgate_measurement(
    psi0: &PureState,
    psi1: &PureState,
    alice_parties: &[usize],
    tol: &Tolerances,
) -> Result<WalgateBasis> {
    if psi0.structure() != psi1.structure() {
        return Err(Error::DimensionMismatch(
            "states live on different party structures".into(),
        ));
    }
    psi0.structure().check_subset(alice_parties)?;
    let overlap = psi0.inner(psi1).norm();
    if overlap > tol.orthogonality {
        return Err(Error::InvalidState(format!(
            "input states are not orthogonal (|⟨ψ0|ψ1⟩| = {:.3e})",
            overlap
        )));
    }
    let (m0, da, _db) = bipartition_matrix(psi0, alice_parties);
    let (m1, _, _) = bipartition_matrix(psi1, alice_parties);
    let g = m0.conjugate().matmul(&m1.transpose());

    let (s, cost) = match rank_one_similarity(&g) {
        Some((s, cost)) if cost <= tol.walgate_cost => (s, cost),
        _ => zero_diagonal_similarity(&g, None),
    };
    let (s, cost) = if cost <= tol.walgate_cost {
        (s, cost)
    } else {
        // Seeded multi-restart fallback.
        let mut best = (s, cost);
        for seed in 0..8u64 {
            let start = haar_random_matrix(da, 0xA11CE ^ seed);
            let (s2, c2) = zero_diagonal_similarity(&g, Some(start));
            if c2 < best.1 {
                best = (s2, c2);
            }
            if best.1 <= tol.walgate_cost {
                break;
            }
        }
        best
    };
    if cost > tol.walgate_cost {
        return Err(Error::NoBasisFound);
    }
    Ok(WalgateBasis {
        alice_basis: s.conjugate(),
        certified_cost: cost,
    })
}

/// Bob's unnormalised conditional state for Alice outcome `w_k`.
pub fn bob_conditional(psi_matrix: &Matrix, w_k: &[Complex64]) -> Vec<Complex64> {
    let (da, db) = (psi_matrix.rows(), psi_matrix.cols());
    assert_eq!(w_k.len(), da);
    (0..db)
        .map(|b| {
            (0..da)
                .map(|a| w_k[a].conj() * psi_matrix.at(a, b))
                .sum::<Complex64>()
        })
        .collect()
}
