//! Singular value decomposition from the Hermitian eigendecomposition of
//! `M†M`, with left vectors recovered as `Mv/s` and a deterministic
//! orthonormal completion below the singular-value floor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{cr, vec_inner, vec_norm, vec_scale, vec_sub, Matrix};
use crate::tol::Tolerances;

/// Thin SVD: `m = u · diag(s) · v†` with `s` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub fn svd(m: &Matrix, tol: &Tolerances) -> Result<Svd> {
    let (rows, cols) = (m.rows(), m.cols());
    let r = rows.min(cols);
    let gram = m.adjoint().matmul(m);
    let spec = crate::linalg::eig::eig_hermitian(&gram, tol)?;
    // Re-estimate each singular value as ‖M·v‖: the Gram eigenvalues lose
    // half their precision near zero, the direct norm does not.
    let mut pairs: Vec<(f64, Vec<Complex64>, Vec<Complex64>)> = (0..cols)
        .map(|k| {
            let vk = spec.vectors.col(k);
            let mv = m.apply(&vk);
            (vec_norm(&mv), vk, mv)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    pairs.truncate(r);

    let mut s = Vec::with_capacity(r);
    let mut right_cols = Vec::with_capacity(r);
    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    for (sv, vk, mv) in pairs {
        s.push(sv);
        if sv > tol.svd_floor {
            left_cols.push(vec_scale(&mv, cr(1.0 / sv)));
        }
        right_cols.push(vk);
    }
    // Deterministic completion: orthogonalise standard basis vectors, taking
    // the one with the largest residual each round.
    while left_cols.len() < r {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for e in 0..rows {
            let mut cand = vec![Complex64::new(0.0, 0.0); rows];
            cand[e] = cr(1.0);
            for u in &left_cols {
                let overlap = vec_inner(u, &cand);
                cand = vec_sub(&cand, &vec_scale(u, overlap));
            }
            let n = vec_norm(&cand);
            if best.as_ref().map_or(true, |(bn, _)| n > *bn) {
                best = Some((n, cand));
            }
        }
        let (n, cand) = best.expect("nonempty candidate set");
        if n < 1e-6 {
            return Err(Error::Numerical(
                "failed to complete left singular basis".into(),
            ));
        }
        left_cols.push(vec_scale(&cand, cr(1.0 / n)));
    }

    let u = Matrix::from_cols(&left_cols);
    let v = Matrix::from_cols(&right_cols);

    // Reconstruction audit.
    let rec = u.matmul(&Matrix::diagonal(
        &s.iter().map(|&x| cr(x)).collect::<Vec<_>>(),
    ))
    .matmul(&v.adjoint());
    if rec.max_abs_diff(m) > tol.eig_residual.max(1e-9 * (1.0 + m.max_norm())) {
        return Err(Error::Numerical(format!(
            "svd reconstruction error {:.3e}",
            rec.max_abs_diff(m)
        )));
    }
    Ok(Svd { u, s, v })
}
