//! Spectral decompositions by cyclic Jacobi rotations.
//!
//! One Hermitian solver serves everything: unitary spectra come from the two
//! commuting Hermitian parts `(U+U†)/2` and `(U−U†)/(2i)`, with eigenvalues of
//! the second part resolved inside near-degenerate eigenspaces of the first.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{cr, vec_norm, Matrix, ONE};
use crate::tol::Tolerances;

/// Eigendecomposition of a Hermitian matrix: real eigenvalues ascending,
/// orthonormal eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct RealSpectrum {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Eigendecomposition of a unitary matrix: unit-modulus eigenvalues sorted by
/// angle in `[0, 2π)`, orthonormal eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    pub vectors: Matrix,
}

impl Spectrum {
    /// Eigen-angles in `[0, 2π)`, in eigenvalue order.
    pub fn angles(&self) -> Vec<f64> {
        self.values.iter().map(|v| angle_of(*v)).collect()
    }
}

/// Argument of a complex number mapped into `[0, 2π)`.
pub fn angle_of(v: Complex64) -> f64 {
    let a = v.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

const MAX_SWEEPS: usize = 64;

fn off_diag_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.at(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi. Returns (diagonal values, accumulated rotations).
fn jacobi_hermitian(h: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = h.rows();
    let mut a = h.clone();
    // Symmetrise once so roundoff in the input cannot bias the rotations.
    for i in 0..n {
        for j in 0..n {
            let v = (a.at(i, j) + a.at(j, i).conj()) * cr(0.5);
            a.set(i, j, v);
        }
    }
    let mut v = Matrix::identity(n);
    let stop = 1e-14 * (1.0 + a.fro_norm());
    for _sweep in 0..MAX_SWEEPS {
        if off_diag_norm(&a) <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a.at(p, q);
                if b.norm() <= stop / (n as f64 * n as f64) {
                    continue;
                }
                let x = a.at(p, p).re;
                let y = a.at(q, q).re;
                // Phase that makes the (p,q) block real, then a plane rotation
                // zeroing the off-diagonal entry of [[x, |b|], [|b|, y]].
                let w = b / cr(b.norm());
                let theta = 0.5 * (-2.0 * b.norm()).atan2(x - y);
                let (s, cth) = theta.sin_cos();
                // G restricted to (p,q): [[c, s], [−s·w̄, c·w̄]]
                let gpp = cr(cth);
                let gpq = cr(s);
                let gqp = -w.conj() * s;
                let gqq = w.conj() * cth;
                // A ← G† A G : columns then rows.
                for i in 0..n {
                    let aip = a.at(i, p);
                    let aiq = a.at(i, q);
                    a.set(i, p, aip * gpp + aiq * gqp);
                    a.set(i, q, aip * gpq + aiq * gqq);
                }
                for j in 0..n {
                    let apj = a.at(p, j);
                    let aqj = a.at(q, j);
                    a.set(p, j, gpp.conj() * apj + gqp.conj() * aqj);
                    a.set(q, j, gpq.conj() * apj + gqq.conj() * aqj);
                }
                // Clean the roundoff the update leaves behind.
                let pq = (a.at(p, q) + a.at(q, p).conj()) * cr(0.5);
                a.set(p, q, pq);
                a.set(q, p, pq.conj());
                // V ← V G
                for i in 0..n {
                    let vip = v.at(i, p);
                    let viq = v.at(i, q);
                    v.set(i, p, vip * gpp + viq * gqp);
                    v.set(i, q, vip * gpq + viq * gqq);
                }
            }
        }
    }
    if off_diag_norm(&a) > 1e-10 * (1.0 + a.fro_norm()) {
        return Err(Error::Numerical(format!(
            "Jacobi iteration did not converge (off-diagonal {:.3e})",
            off_diag_norm(&a)
        )));
    }
    let values: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
    Ok((values, v))
}

/// Makes the first entry of each column with modulus above the cutoff real
/// positive, for reproducible eigenvector output.
pub fn canonicalize_column_phases(m: &mut Matrix) {
    for j in 0..m.cols() {
        let mut phase = ONE;
        for i in 0..m.rows() {
            let v = m.at(i, j);
            if v.norm() > 1e-8 {
                phase = (v / cr(v.norm())).conj();
                break;
            }
        }
        if phase != ONE {
            for i in 0..m.rows() {
                let v = m.at(i, j) * phase;
                m.set(i, j, v);
            }
        }
    }
}

fn sort_by_values(values: &mut [f64], vectors: &mut Matrix) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let cols: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors.col(i)).collect();
    values.copy_from_slice(&sorted_vals);
    *vectors = Matrix::from_cols(&cols);
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues ascend; eigenvectors are orthonormal columns with canonical
/// phases and per-pair residual `‖Hv − λv‖` within tolerance.
pub fn eig_hermitian(h: &Matrix, tol: &Tolerances) -> Result<RealSpectrum> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    h.check_hermitian(tol.hermiticity)?;
    let (mut values, mut vectors) = jacobi_hermitian(h)?;
    sort_by_values(&mut values, &mut vectors);
    canonicalize_column_phases(&mut vectors);
    verify_residuals_real(h, &values, &vectors, tol)?;
    Ok(RealSpectrum { values, vectors })
}

fn verify_residuals_real(
    h: &Matrix,
    values: &[f64],
    vectors: &Matrix,
    tol: &Tolerances,
) -> Result<()> {
    for (j, &lam) in values.iter().enumerate() {
        let vj = vectors.col(j);
        let hv = h.apply(&vj);
        let r: f64 = hv
            .iter()
            .zip(vj.iter())
            .map(|(a, b)| (a - b * cr(lam)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if r > tol.eig_residual {
            return Err(Error::Numerical(format!(
                "eigen residual {:.3e} exceeds {:.1e}",
                r, tol.eig_residual
            )));
        }
    }
    if vectors.unitarity_error() > tol.unitarity {
        return Err(Error::Numerical(format!(
            "eigenvector matrix not unitary ({:.3e})",
            vectors.unitarity_error()
        )));
    }
    Ok(())
}

/// Groups consecutive sorted values into clusters chained within `width`.
pub fn cluster_sorted(values: &[f64], width: f64) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i] - values[i - 1]).abs() > width {
            groups.push((start, i));
            start = i;
        }
    }
    groups
}

/// Eigendecomposition of a unitary matrix.
///
/// Diagonalises `(U+U†)/2`, then resolves each near-degenerate eigenspace with
/// `(U−U†)/(2i)`; eigenvalues are renormalised onto the unit circle and sorted
/// by angle in `[0, 2π)`.
pub fn eig_unitary_matrix(u: &Matrix, tol: &Tolerances) -> Result<Spectrum> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    u.check_unitary(tol.unitarity)?;
    let n = u.rows();
    let udag = u.adjoint();
    let hre = (u + &udag).scale(cr(0.5));
    let him = (u - &udag).scale(Complex64::new(0.0, -0.5));

    let (mut vals, mut vectors) = jacobi_hermitian(&hre)?;
    sort_by_values(&mut vals, &mut vectors);

    // Resolve degeneracies of the real part with the imaginary part.
    for (lo, hi) in cluster_sorted(&vals, tol.degeneracy) {
        let m = hi - lo;
        if m < 2 {
            continue;
        }
        let block_cols: Vec<Vec<Complex64>> = (lo..hi).map(|j| vectors.col(j)).collect();
        let vb = Matrix::from_cols(&block_cols);
        let b = vb.adjoint().matmul(&him.matmul(&vb));
        let (bvals, bvecs) = jacobi_hermitian(&b)?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| bvals[i].partial_cmp(&bvals[j]).unwrap());
        let refined = vb.matmul(&Matrix::from_cols(
            &order.iter().map(|&i| bvecs.col(i)).collect::<Vec<_>>(),
        ));
        for (k, j) in (lo..hi).enumerate() {
            for i in 0..n {
                vectors.set(i, j, refined.at(i, k));
            }
        }
    }

    // Rayleigh quotients give the eigenvalues; renormalise onto |λ| = 1.
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let vj = vectors.col(j);
        let uv = u.apply(&vj);
        let mut lam: Complex64 = vj.iter().zip(uv.iter()).map(|(a, b)| a.conj() * b).sum();
        let norm = lam.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Numerical(format!(
                "unitary eigenvalue far from unit circle (|λ| = {:.6})",
                norm
            )));
        }
        lam /= cr(norm);
        values.push(lam);
    }

    // Sort by angle for reproducible output.
    let mut order: Vec<usize> = (0..n).collect();
    let angles: Vec<f64> = values.iter().map(|&v| angle_of(v)).collect();
    order.sort_by(|&i, &j| angles[i].partial_cmp(&angles[j]).unwrap());
    let values: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let cols: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors.col(i)).collect();
    let mut vectors = Matrix::from_cols(&cols);
    canonicalize_column_phases(&mut vectors);

    // Residual audit on every pair, degenerate spectra included.
    for (j, &lam) in values.iter().enumerate() {
        let vj = vectors.col(j);
        let uv = u.apply(&vj);
        let r = vec_norm(
            &uv.iter()
                .zip(vj.iter())
                .map(|(a, b)| a - b * lam)
                .collect::<Vec<_>>(),
        );
        if r > tol.eig_residual {
            return Err(Error::Numerical(format!(
                "unitary eigen residual {:.3e} exceeds {:.1e}",
                r, tol.eig_residual
            )));
        }
    }
    if vectors.unitarity_error() > tol.unitarity {
        return Err(Error::Numerical(format!(
            "unitary eigenvector matrix not unitary ({:.3e})",
            vectors.unitarity_error()
        )));
    }
    Ok(Spectrum { values, vectors })
}

/// `e^{iH}` for Hermitian `H`, via `V e^{iΛ} V†`.
pub fn exp_i_hermitian(h: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let spec = eig_hermitian(h, tol)?;
    let phases: Vec<Complex64> = spec
        .values
        .iter()
        .map(|&lam| Complex64::from_polar(1.0, lam))
        .collect();
    let d = Matrix::diagonal(&phases);
    let out = spec.vectors.matmul(&d).matmul(&spec.vectors.adjoint());
    let err = out.unitarity_error();
    if err > tol.unitarity {
        return Err(Error::Numerical(format!(
            "matrix exponential lost unitarity ({:.3e})",
            err
        )));
    }
    if !out.all_finite() {
        return Err(Error::Numerical("non-finite exponential".into()));
    }
    Ok(out)
}

// Real symmetric Jacobi, used by the canonical two-qubit decomposition where
// genuinely real orthogonal eigenvector matrices are required.

pub fn jacobi_real_symmetric(m: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for i in 0..n {
        for j in 0..n {
            let v = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = v;
        }
    }
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let fro: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let stop = 1e-15 * (1.0 + fro);
    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[p][q];
                if b.abs() <= stop / (n * n) as f64 {
                    continue;
                }
                let theta = 0.5 * (-2.0 * b).atan2(a[p][p] - a[q][q]);
                let (s, c) = theta.sin_cos();
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    (values, v)
}
