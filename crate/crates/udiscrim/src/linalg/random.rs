//! Seeded Haar-random unitaries for reproducible test-case generation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::matrix::{cr, vec_inner, vec_norm, vec_scale, vec_sub, Matrix};

/// One standard complex Gaussian sample (Box–Muller; platform-stable).
fn gaussian_c(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let phi = std::f64::consts::TAU * u2;
    // Real and imaginary parts each N(0, 1/2) — the overall scale cancels in
    // the orthonormalisation.
    Complex64::from_polar(r, phi)
}

/// Haar-distributed unitary, deterministic in the seed.
///
/// Orthonormalises a seeded complex-Gaussian matrix; plain Gram–Schmidt makes
/// the triangular factor's diagonal real positive, which fixes the phase
/// convention.
pub fn haar_random_matrix(dim: usize, seed: u64) -> Matrix {
    assert!(dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = Matrix::from_fn(dim, dim, |_, _| gaussian_c(&mut rng));
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = z.col(j);
        // Two passes keep orthogonality at machine precision.
        for _ in 0..2 {
            for u in &cols {
                let overlap = vec_inner(u, &v);
                v = vec_sub(&v, &vec_scale(u, overlap));
            }
        }
        let n = vec_norm(&v);
        cols.push(vec_scale(&v, cr(1.0 / n)));
    }
    Matrix::from_cols(&cols)
}
