//! Canonical (Cartan) decomposition of two-qubit gates:
//! `U = g · (U1 ⊗ U2) · exp(i(hx XX + hy YY + hz ZZ)) · (U3 ⊗ U4)`
//! with the interaction vector canonicalised into the Weyl chamber
//! `π/4 ≥ hx ≥ hy ≥ |hz|`.
//!
//! Route: conjugate into the magic basis, diagonalise the symmetric unitary
//! `UᵀU` through its commuting real and imaginary parts, extract quarter
//! phases after factoring the determinant, then canonicalise by π/2 shifts,
//! pair sign flips and axis swaps with the local factors updated in step.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gateclass::extract_product;
use crate::linalg::eig::{cluster_sorted, jacobi_real_symmetric};
use crate::linalg::matrix::{c, cr, Matrix, I, ZERO};
use crate::linalg::structure::PartyStructure;
use crate::linalg::unitary::{gates, UnitaryGate};
use crate::tol::Tolerances;

/// The canonical decomposition of a two-qubit gate.
#[derive(Debug, Clone)]
pub struct KakDecomposition {
    /// Unit-modulus scalar in front of the product.
    pub global_phase: Complex64,
    /// Local pair applied after the interaction (U1, U2).
    pub locals_after: (Matrix, Matrix),
    /// Local pair applied before the interaction (U3, U4).
    pub locals_before: (Matrix, Matrix),
    /// Interaction vector (hx, hy, hz) in the Weyl chamber.
    pub canonical: [f64; 3],
}

impl KakDecomposition {
    pub fn core(&self) -> Matrix {
        gates::canonical_core(self.canonical[0], self.canonical[1], self.canonical[2])
    }

    pub fn reconstruct(&self) -> Matrix {
        let left = self.locals_after.0.kron(&self.locals_after.1);
        let right = self.locals_before.0.kron(&self.locals_before.1);
        left.matmul(&self.core())
            .matmul(&right)
            .scale(self.global_phase)
    }
}

/// Magic (Bell, phase-adjusted) basis: conjugation maps SU(2)⊗SU(2) onto
/// SO(4) and the canonical interaction onto a diagonal.
fn magic_basis() -> Matrix {
    let r = 1.0 / 2.0f64.sqrt();
    Matrix::from_rows(vec![
        vec![cr(r), I * r, ZERO, ZERO],
        vec![ZERO, ZERO, I * r, cr(r)],
        vec![ZERO, ZERO, I * r, cr(-r)],
        vec![cr(r), -I * r, ZERO, ZERO],
    ])
}

fn real_part_grid(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.at(i, j).re).collect())
        .collect()
}

fn imag_part_grid(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.at(i, j).im).collect())
        .collect()
}

fn grid_to_matrix(g: &[Vec<f64>]) -> Matrix {
    Matrix::from_fn(g.len(), g[0].len(), |i, j| cr(g[i][j]))
}

fn det4_real(o: &[Vec<f64>]) -> f64 {
    grid_to_matrix(o).determinant().re
}

/// Simultaneously diagonalises the commuting real symmetric parts of a
/// symmetric unitary `P = X + iY`, returning a real orthogonal matrix with
/// determinant +1.
fn orthogonal_diagonalizer(p: &Matrix, degeneracy: f64) -> Result<Vec<Vec<f64>>> {
    let n = p.rows();
    let x = real_part_grid(p);
    let y = imag_part_grid(p);
    let (vals, mut o) = jacobi_real_symmetric(&x);
    // Sort ascending by eigenvalue of the real part.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let o_cols: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| o[i][j]).collect())
        .collect();
    for (j, col) in o_cols.iter().enumerate() {
        for i in 0..n {
            o[i][j] = col[i];
        }
    }
    // Resolve degenerate clusters of X with Y.
    for (lo, hi) in cluster_sorted(&vals, degeneracy) {
        let m = hi - lo;
        if m < 2 {
            continue;
        }
        let mut block = vec![vec![0.0; m]; m];
        for (bi, jb) in (lo..hi).enumerate() {
            for (bj, kb) in (lo..hi).enumerate() {
                let mut acc = 0.0;
                for r in 0..n {
                    for s in 0..n {
                        acc += o[r][jb] * y[r][s] * o[s][kb];
                    }
                }
                block[bi][bj] = acc;
            }
        }
        let (bvals, bvecs) = jacobi_real_symmetric(&block);
        let mut border: Vec<usize> = (0..m).collect();
        border.sort_by(|&i, &j| bvals[i].partial_cmp(&bvals[j]).unwrap());
        let mut refined = vec![vec![0.0; m]; n];
        for (slot, &bcol) in border.iter().enumerate() {
            for i in 0..n {
                let mut acc = 0.0;
                for (bi, jb) in (lo..hi).enumerate() {
                    acc += o[i][jb] * bvecs[bi][bcol];
                }
                refined[i][slot] = acc;
            }
        }
        for (slot, jb) in (lo..hi).enumerate() {
            for i in 0..n {
                o[i][jb] = refined[i][slot];
            }
        }
    }
    if det4_real(&o) < 0.0 {
        for row in o.iter_mut() {
            row[n - 1] = -row[n - 1];
        }
    }
    Ok(o)
}

/// Single-qubit rotation `exp(-i(π/4)·P_axis)`, the Clifford that swaps the
/// other two interaction axes under two-sided conjugation.
fn quarter_rotation(axis: usize) -> Matrix {
    let p = match axis {
        0 => gates::pauli_x(),
        1 => gates::pauli_y(),
        _ => gates::pauli_z(),
    };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // exp(-iθP/2) with θ = π/2: cos(π/4)I − i sin(π/4)P
    let id = Matrix::identity(2);
    &id.scale(cr(r)) + &p.scale(c(0.0, -r))
}

fn pauli(axis: usize) -> Matrix {
    match axis {
        0 => gates::pauli_x(),
        1 => gates::pauli_y(),
        _ => gates::pauli_z(),
    }
}

/// Working state of the canonicalisation moves; every move preserves
/// `g · (l1 ⊗ l2) · core(h) · (r1 ⊗ r2)`.
struct Moves {
    g: Complex64,
    l1: Matrix,
    l2: Matrix,
    h: [f64; 3],
    r1: Matrix,
    r2: Matrix,
}

impl Moves {
    /// h[k] += steps·π/2, compensated through the left locals and phase.
    fn shift(&mut self, k: usize, steps: i32) {
        if steps == 0 {
            return;
        }
        let p = pauli(k);
        for _ in 0..steps.unsigned_abs() {
            self.l1 = self.l1.matmul(&p);
            self.l2 = self.l2.matmul(&p);
            if steps > 0 {
                self.h[k] += FRAC_PI_2;
                self.g *= c(0.0, -1.0);
            } else {
                self.h[k] -= FRAC_PI_2;
                self.g *= c(0.0, 1.0);
            }
        }
    }

    /// Flips the signs of h[j] and h[k] by conjugating with the third Pauli
    /// on the first factor.
    fn negate(&mut self, j: usize, k: usize) {
        let l = 3 - j - k;
        let p = pauli(l);
        self.l1 = self.l1.matmul(&p);
        self.r1 = p.matmul(&self.r1);
        self.h[j] = -self.h[j];
        self.h[k] = -self.h[k];
    }

    /// Swaps h[j] and h[k] by conjugating both factors with the quarter
    /// rotation about the third axis.
    fn swap(&mut self, j: usize, k: usize) {
        let l = 3 - j - k;
        let cq = quarter_rotation(l);
        let cq_dag = cq.adjoint();
        self.l1 = self.l1.matmul(&cq_dag);
        self.l2 = self.l2.matmul(&cq_dag);
        self.r1 = cq.matmul(&self.r1);
        self.r2 = cq.matmul(&self.r2);
        self.h.swap(j, k);
    }
}

/// Canonical two-qubit decomposition with reconstruction verified at the
/// stated tolerance.
pub fn kak_decompose(u: &UnitaryGate, tol: &Tolerances) -> Result<KakDecomposition> {
    if u.structure().dims() != [2, 2] || u.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "canonical decomposition expects a 4x4 gate on two qubits, got dims {:?}",
            u.structure().dims()
        )));
    }
    let m = magic_basis();
    let m_dag = m.adjoint();

    let det = u.matrix().determinant();
    let alpha = det.arg() / 4.0;
    let mut g = Complex64::from_polar(1.0, alpha);
    let up = u.matrix().scale(Complex64::from_polar(1.0, -alpha));

    let um = m_dag.matmul(&up).matmul(&m);
    let p = um.transpose().matmul(&um);

    let o = orthogonal_diagonalizer(&p, tol.degeneracy)?;
    let o_c = grid_to_matrix(&o);
    let d_diag = o_c.transpose().matmul(&p).matmul(&o_c);
    let mut theta = [0.0f64; 4];
    for j in 0..4 {
        let dj = d_diag.at(j, j);
        if (dj.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Numerical(format!(
                "symmetric factor eigenvalue off the unit circle (|d| = {:.6})",
                dj.norm()
            )));
        }
        theta[j] = dj.arg() / 2.0;
    }
    // Σθ must vanish so that det(D^{1/2}) = 1 and both orthogonal factors
    // land in SO(4).
    let s: f64 = theta.iter().sum();
    let k = (s / std::f64::consts::PI).round();
    theta[0] -= k * std::f64::consts::PI;

    let d_sqrt_inv = Matrix::diagonal(
        &theta
            .iter()
            .map(|&t| Complex64::from_polar(1.0, -t))
            .collect::<Vec<_>>(),
    );
    let k1m = um.matmul(&o_c).matmul(&d_sqrt_inv);
    let k2m = o_c.transpose();

    // Back out of the magic basis and split the orthogonal factors.
    let left = m.matmul(&k1m).matmul(&m_dag);
    let right = m.matmul(&k2m).matmul(&m_dag);
    let qubits = PartyStructure::qubits(2);
    let (l1, l2, el) = extract_product(&left, &qubits, tol)?;
    let (r1, r2, er) = extract_product(&right, &qubits, tol)?;
    if el > 1e-7 || er > 1e-7 {
        return Err(Error::Numerical(format!(
            "orthogonal factor failed to split into locals ({:.3e}, {:.3e})",
            el, er
        )));
    }

    // Interaction angles from the quarter phases at the magic positions.
    let hx = (theta[0] + theta[2]) / 2.0;
    let hy = (theta[1] + theta[2]) / 2.0;
    let hz = (theta[0] + theta[1]) / 2.0;

    let mut mv = Moves {
        g,
        l1,
        l2,
        h: [hx, hy, hz],
        r1,
        r2,
    };

    // Canonicalise into the Weyl chamber.
    for _pass in 0..8 {
        // Bring every component into (−π/4, π/4].
        for k in 0..3 {
            let steps = ((mv.h[k] + FRAC_PI_4) / FRAC_PI_2).ceil() - 1.0;
            mv.shift(k, -(steps as i32));
        }
        // Sort by |h| descending.
        for (j, k) in [(0, 1), (1, 2), (0, 1)] {
            if mv.h[j].abs() < mv.h[k].abs() - 1e-15 {
                mv.swap(j, k);
            }
        }
        // Make the two leading components nonnegative.
        if mv.h[0] < -1e-15 {
            mv.negate(0, 2);
        }
        if mv.h[1] < -1e-15 {
            mv.negate(1, 2);
        }
        // Boundary symmetry: at hx = π/4 the sign of hz is a gauge choice.
        if mv.h[0] > FRAC_PI_4 - 1e-10 && mv.h[2] < -1e-12 {
            mv.negate(0, 2);
            mv.shift(0, 1);
            continue;
        }
        let in_chamber = mv.h[0] <= FRAC_PI_4 + 1e-12
            && mv.h[0] >= mv.h[1] - 1e-12
            && mv.h[1] >= mv.h[2].abs() - 1e-12
            && mv.h[1] >= -1e-12;
        if in_chamber {
            break;
        }
    }
    g = mv.g;

    // Deterministic local phases: largest-modulus entry of each factor real
    // positive, with the collected phases folded into the global phase.
    let mut locals = [mv.l1, mv.l2, mv.r1, mv.r2];
    for loc in locals.iter_mut() {
        let mut best = (0usize, 0usize, 0.0f64);
        for i in 0..2 {
            for j in 0..2 {
                let v = loc.at(i, j).norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        let phase = loc.at(best.0, best.1) / cr(best.2);
        *loc = loc.scale(phase.conj());
        g *= phase;
    }
    let [l1, l2, r1, r2] = locals;
    g /= cr(g.norm());

    let out = KakDecomposition {
        global_phase: g,
        locals_after: (l1, l2),
        locals_before: (r1, r2),
        canonical: mv.h,
    };

    let h = out.canonical;
    let weyl_ok = h[0] <= FRAC_PI_4 + 1e-9
        && h[0] >= h[1] - 1e-12
        && h[1] >= h[2].abs() - 1e-12
        && h[1] >= -1e-12;
    if !weyl_ok {
        return Err(Error::Numerical(format!(
            "canonical vector {:?} escaped the Weyl chamber",
            h
        )));
    }
    let err = out.reconstruct().max_abs_diff(u.matrix());
    if err > tol.kak_recon {
        return Err(Error::Numerical(format!(
            "canonical reconstruction error {:.3e} exceeds {:.1e}",
            err, tol.kak_recon
        )));
    }
    Ok(out)
}

/// Interaction vector alone; invariant under `U → (A⊗B)·U·(C⊗D)`.
pub fn canonical_class(u: &UnitaryGate, tol: &Tolerances) -> Result<[f64; 3]> {
    Ok(kak_decompose(u, tol)?.canonical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_unitary;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn two_qubit(m: Matrix) -> UnitaryGate {
        UnitaryGate::new(m, PartyStructure::qubits(2), &tol()).unwrap()
    }

    #[test]
    fn magic_basis_is_unitary_and_maps_locals_to_so4() {
        let m = magic_basis();
        assert!(m.unitarity_error() < 1e-15);
        for seed in 0..10 {
            let mut a = haar_random_unitary(2, 400 + seed).matrix().clone();
            let mut b = haar_random_unitary(2, 500 + seed).matrix().clone();
            // scale to SU(2)
            for f in [&mut a, &mut b] {
                let det = f.determinant();
                *f = f.scale(Complex64::from_polar(1.0, -det.arg() / 2.0));
            }
            let local = a.kron(&b);
            let conj = m.adjoint().matmul(&local).matmul(&m);
            let imag_max = (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| conj.at(i, j).im.abs())
                .fold(0.0f64, f64::max);
            assert!(imag_max < 1e-10, "seed {seed}: imag {imag_max}");
        }
    }

    #[test]
    fn identity_has_zero_interaction() {
        let d = kak_decompose(&two_qubit(Matrix::identity(4)), &tol()).unwrap();
        for k in 0..3 {
            assert!(d.canonical[k].abs() < 1e-9);
        }
    }

    #[test]
    fn cnot_canonical_vector() {
        let d = kak_decompose(&two_qubit(gates::cnot()), &tol()).unwrap();
        assert!((d.canonical[0] - FRAC_PI_4).abs() < 1e-9, "{:?}", d.canonical);
        assert!(d.canonical[1].abs() < 1e-9);
        assert!(d.canonical[2].abs() < 1e-9);
        assert!(d.reconstruct().max_abs_diff(&gates::cnot()) < 1e-9);
    }

    #[test]
    fn swap_canonical_vector() {
        let d = kak_decompose(&two_qubit(gates::swap(2)), &tol()).unwrap();
        for k in 0..3 {
            assert!((d.canonical[k] - FRAC_PI_4).abs() < 1e-9, "{:?}", d.canonical);
        }
    }

    #[test]
    fn already_canonical_core_is_recovered() {
        let core = gates::canonical_core(0.3, 0.2, 0.1);
        let d = kak_decompose(&two_qubit(core), &tol()).unwrap();
        assert!((d.canonical[0] - 0.3).abs() < 1e-9, "{:?}", d.canonical);
        assert!((d.canonical[1] - 0.2).abs() < 1e-9);
        assert!((d.canonical[2] - 0.1).abs() < 1e-9);
    }

    #[test]
    fn haar_reconstruction_and_weyl() {
        let t = tol();
        for seed in 0..50 {
            let u = UnitaryGate::new(
                haar_random_unitary(4, 1000 + seed).matrix().clone(),
                PartyStructure::qubits(2),
                &t,
            )
            .unwrap();
            let d = kak_decompose(&u, &t).unwrap();
            let err = d.reconstruct().max_abs_diff(u.matrix());
            assert!(err < 1e-9, "seed {seed}: {err:.3e}");
            let h = d.canonical;
            assert!(FRAC_PI_4 + 1e-9 >= h[0], "seed {seed}: {h:?}");
            assert!(h[0] >= h[1] - 1e-12 && h[1] >= h[2].abs() - 1e-12);
        }
    }

    #[test]
    fn canonical_class_invariant_under_local_dressing() {
        let t = tol();
        for seed in 0..30 {
            let base = UnitaryGate::new(
                haar_random_unitary(4, 2000 + seed).matrix().clone(),
                PartyStructure::qubits(2),
                &t,
            )
            .unwrap();
            let h0 = canonical_class(&base, &t).unwrap();
            let a = haar_random_unitary(2, 3000 + seed).matrix().clone();
            let b = haar_random_unitary(2, 4000 + seed).matrix().clone();
            let cc = haar_random_unitary(2, 5000 + seed).matrix().clone();
            let dd = haar_random_unitary(2, 6000 + seed).matrix().clone();
            let dressed = a
                .kron(&b)
                .matmul(base.matrix())
                .matmul(&cc.kron(&dd));
            let dressed = two_qubit(dressed);
            let h1 = canonical_class(&dressed, &t).unwrap();
            for k in 0..3 {
                assert!(
                    (h0[k] - h1[k]).abs() < 1e-8,
                    "seed {seed}: {h0:?} vs {h1:?}"
                );
            }
        }
    }

    #[test]
    fn swap_conjugation_preserves_class() {
        let t = tol();
        let u = two_qubit(gates::canonical_core(0.31, 0.17, -0.05));
        let h0 = canonical_class(&u, &t).unwrap();
        let sw = gates::swap(2);
        let conj = two_qubit(sw.matmul(u.matrix()).matmul(&sw));
        let h1 = canonical_class(&conj, &t).unwrap();
        for k in 0..3 {
            assert!((h0[k] - h1[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn conjugation_rounds_isolate_one_axis() {
        // For A = σz⊗I: A·exp(iH)·A†·exp(iH) = exp(2i·hz·ZZ); the three
        // interaction terms commute.
        let mut x = 0.17f64;
        let mut next = || {
            x = (x * 419.0 + 0.3377).fract();
            0.6 * (x - 0.5)
        };
        for _ in 0..10 {
            let (hx, hy, hz) = (next(), next(), next());
            let core = gates::canonical_core(hx, hy, hz);
            let a = gates::pauli_z().kron(&Matrix::identity(2));
            let gd = a.matmul(&core).matmul(&a.adjoint()).matmul(&core);
            let expect = gates::canonical_core(0.0, 0.0, 2.0 * hz);
            assert!(gd.max_abs_diff(&expect) < 1e-12);
            // σy⊗I isolates the y axis the same way
            let ay = gates::pauli_y().kron(&Matrix::identity(2));
            let gy = ay.matmul(&core).matmul(&ay.adjoint()).matmul(&core);
            let expect_y = gates::canonical_core(0.0, 2.0 * hy, 0.0);
            assert!(gy.max_abs_diff(&expect_y) < 1e-12);
        }
    }

    #[test]
    fn wrong_dims_rejected() {
        let t = tol();
        let u = UnitaryGate::new(Matrix::identity(4), PartyStructure::single(4), &t).unwrap();
        assert!(kak_decompose(&u, &t).is_err());
    }
}
