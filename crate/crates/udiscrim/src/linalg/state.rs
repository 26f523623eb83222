//! Pure states and density matrices over a party structure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{cr, vec_inner, vec_kron, vec_norm, Matrix, ONE, ZERO};
use crate::linalg::structure::{ravel, unravel, PartyStructure};
use crate::tol::Tolerances;

/// Unit-norm amplitude vector with a party structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
    structure: PartyStructure,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>, structure: PartyStructure) -> Result<Self> {
        if amps.len() != structure.total_dim() {
            return Err(Error::InvalidState(format!(
                "amplitude length {} does not match dimension {}",
                amps.len(),
                structure.total_dim()
            )));
        }
        let n = vec_norm(&amps);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("norm {} is not 1", n)));
        }
        Ok(PureState { amps, structure })
    }

    /// Normalises and wraps; errors on (near-)zero vectors.
    pub fn normalized(amps: Vec<Complex64>, structure: PartyStructure) -> Result<Self> {
        let n = vec_norm(&amps);
        if n < 1e-12 {
            return Err(Error::InvalidState("cannot normalise zero vector".into()));
        }
        let amps = amps.into_iter().map(|a| a / cr(n)).collect();
        PureState::new(amps, structure)
    }

    pub fn basis(structure: PartyStructure, index: usize) -> Self {
        let mut amps = vec![ZERO; structure.total_dim()];
        amps[index] = ONE;
        PureState { amps, structure }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn structure(&self) -> &PartyStructure {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        vec_inner(&self.amps, &other.amps)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amps: vec_kron(&self.amps, &other.amps),
            structure: self.structure.concat(&other.structure),
        }
    }

    /// Applies a full-dimension operator.
    pub fn apply(&self, op: &Matrix) -> PureState {
        assert_eq!(op.cols(), self.amps.len());
        PureState {
            amps: op.apply(&self.amps),
            structure: self.structure.clone(),
        }
    }

    /// Applies an operator acting on the listed parties (identity elsewhere).
    /// `parties` gives the operator's factor order.
    pub fn apply_on_parties(&self, op: &Matrix, parties: &[usize]) -> PureState {
        let dims = self.structure.dims();
        let sub_dims = self.structure.subset_dims(parties);
        let d_sub: usize = sub_dims.iter().product();
        assert_eq!(op.rows(), d_sub, "operator does not fit selected parties");
        assert_eq!(op.cols(), d_sub);

        // Flat-index strides per party, most significant first.
        let n = dims.len();
        let mut strides = vec![1usize; n];
        for p in (0..n - 1).rev() {
            strides[p] = strides[p + 1] * dims[p + 1];
        }
        // Offset of each sub-space basis state within the full index.
        let mut sub_offsets = vec![0usize; d_sub];
        for (s, off) in sub_offsets.iter_mut().enumerate() {
            let digits = unravel(&sub_dims, s);
            *off = digits
                .iter()
                .zip(parties.iter())
                .map(|(&x, &p)| x * strides[p])
                .sum();
        }
        // Enumerate the complementary factors by carry propagation.
        let rest: Vec<usize> = (0..n).filter(|p| !parties.contains(p)).collect();
        let d_rest: usize = rest.iter().map(|&p| dims[p]).product();
        let mut rest_digits = vec![0usize; rest.len()];
        let mut base = 0usize;
        let mut out = vec![ZERO; self.amps.len()];
        let mut column = vec![ZERO; d_sub];
        for _ in 0..d_rest {
            for (s, &off) in sub_offsets.iter().enumerate() {
                column[s] = self.amps[base + off];
            }
            for (row, &off) in sub_offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (col, &amp) in column.iter().enumerate() {
                    if amp != ZERO {
                        acc += op.at(row, col) * amp;
                    }
                }
                out[base + off] = acc;
            }
            // increment the rest multi-index
            for k in (0..rest.len()).rev() {
                let p = rest[k];
                rest_digits[k] += 1;
                base += strides[p];
                if rest_digits[k] < dims[p] {
                    break;
                }
                base -= strides[p] * dims[p];
                rest_digits[k] = 0;
            }
        }
        PureState {
            amps: out,
            structure: self.structure.clone(),
        }
    }

    /// Reorders parties; `order[k]` is the original party placed at slot `k`.
    pub fn permute_parties(&self, order: &[usize]) -> PureState {
        assert_eq!(order.len(), self.structure.n_parties());
        let dims = self.structure.dims();
        let n = dims.len();
        let new_dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
        // stride of original party p in the NEW flat index
        let mut new_strides = vec![1usize; n];
        for k in (0..n - 1).rev() {
            new_strides[k] = new_strides[k + 1] * new_dims[k + 1];
        }
        let mut target_stride = vec![0usize; n];
        for (k, &p) in order.iter().enumerate() {
            target_stride[p] = new_strides[k];
        }
        let mut out = vec![ZERO; self.amps.len()];
        for (idx, &amp) in self.amps.iter().enumerate() {
            let mut rem = idx;
            let mut new_idx = 0usize;
            for p in (0..n).rev() {
                new_idx += (rem % dims[p]) * target_stride[p];
                rem /= dims[p];
            }
            out[new_idx] = amp;
        }
        PureState {
            amps: out,
            structure: PartyStructure::new(new_dims).expect("valid permuted structure"),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        let n = self.amps.len();
        let mat = Matrix::from_fn(n, n, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix {
            mat,
            structure: self.structure.clone(),
        }
    }
}

/// Hermitian, positive, unit-trace operator with a party structure.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: Matrix,
    structure: PartyStructure,
}

impl DensityMatrix {
    pub fn new(mat: Matrix, structure: PartyStructure, tol: &Tolerances) -> Result<Self> {
        if mat.rows() != structure.total_dim() || !mat.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix shape {}x{} does not match dimension {}",
                mat.rows(),
                mat.cols(),
                structure.total_dim()
            )));
        }
        mat.check_hermitian(tol.hermiticity)
            .map_err(|_| Error::InvalidState("density matrix not Hermitian".into()))?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {} is not 1", tr)));
        }
        let spec = crate::linalg::eig::eig_hermitian(&mat, tol)?;
        if spec.values.iter().any(|&v| v < -1e-10) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                spec.values[0]
            )));
        }
        Ok(DensityMatrix { mat, structure })
    }

    pub fn maximally_mixed(structure: PartyStructure) -> Self {
        let d = structure.total_dim();
        DensityMatrix {
            mat: Matrix::identity(d).scale(cr(1.0 / d as f64)),
            structure,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn structure(&self) -> &PartyStructure {
        &self.structure
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.kron(&other.mat),
            structure: self.structure.concat(&other.structure),
        }
    }

    /// Traces out every party not in `keep`; kept parties stay in their
    /// original relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.structure.check_subset(keep)?;
        let dims = self.structure.dims();
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let rest: Vec<usize> = (0..dims.len())
            .filter(|p| !keep_sorted.contains(p))
            .collect();
        let keep_dims: Vec<usize> = keep_sorted.iter().map(|&p| dims[p]).collect();
        let rest_dims: Vec<usize> = rest.iter().map(|&p| dims[p]).collect();
        let dk: usize = keep_dims.iter().product();
        let dr: usize = rest_dims.iter().product();

        let mut out = Matrix::zeros(dk, dk);
        let mut full_row = vec![0usize; dims.len()];
        let mut full_col = vec![0usize; dims.len()];
        for ik in 0..dk {
            let ikd = unravel(&keep_dims, ik);
            for jk in 0..dk {
                let jkd = unravel(&keep_dims, jk);
                let mut acc = ZERO;
                for r in 0..dr {
                    let rd = unravel(&rest_dims, r);
                    for (pos, &p) in keep_sorted.iter().enumerate() {
                        full_row[p] = ikd[pos];
                        full_col[p] = jkd[pos];
                    }
                    for (pos, &p) in rest.iter().enumerate() {
                        full_row[p] = rd[pos];
                        full_col[p] = rd[pos];
                    }
                    acc += self.mat.at(ravel(dims, &full_row), ravel(dims, &full_col));
                }
                out.set(ik, jk, acc);
            }
        }
        Ok(DensityMatrix {
            mat: out,
            structure: PartyStructure::new(keep_dims)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::c;

    #[test]
    fn partial_trace_of_product() {
        let s = PartyStructure::new(vec![2, 2]).unwrap();
        let rho_a = Matrix::from_rows(vec![
            vec![cr(0.7), c(0.1, 0.2)],
            vec![c(0.1, -0.2), cr(0.3)],
        ]);
        let rho_b = Matrix::from_rows(vec![
            vec![cr(0.4), c(0.0, -0.1)],
            vec![c(0.0, 0.1), cr(0.6)],
        ]);
        let rho = DensityMatrix::new(rho_a.kron(&rho_b), s, &Tolerances::default()).unwrap();
        let got_a = rho.partial_trace(&[0]).unwrap();
        assert!(got_a.matrix().max_abs_diff(&rho_a) < 1e-12);
        let got_b = rho.partial_trace(&[1]).unwrap();
        assert!(got_b.matrix().max_abs_diff(&rho_b) < 1e-12);
        // keeping everything is the identity operation
        let all = rho.partial_trace(&[0, 1]).unwrap();
        assert!(all.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn maximally_entangled_marginal() {
        let s = PartyStructure::new(vec![3, 3]).unwrap();
        let r = 1.0 / 3.0f64.sqrt();
        let mut amps = vec![ZERO; 9];
        for i in 0..3 {
            amps[i * 3 + i] = cr(r);
        }
        let phi = PureState::new(amps, s).unwrap();
        let marginal = phi.density().partial_trace(&[0]).unwrap();
        let expect = Matrix::identity(3).scale(cr(1.0 / 3.0));
        assert!(marginal.matrix().max_abs_diff(&expect) < 1e-12);
        let tr = marginal.matrix().trace();
        assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-12);
    }

    #[test]
    fn invalid_subset_rejected() {
        let s = PartyStructure::new(vec![2, 2]).unwrap();
        let rho = DensityMatrix::maximally_mixed(s);
        assert!(rho.partial_trace(&[2]).is_err());
        assert!(rho.partial_trace(&[]).is_err());
    }

    #[test]
    fn apply_on_parties_matches_kron() {
        let s = PartyStructure::new(vec![2, 3, 2]).unwrap();
        let mut x = 0.13f64;
        let mut next = || {
            x = (x * 777.7 + 0.111).fract();
            x - 0.5
        };
        let amps: Vec<Complex64> = (0..12).map(|_| c(next(), next())).collect();
        let psi = PureState::normalized(amps, s).unwrap();
        let op = Matrix::from_fn(4, 4, |_, _| c(next(), next()));
        // acting on parties (0, 2) with identity on 1, in two ways
        let via_parties = psi.apply_on_parties(&op, &[0, 2]);
        // permute to [0, 2, 1], apply op ⊗ I, permute back
        let p = psi.permute_parties(&[0, 2, 1]);
        let full = op.kron(&Matrix::identity(3));
        let applied = p.apply(&full);
        let back = applied.permute_parties(&[0, 2, 1]);
        assert!(vec_norm(&crate::linalg::matrix::vec_sub(
            via_parties.amps(),
            back.amps()
        )) < 1e-12);
    }

    #[test]
    fn permute_roundtrip() {
        let s = PartyStructure::new(vec![2, 3, 2]).unwrap();
        let amps: Vec<Complex64> = (0..12).map(|i| cr((i + 1) as f64)).collect();
        let psi = PureState {
            amps: amps.clone(),
            structure: s,
        };
        let fwd = psi.permute_parties(&[2, 0, 1]);
        // inverse permutation of [2,0,1] is [1,2,0]
        let back = fwd.permute_parties(&[1, 2, 0]);
        assert_eq!(back.amps(), psi.amps());
    }
}
