//! Numerical Lie-algebra closure: the real algebra generated by the local
//! algebra and its conjugation under a gate, closed under commutators with
//! Gram–Schmidt against the running span. The closure dimension and the
//! finest party partition whose product algebra contains it certify
//! (partition-)primitivity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gateclass::{schmidt_rank, GateClass};
use crate::linalg::matrix::{cr, Matrix, I, ZERO};
use crate::linalg::structure::{ravel, unravel, PartyStructure};
use crate::linalg::unitary::UnitaryGate;
use crate::tol::{Tolerances, CLOSURE_DIM_CAP};

/// Result of closing the algebra generated by local generators and their
/// image under the gate.
#[derive(Debug, Clone)]
pub struct LieClosureReport {
    /// Real dimension of the closure.
    pub closure_dimension: usize,
    /// Finest partition of the parties whose product algebra contains the
    /// closure.
    pub matched_partition: Vec<Vec<usize>>,
    /// Whether the closure saturates the product algebra of the matched
    /// partition.
    pub is_universal_on_partition_products: bool,
}

/// Anti-Hermitian basis of su(d): i·(symmetric), (antisymmetric) and
/// i·(diagonal traceless) elementary combinations.
fn su_antiherm_basis(d: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = Matrix::zeros(d, d);
            sym.set(j, k, I);
            sym.set(k, j, I);
            out.push(sym);
            let mut asym = Matrix::zeros(d, d);
            asym.set(j, k, cr(1.0));
            asym.set(k, j, cr(-1.0));
            out.push(asym);
        }
    }
    for l in 0..d - 1 {
        let mut diag = Matrix::zeros(d, d);
        diag.set(l, l, I);
        diag.set(l + 1, l + 1, -I);
        out.push(diag);
    }
    out
}

/// Embeds an operator on the listed parties into the full space, identity on
/// the rest. `parties` gives the operator's factor order.
pub fn embed_on_parties(op: &Matrix, parties: &[usize], structure: &PartyStructure) -> Matrix {
    let dims = structure.dims();
    let sub_dims: Vec<usize> = parties.iter().map(|&p| dims[p]).collect();
    let d_sub: usize = sub_dims.iter().product();
    assert_eq!(op.rows(), d_sub);
    let total = structure.total_dim();
    let mut out = Matrix::zeros(total, total);
    for row in 0..total {
        let rd = unravel(dims, row);
        let sub_row = ravel(
            &sub_dims,
            &parties.iter().map(|&p| rd[p]).collect::<Vec<_>>(),
        );
        for col in 0..d_sub {
            let cdigits = unravel(&sub_dims, col);
            let entry = op.at(sub_row, col);
            if entry == ZERO {
                continue;
            }
            let mut cd = rd.clone();
            for (k, &p) in parties.iter().enumerate() {
                cd[p] = cdigits[k];
            }
            let v = out.at(row, ravel(dims, &cd)) + entry;
            out.set(row, ravel(dims, &cd), v);
        }
    }
    out
}

/// Anti-Hermitian generators of the local group: su(d_p) per party,
/// identity-padded, plus the global phase generator i·I.
pub fn local_algebra_generators(structure: &PartyStructure) -> Vec<Matrix> {
    let mut out = Vec::new();
    for (p, &d) in structure.dims().iter().enumerate() {
        for g in su_antiherm_basis(d) {
            out.push(embed_on_parties(&g, &[p], structure));
        }
    }
    out.push(Matrix::identity(structure.total_dim()).scale(I));
    out
}

fn hs_inner_re(a: &Matrix, b: &Matrix) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data().iter()) {
        acc += x.conj() * y;
    }
    acc.re
}

/// Orthogonalises `m` against the basis (twice, for stability) and appends
/// the normalised remainder when it clears the threshold.
fn gram_schmidt_add(basis: &mut Vec<Matrix>, m: &Matrix, thresh: f64) -> bool {
    let mut r = m.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            let overlap = hs_inner_re(b, &r);
            if overlap != 0.0 {
                r = &r - &b.scale(cr(overlap));
            }
        }
    }
    let n = r.fro_norm();
    if n > thresh {
        basis.push(r.scale(cr(1.0 / n)));
        true
    } else {
        false
    }
}

fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    &a.matmul(b) - &b.matmul(a)
}

/// Closes a generating set under commutators. Stops when a full pass over
/// all pairs adds nothing above the residual threshold.
fn close_algebra(gens: &[Matrix], thresh: f64) -> Vec<Matrix> {
    let mut basis: Vec<Matrix> = Vec::new();
    for g in gens {
        gram_schmidt_add(&mut basis, g, thresh);
    }
    let dim_cap = gens
        .first()
        .map(|g| g.rows() * g.rows())
        .unwrap_or(0);
    loop {
        let len = basis.len();
        let mut added = false;
        'pairs: for i in 0..len {
            for j in i + 1..len {
                let c = commutator(&basis[i], &basis[j]);
                if gram_schmidt_add(&mut basis, &c, thresh) {
                    added = true;
                    if basis.len() >= dim_cap {
                        break 'pairs;
                    }
                }
            }
        }
        if !added || basis.len() >= dim_cap {
            break;
        }
    }
    basis
}

/// Enumerates set partitions of `{0, …, n−1}` via restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(rgs: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if rgs.len() == n {
            let blocks = max + 1;
            let mut partition = vec![Vec::new(); blocks];
            for (i, &b) in rgs.iter().enumerate() {
                partition[b].push(i);
            }
            out.push(partition);
            return;
        }
        for b in 0..=max + 1 {
            rgs.push(b);
            go(rgs, max.max(b), n, out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut rgs = vec![0usize];
    go(&mut rgs, 0, n, &mut out);
    out
}

/// Real dimension of the product algebra of a partition:
/// `Σ_blocks (d_b² − 1) + 1`.
fn product_algebra_dim(partition: &[Vec<usize>], structure: &PartyStructure) -> usize {
    let dims = structure.dims();
    partition
        .iter()
        .map(|block| {
            let d: usize = block.iter().map(|&p| dims[p]).product();
            d * d - 1
        })
        .sum::<usize>()
        + 1
}

/// Orthonormal basis of the product algebra of a partition.
fn product_algebra_basis(partition: &[Vec<usize>], structure: &PartyStructure) -> Vec<Matrix> {
    let dims = structure.dims();
    let mut basis: Vec<Matrix> = Vec::new();
    for block in partition {
        let d: usize = block.iter().map(|&p| dims[p]).product();
        for g in su_antiherm_basis(d) {
            let emb = embed_on_parties(&g, block, structure);
            gram_schmidt_add(&mut basis, &emb, 1e-12);
        }
    }
    let phase = Matrix::identity(structure.total_dim()).scale(I);
    gram_schmidt_add(&mut basis, &phase, 1e-12);
    basis
}

fn contained_in(elems: &[Matrix], subspace: &[Matrix], thresh: f64) -> bool {
    for e in elems {
        let mut r = e.clone();
        for b in subspace {
            let overlap = hs_inner_re(b, &r);
            r = &r - &b.scale(cr(overlap));
        }
        if r.fro_norm() > thresh {
            return false;
        }
    }
    true
}

/// Blockwise intersection (meet) of two partitions.
fn partition_meet(a: &[Vec<usize>], b: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let mut label_a = vec![0usize; n];
    let mut label_b = vec![0usize; n];
    for (i, block) in a.iter().enumerate() {
        for &p in block {
            label_a[p] = i;
        }
    }
    for (i, block) in b.iter().enumerate() {
        for &p in block {
            label_b[p] = i;
        }
    }
    let mut blocks: Vec<((usize, usize), Vec<usize>)> = Vec::new();
    for p in 0..n {
        let key = (label_a[p], label_b[p]);
        match blocks.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(p),
            None => blocks.push((key, vec![p])),
        }
    }
    let mut out: Vec<Vec<usize>> = blocks.into_iter().map(|(_, v)| v).collect();
    out.sort_by_key(|b| b[0]);
    out
}

/// Finest partition whose product algebra contains every basis element.
fn match_partition(
    basis: &[Matrix],
    structure: &PartyStructure,
    tol: &Tolerances,
) -> Result<Vec<Vec<usize>>> {
    let n = structure.n_parties();
    let mut passing: Vec<Vec<Vec<usize>>> = Vec::new();
    for partition in set_partitions(n) {
        let sub = product_algebra_basis(&partition, structure);
        if contained_in(basis, &sub, tol.closure_residual) {
            passing.push(partition);
        }
    }
    if passing.is_empty() {
        return Err(Error::Numerical(
            "closure not contained in any product algebra, including the trivial one".into(),
        ));
    }
    let mut meet = passing[0].clone();
    for p in &passing[1..] {
        meet = partition_meet(&meet, p, n);
    }
    // The meet of passing partitions passes again for these block-local
    // subspaces; verify rather than assume.
    let sub = product_algebra_basis(&meet, structure);
    if contained_in(basis, &sub, tol.closure_residual) {
        Ok(meet)
    } else {
        passing.sort_by_key(|p| std::cmp::Reverse(p.len()));
        Ok(passing.remove(0))
    }
}

fn conjugate_all(u: &Matrix, udag: &Matrix, elems: &[Matrix]) -> Vec<Matrix> {
    elems
        .iter()
        .map(|e| u.matmul(e).matmul(udag))
        .collect()
}

/// Closure of the algebra generated by the local algebra `h` and `U h U†`.
pub fn lie_closure(u: &UnitaryGate, tol: &Tolerances) -> Result<LieClosureReport> {
    if u.dim() > CLOSURE_DIM_CAP {
        return Err(Error::DimensionCap(u.dim(), CLOSURE_DIM_CAP));
    }
    let structure = u.structure();
    let local = local_algebra_generators(structure);
    let udag = u.matrix().adjoint();
    let mut gens = local.clone();
    gens.extend(conjugate_all(u.matrix(), &udag, &local));
    let basis = close_algebra(&gens, tol.closure_residual);
    let matched_partition = match_partition(&basis, structure, tol)?;
    let full = product_algebra_dim(&matched_partition, structure);
    Ok(LieClosureReport {
        closure_dimension: basis.len(),
        matched_partition,
        is_universal_on_partition_products: basis.len() == full,
    })
}

/// Closure iterated to the `U`-stable fixpoint, as the multipartite
/// classification requires.
fn lie_closure_fixpoint(u: &UnitaryGate, tol: &Tolerances) -> Result<Vec<Matrix>> {
    let structure = u.structure();
    let local = local_algebra_generators(structure);
    let udag = u.matrix().adjoint();
    let mut gens = local.clone();
    gens.extend(conjugate_all(u.matrix(), &udag, &local));
    let mut basis = close_algebra(&gens, tol.closure_residual);
    for _ in 0..structure.n_parties() + 2 {
        let before = basis.len();
        let mut extended = basis.clone();
        extended.extend(conjugate_all(u.matrix(), &udag, &basis));
        basis = close_algebra(&extended, tol.closure_residual);
        if basis.len() == before {
            break;
        }
    }
    Ok(basis)
}

/// All party permutations compatible with a partition: blocks map to blocks
/// of identical per-party dimension sequences.
fn candidate_permutations(
    partition: &[Vec<usize>],
    structure: &PartyStructure,
) -> Vec<Vec<usize>> {
    let dims = structure.dims();
    let n_blocks = partition.len();
    let block_sig: Vec<Vec<usize>> = partition
        .iter()
        .map(|b| b.iter().map(|&p| dims[p]).collect())
        .collect();
    // Enumerate block bijections by backtracking.
    fn go(
        pos: usize,
        used: &mut Vec<bool>,
        sig: &[Vec<usize>],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == sig.len() {
            out.push(current.clone());
            return;
        }
        for target in 0..sig.len() {
            if !used[target] && sig[pos] == sig[target] {
                used[target] = true;
                current.push(target);
                go(pos + 1, used, sig, current, out);
                current.pop();
                used[target] = false;
            }
        }
    }
    let mut block_perms = Vec::new();
    go(
        0,
        &mut vec![false; n_blocks],
        &block_sig,
        &mut Vec::new(),
        &mut block_perms,
    );
    // Prefer the identity, then lexicographic order, for determinism.
    block_perms.sort();
    let id: Vec<usize> = (0..n_blocks).collect();
    if let Some(pos) = block_perms.iter().position(|p| *p == id) {
        let idp = block_perms.remove(pos);
        block_perms.insert(0, idp);
    }
    // Convert block bijections to party-level permutations.
    block_perms
        .into_iter()
        .map(|bp| {
            let mut party_perm = vec![0usize; structure.n_parties()];
            for (src_block, &dst_block) in bp.iter().enumerate() {
                for (k, &p) in partition[src_block].iter().enumerate() {
                    party_perm[p] = partition[dst_block][k];
                }
            }
            party_perm
        })
        .collect()
}

/// Permutation operator sending party `p`'s value to party `perm[p]`.
pub fn permutation_operator(perm: &[usize], structure: &PartyStructure) -> Matrix {
    let dims = structure.dims();
    let total = structure.total_dim();
    let mut out = Matrix::zeros(total, total);
    for col in 0..total {
        let cd = unravel(dims, col);
        let mut rd = vec![0usize; dims.len()];
        for (p, &target) in perm.iter().enumerate() {
            rd[target] = cd[p];
        }
        out.set(ravel(dims, &rd), col, cr(1.0));
    }
    out
}

/// Multipartite classification: partition from the iterated Lie closure,
/// then detection of the structure-preserving permutation by rank-1
/// realignment of `U·P⁻¹` across every block cut.
pub fn multiparty_classify(u: &UnitaryGate, tol: &Tolerances) -> Result<GateClass> {
    if u.dim() > CLOSURE_DIM_CAP {
        return Err(Error::DimensionCap(u.dim(), CLOSURE_DIM_CAP));
    }
    let structure = u.structure();
    if structure.n_parties() < 2 {
        return Err(Error::InvalidParties(
            "multiparty classification needs at least two parties".into(),
        ));
    }
    let basis = lie_closure_fixpoint(u, tol)?;
    let partition = match_partition(&basis, structure, tol)?;
    if partition.len() == 1 {
        return Ok(GateClass::Imprimitive);
    }
    for perm in candidate_permutations(&partition, structure) {
        let p_op = permutation_operator(&perm, structure);
        let stripped = UnitaryGate::new_unchecked(
            u.matrix().matmul(&p_op.adjoint()),
            structure.clone(),
        );
        let mut all_rank_one = true;
        for block in &partition {
            if block.len() == structure.n_parties() {
                continue;
            }
            let (rank, _) = schmidt_rank(&stripped, block, tol)?;
            if rank != 1 {
                all_rank_one = false;
                break;
            }
        }
        if all_rank_one {
            return Ok(GateClass::PartitionPrimitive {
                partition,
                permutation: perm,
            });
        }
    }
    Err(Error::Numerical(
        "partition detected but no structure-preserving permutation matched".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_unitary;
    use crate::linalg::unitary::gates;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn two_qubit(m: Matrix) -> UnitaryGate {
        UnitaryGate::new(m, PartyStructure::qubits(2), &tol()).unwrap()
    }

    fn three_qubit(m: Matrix) -> UnitaryGate {
        UnitaryGate::new(m, PartyStructure::qubits(3), &tol()).unwrap()
    }

    #[test]
    fn local_algebra_dimension() {
        // 2·(d²−1) + 1 = 7 for two qubits
        let s = PartyStructure::qubits(2);
        let gens = local_algebra_generators(&s);
        assert_eq!(gens.len(), 7);
        let basis = close_algebra(&gens, 1e-8);
        assert_eq!(basis.len(), 7);
    }

    #[test]
    fn product_gate_closure_is_local() {
        let t = tol();
        let a = haar_random_unitary(2, 21).matrix().clone();
        let b = haar_random_unitary(2, 22).matrix().clone();
        let u = two_qubit(a.kron(&b));
        let rep = lie_closure(&u, &t).unwrap();
        assert_eq!(rep.closure_dimension, 7);
        assert_eq!(rep.matched_partition, vec![vec![0], vec![1]]);
        assert!(rep.is_universal_on_partition_products);
    }

    #[test]
    fn cnot_closure_saturates() {
        let t = tol();
        let u = two_qubit(gates::cnot());
        let rep = lie_closure(&u, &t).unwrap();
        assert_eq!(rep.closure_dimension, 16);
        assert_eq!(rep.matched_partition, vec![vec![0, 1]]);
        assert!(rep.is_universal_on_partition_products);
    }

    #[test]
    fn swap_normalizes_local_algebra() {
        let t = tol();
        let u = two_qubit(gates::swap(2));
        let rep = lie_closure(&u, &t).unwrap();
        assert_eq!(rep.closure_dimension, 7);
        assert_eq!(rep.matched_partition, vec![vec![0], vec![1]]);
    }

    #[test]
    fn closure_invariant_under_local_dressing() {
        let t = tol();
        let u = two_qubit(gates::cz());
        let base = lie_closure(&u, &t).unwrap().closure_dimension;
        let a = haar_random_unitary(2, 31).matrix().clone();
        let b = haar_random_unitary(2, 32).matrix().clone();
        let cc = haar_random_unitary(2, 33).matrix().clone();
        let dd = haar_random_unitary(2, 34).matrix().clone();
        let dressed = two_qubit(
            a.kron(&b)
                .matmul(u.matrix())
                .matmul(&cc.kron(&dd)),
        );
        let dim = lie_closure(&dressed, &t).unwrap().closure_dimension;
        assert_eq!(base, dim);
    }

    #[test]
    fn three_qubit_full_product() {
        let t = tol();
        let a = haar_random_unitary(2, 41).matrix().clone();
        let b = haar_random_unitary(2, 42).matrix().clone();
        let cc = haar_random_unitary(2, 43).matrix().clone();
        let u = three_qubit(a.kron(&b).kron(&cc));
        match multiparty_classify(&u, &t).unwrap() {
            GateClass::PartitionPrimitive {
                partition,
                permutation,
            } => {
                assert_eq!(partition, vec![vec![0], vec![1], vec![2]]);
                assert_eq!(permutation, vec![0, 1, 2]);
            }
            other => panic!("expected PartitionPrimitive, got {}", other.label()),
        }
    }

    #[test]
    fn three_qubit_block_entangler() {
        let t = tol();
        let cc = haar_random_unitary(2, 44).matrix().clone();
        let u = three_qubit(gates::cnot().kron(&cc));
        match multiparty_classify(&u, &t).unwrap() {
            GateClass::PartitionPrimitive {
                partition,
                permutation,
            } => {
                assert_eq!(partition, vec![vec![0, 1], vec![2]]);
                assert_eq!(permutation, vec![0, 1, 2]);
            }
            other => panic!("expected PartitionPrimitive, got {}", other.label()),
        }
    }

    #[test]
    fn three_qubit_swap_permutation() {
        let t = tol();
        let u = three_qubit(gates::swap(2).kron(&Matrix::identity(2)));
        match multiparty_classify(&u, &t).unwrap() {
            GateClass::PartitionPrimitive {
                partition,
                permutation,
            } => {
                assert_eq!(partition, vec![vec![0], vec![1], vec![2]]);
                assert_eq!(permutation, vec![1, 0, 2]);
            }
            other => panic!("expected PartitionPrimitive, got {}", other.label()),
        }
    }

    #[test]
    fn three_qubit_generic_imprimitive() {
        let t = tol();
        let u = three_qubit(haar_random_unitary(8, 45).matrix().clone());
        assert!(matches!(
            multiparty_classify(&u, &t).unwrap(),
            GateClass::Imprimitive
        ));
    }

    #[test]
    fn set_partition_count() {
        // Bell numbers: B(3) = 5, B(4) = 15
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
    }

    #[test]
    fn dimension_cap_enforced() {
        let t = tol();
        let u = UnitaryGate::new(
            Matrix::identity(128),
            PartyStructure::new(vec![2; 7]).unwrap(),
            &t,
        )
        .unwrap();
        assert!(matches!(
            lie_closure(&u, &t),
            Err(Error::DimensionCap(128, 64))
        ));
    }
}
