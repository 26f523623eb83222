//! Acceptance gate: one test per criterion, each printing a pass line with
//! the measured numbers (visible with `cargo test -- --nocapture`).

use std::f64::consts::PI;

use num_complex::Complex64;

use udiscrim::gateclass::{
    canonical_class, classify_two_party, kak_decompose, lie_closure, multiparty_classify,
    GateClass,
};
use udiscrim::io::{parse_gate_json, serialize_gate};
use udiscrim::linalg::matrix::{cr, vec_inner, vec_norm, vec_scale, vec_sub, Matrix, ONE, ZERO};
use udiscrim::linalg::random::haar_random_matrix;
use udiscrim::linalg::state::{DensityMatrix, PureState};
use udiscrim::linalg::structure::PartyStructure;
use udiscrim::linalg::unitary::{gates, UnitaryGate};
use udiscrim::linalg::{eig_hermitian, eig_unitary, haar_random_unitary, svd, trace_product};
use udiscrim::protocol::walgate::{bipartition_matrix, bob_conditional, walgate_measurement};
use udiscrim::protocol::{
    discriminate_many, jamiolkowski_input, locc_discriminate, two_qubit_pipeline, Event, Oracle,
    Strategy,
};
use udiscrim::spectra::{control_unitary_trace, min_runs, min_runs_embedded, product_local_arcs,
    RunCount};
use udiscrim::Tolerances;
use udiscrim::Error;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn two_qubit(m: Matrix) -> UnitaryGate {
    UnitaryGate::new(m, PartyStructure::qubits(2), &tol()).unwrap()
}

fn qudit(m: Matrix) -> UnitaryGate {
    let d = m.rows();
    UnitaryGate::new(m, PartyStructure::single(d), &tol()).unwrap()
}

/// Traceless 4x4 unitary: antipodal eigenphase pairs conjugated by a Haar
/// unitary.
fn traceless_unitary(seed: u64) -> Matrix {
    let q = haar_random_matrix(4, seed);
    let alpha = 0.3 + (seed % 7) as f64 * 0.21;
    let beta = 1.1 + (seed % 5) as f64 * 0.37;
    let d = Matrix::diagonal(&[
        Complex64::from_polar(1.0, alpha),
        Complex64::from_polar(1.0, alpha + PI),
        Complex64::from_polar(1.0, beta),
        Complex64::from_polar(1.0, beta + PI),
    ]);
    q.matmul(&d).matmul(&q.adjoint())
}

#[test]
fn criterion_01_choi_orthogonality_and_single_run_protocol() {
    let t = tol();
    let start = std::time::Instant::now();
    let full = PartyStructure::new(vec![2, 2, 2, 2]).unwrap();
    let phi = jamiolkowski_input(&full).unwrap();
    let mut worst_overlap = 0.0f64;
    let mut runs = 0usize;
    let mut correct = 0usize;
    for seed in 0..200u64 {
        let u = haar_random_unitary(4, 20_000 + seed).matrix().clone();
        let w = traceless_unitary(40_000 + seed);
        let v = u.matmul(&w);
        let ug = two_qubit(u);
        let vg = two_qubit(v);
        let out_u = phi.apply_on_parties(ug.matrix(), &[0, 1]);
        let out_v = phi.apply_on_parties(vg.matrix(), &[0, 1]);
        let overlap = out_u.inner(&out_v).norm();
        worst_overlap = worst_overlap.max(overlap);
        assert!(overlap <= 1e-9, "seed {seed}: overlap {overlap:.3e}");
        for hidden in [0usize, 1] {
            let mut oracle =
                Oracle::with_hidden_index(vec![ug.clone(), vg.clone()], hidden).unwrap();
            let (verdict, transcript) =
                locc_discriminate(&mut oracle, Strategy::ChoiSingleRun, seed * 2 + hidden as u64, &t)
                    .unwrap();
            runs += 1;
            assert!(verdict.correct, "seed {seed} hidden {hidden}");
            assert_eq!(verdict.oracle_uses, 1, "seed {seed} hidden {hidden}");
            assert_eq!(transcript.oracle_uses(), 1);
            correct += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 30, "runtime {:?}", elapsed);
    println!(
        "criterion 01 PASS: choi orthogonality worst overlap {worst_overlap:.3e}, {correct}/{runs} correct single-use runs, {:.2?}",
        elapsed
    );
}

/// Independent eigenvalues of a 2x2 matrix from the characteristic
/// polynomial.
fn eig2_charpoly(m: &Matrix) -> [Complex64; 2] {
    let t = m.at(0, 0) + m.at(1, 1);
    let d = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    let disc = (t * t - cr(4.0) * d).sqrt();
    [(t + disc) * cr(0.5), (t - disc) * cr(0.5)]
}

/// Covering arc of a multiset of unit-circle points, written independently
/// of the library's merge logic.
fn brute_arc(points: &[Complex64]) -> f64 {
    let mut angles: Vec<f64> = points
        .iter()
        .map(|v| {
            let a = v.arg();
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = angles.len();
    let mut largest = 0.0f64;
    for i in 0..n {
        let next = if i + 1 == n {
            angles[0] + 2.0 * PI
        } else {
            angles[i + 1]
        };
        largest = largest.max(next - angles[i]);
    }
    2.0 * PI - largest
}

#[test]
fn criterion_02_run_count_rule_against_brute_force() {
    let t = tol();
    let start = std::time::Instant::now();
    let mut checked = 0usize;
    for seed in 0..100u64 {
        let u = haar_random_unitary(2, 50_000 + 2 * seed);
        let v = haar_random_unitary(2, 50_000 + 2 * seed + 1);
        let w = u.relative(&v).unwrap();
        let lam = eig2_charpoly(&w);
        let delta = brute_arc(&lam);
        if delta <= 1e-6 {
            continue;
        }
        let plan = min_runs(&u, &v, 12, &t).unwrap();
        // Brute force: enumerate all ordered index tuples at each level.
        let mut brute_n = None;
        for n in 1..=12usize {
            let mut products = Vec::with_capacity(1 << n);
            for bits in 0..(1usize << n) {
                let mut p = ONE;
                for k in 0..n {
                    p *= lam[(bits >> k) & 1];
                }
                products.push(p);
            }
            if brute_arc(&products) >= PI - 1e-9 {
                brute_n = Some(n);
                break;
            }
        }
        let got = plan.n_runs.finite();
        assert_eq!(got, brute_n, "seed {seed}: sumset vs brute force");
        // Two distinct eigen-angles always form a contiguous arc, so the
        // bracket formula must agree with the search.
        if let (Some(n), Some(c)) = (got, plan.ceiling_rule) {
            assert_eq!(n, c, "seed {seed}: sumset {n} vs ceiling {c}");
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 10, "runtime {:?}", elapsed);
    assert!(checked >= 95, "only {checked} cases had δ > 0");
    println!(
        "criterion 02 PASS: run-count rule matches brute force and ⌈π/δ⌉ on {checked} qubit pairs, {:.2?}",
        elapsed
    );
}

#[test]
fn criterion_03_three_level_ancilla_example() {
    let t = tol();
    let u = qudit(Matrix::identity(2));
    let v = qudit(Matrix::identity(2).scale(cr(-1.0)));
    let plain = min_runs(&u, &v, 12, &t).unwrap();
    assert_eq!(plain.n_runs, RunCount::NotDistinguishable);
    let embedded = min_runs_embedded(&u, &v, 1, 12, &t).unwrap();
    assert_eq!(embedded.n_runs, RunCount::Finite(1));
    assert!(embedded.certified_overlap.unwrap() <= 1e-9);
    println!("criterion 03 PASS: -I vs I not distinguishable bare, N = 1 with one ancilla level");
}

fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let q = haar_random_matrix(dim, seed);
    let mut weights: Vec<f64> = (0..dim)
        .map(|k| 0.2 + ((seed as usize + 3 * k) % 11) as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let d = Matrix::diagonal(&weights.iter().map(|&w| cr(w)).collect::<Vec<_>>());
    let m = q.matmul(&d).matmul(&q.adjoint());
    DensityMatrix::new(m, PartyStructure::single(dim), &tol()).unwrap()
}

fn random_projector(dim: usize, rank: usize, seed: u64) -> Matrix {
    let q = haar_random_matrix(dim, seed);
    let mut d = Matrix::zeros(dim, dim);
    for k in 0..rank {
        d.set(k, k, ONE);
    }
    q.matmul(&d).matmul(&q.adjoint())
}

#[test]
fn criterion_04_control_unitary_and_product_input_criterion() {
    let t = tol();
    // Eq.-(4)-style identity on 100 random control-unitary instances.
    let mut worst_gap = 0.0f64;
    for seed in 0..100u64 {
        let da = 2 + (seed % 2) as usize; // 2 or 3
        let db = 2 + (seed % 3) as usize / 2; // 2 or 3
        let rank = 1 + (seed as usize % (da - 1).max(1));
        let p1 = random_projector(da, rank, 60_000 + seed);
        let u = qudit(haar_random_matrix(db, 61_000 + seed));
        let rho_a = random_density(da, 62_000 + seed);
        let rho_b = random_density(db, 63_000 + seed);
        let rep = control_unitary_trace(&p1, &u, &rho_a, &rho_b, 1, &t).unwrap();
        worst_gap = worst_gap.max(rep.identity_gap);
        assert!(rep.identity_gap <= 1e-10, "seed {seed}: gap {:.3e}", rep.identity_gap);
    }
    // Product-input criterion: δ1 + δ2 ≥ π > max(δ1, δ2) is globally enough
    // but locally insufficient; pushing one factor to π flips the flag.
    let d1 = 0.62 * PI;
    let d2 = 0.55 * PI;
    let u1 = qudit(Matrix::diagonal(&[ONE, Complex64::from_polar(1.0, d1)]));
    let u2 = qudit(Matrix::diagonal(&[ONE, Complex64::from_polar(1.0, d2)]));
    let (g1, g2, flag) = product_local_arcs(&u1, &u2, 1, &t).unwrap();
    assert!((g1 - d1).abs() < 1e-9 && (g2 - d2).abs() < 1e-9);
    assert!(g1 + g2 >= PI && g1.max(g2) < PI);
    assert!(!flag, "criterion must not fire below π per factor");
    let u3 = qudit(Matrix::diagonal(&[ONE, cr(-1.0)]));
    let (_, _, flag_up) = product_local_arcs(&u3, &u2, 1, &t).unwrap();
    assert!(flag_up, "π on one factor must fire the criterion");
    println!(
        "criterion 04 PASS: control-unitary identity worst gap {worst_gap:.3e}; product-input criterion flags exactly max(δ1,δ2) ≥ π"
    );
}

#[test]
fn criterion_05_kak_reconstruction_weyl_and_invariance() {
    let t = tol();
    let mut worst_recon = 0.0f64;
    let mut worst_drift = 0.0f64;
    for seed in 0..200u64 {
        let u = two_qubit(haar_random_matrix(4, 70_000 + seed));
        let d = kak_decompose(&u, &t).unwrap();
        let err = d.reconstruct().max_abs_diff(u.matrix());
        worst_recon = worst_recon.max(err);
        assert!(err <= 1e-9, "seed {seed}: reconstruction {err:.3e}");
        let h = d.canonical;
        assert!(
            PI / 4.0 + 1e-9 >= h[0] && h[0] >= h[1] - 1e-12 && h[1] >= h[2].abs() - 1e-12,
            "seed {seed}: Weyl violated {h:?}"
        );
        // invariance under random local dressing
        let a = haar_random_matrix(2, 71_000 + seed);
        let b = haar_random_matrix(2, 72_000 + seed);
        let c = haar_random_matrix(2, 73_000 + seed);
        let dd = haar_random_matrix(2, 74_000 + seed);
        let dressed = two_qubit(a.kron(&b).matmul(u.matrix()).matmul(&c.kron(&dd)));
        let hd = canonical_class(&dressed, &t).unwrap();
        for k in 0..3 {
            let drift = (h[k] - hd[k]).abs();
            worst_drift = worst_drift.max(drift);
            assert!(drift <= 1e-8, "seed {seed}: class drift {drift:.3e}");
        }
    }
    println!(
        "criterion 05 PASS: 200 canonical decompositions, worst reconstruction {worst_recon:.3e}, worst class drift {worst_drift:.3e}"
    );
}

#[test]
fn criterion_06_primitivity_concordance_and_partitions() {
    let t = tol();
    let mut cases: Vec<(String, UnitaryGate)> = vec![
        ("cnot".into(), two_qubit(gates::cnot())),
        ("cz".into(), two_qubit(gates::cz())),
        ("swap".into(), two_qubit(gates::swap(2))),
    ];
    for seed in 0..20u64 {
        let a = haar_random_matrix(2, 80_000 + seed);
        let b = haar_random_matrix(2, 81_000 + seed);
        cases.push((format!("product_{seed}"), two_qubit(a.kron(&b))));
        let c = haar_random_matrix(2, 82_000 + seed);
        let d = haar_random_matrix(2, 83_000 + seed);
        cases.push((
            format!("product_swap_{seed}"),
            two_qubit(c.kron(&d).matmul(&gates::swap(2))),
        ));
        cases.push((
            format!("haar_{seed}"),
            two_qubit(haar_random_matrix(4, 84_000 + seed)),
        ));
    }
    let total = cases.len();
    for (name, gate) in &cases {
        let class = classify_two_party(gate, &t).unwrap();
        let closure = lie_closure(gate, &t).unwrap();
        match class {
            GateClass::Product { .. } | GateClass::ProductSwap { .. } => {
                assert_eq!(closure.closure_dimension, 7, "{name}");
                assert_eq!(closure.matched_partition, vec![vec![0], vec![1]], "{name}");
            }
            GateClass::Imprimitive => {
                assert_eq!(closure.closure_dimension, 16, "{name}");
                assert_eq!(closure.matched_partition, vec![vec![0, 1]], "{name}");
            }
            GateClass::PartitionPrimitive { .. } => panic!("{name}: unexpected label"),
        }
    }
    // three-qubit partition detection
    let q3 = PartyStructure::qubits(3);
    let abc = UnitaryGate::new(
        haar_random_matrix(2, 85_001)
            .kron(&haar_random_matrix(2, 85_002))
            .kron(&haar_random_matrix(2, 85_003)),
        q3.clone(),
        &t,
    )
    .unwrap();
    match multiparty_classify(&abc, &t).unwrap() {
        GateClass::PartitionPrimitive { partition, .. } => {
            assert_eq!(partition, vec![vec![0], vec![1], vec![2]])
        }
        other => panic!("A⊗B⊗C: got {}", other.label()),
    }
    let ent12 = UnitaryGate::new(
        gates::cnot().kron(&haar_random_matrix(2, 85_004)),
        q3.clone(),
        &t,
    )
    .unwrap();
    match multiparty_classify(&ent12, &t).unwrap() {
        GateClass::PartitionPrimitive { partition, .. } => {
            assert_eq!(partition, vec![vec![0, 1], vec![2]])
        }
        other => panic!("entangling12⊗C: got {}", other.label()),
    }
    let swap12 = UnitaryGate::new(gates::swap(2).kron(&Matrix::identity(2)), q3.clone(), &t)
        .unwrap();
    match multiparty_classify(&swap12, &t).unwrap() {
        GateClass::PartitionPrimitive {
            partition,
            permutation,
        } => {
            assert_eq!(partition, vec![vec![0], vec![1], vec![2]]);
            assert_eq!(permutation, vec![1, 0, 2]);
        }
        other => panic!("swap12⊗I: got {}", other.label()),
    }
    let generic = UnitaryGate::new(haar_random_matrix(8, 85_005), q3, &t).unwrap();
    assert!(matches!(
        multiparty_classify(&generic, &t).unwrap(),
        GateClass::Imprimitive
    ));
    println!(
        "criterion 06 PASS: classifier concordance on {total} two-party cases, closure dims 7/16, 3-qubit partitions detected"
    );
}

#[test]
fn criterion_07_pipeline_across_proof_branches() {
    let t = tol();
    let start = std::time::Instant::now();
    let mut max_uses = 0usize;
    let mut runs = 0usize;
    for case in 0..100u64 {
        let branch = case % 5;
        let seed = 90_000 + case * 13;
        let (u, v) = match branch {
            0 => {
                // both primitive
                let u = two_qubit(
                    haar_random_matrix(2, seed).kron(&haar_random_matrix(2, seed + 1)),
                );
                let v = two_qubit(
                    haar_random_matrix(2, seed + 2).kron(&haar_random_matrix(2, seed + 3)),
                );
                (u, v)
            }
            1 => {
                // one primitive, one imprimitive
                let u = two_qubit(
                    haar_random_matrix(2, seed).kron(&haar_random_matrix(2, seed + 1)),
                );
                let v = two_qubit(haar_random_matrix(4, seed + 2));
                (u, v)
            }
            2 => {
                // both imprimitive, same canonical class
                let u = two_qubit(gates::cnot());
                let a = haar_random_matrix(2, seed);
                let b = haar_random_matrix(2, seed + 1);
                let c = haar_random_matrix(2, seed + 2);
                let d = haar_random_matrix(2, seed + 3);
                let v = two_qubit(
                    a.kron(&b).matmul(&gates::cnot()).matmul(&c.kron(&d)),
                );
                (u, v)
            }
            3 => {
                // both imprimitive, different canonical x
                let a = 0.25 + 0.004 * (case as f64);
                let b = a + 0.3;
                (
                    two_qubit(gates::canonical_core(a, 0.0, 0.0)),
                    two_qubit(gates::canonical_core(b, 0.0, 0.0)),
                )
            }
            _ => {
                // phase-equivalent pair
                let u = two_qubit(haar_random_matrix(4, seed));
                let phase = Complex64::from_polar(1.0, 0.3 + 0.01 * case as f64);
                let v = two_qubit(u.matrix().scale(phase));
                (u, v)
            }
        };
        if branch == 4 {
            let mut oracle = Oracle::with_hidden_index(vec![u, v], 0).unwrap();
            match two_qubit_pipeline(&mut oracle, seed, &t) {
                Err(Error::NotDistinguishable(_)) => {}
                other => panic!("case {case}: phase pair must be NotDistinguishable, got {other:?}"),
            }
            continue;
        }
        let hidden = (case % 2) as usize;
        let mut oracle = Oracle::with_hidden_index(vec![u, v], hidden).unwrap();
        let (verdict, transcript) = two_qubit_pipeline(&mut oracle, seed, &t).unwrap();
        runs += 1;
        assert!(verdict.correct, "case {case} (branch {branch})");
        assert!(
            verdict.oracle_uses <= 20,
            "case {case}: {} uses",
            verdict.oracle_uses
        );
        assert_eq!(transcript.oracle_uses(), verdict.oracle_uses);
        max_uses = max_uses.max(verdict.oracle_uses);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 120, "runtime {:?}", elapsed);
    println!(
        "criterion 07 PASS: {runs} pipeline runs over all branches, max {max_uses} oracle uses, {:.2?}",
        elapsed
    );
}

#[test]
fn criterion_08_walgate_cost_and_exact_success() {
    let t = tol();
    let s = PartyStructure::new(vec![4, 4]).unwrap();
    let mut worst_cost = 0.0f64;
    let mut worst_success = 1.0f64;
    for seed in 0..100u64 {
        let q = haar_random_matrix(16, 100_000 + seed);
        let psi0 = PureState::new(q.col(0), s.clone()).unwrap();
        let psi1 = PureState::new(q.col(1), s.clone()).unwrap();
        let basis = walgate_measurement(&psi0, &psi1, &[0], &t).unwrap();
        worst_cost = worst_cost.max(basis.certified_cost);
        assert!(basis.certified_cost <= 1e-10, "seed {seed}");
        let (m0, da, _) = bipartition_matrix(&psi0, &[0]);
        let (m1, _, _) = bipartition_matrix(&psi1, &[0]);
        // Exact LOCC success probability with the two-sided decision rule.
        let mut p_correct = [0.0f64; 2];
        for k in 0..da {
            let wk = basis.alice_basis.col(k);
            let eta = bob_conditional(&m0, &wk);
            let nu = bob_conditional(&m1, &wk);
            let (n_eta, n_nu) = (vec_norm(&eta), vec_norm(&nu));
            let eta_hat = if n_eta > 1e-12 {
                Some(vec_scale(&eta, cr(1.0 / n_eta)))
            } else {
                None
            };
            let nu_perp = match (&eta_hat, n_nu > 1e-12) {
                (Some(e), true) => {
                    let raw = vec_sub(&nu, &vec_scale(e, vec_inner(e, &nu)));
                    let n = vec_norm(&raw);
                    (n > 1e-12).then(|| vec_scale(&raw, cr(1.0 / n)))
                }
                (None, true) => Some(vec_scale(&nu, cr(1.0 / n_nu))),
                _ => None,
            };
            // given ψ0: correct unless the ν̂ detector clicks
            if n_eta > 0.0 {
                let leak = nu_perp
                    .as_ref()
                    .map_or(0.0, |v| vec_inner(v, &eta).norm_sqr());
                p_correct[0] += n_eta * n_eta - leak;
            }
            // given ψ1: correct exactly on a ν̂ click
            if let Some(v) = &nu_perp {
                p_correct[1] += vec_inner(v, &nu).norm_sqr();
            }
        }
        for (which, p) in p_correct.iter().enumerate() {
            worst_success = worst_success.min(*p);
            assert!(
                *p >= 1.0 - 1e-6,
                "seed {seed}: success for state {which} is {p}"
            );
        }
        // Bob's conditional pairs stay orthogonal within the certified cost.
        let mut total = 0.0;
        for k in 0..da {
            let wk = basis.alice_basis.col(k);
            total += vec_inner(&bob_conditional(&m0, &wk), &bob_conditional(&m1, &wk))
                .norm_sqr();
        }
        assert!(total <= 1e-10, "seed {seed}: Σ overlap² {total:.3e}");
    }
    println!(
        "criterion 08 PASS: 100 Walgate bases in 4⊗4, worst cost {worst_cost:.3e}, worst exact success {worst_success:.12}"
    );
}

#[test]
fn criterion_09_m_hypothesis_elimination() {
    let t = tol();
    let suites: Vec<Vec<UnitaryGate>> = vec![
        vec![
            two_qubit(Matrix::identity(4)),
            two_qubit(gates::pauli_x().kron(&gates::pauli_x())),
            two_qubit(gates::pauli_z().kron(&gates::pauli_z())),
        ],
        vec![
            two_qubit(gates::cnot()),
            two_qubit(gates::cz()),
            two_qubit(gates::swap(2)),
        ],
    ];
    let mut runs = 0usize;
    for (si, hyps) in suites.iter().enumerate() {
        for hidden in 0..hyps.len() {
            for seed in 0..20u64 {
                let mut oracle = Oracle::with_hidden_index(hyps.clone(), hidden).unwrap();
                let (verdict, transcript) =
                    discriminate_many(&mut oracle, 110_000 + seed, &t).unwrap();
                assert!(verdict.correct, "suite {si} hidden {hidden} seed {seed}");
                let tests = transcript
                    .events
                    .iter()
                    .filter(|e| matches!(e, Event::Message { party: "alice", .. }))
                    .count();
                assert_eq!(tests, hyps.len() - 1, "exactly M−1 tests");
                runs += 1;
            }
        }
    }
    println!("criterion 09 PASS: {runs} elimination runs, all correct with exactly M−1 tests");
}

#[test]
fn criterion_10_infrastructure_determinism_and_residuals() {
    let t = tol();
    // file round-trip exactness
    for seed in 0..20u64 {
        let g = two_qubit(haar_random_matrix(4, 120_000 + seed));
        let text = serialize_gate(&g);
        let back = parse_gate_json(&text, &t).unwrap();
        assert_eq!(back.matrix().data(), g.matrix().data());
        assert_eq!(serialize_gate(&back), text);
    }
    // transcript byte determinism per seed
    let u = two_qubit(Matrix::identity(4));
    let v = two_qubit(gates::cz());
    let log = |seed: u64| {
        let mut oracle = Oracle::with_seed(vec![u.clone(), v.clone()], seed).unwrap();
        let (_, tr) = locc_discriminate(&mut oracle, Strategy::ParallelN, seed, &t).unwrap();
        tr.to_log()
    };
    for seed in [0u64, 1, 99] {
        assert_eq!(log(seed), log(seed));
    }
    // eigen/SVD residual suite, degenerate spectra included
    let mut worst = 0.0f64;
    let mut check_unitary = |m: Matrix| {
        let g = qudit(m);
        let spec = eig_unitary(&g, &t).unwrap();
        for (j, lam) in spec.values.iter().enumerate() {
            let vj = spec.vectors.col(j);
            let uv = g.matrix().apply(&vj);
            let r = vec_norm(&vec_sub(&uv, &vec_scale(&vj, *lam)));
            worst = worst.max(r);
            assert!(r <= 1e-9);
        }
        assert!(spec.vectors.unitarity_error() <= 1e-10);
    };
    let h2 = haar_random_matrix(2, 130_001);
    check_unitary(h2.kron(&h2)); // degenerate pair spectrum
    check_unitary(Matrix::diagonal(&[ONE, ONE, cr(-1.0), cr(-1.0)])); // repeats
    check_unitary(haar_random_matrix(6, 130_002));
    let herm = {
        let q = haar_random_matrix(5, 130_003);
        let d = Matrix::diagonal(&[cr(1.0), cr(1.0), cr(1.0), cr(-2.0), cr(0.5)]);
        q.matmul(&d).matmul(&q.adjoint())
    };
    let spec = eig_hermitian(&herm, &t).unwrap();
    let rec = spec
        .vectors
        .matmul(&Matrix::diagonal(
            &spec.values.iter().map(|&x| cr(x)).collect::<Vec<_>>(),
        ))
        .matmul(&spec.vectors.adjoint());
    assert!(rec.max_abs_diff(&herm) <= 1e-9);
    for seed in 0..10u64 {
        let m = Matrix::from_fn(4, 4, |i, j| {
            let q = haar_random_matrix(4, 131_000 + seed);
            q.at(i, j)
        });
        let d = svd(&m, &t).unwrap();
        let rec = d
            .u
            .matmul(&Matrix::diagonal(
                &d.s.iter().map(|&s| cr(s)).collect::<Vec<_>>(),
            ))
            .matmul(&d.v.adjoint());
        assert!(rec.max_abs_diff(&m) <= 1e-9);
    }
    // report byte determinism through the CLI layer is covered in the CLI
    // integration suite; the trace identity closes the loop here.
    let a = haar_random_unitary(4, 132_000);
    let b = haar_random_unitary(4, 132_001);
    let lhs = trace_product(a.matrix(), b.matrix()).unwrap();
    let rhs = trace_product(b.matrix(), a.matrix()).unwrap().conj();
    assert!((lhs - rhs).norm() <= 1e-12);
    let _ = ZERO;
    println!(
        "criterion 10 PASS: round-trip exact, transcripts deterministic, worst eigen residual {worst:.3e}"
    );
}
