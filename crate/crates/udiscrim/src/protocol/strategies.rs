//! Discrimination strategies: planning the input state and circuit, then
//! running the oracle, the Alice measurement, Bob's conditional measurement
//! and the classical messages that glue them together.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gateclass::{canonical_class, classify_two_party, kak_decompose, GateClass};
use crate::linalg::matrix::{cr, vec_inner, vec_norm, vec_scale, vec_sub, Matrix, ZERO};
use crate::linalg::state::PureState;
use crate::linalg::structure::PartyStructure;
use crate::linalg::unitary::{gates, UnitaryGate};
use crate::linalg::{trace_product, vec_kron_all};
use crate::protocol::walgate::{bipartition_matrix, bob_conditional, walgate_measurement};
use crate::protocol::{Event, Oracle, Transcript, Verdict};
use crate::spectra::{min_runs, min_runs_of_relative, orthogonal_input, RunCount};
use crate::tol::{Tolerances, DEFAULT_MAX_RUNS, STATE_DIM_CAP, TWO_QUBIT_USE_BUDGET};

/// Input preparation strategy for a two-hypothesis run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Jamiolkowski input, single oracle use; needs `Tr(V†U) = 0`.
    ChoiSingleRun,
    /// Orthogonalising input over N parallel copies from `min_runs`.
    ParallelN,
}

/// One step of a planned circuit: a black-box call on some parties, or a
/// known local gate.
#[derive(Debug, Clone)]
enum Step {
    Oracle { parties: Vec<usize> },
    Local { matrix: Matrix, parties: Vec<usize> },
}

/// A fully planned two-hypothesis discrimination experiment.
#[derive(Debug, Clone)]
struct Setup {
    input: PureState,
    alice_parties: Vec<usize>,
    circuit: Vec<Step>,
    planned_uses: usize,
    plan_name: &'static str,
}

impl Setup {
    /// Expected output when the black box is the given gate.
    fn apply_known(&self, gate: &Matrix) -> PureState {
        let mut state = self.input.clone();
        for step in &self.circuit {
            state = match step {
                Step::Oracle { parties } => state.apply_on_parties(gate, parties),
                Step::Local { matrix, parties } => state.apply_on_parties(matrix, parties),
            };
        }
        state
    }

    /// The real run against the hidden gate, counting uses.
    fn run_oracle(&self, oracle: &mut Oracle, transcript: &mut Transcript) -> Result<PureState> {
        let mut state = self.input.clone();
        for step in &self.circuit {
            state = match step {
                Step::Oracle { parties } => oracle.invoke(&state, parties, false, transcript)?,
                Step::Local { matrix, parties } => state.apply_on_parties(matrix, parties),
            };
        }
        Ok(state)
    }
}

/// Normalised product of two maximally entangled system–ancilla pairs (one
/// per party). Party order: systems first, matching ancillas after, so a
/// gate acts on parties `0..n`.
pub fn jamiolkowski_input(full: &PartyStructure) -> Result<PureState> {
    let m = full.n_parties();
    if m < 4 || m % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected systems plus matching ancillas, got {} parties",
            m
        )));
    }
    let n = m / 2;
    let dims = full.dims();
    for p in 0..n {
        if dims[p] != dims[n + p] {
            return Err(Error::DimensionMismatch(format!(
                "ancilla dimension {} does not match system dimension {}",
                dims[n + p],
                dims[p]
            )));
        }
    }
    let d: usize = dims[..n].iter().product();
    let norm = cr(1.0 / (d as f64).sqrt());
    let total = full.total_dim();
    let mut amps = vec![ZERO; total];
    let sys_dims = &dims[..n];
    for x in 0..d {
        let digits = crate::linalg::structure::unravel(sys_dims, x);
        let mut full_digits = digits.clone();
        full_digits.extend_from_slice(&digits);
        amps[crate::linalg::structure::ravel(dims, &full_digits)] = norm;
    }
    PureState::new(amps, full.clone())
}

fn require_two_party(gate: &UnitaryGate) -> Result<(usize, usize)> {
    let dims = gate.structure().dims();
    if dims.len() != 2 {
        return Err(Error::StrategyInapplicable(format!(
            "the LOCC protocol splits two parties, the gate has {}",
            dims.len()
        )));
    }
    Ok((dims[0], dims[1]))
}

/// Jamiolkowski single-run setup: 1 oracle use, Alice holds A with its
/// ancilla, Bob B with his.
fn choi_setup(u: &UnitaryGate, v: &UnitaryGate, tol: &Tolerances) -> Result<Setup> {
    let (da, db) = require_two_party(u)?;
    let tr = trace_product(u.matrix(), v.matrix())?;
    if tr.norm() > tol.orthogonality {
        return Err(Error::StrategyInapplicable(format!(
            "Jamiolkowski single run needs Tr(V†U) = 0, got |{:.3e}|",
            tr.norm()
        )));
    }
    let full = PartyStructure::new(vec![da, db, da, db])?;
    let input = jamiolkowski_input(&full)?;
    Ok(Setup {
        input,
        // A with ancilla A' on Alice's side, B with B' on Bob's.
        alice_parties: vec![0, 2],
        circuit: vec![Step::Oracle {
            parties: vec![0, 1],
        }],
        planned_uses: 1,
        plan_name: "choi_single_run",
    })
}

/// Copy-major party order for N copies of an (A, B) system, Alice holding
/// every A factor.
fn interleave_copies(state_block_major: &PureState, n: usize) -> PureState {
    // block-major order is [A1..An, B1..Bn]; interleave to [A1, B1, ...].
    let mut order = Vec::with_capacity(2 * n);
    for k in 0..n {
        order.push(k);
        order.push(n + k);
    }
    state_block_major.permute_parties(&order)
}

fn parallel_circuit(n: usize) -> Vec<Step> {
    (0..n)
        .map(|k| Step::Oracle {
            parties: vec![2 * k, 2 * k + 1],
        })
        .collect()
}

fn alice_even_parties(n: usize) -> Vec<usize> {
    (0..n).map(|k| 2 * k).collect()
}

/// Parallel-N setup from the minimal-run search.
fn parallel_setup(
    u: &UnitaryGate,
    v: &UnitaryGate,
    max_n: usize,
    tol: &Tolerances,
) -> Result<Setup> {
    require_two_party(u)?;
    let plan = min_runs(u, v, max_n, tol)?;
    let n = match plan.n_runs {
        RunCount::Finite(n) => n,
        RunCount::NotDistinguishable => {
            return Err(Error::StrategyInapplicable(format!(
                "no finite run count up to {} (covering arc {:.6})",
                max_n, plan.delta_single
            )));
        }
    };
    let input = plan
        .input_state
        .expect("finite plan carries an input state");
    // min_runs emits the N-fold state in copy-major order already:
    // structure (A, B) repeated N times.
    Ok(Setup {
        input,
        alice_parties: alice_even_parties(n),
        circuit: parallel_circuit(n),
        planned_uses: n,
        plan_name: "parallel_n",
    })
}

/// Probabilities of a projective outcome list, pruned and renormalised.
fn sample_outcome(probs: &[f64], rng: &mut ChaCha8Rng, prune: f64) -> usize {
    let cleaned: Vec<f64> = probs.iter().map(|&p| if p < prune { 0.0 } else { p }).collect();
    let total: f64 = cleaned.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (k, &p) in cleaned.iter().enumerate() {
        if x < p {
            return k;
        }
        x -= p;
    }
    cleaned
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Result of one pairwise experiment between hypothesis indices (i, j).
struct PairwiseOutcome {
    /// The candidate the observed outcome rules out.
    eliminated: usize,
    /// Probability the run eliminates `j` (i.e. points at `i`), given the
    /// realized true state.
    p_point_i: f64,
}

/// Runs a planned setup against the oracle: Alice measures in the Walgate
/// basis, sends her outcome, Bob measures his conditional pair.
fn execute_pairwise(
    setup: &Setup,
    pair: (usize, usize),
    oracle: &mut Oracle,
    rng: &mut ChaCha8Rng,
    transcript: &mut Transcript,
    tol: &Tolerances,
) -> Result<PairwiseOutcome> {
    let (i, j) = pair;
    if setup.input.dim() > STATE_DIM_CAP {
        return Err(Error::DimensionCap(setup.input.dim(), STATE_DIM_CAP));
    }
    let out_i = setup.apply_known(oracle.hypotheses()[i].matrix());
    let out_j = setup.apply_known(oracle.hypotheses()[j].matrix());
    let overlap = out_i.inner(&out_j).norm();
    if overlap > tol.orthogonality {
        return Err(Error::Numerical(format!(
            "planned outputs are not orthogonal (|⟨·|·⟩| = {:.3e})",
            overlap
        )));
    }
    let basis = walgate_measurement(&out_i, &out_j, &setup.alice_parties, tol)?;

    let out_true = setup.run_oracle(oracle, transcript)?;

    let (m_true, da, _db) = bipartition_matrix(&out_true, &setup.alice_parties);
    let (m_i, _, _) = bipartition_matrix(&out_i, &setup.alice_parties);
    let (m_j, _, _) = bipartition_matrix(&out_j, &setup.alice_parties);

    // Alice outcome distribution from the realized state.
    let conds_true: Vec<Vec<Complex64>> = (0..da)
        .map(|k| bob_conditional(&m_true, &basis.alice_basis.col(k)))
        .collect();
    let alice_probs: Vec<f64> = conds_true.iter().map(|c| vec_norm(c).powi(2)).collect();

    // Bob's decision vectors per Alice outcome, and the exact probability
    // that the decision points at hypothesis i. Conditionals below the floor
    // are numerical noise from branches the hypothesis cannot reach: their
    // normalised direction is meaningless, so the branch counts as absent.
    // A real branch below the floor carries ≤ 1e-12 probability.
    let floor = 1e-6;
    let mut p_point_i = 0.0;
    let mut decision: Vec<Option<(Vec<Complex64>, Vec<Complex64>, bool)>> = Vec::with_capacity(da);
    for k in 0..da {
        let wk = basis.alice_basis.col(k);
        let eta = bob_conditional(&m_i, &wk);
        let nu = bob_conditional(&m_j, &wk);
        let n_eta = vec_norm(&eta);
        let n_nu = vec_norm(&nu);
        let rest_points_i = n_eta >= n_nu;
        let eta_hat = if n_eta > floor {
            Some(vec_scale(&eta, cr(1.0 / n_eta)))
        } else {
            None
        };
        let nu_hat = match (&eta_hat, n_nu > floor) {
            (Some(e), true) => {
                let raw = vec_sub(&nu, &vec_scale(e, vec_inner(e, &nu)));
                let n = vec_norm(&raw);
                if n > floor {
                    Some(vec_scale(&raw, cr(1.0 / n)))
                } else {
                    None
                }
            }
            (None, true) => Some(vec_scale(&nu, cr(1.0 / n_nu))),
            _ => None,
        };
        if alice_probs[k] > 0.0 {
            let cond = &conds_true[k];
            let p_eta = eta_hat
                .as_ref()
                .map_or(0.0, |e| vec_inner(e, cond).norm_sqr());
            let p_nu = nu_hat
                .as_ref()
                .map_or(0.0, |v| vec_inner(v, cond).norm_sqr());
            let p_rest = (alice_probs[k] - p_eta - p_nu).max(0.0);
            p_point_i += p_eta + if rest_points_i { p_rest } else { 0.0 };
        }
        decision.push(Some((
            eta_hat.unwrap_or_default(),
            nu_hat.unwrap_or_default(),
            rest_points_i,
        )));
    }

    let k = sample_outcome(&alice_probs, rng, tol.prob_prune);
    transcript.push(Event::Message {
        party: "alice",
        outcome: k,
    });

    let (eta_hat, nu_hat, rest_points_i) = decision[k].take().expect("decision prepared");
    let cond = &conds_true[k];
    let n_cond = vec_norm(cond);
    let cond_hat = vec_scale(cond, cr(1.0 / n_cond.max(1e-300)));
    let p_eta = if eta_hat.is_empty() {
        0.0
    } else {
        vec_inner(&eta_hat, &cond_hat).norm_sqr()
    };
    let p_nu = if nu_hat.is_empty() {
        0.0
    } else {
        vec_inner(&nu_hat, &cond_hat).norm_sqr()
    };
    let p_rest = (1.0 - p_eta - p_nu).max(0.0);
    let bob_outcome = sample_outcome(&[p_eta, p_nu, p_rest], rng, tol.prob_prune);
    transcript.push(Event::Message {
        party: "bob",
        outcome: bob_outcome,
    });

    let points_i = match bob_outcome {
        0 => true,
        1 => false,
        _ => rest_points_i,
    };
    Ok(PairwiseOutcome {
        eliminated: if points_i { j } else { i },
        p_point_i,
    })
}

fn finish_two_hypothesis(
    setup: &Setup,
    oracle: &mut Oracle,
    seed: u64,
    tol: &Tolerances,
) -> Result<(Verdict, Transcript)> {
    let mut transcript = Transcript::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcome = execute_pairwise(setup, (0, 1), oracle, &mut rng, &mut transcript, tol)?;
    let guessed = if outcome.eliminated == 1 { 0 } else { 1 };
    transcript.push(Event::Verdict { index: guessed });
    let hidden = oracle.reveal_for_scoring();
    let success_probability_exact = if hidden == 0 {
        outcome.p_point_i
    } else {
        1.0 - outcome.p_point_i
    };
    Ok((
        Verdict {
            guessed_index: guessed,
            correct: guessed == hidden,
            oracle_uses: oracle.uses(),
            success_probability_exact,
        },
        transcript,
    ))
}

/// Two-hypothesis LOCC discrimination with an explicitly chosen strategy.
pub fn locc_discriminate(
    oracle: &mut Oracle,
    strategy: Strategy,
    seed: u64,
    tol: &Tolerances,
) -> Result<(Verdict, Transcript)> {
    if oracle.n_hypotheses() != 2 {
        return Err(Error::StrategyInapplicable(format!(
            "pairwise discrimination needs exactly 2 hypotheses, got {}",
            oracle.n_hypotheses()
        )));
    }
    let u = oracle.hypotheses()[0].clone();
    let v = oracle.hypotheses()[1].clone();
    let setup = match strategy {
        Strategy::ChoiSingleRun => choi_setup(&u, &v, tol)?,
        Strategy::ParallelN => parallel_setup(&u, &v, DEFAULT_MAX_RUNS, tol)?,
    };
    finish_two_hypothesis(&setup, oracle, seed, tol)
}

fn gate1(m: Matrix, tol: &Tolerances) -> Result<UnitaryGate> {
    let d = m.rows();
    UnitaryGate::new(m, PartyStructure::single(d), tol)
}

/// Whether two gates differ only by a global phase.
fn phase_equivalent(u: &UnitaryGate, v: &UnitaryGate, tol: &Tolerances) -> Result<bool> {
    let w = u.relative(v)?;
    let d = w.rows();
    let mean = w.trace() / cr(d as f64);
    let dev = w.max_abs_diff(&Matrix::identity(d).scale(mean));
    Ok(dev <= tol.orthogonality && (mean.norm() - 1.0).abs() <= tol.orthogonality)
}

/// Local-product plan for a pair of plain product gates: one side's factor
/// arc reaches π, the input is that side's orthogonalising state with idle
/// zeros on the other side.
fn local_product_setup(
    u: &UnitaryGate,
    v: &UnitaryGate,
    fu: (&Matrix, &Matrix),
    fv: (&Matrix, &Matrix),
    tol: &Tolerances,
) -> Result<Setup> {
    let (da, db) = require_two_party(u)?;
    let _ = v;
    let wa = gate1(fu.0.adjoint().matmul(fv.0), tol)?;
    let wb = gate1(fu.1.adjoint().matmul(fv.1), tol)?;
    for n in 1..=DEFAULT_MAX_RUNS {
        for (side, w, d_other) in [(0usize, &wa, db), (1, &wb, da)] {
            let Ok(chi) = orthogonal_input(w, n, tol) else {
                continue;
            };
            let idle = PureState::basis(
                PartyStructure::new(vec![d_other; n])?,
                0,
            );
            // Block-major: active side copies first, then the idle side.
            let block = chi.tensor(&idle);
            let order: Vec<usize> = if side == 0 {
                (0..n).flat_map(|k| [k, n + k]).collect()
            } else {
                (0..n).flat_map(|k| [n + k, k]).collect()
            };
            let input = block.permute_parties(&order);
            return Ok(Setup {
                input,
                alice_parties: alice_even_parties(n),
                circuit: parallel_circuit(n),
                planned_uses: n,
                plan_name: "local_product",
            });
        }
    }
    Err(Error::StrategyInapplicable(
        "no single-factor arc reaches π within the run cap".into(),
    ))
}

/// Strip `X` to `U`'s canonical frame: `f1(X) = Lpre · X · Lpost` maps `U`
/// itself onto `gU · core(hU)`.
fn strip_templates(u: &UnitaryGate, tol: &Tolerances) -> Result<(Matrix, Matrix)> {
    let k = kak_decompose(u, tol)?;
    let lpre = k.locals_after.0.kron(&k.locals_after.1).adjoint();
    let lpost = k.locals_before.0.kron(&k.locals_before.1).adjoint();
    Ok((lpre, lpost))
}

/// Single-axis eigen-input plan: when both stripped gates are pure
/// `exp(iθ·XX)` cores, a product input with Bob on an X eigenvector reduces
/// the problem to single-qubit discrimination on Alice's side.
fn single_axis_setup(
    u: &UnitaryGate,
    v: &UnitaryGate,
    tol: &Tolerances,
) -> Result<Option<Setup>> {
    let h_u = canonical_class(u, tol)?;
    if h_u[1].abs() > 1e-9 || h_u[2].abs() > 1e-9 {
        return Ok(None);
    }
    let (lpre, lpost) = strip_templates(u, tol)?;
    let fv = lpre.matmul(v.matrix()).matmul(&lpost);
    let fv_gate = UnitaryGate::new_unchecked(fv.clone(), PartyStructure::qubits(2));
    let h_v = canonical_class(&fv_gate, tol)?;
    if h_v[1].abs() > 1e-9 || h_v[2].abs() > 1e-9 {
        return Ok(None);
    }
    // fv must itself be a bare core up to phase for the shared strip to work.
    let core_v = gates::canonical_core(h_v[0], 0.0, 0.0);
    let fit = trace_product(&fv, &core_v)?;
    let phase = fit / cr(fit.norm().max(1e-300));
    if fv.max_abs_diff(&core_v.scale(phase)) > 1e-8 {
        // Try the mirrored angle: core(−θ) is the same class.
        let core_m = gates::canonical_core(-h_v[0], 0.0, 0.0);
        let fit_m = trace_product(&fv, &core_m)?;
        let phase_m = fit_m / cr(fit_m.norm().max(1e-300));
        if fv.max_abs_diff(&core_m.scale(phase_m)) > 1e-8 {
            return Ok(None);
        }
    }
    // Single-qubit relative gate between the two Alice-side actions.
    let a = h_u[0];
    let ea = crate::linalg::exp_i_hermitian(&gates::pauli_x().scale(cr(a)), tol)?;
    let fb_angle = {
        // recover the signed angle of fv's core from its action on |++⟩
        // via the single-qubit reduction below; both signs are checked.
        let plus = [cr(1.0 / 2.0f64.sqrt()); 2];
        let mut best = (f64::INFINITY, h_v[0]);
        for cand in [h_v[0], -h_v[0]] {
            let eb = match crate::linalg::exp_i_hermitian(&gates::pauli_x().scale(cr(cand)), tol)
            {
                Ok(m) => m,
                Err(_) => continue,
            };
            // compare fv(χ⊗+) with (e^{i cand X}χ)⊗+ on a probe χ = |0⟩
            let probe = vec_kron_all(&[vec![cr(1.0), ZERO], plus.to_vec()]);
            let lhs = fv.apply(&probe);
            let chi = eb.apply(&[cr(1.0), ZERO]);
            let rhs = vec_kron_all(&[chi, plus.to_vec()]);
            let ip = vec_inner(&rhs, &lhs);
            let miss = 1.0 - ip.norm();
            if miss < best.0 {
                best = (miss, cand);
            }
        }
        if best.0 > 1e-8 {
            return Ok(None);
        }
        best.1
    };
    let eb = crate::linalg::exp_i_hermitian(&gates::pauli_x().scale(cr(fb_angle)), tol)?;
    let ga = gate1(ea, tol)?;
    let gb = gate1(eb, tol)?;
    let plan = min_runs(&ga, &gb, DEFAULT_MAX_RUNS, tol)?;
    let RunCount::Finite(n) = plan.n_runs else {
        return Ok(None);
    };
    let chi = plan.input_state.expect("finite plan has a state");
    // Bob idles on |+⟩ eigenvectors of X.
    let r = 1.0 / 2.0f64.sqrt();
    let plus_n = PureState::new(
        vec![cr(r.powi(n as i32)); 1 << n],
        PartyStructure::qubits(n),
    )?;
    let block = chi.tensor(&plus_n);
    let input = interleave_copies(&block, n);
    let mut circuit = Vec::new();
    for k in 0..n {
        let parties = vec![2 * k, 2 * k + 1];
        circuit.push(Step::Local {
            matrix: lpost.clone(),
            parties: parties.clone(),
        });
        circuit.push(Step::Oracle {
            parties: parties.clone(),
        });
        circuit.push(Step::Local {
            matrix: lpre.clone(),
            parties,
        });
    }
    Ok(Some(Setup {
        input,
        alice_parties: alice_even_parties(n),
        circuit,
        planned_uses: n,
        plan_name: "single_axis_product",
    }))
}

/// Conjugation-collapse plan: `g2(X) = A2·g1(X)·A2†·g1(X)` with
/// `g1(X) = A1·f1(X)·A1†·f1(X)` sends `U` to a global phase times the
/// identity (4 uses per evaluation); the residual pair is discriminated in
/// parallel.
fn collapse_setup(u: &UnitaryGate, v: &UnitaryGate, tol: &Tolerances) -> Result<Option<Setup>> {
    let (lpre, lpost) = strip_templates(u, tol)?;
    let a1 = gates::pauli_z().kron(&Matrix::identity(2));
    let a2 = gates::pauli_y().kron(&Matrix::identity(2));
    let eval = |x: &Matrix| -> Matrix {
        let f1 = lpre.matmul(x).matmul(&lpost);
        let g1 = a1.matmul(&f1).matmul(&a1.adjoint()).matmul(&f1);
        a2.matmul(&g1).matmul(&a2.adjoint()).matmul(&g1)
    };
    let g2u = eval(u.matrix());
    let g2v = eval(v.matrix());
    // g2(U) must be a phase; g2(V) must not be.
    let mean_u = g2u.trace() / cr(4.0);
    if g2u.max_abs_diff(&Matrix::identity(4).scale(mean_u)) > 1e-8 {
        return Ok(None);
    }
    let gu_gate = UnitaryGate::new_unchecked(g2u, PartyStructure::qubits(2));
    let gv_gate = UnitaryGate::new_unchecked(g2v, PartyStructure::qubits(2));
    if phase_equivalent(&gu_gate, &gv_gate, tol)? {
        return Ok(None);
    }
    let w = gu_gate.relative(&gv_gate)?;
    let w_gate = UnitaryGate::new_unchecked(w, PartyStructure::qubits(2));
    let plan = min_runs_of_relative(&w_gate, DEFAULT_MAX_RUNS, tol)?;
    let RunCount::Finite(n) = plan.n_runs else {
        return Ok(None);
    };
    let input = plan.input_state.expect("finite plan has a state");
    // Per copy: g2 expands to four oracle calls interleaved with locals.
    let mut circuit = Vec::new();
    let g1_block = |circuit: &mut Vec<Step>, parties: &[usize]| {
        // f1
        circuit.push(Step::Local {
            matrix: lpost.clone(),
            parties: parties.to_vec(),
        });
        circuit.push(Step::Oracle {
            parties: parties.to_vec(),
        });
        circuit.push(Step::Local {
            matrix: lpre.clone(),
            parties: parties.to_vec(),
        });
        // A1†, f1, A1
        circuit.push(Step::Local {
            matrix: a1.adjoint(),
            parties: parties.to_vec(),
        });
        circuit.push(Step::Local {
            matrix: lpost.clone(),
            parties: parties.to_vec(),
        });
        circuit.push(Step::Oracle {
            parties: parties.to_vec(),
        });
        circuit.push(Step::Local {
            matrix: lpre.clone(),
            parties: parties.to_vec(),
        });
        circuit.push(Step::Local {
            matrix: a1.clone(),
            parties: parties.to_vec(),
        });
    };
    for k in 0..n {
        let parties = vec![2 * k, 2 * k + 1];
        g1_block(&mut circuit, &parties);
        circuit.push(Step::Local {
            matrix: a2.adjoint(),
            parties: parties.clone(),
        });
        g1_block(&mut circuit, &parties);
        circuit.push(Step::Local {
            matrix: a2.clone(),
            parties,
        });
    }
    Ok(Some(Setup {
        input,
        alice_parties: alice_even_parties(n),
        circuit,
        planned_uses: 4 * n,
        plan_name: "conjugation_collapse",
    }))
}

/// Plans the two-qubit pipeline: strips to the canonical frame, collects the
/// applicable reductions and keeps the cheapest one inside the 20-use budget.
///
/// Reading note: a relative gate that is a control-unitary times an extra
/// local mismatch is treated as reducible to plain local-gate discrimination
/// on a suitable product input; the local-product and single-axis reductions
/// realise that reading, and the parallel strategy covers every remaining
/// shape exactly.
fn plan_two_qubit(u: &UnitaryGate, v: &UnitaryGate, tol: &Tolerances) -> Result<Setup> {
    if u.structure().dims() != [2, 2] || v.structure().dims() != [2, 2] {
        return Err(Error::StrategyInapplicable(
            "the pipeline expects two-qubit gates".into(),
        ));
    }
    if phase_equivalent(u, v, tol)? {
        return Err(Error::NotDistinguishable(
            ": hypotheses differ only by a global phase".into(),
        ));
    }

    let mut candidates: Vec<Setup> = Vec::new();
    if let Ok(s) = choi_setup(u, v, tol) {
        candidates.push(s);
    }
    let cls_u = classify_two_party(u, tol)?;
    let cls_v = classify_two_party(v, tol)?;
    if let (
        GateClass::Product {
            factor_a: ua,
            factor_b: ub,
        },
        GateClass::Product {
            factor_a: va,
            factor_b: vb,
        },
    ) = (&cls_u, &cls_v)
    {
        if let Ok(s) = local_product_setup(u, v, (ua, ub), (va, vb), tol) {
            candidates.push(s);
        }
    }
    let both_imprimitive = matches!(cls_u, GateClass::Imprimitive)
        && matches!(cls_v, GateClass::Imprimitive);
    if both_imprimitive {
        if let Ok(Some(s)) = single_axis_setup(u, v, tol) {
            candidates.push(s);
        }
        let hu = canonical_class(u, tol)?;
        let hv = canonical_class(v, tol)?;
        let same_class = hu
            .iter()
            .zip(hv.iter())
            .all(|(a, b)| (a - b).abs() <= 1e-8);
        if same_class {
            if let Ok(Some(s)) = collapse_setup(u, v, tol) {
                candidates.push(s);
            }
        }
    }
    if let Ok(s) = parallel_setup(u, v, DEFAULT_MAX_RUNS, tol) {
        candidates.push(s);
    }

    candidates
        .into_iter()
        .filter(|s| s.planned_uses <= TWO_QUBIT_USE_BUDGET)
        .min_by_key(|s| s.planned_uses)
        .ok_or(Error::BudgetExceeded(
            TWO_QUBIT_USE_BUDGET + 1,
            TWO_QUBIT_USE_BUDGET,
        ))
}

/// Name and planned use count of the reduction the pipeline would run.
pub fn pipeline_plan_summary(
    u: &UnitaryGate,
    v: &UnitaryGate,
    tol: &Tolerances,
) -> Result<(&'static str, usize)> {
    let setup = plan_two_qubit(u, v, tol)?;
    Ok((setup.plan_name, setup.planned_uses))
}

/// The two-qubit discrimination pipeline under the hard 20-use budget.
pub fn two_qubit_pipeline(
    oracle: &mut Oracle,
    seed: u64,
    tol: &Tolerances,
) -> Result<(Verdict, Transcript)> {
    if oracle.n_hypotheses() != 2 {
        return Err(Error::StrategyInapplicable(format!(
            "the pipeline discriminates 2 hypotheses, got {}",
            oracle.n_hypotheses()
        )));
    }
    let u = oracle.hypotheses()[0].clone();
    let v = oracle.hypotheses()[1].clone();
    let setup = plan_two_qubit(&u, &v, tol)?;
    let (verdict, transcript) = finish_two_hypothesis(&setup, oracle, seed, tol)?;
    if verdict.oracle_uses > TWO_QUBIT_USE_BUDGET {
        return Err(Error::BudgetExceeded(
            verdict.oracle_uses,
            TWO_QUBIT_USE_BUDGET,
        ));
    }
    Ok((verdict, transcript))
}

/// M-hypothesis identification by `M−1` pairwise eliminations: each test is
/// designed for a candidate pair and rules out the candidate inconsistent
/// with its outcome, never confirming anything.
pub fn discriminate_many(
    oracle: &mut Oracle,
    seed: u64,
    tol: &Tolerances,
) -> Result<(Verdict, Transcript)> {
    let m = oracle.n_hypotheses();
    let hyps: Vec<UnitaryGate> = oracle.hypotheses().to_vec();
    // Every pair must be distinguishable before the protocol starts.
    for i in 0..m {
        for j in i + 1..m {
            if phase_equivalent(&hyps[i], &hyps[j], tol)? {
                return Err(Error::NotDistinguishable(format!(
                    ": hypotheses {} and {} differ only by a global phase",
                    i, j
                )));
            }
            let plan = min_runs(&hyps[i], &hyps[j], DEFAULT_MAX_RUNS, tol)?;
            if plan.n_runs == RunCount::NotDistinguishable {
                return Err(Error::NotDistinguishable(format!(
                    ": hypotheses {} and {} admit no finite run count",
                    i, j
                )));
            }
        }
    }

    let mut transcript = Transcript::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<usize> = (0..m).collect();
    let mut survival_given_hidden = vec![1.0f64; m];
    while candidates.len() > 1 {
        let (i, j) = (candidates[0], candidates[1]);
        let setup = match choi_setup(&hyps[i], &hyps[j], tol) {
            Ok(s) => s,
            Err(_) => parallel_setup(&hyps[i], &hyps[j], DEFAULT_MAX_RUNS, tol)?,
        };
        let outcome = execute_pairwise(&setup, (i, j), oracle, &mut rng, &mut transcript, tol)?;
        survival_given_hidden[i] *= outcome.p_point_i;
        survival_given_hidden[j] *= 1.0 - outcome.p_point_i;
        candidates.retain(|&c| c != outcome.eliminated);
    }
    let guessed = candidates[0];
    transcript.push(Event::Verdict { index: guessed });
    let hidden = oracle.reveal_for_scoring();
    Ok((
        Verdict {
            guessed_index: guessed,
            correct: guessed == hidden,
            oracle_uses: oracle.uses(),
            success_probability_exact: survival_given_hidden[hidden],
        },
        transcript,
    ))
}
