//! Command implementations behind the binary: load gate files, run the
//! library, assemble reports and map errors to exit codes.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gateclass::{classify_two_party, kak_decompose, lie_closure, multiparty_classify};
use crate::gateclass::{schmidt_rank, GateClass};
use crate::io::load_gate_file;
use crate::linalg::unitary::UnitaryGate;
use crate::protocol::{
    discriminate_many, locc_discriminate, pipeline_plan_summary, two_qubit_pipeline, Oracle,
    Strategy, Transcript, Verdict,
};
use crate::report::*;
use crate::spectra::{min_runs, min_runs_embedded, product_local_arcs, RunPlan};
use crate::tol::Tolerances;

/// Exit code for an error, per the CLI contract: 2 input, 3 strategy
/// inapplicable, 4 internal numerical failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::DimensionMismatch(_)
        | Error::NotHermitian(_)
        | Error::NotUnitary(_)
        | Error::NotProjector(_)
        | Error::NotUnitModulus(_)
        | Error::InvalidParties(_)
        | Error::InvalidState(_)
        | Error::EmptyInput(_)
        | Error::DimensionCap(_, _) => 2,
        Error::StrategyInapplicable(_) | Error::NotDistinguishable(_) => 3,
        Error::Numerical(_) | Error::NoBasisFound | Error::BudgetExceeded(_, _) => 4,
    }
}

fn digest(path: &Path) -> Result<InputDigest> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(hasher.finalize()),
    })
}

fn run_plan_to_result(plan: &RunPlan, embed: Option<usize>) -> MinRunsResult {
    MinRunsResult {
        n_runs: plan.n_runs.finite(),
        delta: plan.delta_single,
        ceiling_rule: plan.ceiling_rule,
        certified_overlap: plan.certified_overlap,
        embedded_levels: embed,
        local_product: None,
    }
}

pub fn cmd_classify(gate_path: &Path, command: String, tol: &Tolerances) -> Result<Report> {
    let gate = load_gate_file(gate_path, tol)?;
    let n = gate.structure().n_parties();
    let result = if n == 2 {
        let class = classify_two_party(&gate, tol)?;
        let (rank, coeffs) = schmidt_rank(&gate, &[0], tol)?;
        let (factor_a, factor_b) = match &class {
            GateClass::Product { factor_a, factor_b }
            | GateClass::ProductSwap { factor_a, factor_b } => (
                Some(MatrixRepr::from_matrix(factor_a)),
                Some(MatrixRepr::from_matrix(factor_b)),
            ),
            _ => (None, None),
        };
        ClassifyResult {
            label: class.label().to_string(),
            factor_a,
            factor_b,
            partition: None,
            permutation: None,
            schmidt_rank: Some(rank),
            schmidt_coefficients: Some(coeffs),
        }
    } else {
        let class = multiparty_classify(&gate, tol)?;
        let (partition, permutation) = match &class {
            GateClass::PartitionPrimitive {
                partition,
                permutation,
            } => (Some(partition.clone()), Some(permutation.clone())),
            _ => (None, None),
        };
        ClassifyResult {
            label: class.label().to_string(),
            factor_a: None,
            factor_b: None,
            partition,
            permutation,
            schmidt_rank: None,
            schmidt_coefficients: None,
        }
    };
    Ok(Report {
        command,
        inputs: vec![digest(gate_path)?],
        tolerances: tol.clone(),
        result: CommandResult::Classify(result),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_minruns(
    u_path: &Path,
    v_path: &Path,
    embed: Option<usize>,
    local_product: bool,
    max_n: usize,
    command: String,
    tol: &Tolerances,
) -> Result<Report> {
    let u = load_gate_file(u_path, tol)?;
    let v = load_gate_file(v_path, tol)?;
    let plan = match embed {
        Some(k) => min_runs_embedded(&u, &v, k, max_n, tol)?,
        None => min_runs(&u, &v, max_n, tol)?,
    };
    let mut result = run_plan_to_result(&plan, embed);
    if local_product {
        // Eq.-(3)-style criterion: W = U†V must factor as W1 ⊗ W2.
        let w = UnitaryGate::new(u.relative(&v)?, u.structure().clone(), tol)?;
        if w.structure().n_parties() != 2 {
            return Err(Error::InvalidParties(
                "the product-input criterion needs a two-party gate".into(),
            ));
        }
        let class = classify_two_party(&w, tol)?;
        let GateClass::Product { factor_a, factor_b } = class else {
            return Err(Error::StrategyInapplicable(format!(
                "the product-input criterion needs W = U†V to be a product, got {}",
                class.label()
            )));
        };
        let w1 = UnitaryGate::new(
            factor_a,
            crate::linalg::structure::PartyStructure::single(w.structure().dims()[0]),
            tol,
        )?;
        let w2 = UnitaryGate::new(
            factor_b,
            crate::linalg::structure::PartyStructure::single(w.structure().dims()[1]),
            tol,
        )?;
        let (d1, d2, flag) = product_local_arcs(&w1, &w2, 1, tol)?;
        let mut min_n_local = None;
        for n in 1..=max_n {
            let (_, _, ok) = product_local_arcs(&w1, &w2, n, tol)?;
            if ok {
                min_n_local = Some(n);
                break;
            }
        }
        result.local_product = Some(LocalProductResult {
            delta_a: d1,
            delta_b: d2,
            locally_distinguishable_with_product_inputs: flag,
            min_n_local,
        });
    }
    Ok(Report {
        command,
        inputs: vec![digest(u_path)?, digest(v_path)?],
        tolerances: tol.clone(),
        result: CommandResult::MinRuns(result),
    })
}

pub fn cmd_kak(gate_path: &Path, command: String, tol: &Tolerances) -> Result<Report> {
    let gate = load_gate_file(gate_path, tol)?;
    let d = kak_decompose(&gate, tol)?;
    let residual = d.reconstruct().max_abs_diff(gate.matrix());
    Ok(Report {
        command,
        inputs: vec![digest(gate_path)?],
        tolerances: tol.clone(),
        result: CommandResult::Kak(KakResult {
            global_phase: [d.global_phase.re, d.global_phase.im],
            canonical: d.canonical,
            local_after_a: MatrixRepr::from_matrix(&d.locals_after.0),
            local_after_b: MatrixRepr::from_matrix(&d.locals_after.1),
            local_before_a: MatrixRepr::from_matrix(&d.locals_before.0),
            local_before_b: MatrixRepr::from_matrix(&d.locals_before.1),
            reconstruction_residual: residual,
        }),
    })
}

pub fn cmd_lie_closure(gate_path: &Path, command: String, tol: &Tolerances) -> Result<Report> {
    let gate = load_gate_file(gate_path, tol)?;
    let rep = lie_closure(&gate, tol)?;
    let (label, permutation) = if gate.structure().n_parties() >= 2 {
        match multiparty_classify(&gate, tol) {
            Ok(GateClass::PartitionPrimitive { permutation, .. }) => {
                (Some("PartitionPrimitive".to_string()), Some(permutation))
            }
            Ok(class) => (Some(class.label().to_string()), None),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(Report {
        command,
        inputs: vec![digest(gate_path)?],
        tolerances: tol.clone(),
        result: CommandResult::LieClosure(LieClosureResult {
            closure_dimension: rep.closure_dimension,
            matched_partition: rep.matched_partition,
            is_universal_on_partition_products: rep.is_universal_on_partition_products,
            label,
            permutation,
        }),
    })
}

/// Strategy names accepted by `simulate`.
pub fn parse_strategy(name: &str) -> Result<&'static str> {
    match name {
        "choi" => Ok("choi"),
        "parallel" => Ok("parallel"),
        "pipeline2q" => Ok("pipeline2q"),
        "eliminate" => Ok("eliminate"),
        other => Err(Error::Parse(format!(
            "unknown strategy '{other}' (choi|parallel|pipeline2q|eliminate)"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_simulate(
    gate_paths: &[PathBuf],
    strategy: &str,
    seed: u64,
    trials: usize,
    log_path: Option<&Path>,
    command: String,
    tol: &Tolerances,
) -> Result<Report> {
    let strategy = parse_strategy(strategy)?;
    if gate_paths.len() < 2 {
        return Err(Error::Parse("simulate needs at least two gate files".into()));
    }
    let hyps: Vec<UnitaryGate> = gate_paths
        .iter()
        .map(|p| load_gate_file(p, tol))
        .collect::<Result<_>>()?;
    if strategy != "eliminate" && hyps.len() != 2 {
        return Err(Error::StrategyInapplicable(format!(
            "strategy '{strategy}' takes exactly 2 hypotheses, got {}",
            hyps.len()
        )));
    }
    let (plan, planned_uses) = if strategy == "pipeline2q" {
        match pipeline_plan_summary(&hyps[0], &hyps[1], tol) {
            Ok((name, uses)) => (Some(name.to_string()), Some(uses)),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };

    let mut seed_stream = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(trials);
    let mut log = String::new();
    for trial in 0..trials {
        let oracle_seed: u64 = seed_stream.gen();
        let protocol_seed: u64 = seed_stream.gen();
        let mut oracle = Oracle::with_seed(hyps.clone(), oracle_seed)?;
        let (verdict, transcript): (Verdict, Transcript) = match strategy {
            "choi" => locc_discriminate(&mut oracle, Strategy::ChoiSingleRun, protocol_seed, tol)?,
            "parallel" => {
                locc_discriminate(&mut oracle, Strategy::ParallelN, protocol_seed, tol)?
            }
            "pipeline2q" => two_qubit_pipeline(&mut oracle, protocol_seed, tol)?,
            _ => discriminate_many(&mut oracle, protocol_seed, tol)?,
        };
        log.push_str(&format!("TRIAL {trial} SEED {oracle_seed}\n"));
        log.push_str(&transcript.to_log());
        results.push(TrialResult {
            trial,
            hidden_seed: oracle_seed,
            guessed_index: verdict.guessed_index,
            correct: verdict.correct,
            oracle_uses: verdict.oracle_uses,
            success_probability_exact: verdict.success_probability_exact,
        });
    }
    if let Some(path) = log_path {
        std::fs::write(path, &log)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    let n_correct = results.iter().filter(|r| r.correct).count();
    let max_oracle_uses = results.iter().map(|r| r.oracle_uses).max().unwrap_or(0);
    let min_success_probability = results
        .iter()
        .map(|r| r.success_probability_exact)
        .fold(1.0f64, f64::min);
    let mut inputs = Vec::new();
    for p in gate_paths {
        inputs.push(digest(p)?);
    }
    Ok(Report {
        command,
        inputs,
        tolerances: tol.clone(),
        result: CommandResult::Simulate(SimulateResult {
            strategy: strategy.to_string(),
            plan,
            planned_uses,
            trials,
            n_correct,
            max_oracle_uses,
            min_success_probability,
            results,
        }),
    })
}
