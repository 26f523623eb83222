//! Machine-readable reports with stable key order.

use serde::Serialize;

use crate::linalg::matrix::Matrix;
use crate::tol::Tolerances;

/// Row-major complex matrix as `[re, im]` pairs, for reports.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixRepr {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixRepr {
    pub fn from_matrix(m: &Matrix) -> Self {
        MatrixRepr {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyResult {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_a: Option<MatrixRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor_b: Option<MatrixRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schmidt_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schmidt_coefficients: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinRunsResult {
    /// Finite run count, or null when not distinguishable.
    pub n_runs: Option<usize>,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceiling_rule: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_overlap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedded_levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_product: Option<LocalProductResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalProductResult {
    pub delta_a: f64,
    pub delta_b: f64,
    pub locally_distinguishable_with_product_inputs: bool,
    /// Smallest copy count at which one factor's arc reaches π, when any.
    pub min_n_local: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KakResult {
    pub global_phase: [f64; 2],
    pub canonical: [f64; 3],
    pub local_after_a: MatrixRepr,
    pub local_after_b: MatrixRepr,
    pub local_before_a: MatrixRepr,
    pub local_before_b: MatrixRepr,
    pub reconstruction_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub hidden_seed: u64,
    pub guessed_index: usize,
    pub correct: bool,
    pub oracle_uses: usize,
    pub success_probability_exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateResult {
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planned_uses: Option<usize>,
    pub trials: usize,
    pub n_correct: usize,
    pub max_oracle_uses: usize,
    pub min_success_probability: f64,
    pub results: Vec<TrialResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LieClosureResult {
    pub closure_dimension: usize,
    pub matched_partition: Vec<Vec<usize>>,
    pub is_universal_on_partition_products: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CommandResult {
    Classify(ClassifyResult),
    MinRuns(MinRunsResult),
    Kak(KakResult),
    Simulate(SimulateResult),
    LieClosure(LieClosureResult),
}

/// Top-level report: command echo, input digests, tolerances in force and
/// the command's numeric results.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub tolerances: Tolerances,
    pub result: CommandResult,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
