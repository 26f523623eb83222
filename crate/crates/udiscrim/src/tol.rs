//! Central numerical-tolerance configuration.
//!
//! Every threshold used by the library lives here so that a single record
//! (echoed into CLI reports, overridable with `--tol`) fully determines the
//! numerical behaviour of a run.

/// Tolerance set shared by all operations.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Tolerances {
    /// Max-norm bound on `U†U − I` for a matrix to count as unitary.
    pub unitarity: f64,
    /// Max-norm bound on `H − H†` for a matrix to count as Hermitian.
    pub hermiticity: f64,
    /// Per-pair eigen residual `‖Mv − λv‖` accepted from the solvers.
    pub eig_residual: f64,
    /// Eigenvalue clustering width when resolving degenerate subspaces.
    pub degeneracy: f64,
    /// Width for merging eigen-angles on the unit circle.
    pub angle_merge: f64,
    /// Slack on the `δ ≥ π` distinguishability boundary.
    pub boundary_slack: f64,
    /// Singular values above this count towards an operator Schmidt rank.
    pub rank_cut: f64,
    /// Reconstruction bound for product-gate factor extraction.
    pub product_recon: f64,
    /// Reconstruction bound for the two-qubit canonical decomposition.
    pub kak_recon: f64,
    /// Gram–Schmidt residual below which a generator adds nothing new.
    pub closure_residual: f64,
    /// Accepted cost `Σ_k |⟨η_k|ν_k⟩|²` of an Alice measurement basis.
    pub walgate_cost: f64,
    /// Bound for algebraic trace identities checked at runtime.
    pub identity_check: f64,
    /// Bound under which two pure states count as orthogonal.
    pub orthogonality: f64,
    /// Singular values below this are treated as exactly zero.
    pub svd_floor: f64,
    /// Measurement outcomes with probability below this are pruned.
    pub prob_prune: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitarity: 1e-10,
            hermiticity: 1e-10,
            eig_residual: 1e-9,
            degeneracy: 1e-8,
            angle_merge: 1e-8,
            boundary_slack: 1e-9,
            rank_cut: 1e-8,
            product_recon: 1e-8,
            kak_recon: 1e-9,
            closure_residual: 1e-8,
            walgate_cost: 1e-10,
            identity_check: 1e-10,
            orthogonality: 1e-9,
            svd_floor: 1e-12,
            prob_prune: 1e-12,
        }
    }
}

impl Tolerances {
    /// Every threshold multiplied by `factor` (CLI `--tol` override).
    pub fn scaled(factor: f64) -> Self {
        let d = Tolerances::default();
        Tolerances {
            unitarity: d.unitarity * factor,
            hermiticity: d.hermiticity * factor,
            eig_residual: d.eig_residual * factor,
            degeneracy: d.degeneracy * factor,
            angle_merge: d.angle_merge * factor,
            boundary_slack: d.boundary_slack * factor,
            rank_cut: d.rank_cut * factor,
            product_recon: d.product_recon * factor,
            kak_recon: d.kak_recon * factor,
            closure_residual: d.closure_residual * factor,
            walgate_cost: d.walgate_cost * factor,
            identity_check: d.identity_check * factor,
            orthogonality: d.orthogonality * factor,
            svd_floor: d.svd_floor * factor,
            prob_prune: d.prob_prune * factor,
        }
    }
}

/// Distinct angle values kept per sumset level when counting run numbers.
pub const MAX_SUMSET: usize = 4096;

/// Default cap on the parallel run count searched by `min_runs`.
pub const DEFAULT_MAX_RUNS: usize = 12;

/// Hard cap on the parallel run count (`max_n` precondition).
pub const MAX_RUNS_LIMIT: usize = 16;

/// Hilbert-space dimension cap for the Lie-closure machinery.
pub const CLOSURE_DIM_CAP: usize = 64;

/// Oracle-use budget for the two-qubit discrimination pipeline.
pub const TWO_QUBIT_USE_BUDGET: usize = 20;

/// Largest state vector the protocol simulator will materialise.
pub const STATE_DIM_CAP: usize = 1 << 16;
