//! Spectral distinguishability analysis.
//!
//! The covering arc δ of the eigenvalues of `W = U†V` on the unit circle
//! decides everything: once the N-fold sumset of eigen-angles spreads an arc
//! of at least π, an input state with exactly orthogonal outputs exists.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eig::{angle_of, Spectrum};
use crate::linalg::matrix::{cr, Matrix, ZERO};
use crate::linalg::state::{DensityMatrix, PureState};
use crate::linalg::unitary::UnitaryGate;
use crate::linalg::{eig_unitary, vec_kron_all};
use crate::tol::{Tolerances, MAX_RUNS_LIMIT, MAX_SUMSET, STATE_DIM_CAP};

/// Covering-arc summary of a set of unit-circle points.
#[derive(Debug, Clone)]
pub struct ArcReport {
    /// Sorted angles in `[0, 2π)`, deduplicated within tolerance.
    pub angles: Vec<f64>,
    /// Length of the smallest arc containing every angle.
    pub delta: f64,
    /// Largest circular gap between consecutive angles.
    pub largest_gap: f64,
    /// Whether `delta ≥ π` within the boundary slack.
    pub distinguishable_now: bool,
}

/// Finite run count or the marker that no finite count exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunCount {
    Finite(usize),
    NotDistinguishable,
}

impl RunCount {
    pub fn finite(&self) -> Option<usize> {
        match self {
            RunCount::Finite(n) => Some(*n),
            RunCount::NotDistinguishable => None,
        }
    }
}

/// Outcome of the minimal-run search.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub n_runs: RunCount,
    /// Orthogonalising input state over the N-fold system, when finite.
    pub input_state: Option<PureState>,
    /// `|⟨ψ|W^{⊗N}|ψ⟩|` re-evaluated by direct application, when finite.
    pub certified_overlap: Option<f64>,
    /// Covering arc of `W` itself (the N = 1 level).
    pub delta_single: f64,
    /// Closed-form `⌈π/δ⌉` cross-check, when `δ > 0`.
    pub ceiling_rule: Option<usize>,
}

/// Result of the control-unitary trace evaluation.
#[derive(Debug, Clone)]
pub struct ControlUnitaryReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub identity_gap: f64,
    pub min_n_control: RunCount,
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(TAU);
    if d > PI {
        d = TAU - d;
    }
    d
}

/// Sorts, wraps into `[0, 2π)` and merges clusters chained within `width`.
fn merge_angles(mut angles: Vec<f64>, width: f64) -> Vec<f64> {
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged: Vec<f64> = Vec::with_capacity(angles.len());
    for a in angles {
        match merged.last() {
            Some(&last) if a - last <= width => {}
            _ => merged.push(a),
        }
    }
    // Wrap-around: a cluster hugging 2π belongs with one hugging 0.
    if merged.len() > 1 {
        let first = merged[0];
        let last = *merged.last().unwrap();
        if first + TAU - last <= width {
            merged.pop();
        }
    }
    merged
}

fn arc_of_sorted(merged: &[f64], tol: &Tolerances) -> ArcReport {
    let (delta, largest_gap) = if merged.len() < 2 {
        (0.0, TAU)
    } else {
        let mut largest = 0.0f64;
        for i in 0..merged.len() {
            let next = if i + 1 == merged.len() {
                merged[0] + TAU
            } else {
                merged[i + 1]
            };
            largest = largest.max(next - merged[i]);
        }
        (TAU - largest, largest)
    };
    ArcReport {
        angles: merged.to_vec(),
        delta,
        largest_gap,
        distinguishable_now: delta >= PI - tol.boundary_slack,
    }
}

/// Covering arc of unit-modulus eigenvalues.
pub fn covering_arc(eigenvalues: &[Complex64], tol: &Tolerances) -> Result<ArcReport> {
    if eigenvalues.is_empty() {
        return Err(Error::EmptyInput("eigenvalue list"));
    }
    for v in eigenvalues {
        let dev = (v.norm() - 1.0).abs();
        if dev > 1e-8 {
            return Err(Error::NotUnitModulus(dev));
        }
    }
    let angles: Vec<f64> = eigenvalues.iter().map(|&v| angle_of(v)).collect();
    let merged = merge_angles(angles, tol.angle_merge);
    Ok(arc_of_sorted(&merged, tol))
}

/// One angle of the N-fold sumset together with a representative composition
/// of base-eigenvalue indices realising it.
#[derive(Debug, Clone)]
struct AngleEntry {
    angle: f64,
    rep: Vec<usize>,
}

fn sumset_level_one(base: &[f64]) -> Vec<AngleEntry> {
    let mut entries: Vec<AngleEntry> = base
        .iter()
        .enumerate()
        .map(|(j, &a)| AngleEntry {
            angle: a.rem_euclid(TAU),
            rep: vec![j],
        })
        .collect();
    entries.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
    entries
}

fn dedupe_entries(mut all: Vec<AngleEntry>, width: f64) -> Vec<AngleEntry> {
    all.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
    let mut merged: Vec<AngleEntry> = Vec::with_capacity(all.len());
    for e in all {
        match merged.last() {
            Some(last) if e.angle - last.angle <= width => {}
            _ => merged.push(e),
        }
    }
    if merged.len() > 1 {
        let first = merged[0].angle;
        let last = merged.last().unwrap().angle;
        if first + TAU - last <= width {
            merged.pop();
        }
    }
    // Keep the set bounded; stride subsampling preserves spread.
    if merged.len() > MAX_SUMSET {
        let stride = merged.len().div_ceil(MAX_SUMSET);
        merged = merged.into_iter().step_by(stride).collect();
    }
    merged
}

fn sumset_next(current: &[AngleEntry], base: &[f64], width: f64) -> Vec<AngleEntry> {
    let mut all = Vec::with_capacity(current.len() * base.len());
    for e in current {
        for (j, &b) in base.iter().enumerate() {
            let mut angle = e.angle + b;
            if angle >= TAU {
                angle -= TAU;
            }
            let mut rep = e.rep.clone();
            rep.push(j);
            all.push(AngleEntry { angle, rep });
        }
    }
    dedupe_entries(all, width)
}

fn angles_of(entries: &[AngleEntry]) -> Vec<f64> {
    entries.iter().map(|e| e.angle).collect()
}

/// Closed-form run count `⌈π/δ⌉`, with the same boundary slack as the arc
/// test so N·δ hitting π exactly stays stable.
fn ceiling_rule(delta: f64, tol: &Tolerances) -> Option<usize> {
    if delta > 0.0 {
        Some(((PI - tol.boundary_slack) / delta).ceil().max(1.0) as usize)
    } else {
        None
    }
}

fn check_max_n(max_n: usize) -> Result<()> {
    if max_n == 0 || max_n > MAX_RUNS_LIMIT {
        return Err(Error::DimensionCap(max_n, MAX_RUNS_LIMIT));
    }
    Ok(())
}

/// Smallest `N ≤ max_n` such that the N-fold sumset of eigen-angles of
/// `W = U†V` covers an arc of at least π, together with the orthogonalising
/// input state; `NotDistinguishable` when none exists (in particular when `W`
/// has a single eigen-angle, i.e. `V = e^{iφ}U`).
pub fn min_runs(
    u: &UnitaryGate,
    v: &UnitaryGate,
    max_n: usize,
    tol: &Tolerances,
) -> Result<RunPlan> {
    check_max_n(max_n)?;
    let w = UnitaryGate::new(u.relative(v)?, u.structure().clone(), tol)?;
    min_runs_of_relative(&w, max_n, tol)
}

/// `min_runs` on the ancilla-extended pair `U ⊕ I_k`, `V ⊕ I_k`.
pub fn min_runs_embedded(
    u: &UnitaryGate,
    v: &UnitaryGate,
    k: usize,
    max_n: usize,
    tol: &Tolerances,
) -> Result<RunPlan> {
    min_runs(&u.direct_sum(k), &v.direct_sum(k), max_n, tol)
}

/// Minimal-run search on the relative gate `W` directly.
pub fn min_runs_of_relative(w: &UnitaryGate, max_n: usize, tol: &Tolerances) -> Result<RunPlan> {
    check_max_n(max_n)?;
    let spec = eig_unitary(w, tol)?;
    let base = spec.angles();
    let mut entries = sumset_level_one(&base);
    entries = dedupe_entries(entries, tol.angle_merge);
    let arc1 = arc_of_sorted(&angles_of(&entries), tol);
    let delta_single = arc1.delta;
    let ceiling = ceiling_rule(delta_single, tol);

    let mut level = entries;
    for n in 1..=max_n {
        if n > 1 {
            level = sumset_next(&level, &base, tol.angle_merge);
        }
        let arc = arc_of_sorted(&angles_of(&level), tol);
        if arc.distinguishable_now {
            let (state, overlap) = build_orthogonal_input(w, &spec, &level, n, tol)?;
            return Ok(RunPlan {
                n_runs: RunCount::Finite(n),
                input_state: Some(state),
                certified_overlap: Some(overlap),
                delta_single,
                ceiling_rule: ceiling,
            });
        }
    }
    Ok(RunPlan {
        n_runs: RunCount::NotDistinguishable,
        input_state: None,
        certified_overlap: None,
        delta_single,
        ceiling_rule: ceiling,
    })
}

/// Input state `|ψ⟩` over the N-fold system with `|⟨ψ|W^{⊗N}|ψ⟩| ≤ tol`.
///
/// Built from eigenvectors of `W`: either an antipodal pair of
/// eigenvalue-products with weights (½, ½), or a triangle of products whose
/// hull contains 0, solved by barycentric coordinates.
pub fn orthogonal_input(w: &UnitaryGate, n: usize, tol: &Tolerances) -> Result<PureState> {
    check_max_n(n)?;
    let spec = eig_unitary(w, tol)?;
    let base = spec.angles();
    let mut level = dedupe_entries(sumset_level_one(&base), tol.angle_merge);
    for _ in 1..n {
        level = sumset_next(&level, &base, tol.angle_merge);
    }
    let arc = arc_of_sorted(&angles_of(&level), tol);
    if !arc.distinguishable_now {
        return Err(Error::NotDistinguishable(format!(
            ": covering arc {:.6} < π at N = {}",
            arc.delta, n
        )));
    }
    let (state, _overlap) = build_orthogonal_input(w, &spec, &level, n, tol)?;
    Ok(state)
}

/// Product of the exact eigenvalues selected by a representative composition.
fn product_eigenvalue(spec: &Spectrum, rep: &[usize]) -> Complex64 {
    rep.iter().fold(cr(1.0), |acc, &j| acc * spec.values[j])
}

fn best_antipodal(entries: &[AngleEntry]) -> (usize, usize, f64) {
    // Entries are sorted by angle; for each, bisect for the antipode.
    let m = entries.len();
    let mut best = (0usize, 0usize, f64::INFINITY);
    for i in 0..m {
        let target = (entries[i].angle + PI).rem_euclid(TAU);
        let j0 = entries.partition_point(|e| e.angle < target);
        for dj in [j0 % m, (j0 + m - 1) % m, (j0 + 1) % m] {
            if dj == i {
                continue;
            }
            let mismatch = (circ_dist(entries[i].angle, entries[dj].angle) - PI).abs();
            if mismatch < best.2 {
                best = (i, dj, mismatch);
            }
        }
    }
    best
}

/// Triangle (indices into `entries`) whose eigenvalue hull contains 0,
/// chosen to maximise the minimal pairwise separation.
fn best_triangle(entries: &[AngleEntry]) -> Option<(usize, usize, usize)> {
    let m = entries.len();
    if m < 3 {
        return None;
    }
    let mut best: Option<((usize, usize, usize), f64)> = None;
    for i in 0..m {
        let target = (entries[i].angle + PI).rem_euclid(TAU);
        let j0 = entries.partition_point(|e| e.angle < target);
        let succ = j0 % m;
        let pred = (j0 + m - 1) % m;
        if succ == i || pred == i || succ == pred {
            continue;
        }
        let (a, b, c) = (entries[i].angle, entries[pred].angle, entries[succ].angle);
        let score = circ_dist(a, b).min(circ_dist(b, c)).min(circ_dist(a, c));
        if best.map_or(true, |(_, s)| score > s) {
            best = Some(((i, pred, succ), score));
        }
    }
    best.map(|(t, _)| t)
}

/// Solves `Σ p_i μ_i = 0, Σ p_i = 1` for three unit-circle points.
fn barycentric_weights(mu: [Complex64; 3]) -> Option<[f64; 3]> {
    let mut a = [
        [mu[0].re, mu[1].re, mu[2].re, 0.0],
        [mu[0].im, mu[1].im, mu[2].im, 0.0],
        [1.0, 1.0, 1.0, 1.0],
    ];
    // Gaussian elimination with partial pivoting on the 3x4 tableau.
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col];
        for r in 0..3 {
            if r == col {
                continue;
            }
            let f = a[r][col] / p;
            for c in col..4 {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut p = [a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]];
    for w in &mut p {
        if *w < -1e-9 {
            return None;
        }
        *w = w.max(0.0);
    }
    let s: f64 = p.iter().sum();
    for w in &mut p {
        *w /= s;
    }
    Some(p)
}

fn build_orthogonal_input(
    w: &UnitaryGate,
    spec: &Spectrum,
    entries: &[AngleEntry],
    n: usize,
    tol: &Tolerances,
) -> Result<(PureState, f64)> {
    let d = w.dim();
    let full_dim = d.checked_pow(n as u32).filter(|&x| x <= STATE_DIM_CAP);
    let full_dim = full_dim.ok_or(Error::DimensionCap(0, STATE_DIM_CAP))?;

    // Prefer an exactly antipodal pair, otherwise a triangle around 0.
    let (chosen, weights): (Vec<&AngleEntry>, Vec<f64>) = {
        let (i, j, mismatch) = best_antipodal(entries);
        if i != j && mismatch <= tol.boundary_slack * 2.0 {
            (vec![&entries[i], &entries[j]], vec![0.5, 0.5])
        } else {
            let (i, j, k) = best_triangle(entries).ok_or_else(|| {
                Error::Numerical("no antipodal pair or triangle available".into())
            })?;
            let mu = [
                product_eigenvalue(spec, &entries[i].rep),
                product_eigenvalue(spec, &entries[j].rep),
                product_eigenvalue(spec, &entries[k].rep),
            ];
            let p = barycentric_weights(mu)
                .ok_or_else(|| Error::Numerical("degenerate barycentric system".into()))?;
            (
                vec![&entries[i], &entries[j], &entries[k]],
                vec![p[0], p[1], p[2]],
            )
        }
    };

    // ψ = Σ_i √p_i |v_{rep_i(1)}⟩ ⊗ … ⊗ |v_{rep_i(N)}⟩
    let mut amps = vec![ZERO; full_dim];
    for (entry, &p) in chosen.iter().zip(weights.iter()) {
        if p == 0.0 {
            continue;
        }
        let factors: Vec<Vec<Complex64>> =
            entry.rep.iter().map(|&j| spec.vectors.col(j)).collect();
        let prod = vec_kron_all(&factors);
        let c = cr(p.sqrt());
        for (a, v) in amps.iter_mut().zip(prod.iter()) {
            *a += c * v;
        }
    }
    let structure = w.structure().repeated(n);
    let state = PureState::normalized(amps, structure)?;

    // Certify ⟨ψ|W^{⊗N}|ψ⟩ by direct application through the tensor factors.
    let mut t = Matrix::zeros(d, d);
    for a in 0..d {
        let va = spec.vectors.col(a);
        for b in 0..d {
            let vb = spec.vectors.col(b);
            let wvb = w.matrix().apply(&vb);
            let mut acc = ZERO;
            for i in 0..d {
                acc += va[i].conj() * wvb[i];
            }
            t.set(a, b, acc);
        }
    }
    let mut overlap = ZERO;
    for (ei, &pi) in chosen.iter().zip(weights.iter()) {
        for (ej, &pj) in chosen.iter().zip(weights.iter()) {
            let mut factor = cr((pi * pj).sqrt());
            for k in 0..n {
                factor *= t.at(ei.rep[k], ej.rep[k]);
            }
            overlap += factor;
        }
    }
    let overlap = overlap.norm();
    if overlap > tol.orthogonality {
        return Err(Error::Numerical(format!(
            "orthogonal input overlap {:.3e} exceeds {:.1e}",
            overlap, tol.orthogonality
        )));
    }
    Ok((state, overlap))
}

/// Per-factor covering arcs of `U1^{⊗N}` and `U2^{⊗N}` and the product-input
/// local criterion: at least one arc must reach π.
pub fn product_local_arcs(
    u1: &UnitaryGate,
    u2: &UnitaryGate,
    n: usize,
    tol: &Tolerances,
) -> Result<(f64, f64, bool)> {
    check_max_n(n)?;
    let mut deltas = [0.0f64; 2];
    for (slot, u) in [u1, u2].iter().enumerate() {
        let spec = eig_unitary(u, tol)?;
        let base = spec.angles();
        let mut level = dedupe_entries(sumset_level_one(&base), tol.angle_merge);
        for _ in 1..n {
            level = sumset_next(&level, &base, tol.angle_merge);
        }
        deltas[slot] = arc_of_sorted(&angles_of(&level), tol).delta;
    }
    let flag = deltas[0].max(deltas[1]) >= PI - tol.boundary_slack;
    Ok((deltas[0], deltas[1], flag))
}

/// Evaluates both sides of the control-unitary trace formula for
/// `U†V = P1⊗I + (I−P1)⊗u` on product inputs `ρ_A^{⊗N} ⊗ ρ_B^{⊗N}`, and the
/// minimal control run count from the angular spread of `{1} ∪ eig(u^{⊗N})`.
pub fn control_unitary_trace(
    p1: &Matrix,
    u: &UnitaryGate,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    n: usize,
    tol: &Tolerances,
) -> Result<ControlUnitaryReport> {
    check_max_n(n)?;
    if !p1.is_square() || p1.rows() != rho_a.matrix().rows() {
        return Err(Error::DimensionMismatch(format!(
            "projector {}x{} vs ρ_A dimension {}",
            p1.rows(),
            p1.cols(),
            rho_a.matrix().rows()
        )));
    }
    if u.dim() != rho_b.matrix().rows() {
        return Err(Error::DimensionMismatch(format!(
            "u dimension {} vs ρ_B dimension {}",
            u.dim(),
            rho_b.matrix().rows()
        )));
    }
    let herm = p1.hermiticity_error();
    if herm > tol.hermiticity {
        return Err(Error::NotProjector(herm));
    }
    let idem = p1.matmul(p1).max_abs_diff(p1);
    if idem > 1e-10 {
        return Err(Error::NotProjector(idem));
    }

    let da = p1.rows();
    let ib = Matrix::identity(u.dim());
    let p2 = &Matrix::identity(da) - p1;
    let w_single = &p1.kron(&ib) + &p2.kron(u.matrix());
    let sigma_single = rho_a.matrix().kron(rho_b.matrix());

    // Direct N-fold evaluation while the dimension stays reasonable; the
    // product form is algebraically identical beyond that.
    let dim_single = w_single.rows();
    let lhs = if dim_single.pow(n as u32) <= 4096 {
        let mut w_n = w_single.clone();
        let mut s_n = sigma_single.clone();
        for _ in 1..n {
            w_n = w_n.kron(&w_single);
            s_n = s_n.kron(&sigma_single);
        }
        w_n.matmul(&s_n).trace()
    } else {
        let t1 = w_single.matmul(&sigma_single).trace();
        t1.powu(n as u32)
    };

    let x1 = p1.matmul(rho_a.matrix()).trace().re;
    let x = x1.powi(n as i32);
    let t = u.matrix().matmul(rho_b.matrix()).trace();
    let rhs = cr(x) + cr(1.0 - x) * t.powu(n as u32);

    // Minimal N with angular spread of {1} ∪ eig(u^{⊗N}) at least π.
    let spec = eig_unitary(u, tol)?;
    let base = spec.angles();
    let mut level = dedupe_entries(sumset_level_one(&base), tol.angle_merge);
    let mut min_n = RunCount::NotDistinguishable;
    for nn in 1..=MAX_RUNS_LIMIT {
        if nn > 1 {
            level = sumset_next(&level, &base, tol.angle_merge);
        }
        let mut with_one = angles_of(&level);
        with_one.push(0.0);
        let merged = merge_angles(with_one, tol.angle_merge);
        if arc_of_sorted(&merged, tol).distinguishable_now {
            min_n = RunCount::Finite(nn);
            break;
        }
    }

    Ok(ControlUnitaryReport {
        lhs,
        rhs,
        identity_gap: (lhs - rhs).norm(),
        min_n_control: min_n,
    })
}
