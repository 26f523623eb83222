//! C ABI for the gate-discrimination library.
//!
//! Gates live behind opaque handles; analysis results come back as JSON
//! strings in the same shape the CLI reports use, so bindings in any
//! language parse one format. Every entry point returns a status code
//! mirroring the CLI exit codes.

use std::ffi::{c_char, CStr, CString};

use udiscrim::cli::exit_code;
use udiscrim::error::Error;
use udiscrim::gateclass::{classify_two_party, kak_decompose, lie_closure, multiparty_classify};
use udiscrim::io::{parse_gate_json, serialize_gate};
use udiscrim::linalg::matrix::Matrix;
use udiscrim::linalg::structure::PartyStructure;
use udiscrim::linalg::unitary::UnitaryGate;
use udiscrim::protocol::{
    discriminate_many, locc_discriminate, two_qubit_pipeline, Oracle, Strategy,
};
use udiscrim::spectra::{min_runs, min_runs_embedded};
use udiscrim::Tolerances;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum UdStatus {
    /// Success.
    UdOk = 0,
    /// A required pointer was null.
    UdNullPointer = 1,
    /// Invalid input: parse failure, dimension mismatch, non-unitary matrix.
    UdInvalidInput = 2,
    /// The requested strategy does not apply to these gates.
    UdStrategyInapplicable = 3,
    /// Internal numerical failure.
    UdInternalError = 4,
}

/// Opaque unitary gate handle.
pub struct UdGate {
    inner: UnitaryGate,
}

fn status_of(err: &Error) -> UdStatus {
    match exit_code(err) {
        2 => UdStatus::UdInvalidInput,
        3 => UdStatus::UdStrategyInapplicable,
        _ => UdStatus::UdInternalError,
    }
}

fn emit_string(s: String, out: *mut *mut c_char) -> UdStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            UdStatus::UdOk
        }
        Err(_) => UdStatus::UdInternalError,
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ud_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Parses a gate from JSON (`{"dims": [...], "matrix": [[re, im], ...]}`).
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ud_gate_parse_json(
    json: *const c_char,
    out: *mut *mut UdGate,
) -> UdStatus {
    if out.is_null() {
        return UdStatus::UdNullPointer;
    }
    let Some(text) = read_str(json) else {
        return UdStatus::UdNullPointer;
    };
    let tol = Tolerances::default();
    match parse_gate_json(text, &tol) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(UdGate { inner: g }));
            UdStatus::UdOk
        }
        Err(e) => status_of(&e),
    }
}

/// Builds a gate from interleaved re/im entries, row-major, with one local
/// dimension per party.
///
/// # Safety
/// `entries` must hold `2·D²` doubles and `dims` `n_parties` entries, where
/// `D` is the product of the dims.
#[no_mangle]
pub unsafe extern "C" fn ud_gate_new(
    entries: *const f64,
    dims: *const usize,
    n_parties: usize,
    out: *mut *mut UdGate,
) -> UdStatus {
    if entries.is_null() || dims.is_null() || out.is_null() || n_parties == 0 {
        return UdStatus::UdNullPointer;
    }
    let dims = std::slice::from_raw_parts(dims, n_parties).to_vec();
    let structure = match PartyStructure::new(dims) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    let d = structure.total_dim();
    let raw = std::slice::from_raw_parts(entries, 2 * d * d);
    let m = Matrix::from_fn(d, d, |i, j| {
        let k = 2 * (i * d + j);
        num_complex::Complex64::new(raw[k], raw[k + 1])
    });
    let tol = Tolerances::default();
    match UnitaryGate::new(m, structure, &tol) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(UdGate { inner: g }));
            UdStatus::UdOk
        }
        Err(e) => status_of(&e),
    }
}

/// Total Hilbert-space dimension of a gate.
///
/// # Safety
/// `gate` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ud_gate_dim(gate: *const UdGate) -> usize {
    if gate.is_null() {
        return 0;
    }
    (*gate).inner.dim()
}

/// Serialises a gate back to its JSON file format.
///
/// # Safety
/// `gate` must be live; free the string with `ud_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ud_gate_to_json(
    gate: *const UdGate,
    out_json: *mut *mut c_char,
) -> UdStatus {
    if gate.is_null() || out_json.is_null() {
        return UdStatus::UdNullPointer;
    }
    emit_string(serialize_gate(&(*gate).inner), out_json)
}

/// Frees a gate handle.
///
/// # Safety
/// `gate` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ud_gate_free(gate: *mut UdGate) {
    if !gate.is_null() {
        drop(Box::from_raw(gate));
    }
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ud_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Classifies a gate (Product, ProductSwap, PartitionPrimitive or
/// Imprimitive); the result is a JSON object.
///
/// # Safety
/// `gate` must be live and `out_json` valid; free the string with
/// `ud_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ud_classify_json(
    gate: *const UdGate,
    out_json: *mut *mut c_char,
) -> UdStatus {
    if gate.is_null() || out_json.is_null() {
        return UdStatus::UdNullPointer;
    }
    let g = &(*gate).inner;
    let tol = Tolerances::default();
    let class = if g.structure().n_parties() == 2 {
        classify_two_party(g, &tol)
    } else {
        multiparty_classify(g, &tol)
    };
    match class {
        Ok(c) => {
            let body = match &c {
                udiscrim::gateclass::GateClass::PartitionPrimitive {
                    partition,
                    permutation,
                } => serde_json::json!({
                    "label": c.label(),
                    "partition": partition,
                    "permutation": permutation,
                }),
                _ => serde_json::json!({ "label": c.label() }),
            };
            emit_string(body.to_string(), out_json)
        }
        Err(e) => status_of(&e),
    }
}

/// Minimal parallel run count for discriminating two gates, optionally on
/// the `U ⊕ I_k` ancilla extension. JSON result with `n_runs` (null when
/// not distinguishable), `delta` and the `⌈π/δ⌉` cross-check.
///
/// # Safety
/// Both gates must be live handles and `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn ud_min_runs_json(
    u: *const UdGate,
    v: *const UdGate,
    embed_levels: usize,
    max_n: usize,
    out_json: *mut *mut c_char,
) -> UdStatus {
    if u.is_null() || v.is_null() || out_json.is_null() {
        return UdStatus::UdNullPointer;
    }
    let tol = Tolerances::default();
    let plan = if embed_levels == 0 {
        min_runs(&(*u).inner, &(*v).inner, max_n, &tol)
    } else {
        min_runs_embedded(&(*u).inner, &(*v).inner, embed_levels, max_n, &tol)
    };
    match plan {
        Ok(p) => {
            let body = serde_json::json!({
                "n_runs": p.n_runs.finite(),
                "delta": p.delta_single,
                "ceiling_rule": p.ceiling_rule,
                "certified_overlap": p.certified_overlap,
            });
            emit_string(body.to_string(), out_json)
        }
        Err(e) => status_of(&e),
    }
}

/// Canonical two-qubit decomposition: global phase, interaction vector and
/// reconstruction residual as JSON.
///
/// # Safety
/// `gate` must be live and `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn ud_kak_json(
    gate: *const UdGate,
    out_json: *mut *mut c_char,
) -> UdStatus {
    if gate.is_null() || out_json.is_null() {
        return UdStatus::UdNullPointer;
    }
    let tol = Tolerances::default();
    match kak_decompose(&(*gate).inner, &tol) {
        Ok(d) => {
            let residual = d.reconstruct().max_abs_diff((*gate).inner.matrix());
            let body = serde_json::json!({
                "global_phase": [d.global_phase.re, d.global_phase.im],
                "canonical": d.canonical,
                "reconstruction_residual": residual,
            });
            emit_string(body.to_string(), out_json)
        }
        Err(e) => status_of(&e),
    }
}

/// Lie-closure dimension and matched partition as JSON.
///
/// # Safety
/// `gate` must be live and `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn ud_lie_closure_json(
    gate: *const UdGate,
    out_json: *mut *mut c_char,
) -> UdStatus {
    if gate.is_null() || out_json.is_null() {
        return UdStatus::UdNullPointer;
    }
    let tol = Tolerances::default();
    match lie_closure(&(*gate).inner, &tol) {
        Ok(r) => {
            let body = serde_json::json!({
                "closure_dimension": r.closure_dimension,
                "matched_partition": r.matched_partition,
                "is_universal_on_partition_products": r.is_universal_on_partition_products,
            });
            emit_string(body.to_string(), out_json)
        }
        Err(e) => status_of(&e),
    }
}

/// Runs one seeded LOCC discrimination trial against a hidden-gate oracle.
/// Strategies: 0 Jamiolkowski single run, 1 parallel-N, 2 two-qubit
/// pipeline, 3 elimination over M hypotheses. JSON verdict plus the
/// line-oriented transcript.
///
/// # Safety
/// `gates` must point to `n_gates` live handles and `out_json` be valid.
#[no_mangle]
pub unsafe extern "C" fn ud_simulate_json(
    gates: *const *const UdGate,
    n_gates: usize,
    strategy: u32,
    seed: u64,
    out_json: *mut *mut c_char,
) -> UdStatus {
    if gates.is_null() || out_json.is_null() || n_gates < 2 {
        return UdStatus::UdNullPointer;
    }
    let handles = std::slice::from_raw_parts(gates, n_gates);
    let mut hyps = Vec::with_capacity(n_gates);
    for &h in handles {
        if h.is_null() {
            return UdStatus::UdNullPointer;
        }
        hyps.push((*h).inner.clone());
    }
    let tol = Tolerances::default();
    let mut oracle = match Oracle::with_seed(hyps, seed) {
        Ok(o) => o,
        Err(e) => return status_of(&e),
    };
    let run = match strategy {
        0 => locc_discriminate(&mut oracle, Strategy::ChoiSingleRun, seed, &tol),
        1 => locc_discriminate(&mut oracle, Strategy::ParallelN, seed, &tol),
        2 => two_qubit_pipeline(&mut oracle, seed, &tol),
        3 => discriminate_many(&mut oracle, seed, &tol),
        _ => return UdStatus::UdInvalidInput,
    };
    match run {
        Ok((verdict, transcript)) => {
            let body = serde_json::json!({
                "guessed_index": verdict.guessed_index,
                "correct": verdict.correct,
                "oracle_uses": verdict.oracle_uses,
                "success_probability_exact": verdict.success_probability_exact,
                "transcript": transcript.to_log(),
            });
            emit_string(body.to_string(), out_json)
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cnot_json() -> CString {
        CString::new(
            r#"{"dims":[2,2],"matrix":[[1,0],[0,0],[0,0],[0,0],
                                        [0,0],[1,0],[0,0],[0,0],
                                        [0,0],[0,0],[0,0],[1,0],
                                        [0,0],[0,0],[1,0],[0,0]]}"#,
        )
        .unwrap()
    }

    fn xx_json() -> CString {
        CString::new(
            r#"{"dims":[2,2],"matrix":[[0,0],[0,0],[0,0],[1,0],
                                        [0,0],[0,0],[1,0],[0,0],
                                        [0,0],[1,0],[0,0],[0,0],
                                        [1,0],[0,0],[0,0],[0,0]]}"#,
        )
        .unwrap()
    }

    fn identity_json() -> CString {
        CString::new(
            r#"{"dims":[2,2],"matrix":[[1,0],[0,0],[0,0],[0,0],
                                        [0,0],[1,0],[0,0],[0,0],
                                        [0,0],[0,0],[1,0],[0,0],
                                        [0,0],[0,0],[0,0],[1,0]]}"#,
        )
        .unwrap()
    }

    unsafe fn parse(c: &CString) -> *mut UdGate {
        let mut g: *mut UdGate = ptr::null_mut();
        let st = ud_gate_parse_json(c.as_ptr(), &mut g);
        assert!(matches!(st, UdStatus::UdOk));
        g
    }

    #[test]
    fn parse_classify_free() {
        unsafe {
            let g = parse(&cnot_json());
            assert_eq!(ud_gate_dim(g), 4);
            let mut out: *mut c_char = ptr::null_mut();
            let st = ud_classify_json(g, &mut out);
            assert!(matches!(st, UdStatus::UdOk));
            let text = CStr::from_ptr(out).to_str().unwrap().to_string();
            assert!(text.contains("Imprimitive"));
            ud_string_free(out);
            ud_gate_free(g);
        }
    }

    #[test]
    fn rejects_bad_input_with_status() {
        unsafe {
            let bad = CString::new(r#"{"dims":[2],"matrix":[[1,0]]}"#).unwrap();
            let mut g: *mut UdGate = ptr::null_mut();
            let st = ud_gate_parse_json(bad.as_ptr(), &mut g);
            assert!(matches!(st, UdStatus::UdInvalidInput));
            let st = ud_gate_parse_json(ptr::null(), &mut g);
            assert!(matches!(st, UdStatus::UdNullPointer));
        }
    }

    #[test]
    fn kak_and_min_runs_roundtrip() {
        unsafe {
            let g = parse(&cnot_json());
            let mut out: *mut c_char = ptr::null_mut();
            assert!(matches!(ud_kak_json(g, &mut out), UdStatus::UdOk));
            let v: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            let h0 = v["canonical"][0].as_f64().unwrap();
            assert!((h0 - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
            ud_string_free(out);

            let i4 = parse(&identity_json());
            let mut out2: *mut c_char = ptr::null_mut();
            assert!(matches!(
                ud_min_runs_json(i4, g, 0, 12, &mut out2),
                UdStatus::UdOk
            ));
            let v: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(out2).to_str().unwrap()).unwrap();
            assert_eq!(v["n_runs"], 1);
            ud_string_free(out2);
            ud_gate_free(i4);
            ud_gate_free(g);
        }
    }

    #[test]
    fn simulate_choi_through_abi() {
        unsafe {
            let i4 = parse(&identity_json());
            let xx = parse(&xx_json());
            let handles = [i4 as *const UdGate, xx as *const UdGate];
            let mut out: *mut c_char = ptr::null_mut();
            let st = ud_simulate_json(handles.as_ptr(), 2, 0, 5, &mut out);
            assert!(matches!(st, UdStatus::UdOk));
            let v: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            assert_eq!(v["correct"], true);
            assert_eq!(v["oracle_uses"], 1);
            assert!(v["transcript"].as_str().unwrap().starts_with("USE fwd"));
            ud_string_free(out);
            // inapplicable strategy maps to status 3
            let cn = parse(&cnot_json());
            let handles = [i4 as *const UdGate, cn as *const UdGate];
            let mut out: *mut c_char = ptr::null_mut();
            let st = ud_simulate_json(handles.as_ptr(), 2, 0, 5, &mut out);
            assert!(matches!(st, UdStatus::UdStrategyInapplicable));
            ud_gate_free(cn);
            ud_gate_free(i4);
            ud_gate_free(xx);
        }
    }

    #[test]
    fn gate_new_from_raw_entries() {
        unsafe {
            // Hadamard on one qubit from interleaved entries.
            let r = 1.0 / 2.0f64.sqrt();
            let entries = [r, 0.0, r, 0.0, r, 0.0, -r, 0.0];
            let dims = [2usize];
            let mut g: *mut UdGate = ptr::null_mut();
            let st = ud_gate_new(entries.as_ptr(), dims.as_ptr(), 1, &mut g);
            assert!(matches!(st, UdStatus::UdOk));
            let mut out: *mut c_char = ptr::null_mut();
            assert!(matches!(ud_gate_to_json(g, &mut out), UdStatus::UdOk));
            let v: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            assert_eq!(v["dims"], serde_json::json!([2]));
            ud_string_free(out);
            ud_gate_free(g);
        }
    }

    #[test]
    fn generated_header_exists() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("include")
            .join("udiscrim.h");
        let text = std::fs::read_to_string(header).expect("cbindgen header generated at build");
        assert!(text.contains("UdStatus"));
        assert!(text.contains("ud_gate_parse_json"));
        assert!(text.contains("ud_simulate_json"));
    }
}
