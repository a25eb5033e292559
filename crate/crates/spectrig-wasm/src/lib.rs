//! Browser bindings for the rigidity toolkit.
//!
//! Every function takes and returns strings: frameworks come in as the same
//! JSON the CLI reads, results go out as report JSON or CSV. Failures are
//! returned as a JSON object `{"error": "..."}` rather than thrown, so the
//! page logic is a single `JSON.parse` away from either outcome and the
//! functions stay callable (and testable) on non-wasm targets.

use wasm_bindgen::prelude::wasm_bindgen;

use spectrig::certify::analyze;
use spectrig::oracle::search_equivalent;
use spectrig::report;
use spectrig::spectra::build_spectrahedron;
use spectrig::{fixtures, Framework, ToleranceConfig};

fn error_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

fn parse(framework: &str) -> Result<Framework, String> {
    report::parse_framework(framework).map_err(|e| error_json(e))
}

/// Full certificate report for a framework file, as JSON. Deterministic in
/// `(framework, seed)`.
#[wasm_bindgen]
pub fn analyze_json(framework: &str, seed: u64) -> String {
    let fw = match parse(framework) {
        Ok(fw) => fw,
        Err(e) => return e,
    };
    let cfg = ToleranceConfig::default();
    match analyze(&fw, &cfg, seed) {
        Ok(analysis) => report::build_report(&fw, &analysis, false).to_json(),
        Err(e) => error_json(e),
    }
}

/// CSV grid of `lambda_min`/membership over the 2-D slice of the
/// spectrahedron spanned by two missing pairs (1-based vertex indices).
#[wasm_bindgen]
pub fn slice_csv(
    framework: &str,
    a1: u32,
    a2: u32,
    b1: u32,
    b2: u32,
    lo: f64,
    hi: f64,
    steps: u32,
) -> String {
    let fw = match parse(framework) {
        Ok(fw) => fw,
        Err(e) => return e,
    };
    if a1 == 0 || a2 == 0 || b1 == 0 || b2 == 0 {
        return error_json("vertex indices are 1-based");
    }
    let cfg = ToleranceConfig::default();
    let result = build_spectrahedron(&fw).and_then(|spec| {
        spec.slice_csv(
            (a1 as usize - 1, a2 as usize - 1),
            (b1 as usize - 1, b2 as usize - 1),
            lo,
            hi,
            steps as usize,
            &cfg,
        )
    });
    match result {
        Ok(csv) => csv,
        Err(e) => error_json(e),
    }
}

/// Randomized equivalent-framework search; empirical distance intervals per
/// missing pair, as JSON. Evidence-grade, not a certificate.
#[wasm_bindgen]
pub fn oracle_json(framework: &str, dim: u32, restarts: u32, seed: u64) -> String {
    let fw = match parse(framework) {
        Ok(fw) => fw,
        Err(e) => return e,
    };
    let s = if dim == 0 { fw.dim() } else { dim as usize };
    let cfg = ToleranceConfig::default();
    match search_equivalent(&fw, s, restarts as usize, seed, &cfg) {
        Ok(result) => report::build_oracle_report(&fw, &result, s, restarts as usize, seed).to_json(),
        Err(e) => error_json(e),
    }
}

/// Framework JSON for one of the built-in example frameworks, for the demo
/// gallery. Unknown names list the available ones in the error.
#[wasm_bindgen]
pub fn fixture_json(name: &str) -> String {
    for (key, fw) in fixtures::all() {
        if key == name {
            return report::framework_to_json(&fw);
        }
    }
    let names: Vec<&str> = fixtures::all().iter().map(|(k, _)| *k).collect();
    error_json(format!(
        "unknown fixture {name:?}; available: {}",
        names.join(", ")
    ))
}

/// The missing (non-adjacent) pairs of a framework as a JSON array of
/// 1-based `[i, j]` pairs, in the order the oracle and slice reports use.
#[wasm_bindgen]
pub fn missing_pairs_json(framework: &str) -> String {
    let fw = match parse(framework) {
        Ok(fw) => fw,
        Err(e) => return e,
    };
    let pairs: Vec<[usize; 2]> = fw
        .graph()
        .missing_edges()
        .iter()
        .map(|&(i, j)| [i + 1, j + 1])
        .collect();
    serde_json::to_string(&pairs).expect("array of integers serializes")
}
