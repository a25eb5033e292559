//! Framework files and analysis reports — the JSON that crosses the
//! process boundary.
//!
//! A framework file is an object with keys `"dimension"`, `"vertices"`
//! (array of coordinate arrays, all of length `dimension`) and `"edges"`
//! (array of two-element arrays of 1-based vertex indices). Reports mirror
//! [`certify::Analysis`]: one object per property with the keys
//! `property`, `verdict`, `witness`, `detail`, `tolerances`, `elapsed_ms`
//! in that fixed order, so byte-wise diffs of two reports are meaningful.
//! Vertex indices are 1-based in both directions; everything in-memory
//! stays 0-based.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::Value;

use crate::certify::{Analysis, Certificate, Property, Verdict, Witness};
use crate::error::{Error, Result};
use crate::framework::{Framework, Graph};
use crate::stress::{PsdStressOutcome, StressMatrix};

// ─── framework files ───────────────────────────────────────────────────────

fn file_err(msg: impl Into<String>) -> Error {
    Error::FileFormat(msg.into())
}

/// Parses the JSON framework file format. Error messages name the offending
/// field (`edges[3]: …`) so the CLI can forward them verbatim.
pub fn parse_framework(text: &str) -> Result<Framework> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| file_err(format!("not valid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| file_err("top level must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "dimension" | "vertices" | "edges") {
            return Err(file_err(format!(
                "unknown key {key:?}; expected dimension, vertices, edges"
            )));
        }
    }

    let dimension = obj
        .get("dimension")
        .ok_or_else(|| file_err("missing key \"dimension\""))?
        .as_u64()
        .ok_or_else(|| file_err("dimension: must be a positive integer"))? as usize;
    if dimension == 0 {
        return Err(file_err("dimension: must be at least 1"));
    }

    let vertices = obj
        .get("vertices")
        .ok_or_else(|| file_err("missing key \"vertices\""))?
        .as_array()
        .ok_or_else(|| file_err("vertices: must be an array"))?;
    let n = vertices.len();
    let mut config = DMatrix::zeros(n, dimension);
    for (i, row) in vertices.iter().enumerate() {
        let coords = row
            .as_array()
            .ok_or_else(|| file_err(format!("vertices[{i}]: must be an array of numbers")))?;
        if coords.len() != dimension {
            return Err(file_err(format!(
                "vertices[{i}]: has {} coordinates, dimension says {dimension}",
                coords.len()
            )));
        }
        for (k, c) in coords.iter().enumerate() {
            let x = c
                .as_f64()
                .ok_or_else(|| file_err(format!("vertices[{i}][{k}]: must be a number")))?;
            if !x.is_finite() {
                return Err(file_err(format!("vertices[{i}][{k}]: must be finite")));
            }
            config[(i, k)] = x;
        }
    }

    let edges_json = obj
        .get("edges")
        .ok_or_else(|| file_err("missing key \"edges\""))?
        .as_array()
        .ok_or_else(|| file_err("edges: must be an array"))?;
    let mut edges = Vec::with_capacity(edges_json.len());
    for (k, e) in edges_json.iter().enumerate() {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| file_err(format!("edges[{k}]: must be a two-element array")))?;
        let mut endpoint = [0usize; 2];
        for (slot, idx) in pair.iter().enumerate() {
            let v = idx
                .as_u64()
                .ok_or_else(|| file_err(format!("edges[{k}]: indices must be integers ≥ 1")))?;
            if v == 0 || v as usize > n {
                return Err(file_err(format!(
                    "edges[{k}]: vertex index {v} out of range 1..={n}"
                )));
            }
            endpoint[slot] = v as usize - 1;
        }
        if endpoint[0] == endpoint[1] {
            return Err(file_err(format!(
                "edges[{k}]: loop at vertex {}",
                endpoint[0] + 1
            )));
        }
        edges.push((endpoint[0], endpoint[1]));
    }

    // Graph::new re-checks loops and ranges and additionally rejects
    // duplicates, disconnected graphs, and the complete graph; Framework::new
    // rejects configurations that do not affinely span R^dimension. Both
    // speak about this file's content, so their complaints are file errors.
    let graph = Graph::new(n, &edges).map_err(|e| file_err(e.to_string()))?;
    Framework::new(graph, config).map_err(|e| file_err(e.to_string()))
}

/// Serializes a framework in the same schema [`parse_framework`] reads.
pub fn framework_to_json(fw: &Framework) -> String {
    let doc = FrameworkDoc::from(fw);
    to_pretty_json(&doc)
}

#[derive(Serialize)]
struct FrameworkDoc {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
}

impl From<&Framework> for FrameworkDoc {
    fn from(fw: &Framework) -> Self {
        let config = fw.config();
        FrameworkDoc {
            dimension: fw.dim(),
            vertices: (0..fw.n())
                .map(|i| config.row(i).iter().copied().collect())
                .collect(),
            edges: fw.graph().edges().map(|(i, j)| [i + 1, j + 1]).collect(),
        }
    }
}

// ─── reports ───────────────────────────────────────────────────────────────

/// Serializable mirror of one [`Certificate`].
#[derive(Serialize)]
struct CertificateDoc {
    property: PropertyDoc,
    verdict: &'static str,
    witness: Option<WitnessDoc>,
    detail: String,
    tolerances: TolerancesDoc,
    /// `null` unless the report was built with timings; wall-clock values
    /// would break byte-for-byte determinism of default reports.
    elapsed_ms: Option<u64>,
}

#[derive(Serialize)]
struct PropertyDoc {
    name: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pair: Option<[usize; 2]>,
}

#[derive(Serialize)]
struct TolerancesDoc {
    rank_tol: f64,
    psd_tol: f64,
    solver_tol: f64,
}

#[derive(Serialize)]
#[serde(tag = "kind")]
enum WitnessDoc {
    #[serde(rename = "stress_matrix")]
    Stress { rank: usize, psd: bool, omega: Vec<Vec<f64>> },
    /// Indexed like `missing_pairs` at the top level of the report.
    #[serde(rename = "y_vector")]
    YVector { y: Vec<f64> },
    #[serde(rename = "equivalent_framework")]
    EquivalentFramework {
        dimension: usize,
        vertices: Vec<Vec<f64>>,
        edges: Vec<[usize; 2]>,
    },
    /// Column span of a solution space; `columns` may be 0 (only the zero
    /// solution).
    #[serde(rename = "face_basis")]
    Basis { columns: usize, basis: Vec<Vec<f64>> },
}

#[derive(Serialize)]
#[serde(tag = "outcome")]
enum StressSearchDoc {
    #[serde(rename = "found")]
    Found { rank: usize, psd: bool, omega: Vec<Vec<f64>> },
    #[serde(rename = "absent")]
    Absent,
    /// Carries the best (indefinite) iterate for diagnostics.
    #[serde(rename = "unknown")]
    Unknown { rank: usize, psd: bool, omega: Vec<Vec<f64>> },
}

/// The full `analyze` report. Field order is serialization order.
#[derive(Serialize)]
pub struct Report {
    framework: FrameworkDoc,
    /// 1-based, lexicographic — the index set for every y vector below.
    missing_pairs: Vec<[usize; 2]>,
    stress_search: StressSearchDoc,
    certificates: Vec<CertificateDoc>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn stress_doc(s: &StressMatrix) -> (usize, bool, Vec<Vec<f64>>) {
    (s.rank, s.psd, matrix_rows(&s.omega))
}

fn witness_doc(w: &Witness) -> WitnessDoc {
    match w {
        Witness::Stress(s) => {
            let (rank, psd, omega) = stress_doc(s);
            WitnessDoc::Stress { rank, psd, omega }
        }
        Witness::YVector(y) => WitnessDoc::YVector {
            y: y.iter().copied().collect(),
        },
        Witness::EquivalentFramework(fw) => {
            let doc = FrameworkDoc::from(fw);
            WitnessDoc::EquivalentFramework {
                dimension: doc.dimension,
                vertices: doc.vertices,
                edges: doc.edges,
            }
        }
        Witness::Basis(b) => WitnessDoc::Basis {
            columns: b.ncols(),
            basis: matrix_rows(b),
        },
    }
}

fn property_doc(p: &Property) -> PropertyDoc {
    let (name, pair) = match p {
        Property::UniversallyLinked { pair } => {
            ("universally_linked", Some([pair.0 + 1, pair.1 + 1]))
        }
        Property::UniversallyRigid => ("universally_rigid", None),
        Property::DimensionallyRigid => ("dimensionally_rigid", None),
        Property::NoAffineMotion => ("no_affine_motion", None),
        Property::FarkasStatement1 => ("farkas_statement_1", None),
        Property::FarkasStatement2 => ("farkas_statement_2", None),
    };
    PropertyDoc { name, pair }
}

fn certificate_doc(c: &Certificate, elapsed_ms: Option<u64>) -> CertificateDoc {
    CertificateDoc {
        property: property_doc(&c.property),
        verdict: match c.verdict {
            Verdict::Certified => "certified",
            Verdict::Refuted => "refuted",
            Verdict::Unknown => "unknown",
        },
        witness: c.witness.as_ref().map(witness_doc),
        detail: c.detail.clone(),
        tolerances: TolerancesDoc {
            rank_tol: c.tolerances.rank_tol,
            psd_tol: c.tolerances.psd_tol,
            solver_tol: c.tolerances.solver_tol,
        },
        elapsed_ms,
    }
}

/// Assembles the report for an analysis of `fw`. With `timings` false every
/// `elapsed_ms` is `null` and the output is byte-identical across runs with
/// the same inputs and seed.
pub fn build_report(fw: &Framework, analysis: &Analysis, timings: bool) -> Report {
    let t = &analysis.timings;
    let when = |ms: u64| timings.then_some(ms);

    let mut certificates = Vec::new();
    for (k, cert) in analysis.linked.iter().enumerate() {
        certificates.push(certificate_doc(cert, when(t.linked_ms[k])));
    }
    certificates.push(certificate_doc(&analysis.rigidity, when(t.rigidity_ms)));
    certificates.push(certificate_doc(&analysis.affine, when(t.affine_ms)));
    certificates.push(certificate_doc(
        &analysis.dimensional,
        when(t.dimensional_ms),
    ));
    certificates.push(certificate_doc(&analysis.farkas.statement1, when(t.farkas_ms)));
    certificates.push(certificate_doc(&analysis.farkas.statement2, when(t.farkas_ms)));

    Report {
        framework: FrameworkDoc::from(fw),
        missing_pairs: fw
            .graph()
            .missing_edges()
            .iter()
            .map(|&(i, j)| [i + 1, j + 1])
            .collect(),
        stress_search: stress_search_doc(&analysis.stress),
        certificates,
    }
}

impl Report {
    /// Pretty JSON with a trailing newline, deterministic for a fixed
    /// analysis.
    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

fn stress_search_doc(outcome: &PsdStressOutcome) -> StressSearchDoc {
    match outcome {
        PsdStressOutcome::Found(s) => {
            let (rank, psd, omega) = stress_doc(s);
            StressSearchDoc::Found { rank, psd, omega }
        }
        PsdStressOutcome::Absent => StressSearchDoc::Absent,
        PsdStressOutcome::Unknown(s) => {
            let (rank, psd, omega) = stress_doc(s);
            StressSearchDoc::Unknown { rank, psd, omega }
        }
    }
}

/// Serializes one stress-search outcome alone — the same object that
/// appears under `stress_search` in the full report.
pub fn stress_search_to_json(outcome: &PsdStressOutcome) -> String {
    to_pretty_json(&stress_search_doc(outcome))
}

/// Serializes one certificate alone, in the report's certificate schema.
pub fn certificate_to_json(cert: &Certificate) -> String {
    to_pretty_json(&certificate_doc(cert, None))
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value)
        .expect("report serialization cannot fail: all values are finite");
    s.push('\n');
    s
}

// ─── oracle result serialization ───────────────────────────────────────────

/// Serializable form of an [`crate::oracle::OracleResult`]. The oracle is
/// evidence, not proof, and the report says so explicitly.
#[derive(Serialize)]
pub struct OracleReport {
    grade: &'static str,
    dimension: usize,
    restarts: usize,
    seed: u64,
    kept: usize,
    /// Largest edge violation over all kept configurations.
    residual: f64,
    /// Per missing pair (1-based, lexicographic): observed interval of the
    /// squared distance and its spread.
    intervals: Vec<OracleInterval>,
}

#[derive(Serialize)]
struct OracleInterval {
    pair: [usize; 2],
    lo: f64,
    hi: f64,
    spread: f64,
}

/// Assembles the oracle report for a finished search.
pub fn build_oracle_report(
    fw: &Framework,
    result: &crate::oracle::OracleResult,
    dimension: usize,
    restarts: usize,
    seed: u64,
) -> OracleReport {
    OracleReport {
        grade: "evidence only: randomized search, can contradict certificates but never confirm them",
        dimension,
        restarts,
        seed,
        kept: result.found.len(),
        residual: result.residual,
        intervals: fw
            .graph()
            .missing_edges()
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| {
                let (lo, hi) = result.intervals[k];
                OracleInterval {
                    pair: [i + 1, j + 1],
                    lo,
                    hi,
                    spread: hi - lo,
                }
            })
            .collect(),
    }
}

impl OracleReport {
    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

// ─── tests ─────────────────────────────────────────────────────────────────
