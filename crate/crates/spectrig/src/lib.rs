//! Decision procedures and certificates for the universal rigidity of bar
//! frameworks.
//!
//! A *bar framework* is a graph whose vertices are realized as points in
//! `R^r` and whose edges are rigid bars of fixed length. Two frameworks on
//! the same graph are *equivalent* when every edge has the same length in
//! both; the distances of non-adjacent vertex pairs are free to differ. The
//! questions this crate answers are of the form: which of those free
//! distances are in fact pinned down by the bars?
//!
//! * a non-adjacent pair is **universally linked** when its distance is the
//!   same in every equivalent framework, in every dimension;
//! * a framework is **universally rigid** when every equivalent framework
//!   has exactly the same full distance matrix;
//! * it is **dimensionally rigid** when no equivalent framework exists in
//!   any strictly higher dimension.
//!
//! The machinery is linear-algebraic throughout. Stress matrices (module
//! [`stress`]) provide sufficient certificates; the Cayley configuration
//! spectrahedron (module [`spectra`]) — the set of feasible squared-distance
//! offsets for the missing edges — provides the geometric picture, faces,
//! and refutation witnesses. Module [`certify`] combines both into verdicts
//! that always carry an independently checkable witness, and module
//! [`oracle`] cross-examines those verdicts by brute-force numerical search.
//!
//! Vertex indices are 1-based in every file format, report, and displayed
//! witness, matching the usual convention for small named examples; the
//! in-memory API is 0-based like any Rust index.

pub mod certify;
pub mod error;
pub mod fixtures;
pub mod framework;
pub mod numerics;
pub mod oracle;
pub mod report;
pub mod spectra;
pub mod stress;

pub use error::{Error, Result};
pub use framework::{Framework, Graph};
pub use numerics::ToleranceConfig;
