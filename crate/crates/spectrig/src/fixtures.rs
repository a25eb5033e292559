//! Small named frameworks used across the test suites and the demo gallery.
//!
//! Each fixture exercises a different corner of the theory:
//!
//! * [`fold5`] — five points with a collinear triple; two pairs are
//!   universally linked but the framework folds about the collinear axis,
//!   so it is neither universally nor dimensionally rigid.
//! * [`rigid5`] — a universally rigid framework whose only PSD stress has
//!   rank 1, below the maximum 2: the classical rank certificate fails while
//!   the sharper linear test succeeds.
//! * [`rigid5_minus_edge`] — the same framework minus one edge; still
//!   universally rigid, but now even the linear test is inconclusive, a
//!   reminder that the certificate is sufficient only.
//! * [`rectangle4`] — a 1×2 rectangle on a 4-cycle; no PSD stress at all,
//!   an affine motion, and a closed-form spectrahedron that the tests
//!   reproduce point by point.
//! * [`line4`] — four collinear points missing one end-to-end bar; the
//!   maximum-rank PSD stress exists and the full classical certificate
//!   chain goes through.

use nalgebra::DMatrix;

use crate::framework::{Framework, Graph};

fn make(n: usize, edges: &[(usize, usize)], r: usize, coords: &[f64]) -> Framework {
    let graph = Graph::new(n, edges).expect("fixture graph is valid");
    let config = DMatrix::from_row_slice(n, r, coords);
    Framework::new(graph, config).expect("fixture configuration is valid")
}

/// Five points in the plane with vertices 1,2,3 collinear.
///
/// Coordinates (1-based vertices): p1=(0,0), p2=(1,0), p3=(2,0), p4=(1,1),
/// p5=(1,−1); edges {12, 23, 13, 14, 24, 25, 35}; missing pairs {15}, {34},
/// {45}. The framework carries a rank-1 PSD stress supported on the
/// collinear triple, which certifies {1,5} and {3,4} as universally linked;
/// {4,5} is not, because each of p4, p5 can fold independently across the
/// line through p1, p2, p3.
pub fn fold5() -> Framework {
    make(
        5,
        &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (1, 4), (2, 4)],
        2,
        &[
            0.0, 0.0, //
            1.0, 0.0, //
            2.0, 0.0, //
            1.0, 1.0, //
            1.0, -1.0,
        ],
    )
}

/// A universally rigid framework on five vertices.
///
/// Coordinates: p1=(0,2), p2=(1,1), p3=(2,0), p4=(0,0), p5=(−1,−1); edges
/// {12, 23, 13, 14, 24, 15, 35, 45}; missing pairs {25}, {34}. Vertices
/// 1,2,3 are collinear and the same rank-1 stress as [`fold5`] applies, so
/// the maximum stress rank here is 1 < n−r−1 = 2.
pub fn rigid5() -> Framework {
    make(
        5,
        &[
            (0, 1),
            (1, 2),
            (0, 2),
            (0, 3),
            (1, 3),
            (0, 4),
            (2, 4),
            (3, 4),
        ],
        2,
        &[
            0.0, 2.0, //
            1.0, 1.0, //
            2.0, 0.0, //
            0.0, 0.0, //
            -1.0, -1.0,
        ],
    )
}

/// [`rigid5`] with the edge {1,4} removed; missing pairs {14}, {25}, {34}.
///
/// Still universally rigid, but the linear certificate now has the nonzero
/// solution y14 = −y34, y25 = 0 and must answer "unknown".
pub fn rigid5_minus_edge() -> Framework {
    make(
        5,
        &[(0, 1), (1, 2), (0, 2), (1, 3), (0, 4), (2, 4), (3, 4)],
        2,
        &[
            0.0, 2.0, //
            1.0, 1.0, //
            2.0, 0.0, //
            0.0, 0.0, //
            -1.0, -1.0,
        ],
    )
}

/// A 2×1 rectangle realized on a 4-cycle.
///
/// Coordinates: p1=(−1,−0.5), p2=(−1,0.5), p3=(1,0.5), p4=(1,−0.5); edges
/// {12, 23, 34, 14}; missing pairs (the diagonals) {13}, {24}, both of
/// squared length 5. The feasible diagonal offsets form the region
/// `y24 ≤ −y13` and `y24·(y13+5) ≥ −(5·y13+16)`, a set with nonempty
/// interior: the rectangle is neither dimensionally nor universally rigid
/// and admits no nonzero PSD stress.
pub fn rectangle4() -> Framework {
    make(
        4,
        &[(0, 1), (1, 2), (2, 3), (0, 3)],
        2,
        &[
            -1.0, -0.5, //
            -1.0, 0.5, //
            1.0, 0.5, //
            1.0, -0.5,
        ],
    )
}

/// Four collinear points 0, 1, 2, 3 on the line, all bars present except
/// the end-to-end pair {1,4}.
///
/// The Gale space is spanned by (1,−2,1,0) and (0,1,−2,1), and the stress
/// matrix built from both vectors is PSD of rank 2 = n−r−1: the classical
/// maximum-rank certificate applies, the framework has no affine motion,
/// and every check in the chain certifies.
pub fn line4() -> Framework {
    make(
        4,
        &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
        1,
        &[0.0, 1.0, 2.0, 3.0],
    )
}

/// All fixtures with stable display names, for galleries and bulk tests.
pub fn all() -> Vec<(&'static str, Framework)> {
    vec![
        ("fold5", fold5()),
        ("rigid5", rigid5()),
        ("rigid5_minus_edge", rigid5_minus_edge()),
        ("rectangle4", rectangle4()),
        ("line4", line4()),
    ]
}
