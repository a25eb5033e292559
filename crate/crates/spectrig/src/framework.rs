//! Graphs, configurations, and the EDM operator toolbox.
//!
//! A [`Framework`] couples a connected, non-complete [`Graph`] with a point
//! configuration whose centroid sits at the origin. The operators `T`, `K`
//! and their projected versions `T_V`, `K_V` translate between squared
//! Euclidean distance matrices (EDMs) and Gram-type matrices; they are the
//! bridge between metric data and the positive semidefinite world where all
//! the rigidity arguments happen. The canonical `V` matrix — an orthonormal
//! basis of `e⊥` — is fixed once and for all by a Householder reflector so
//! every derived quantity is reproducible.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{self, ToleranceConfig};

// ─── graphs ──────────────────────────────────────────────────────────────

/// A simple connected graph that is not complete.
///
/// Vertices are `0..n` internally; all I/O surfaces (files, reports, CLI
/// flags) are 1-based. Edges are stored as ordered pairs `(i, j)` with
/// `i < j`. Because the graph is not complete, the missing-edge set is
/// nonempty — those pairs index the coordinates of the Cayley configuration
/// spectrahedron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    /// Builds a graph on `n` vertices from 0-based endpoint pairs.
    ///
    /// # Errors
    /// `InvalidInput` on loops, duplicate or out-of-range edges, and on
    /// graphs that are disconnected or complete.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!(
                "need at least 3 vertices for a connected non-complete graph, got {n}"
            )));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("loop at vertex {}", a + 1)));
            }
            if a >= n || b >= n {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) out of range for {n} vertices",
                    a + 1,
                    b + 1
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !set.insert((i, j)) {
                return Err(Error::invalid(format!(
                    "duplicate edge ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        let g = Graph { n, edges: set };
        if !g.is_connected() {
            return Err(Error::invalid("graph is not connected"));
        }
        if g.edges.len() == n * (n - 1) / 2 {
            return Err(Error::invalid(
                "graph is complete: no missing edges, nothing to decide",
            ));
        }
        Ok(g)
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as 0-based `(i, j)` pairs with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Whether `{i, j}` is an edge (0-based, either order).
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&key)
    }

    /// Missing edges (non-adjacent vertex pairs) in lexicographic order —
    /// the index set of the spectrahedron coordinates.
    pub fn missing_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if !self.edges.contains(&(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

// ─── frameworks ──────────────────────────────────────────────────────────

/// A bar framework: a graph realized as points in `R^r`.
///
/// The configuration matrix `P` is `n × r` with row `i` holding vertex `i`'s
/// coordinates. Construction centers the points on their centroid (`P^T e =
/// 0`) — distances are unaffected — and checks that they affinely span
/// `R^r`, i.e. that `[P e]` has full column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    graph: Graph,
    config: DMatrix<f64>,
}

impl Framework {
    /// Builds a framework from a graph and an `n × r` configuration matrix.
    ///
    /// # Errors
    /// `InvalidInput` when the row count does not match the vertex count,
    /// entries are non-finite, `r` is zero or exceeds `n − 1`, or the points
    /// fail to affinely span `R^r`.
    pub fn new(graph: Graph, config: DMatrix<f64>) -> Result<Self> {
        let n = graph.n();
        let r = config.ncols();
        if config.nrows() != n {
            return Err(Error::invalid(format!(
                "configuration has {} rows but the graph has {n} vertices",
                config.nrows()
            )));
        }
        if r == 0 || r > n - 1 {
            return Err(Error::invalid(format!(
                "dimension must satisfy 1 <= r <= n-1, got r={r}, n={n}"
            )));
        }
        if !config.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("configuration has non-finite entries"));
        }
        let centered = center(&config);
        // Affine span: with the centroid at the origin, [P e] has full
        // column rank exactly when P itself has rank r.
        let cfg = ToleranceConfig::default();
        if numerics::rank_rect(&centered, &cfg)? != r {
            return Err(Error::invalid(format!(
                "points do not affinely span R^{r}; lower the declared dimension"
            )));
        }
        Ok(Framework {
            graph,
            config: centered,
        })
    }

    /// Convenience constructor from per-vertex coordinate slices.
    pub fn from_points(graph: Graph, points: &[&[f64]]) -> Result<Self> {
        let n = points.len();
        let r = points.first().map_or(0, |p| p.len());
        if points.iter().any(|p| p.len() != r) {
            return Err(Error::invalid("points have inconsistent dimensions"));
        }
        let config = DMatrix::from_fn(n, r, |i, j| points[i][j]);
        Framework::new(graph, config)
    }

    /// The underlying graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Embedding dimension `r` (points affinely span `R^r`).
    pub fn dim(&self) -> usize {
        self.config.ncols()
    }

    /// The centered `n × r` configuration matrix.
    pub fn config(&self) -> &DMatrix<f64> {
        &self.config
    }

    /// Squared-distance matrix `D_p = (‖p^i − p^j‖²)`.
    pub fn edm(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = self.config.row(i) - self.config.row(j);
                let v = diff.norm_squared();
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        d
    }

    /// Projected Gram matrix `X = V^T P P^T V`, a PSD matrix of order
    /// `n − 1` and rank `r`.
    pub fn projected_gram(&self) -> DMatrix<f64> {
        let v = build_v(self.n()).expect("framework has n >= 3");
        let vp = v.transpose() * &self.config;
        &vp * vp.transpose()
    }

    /// Largest inter-point distance (not squared); 0 for a single point.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                best = best.max((self.config.row(i) - self.config.row(j)).norm());
            }
        }
        best
    }
}

/// Translates a configuration so its centroid is the origin.
pub fn center(config: &DMatrix<f64>) -> DMatrix<f64> {
    let n = config.nrows();
    if n == 0 {
        return config.clone();
    }
    let centroid = config.row_sum() / n as f64;
    let mut out = config.clone();
    for mut row in out.row_iter_mut() {
        row -= &centroid;
    }
    out
}

// ─── the canonical V matrix and the Gower operators ─────────────────────

/// Canonical `n × (n−1)` matrix with `V^T e = 0` and `V^T V = I`.
///
/// Columns `2..n` of the Householder reflector that maps `e` to `√n·e_1`.
/// Any other valid choice differs by a right orthogonal factor, which leaves
/// every rank and membership decision in this crate invariant; fixing this
/// one makes all reported matrices reproducible.
pub fn build_v(n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::invalid(format!("build_v needs n >= 2, got {n}")));
    }
    // u = e − √n·e1; H = I − 2 u u^T / (u^T u) swaps e and √n·e1.
    let mut u = DVector::from_element(n, 1.0);
    u[0] -= (n as f64).sqrt();
    let scale = 2.0 / u.norm_squared();
    let mut v = DMatrix::zeros(n, n - 1);
    for col in 0..n - 1 {
        let j = col + 1;
        for i in 0..n {
            v[(i, col)] = (if i == j { 1.0 } else { 0.0 }) - scale * u[i] * u[j];
        }
    }
    Ok(v)
}

/// Gower operator `T(D) = −½ J D J` with `J = I − ee^T/n`: maps hollow
/// symmetric matrices to centered ones, inverse of [`op_k`] on those
/// subspaces.
pub fn op_t(d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.nrows();
    let j = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    -0.5 * (&j * d * &j)
}

/// Gower operator `K(B) = diag(B) e^T + e diag(B)^T − 2B`: maps centered
/// symmetric matrices to hollow ones, inverse of [`op_t`].
pub fn op_k(b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = b.nrows();
    let diag = b.diagonal();
    DMatrix::from_fn(n, n, |i, j| diag[i] + diag[j] - 2.0 * b[(i, j)])
}

/// Projected operator `T_V(D) = −½ V^T D V`, producing an order `n−1`
/// matrix; on EDMs this recovers the projected Gram matrix.
pub fn op_tv(d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let v = build_v(d.nrows())?;
    Ok(-0.5 * (v.transpose() * d * &v))
}

/// Projected operator `K_V(X) = K(V X V^T)`, producing an order `n = order(X)+1`
/// matrix; on PSD inputs this produces an EDM.
pub fn op_kv(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let v = build_v(x.nrows() + 1)?;
    Ok(op_k(&(&v * x * v.transpose())))
}

/// Outcome of an EDM test: the characterization is `diag(D) = 0`, `D`
/// symmetric, and `T(D) ⪰ 0`; the embedding dimension is `rank T(D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdmCheck {
    /// Whether the matrix is a Euclidean squared-distance matrix.
    pub is_edm: bool,
    /// `rank T(D)` when `is_edm`, else `None`.
    pub embedding_dim: Option<usize>,
    /// Human-readable reason for rejection when `is_edm` is false.
    pub reason: Option<String>,
}

/// Tests whether `d` is a Euclidean squared-distance matrix.
pub fn edm_check(d: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<EdmCheck> {
    let reject = |reason: &str| EdmCheck {
        is_edm: false,
        embedding_dim: None,
        reason: Some(reason.to_string()),
    };
    if d.nrows() != d.ncols() {
        return Ok(reject("matrix is not square"));
    }
    let scale = d.amax().max(1.0);
    if (d - d.transpose()).amax() > cfg.solver_tol * scale {
        return Ok(reject("matrix is not symmetric"));
    }
    if d.diagonal().amax() > cfg.solver_tol * scale {
        return Ok(reject("diagonal is not zero"));
    }
    let t = op_t(d);
    if !numerics::psd_check(&t, cfg)? {
        return Ok(reject("T(D) is not positive semidefinite"));
    }
    Ok(EdmCheck {
        is_edm: true,
        embedding_dim: Some(numerics::rank(&t, cfg)?),
        reason: None,
    })
}

/// Factors a centered PSD matrix `B` (`Be = 0`) into a configuration `P`
/// with `P P^T = B`, `P^T e = 0`, and exactly `rank B` columns. Columns are
/// ordered by decreasing eigenvalue.
///
/// # Errors
/// `InvalidInput` when `B` fails the PSD check or `Be ≠ 0`.
pub fn realize(b: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<DMatrix<f64>> {
    let n = b.nrows();
    if !numerics::psd_check(b, cfg)? {
        return Err(Error::invalid("realize expects a PSD matrix"));
    }
    let row_sums = b * DVector::from_element(n, 1.0);
    if row_sums.amax() > cfg.solver_tol * b.amax().max(1.0) * n as f64 {
        return Err(Error::invalid("realize expects Be = 0 (centered Gram)"));
    }
    let eig = numerics::sym_eig(b)?;
    let cut = cfg.rank_tol * numerics::spectral_scale(&eig).max(1.0);
    // Ascending eigenvalues: the positive ones sit at the tail. Emit the
    // largest first.
    let keep: Vec<usize> = (0..n).rev().filter(|&k| eig.values[k] > cut).collect();
    let mut p = DMatrix::zeros(n, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        let lam = eig.values[k].sqrt();
        for i in 0..n {
            p[(i, col)] = eig.vectors[(i, k)] * lam;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn graph_rejects_bad_inputs() {
        assert!(Graph::new(4, &[(0, 0)]).is_err()); // loop
        assert!(Graph::new(4, &[(0, 5)]).is_err()); // out of range
        assert!(Graph::new(4, &[(0, 1), (1, 0)]).is_err()); // duplicate
        assert!(Graph::new(4, &[(0, 1), (2, 3)]).is_err()); // disconnected
        assert!(Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).is_err()); // complete
    }

    #[test]
    fn missing_edges_are_lexicographic() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(g.missing_edges(), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn build_v_defining_properties() {
        for n in 2..=7 {
            let v = build_v(n).unwrap();
            let e = DVector::from_element(n, 1.0);
            assert!((v.transpose() * &e).amax() < 1e-12, "V^T e = 0 for n={n}");
            assert!(
                (v.transpose() * &v - DMatrix::identity(n - 1, n - 1)).amax() < 1e-12,
                "V^T V = I for n={n}"
            );
        }
        assert!(build_v(1).is_err());
    }

    #[test]
    fn build_v_n2_is_the_unique_column() {
        let v = build_v(2).unwrap();
        let expect = 1.0 / 2.0f64.sqrt();
        assert!(
            (v[(0, 0)] - expect).abs() < 1e-12 && (v[(1, 0)] + expect).abs() < 1e-12
                || (v[(0, 0)] + expect).abs() < 1e-12 && (v[(1, 0)] - expect).abs() < 1e-12
        );
    }

    #[test]
    fn vvt_is_centering_projection() {
        let v = build_v(5).unwrap();
        let j = DMatrix::identity(5, 5) - DMatrix::from_element(5, 5, 0.2);
        assert!((&v * v.transpose() - j).amax() < 1e-12);
    }

    #[test]
    fn centering_leaves_edm_alone() {
        let fw = fixtures::rectangle4();
        let shifted = {
            let mut c = fw.config().clone();
            for mut row in c.row_iter_mut() {
                row[0] += 5.0;
                row[1] += 5.0;
            }
            Framework::new(fw.graph().clone(), c).unwrap()
        };
        assert!((fw.edm() - shifted.edm()).amax() < 1e-10);
        // And the stored configuration is centered again.
        assert!(shifted.config().row_sum().amax() < 1e-12);
    }

    #[test]
    fn rectangle_distances() {
        let d = fixtures::rectangle4().edm();
        assert_abs_diff_eq!(d[(0, 2)], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[(1, 3)], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[(0, 1)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d[(1, 2)], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn segment_distance() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let fw = Framework::from_points(g, &[&[0.0], &[1.0], &[2.0]]).unwrap();
        assert_abs_diff_eq!(fw.edm()[(0, 1)], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gower_operators_invert_each_other() {
        let fw = fixtures::rectangle4();
        let d = fw.edm();
        assert!((op_k(&op_t(&d)) - &d).amax() < 1e-10, "K(T(D)) = D");
        assert!(op_t(&DMatrix::zeros(4, 4)).amax() == 0.0);
        assert!(op_k(&DMatrix::zeros(4, 4)).amax() == 0.0);
    }

    #[test]
    fn projected_operators_invert_each_other() {
        let fw = fixtures::fold5();
        let d = fw.edm();
        let x = op_tv(&d).unwrap();
        assert!((op_kv(&x).unwrap() - &d).amax() < 1e-10, "K_V(T_V(D)) = D");
        assert_eq!(numerics::rank(&x, &cfg()).unwrap(), 2);
    }

    #[test]
    fn projected_gram_properties() {
        let f3 = fixtures::rectangle4();
        let x3 = f3.projected_gram();
        assert_eq!(x3.nrows(), 3);
        assert_eq!(numerics::rank(&x3, &cfg()).unwrap(), 2);
        assert!(numerics::psd_check(&x3, &cfg()).unwrap());
        assert!((op_kv(&x3).unwrap() - f3.edm()).amax() < 1e-10);

        let f1 = fixtures::fold5();
        let x1 = f1.projected_gram();
        assert_eq!(x1.nrows(), 4);
        assert_eq!(numerics::rank(&x1, &cfg()).unwrap(), 2);
    }

    #[test]
    fn edm_check_accepts_fixture_and_rejects_garbage() {
        let check = edm_check(&fixtures::rectangle4().edm(), &cfg()).unwrap();
        assert!(check.is_edm);
        assert_eq!(check.embedding_dim, Some(2));

        let mut bad = fixtures::rectangle4().edm();
        bad[(0, 1)] = -1.0;
        bad[(1, 0)] = -1.0;
        assert!(!edm_check(&bad, &cfg()).unwrap().is_edm);

        // Unit simplex on 3 points: all-ones minus identity.
        let simplex = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        let check = edm_check(&simplex, &cfg()).unwrap();
        assert!(check.is_edm);
        assert_eq!(check.embedding_dim, Some(2));
    }

    #[test]
    fn realize_round_trips() {
        let fw = fixtures::rectangle4();
        let gram = fw.config() * fw.config().transpose();
        let p = realize(&gram, &cfg()).unwrap();
        assert_eq!(p.ncols(), 2);
        assert!((&p * p.transpose() - &gram).amax() < 1e-10);
        let rebuilt = Framework::new(fw.graph().clone(), p).unwrap();
        assert!((rebuilt.edm() - fw.edm()).amax() < 1e-10);

        assert_eq!(realize(&DMatrix::zeros(3, 3), &cfg()).unwrap().ncols(), 0);
        assert!(realize(&-DMatrix::identity(3, 3), &cfg()).is_err());

        // Rank-1 centered Gram gives a collinear configuration.
        let v = DVector::from_vec(vec![1.0, 0.0, -1.0]);
        let p = realize(&(&v * v.transpose()), &cfg()).unwrap();
        assert_eq!(p.ncols(), 1);
    }

    #[test]
    fn realize_edm_gram_round_trip() {
        let fw = fixtures::rigid5();
        let d = fw.edm();
        let x = op_tv(&d).unwrap();
        let v = build_v(5).unwrap();
        let b = &v * x * v.transpose();
        let p = realize(&b, &cfg()).unwrap();
        let rebuilt = Framework::new(fw.graph().clone(), p).unwrap();
        assert!((rebuilt.edm() - d).amax() < 1e-10);
    }

    #[test]
    fn framework_rejects_non_spanning_points() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        // Collinear points cannot affinely span R^2.
        let collinear = DMatrix::from_row_slice(4, 2, &[
            0.0, 0.0, //
            1.0, 1.0, //
            2.0, 2.0, //
            3.0, 3.0,
        ]);
        assert!(Framework::new(g, collinear).is_err());
    }
}
