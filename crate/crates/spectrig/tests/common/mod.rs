//! Helpers shared by the integration suites: a random-framework generator
//! and exact members of the Cayley spectrahedron built from closed-form
//! equivalent frameworks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spectrig::{Framework, Graph};

/// Random connected, non-complete framework with `4 ≤ n ≤ 7`, dimension
/// `1 ≤ r ≤ 3`, a spanning tree plus random extra edges, and a Gaussian
/// configuration. Degenerate draws (non-spanning configurations) retry.
pub fn random_framework(rng: &mut ChaCha8Rng) -> Framework {
    loop {
        let n = rng.gen_range(4..=7);
        let r = rng.gen_range(1..=3.min(n - 2));
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
        edges.sort_unstable();
        edges.dedup();
        for i in 0..n {
            for j in i + 1..n {
                if !edges.contains(&(i, j)) && rng.gen_bool(0.4) {
                    edges.push((i, j));
                }
            }
        }
        if edges.len() == n * (n - 1) / 2 {
            // Keep at least one pair missing; the last entry is never a
            // tree edge of the construction above.
            edges.pop();
        }
        let config = DMatrix::from_fn(n, r, |_, _| rng.sample::<f64, _>(StandardNormal) * 2.0);
        let Ok(graph) = Graph::new(n, &edges) else {
            continue;
        };
        if let Ok(fw) = Framework::new(graph, config) {
            return fw;
        }
    }
}

/// Missing-pair squared-distance offsets of configuration `q` relative to
/// `fw` — the `y` with `X(y) = projected Gram of q` when `q` is equivalent.
pub fn y_offsets(fw: &Framework, q: &DMatrix<f64>) -> DVector<f64> {
    let d = fw.edm();
    let missing = fw.graph().missing_edges();
    DVector::from_fn(missing.len(), |k, _| {
        let (i, j) = missing[k];
        (q.row(i) - q.row(j)).norm_squared() - d[(i, j)]
    })
}

/// Reflects vertex `i` of the configuration across the affine hull of its
/// graph neighbors, when that hull is a proper subspace not containing the
/// vertex. The image has identical edge lengths — an equivalent framework
/// in closed form.
fn reflect_vertex(fw: &Framework, i: usize) -> Option<DMatrix<f64>> {
    let q = fw.config();
    let s = q.ncols();
    let nbrs: Vec<usize> = fw
        .graph()
        .edges()
        .filter_map(|(a, b)| (a == i).then_some(b).or_else(|| (b == i).then_some(a)))
        .collect();
    if nbrs.is_empty() {
        return None;
    }
    let mut c = DVector::zeros(s);
    for &j in &nbrs {
        c += q.row(j).transpose();
    }
    c /= nbrs.len() as f64;
    let b = DMatrix::from_fn(nbrs.len(), s, |row, col| q[(nbrs[row], col)] - c[col]);
    let svd = b.svd(false, true);
    let smax = svd.singular_values.max();
    let vt = svd.v_t.as_ref()?;
    let x = q.row(i).transpose() - &c;
    let mut w = x.clone();
    let mut hull_dim = 0;
    for k in 0..svd.singular_values.len() {
        if svd.singular_values[k] > 1e-10 * smax.max(f64::MIN_POSITIVE) {
            hull_dim += 1;
            let dir = vt.row(k).transpose();
            w -= &dir * dir.dot(&x);
        }
    }
    if hull_dim >= s || w.norm() <= 1e-9 * (1.0 + x.norm()) {
        return None;
    }
    let mut out = q.clone();
    out.set_row(i, &(q.row(i) - 2.0 * w.transpose()));
    Some(out)
}

/// Exact members of the spectrahedron: `y = 0` plus the offset vector of
/// every single-vertex reflection image. All entries are closed-form, so
/// the membership residuals are at rounding level, not solver level.
pub fn reflection_family(fw: &Framework) -> Vec<DVector<f64>> {
    let mut family = vec![DVector::zeros(fw.graph().missing_edges().len())];
    for i in 0..fw.n() {
        if let Some(q) = reflect_vertex(fw, i) {
            family.push(y_offsets(fw, &q));
        }
    }
    family
}

/// Random convex combination of a family of members — still a member, since
/// the spectrahedron is convex.
pub fn convex_sample(family: &[DVector<f64>], rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut weights: Vec<f64> = (0..family.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut y = DVector::zeros(family[0].len());
    for (w, member) in weights.iter().zip(family) {
        y += member * *w;
    }
    y
}

/// Deterministic RNG for a proptest-provided seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
