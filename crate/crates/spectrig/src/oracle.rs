//! Brute-force cross-examination of the certified verdicts: find equivalent
//! frameworks by randomized nonlinear least squares and bound the
//! missing-edge distances empirically.
//!
//! The oracle is evidence-grade, not proof-grade — it can only ever
//! contradict a certificate, never confirm one. Its value is exactly that
//! independence: it shares no code path with the stress machinery or the
//! spectrahedron, so an agreement between the two is meaningful.

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::certify::{Analysis, Property, Verdict};
use crate::error::{Error, Result};
use crate::framework::{center, Framework};
use crate::numerics::{self, ToleranceConfig};

/// Minima above this objective are discarded as non-converged.
const KEEP_TOL: f64 = 1e-16;
/// The descent keeps polishing below `KEEP_TOL`, because near collinear
/// vertices the missing-edge distance error scales like the *fourth root*
/// of the objective: certifying a spread of 1e−6 needs objectives near
/// 1e−24, not 1e−16.
const POLISH_TOL: f64 = 1e-28;
/// Objectives stalling between here and [`KEEP_TOL`] mark a spurious
/// prestress minimum or an unfinished valley crawl rather than a finished
/// solution; see [`search_equivalent`].
const STUCK_TOL: f64 = 2e-28;
const MAX_ITERS: usize = 200;
const POLISH_ITERS: usize = 120;

/// One converged configuration from the search.
#[derive(Debug, Clone)]
pub struct FoundConfiguration {
    /// `n × s` coordinates, centered at the origin.
    pub config: DMatrix<f64>,
    /// Rank of the centered Gram matrix — the dimension actually used.
    pub dim: usize,
    /// Final value of `Σ_edges (‖q^i − q^j‖² − d_ij)²`.
    pub objective: f64,
}

/// Aggregated outcome of [`search_equivalent`].
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Every configuration that converged below the keep threshold,
    /// restart 0 (the unperturbed input) first.
    pub found: Vec<FoundConfiguration>,
    /// Observed squared-distance interval `[lo, hi]` per missing pair, in
    /// lexicographic pair order. Always contains the input's distances.
    pub intervals: Vec<(f64, f64)>,
    /// Largest edge violation `|‖q^i − q^j‖² − d_ij|` over all kept
    /// configurations.
    pub residual: f64,
}

impl OracleResult {
    /// `hi − lo` for the given missing-pair index.
    pub fn spread(&self, pair_idx: usize) -> f64 {
        let (lo, hi) = self.intervals[pair_idx];
        hi - lo
    }
}

/// Squared-distance residual per edge and its Jacobian at `q` (rows of `q`
/// are points).
fn edge_residuals(q: &DMatrix<f64>, edges: &[(usize, usize)], d: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(edges.len(), |e, _| {
        let (i, j) = edges[e];
        (q.row(i) - q.row(j)).norm_squared() - d[(i, j)]
    })
}

fn edge_jacobian(q: &DMatrix<f64>, edges: &[(usize, usize)]) -> DMatrix<f64> {
    let (n, s) = q.shape();
    let mut jac = DMatrix::zeros(edges.len(), n * s);
    for (e, &(i, j)) in edges.iter().enumerate() {
        let diff = q.row(i) - q.row(j);
        for k in 0..s {
            // Column layout matches vec(q) in nalgebra's column-major order.
            jac[(e, k * n + i)] = 2.0 * diff[k];
            jac[(e, k * n + j)] = -2.0 * diff[k];
        }
    }
    jac
}

/// Exact minimization of the objective along the curve `q + t·v + t²·w`
/// (a straight line when `w = 0`). Each residual is exactly quadratic in
/// the configuration, so its restriction to the curve is an exact quartic
/// in `t` and the objective an exact degree-8 polynomial; the stationary
/// points are the real eigenvalues of the derivative's companion matrix.
/// Returns the best `(t, f(t))` over those roots and `t = 1`.
fn curve_min(
    q: &DMatrix<f64>,
    v: &DMatrix<f64>,
    w: Option<&DMatrix<f64>>,
    edges: &[(usize, usize)],
    d: &DMatrix<f64>,
) -> Option<(f64, f64)> {
    // f(t) = Σ_e r_e(t)² with r_e(t) = p0 + p1·t + p2·t² + p3·t³ + p4·t⁴.
    let mut per_edge: Vec<[f64; 5]> = Vec::with_capacity(edges.len());
    let mut fc = [0.0f64; 9];
    for &(i, j) in edges {
        let dq = q.row(i) - q.row(j);
        let dv = v.row(i) - v.row(j);
        let mut p = [0.0f64; 5];
        p[0] = dq.norm_squared() - d[(i, j)];
        p[1] = 2.0 * dq.dot(&dv);
        p[2] = dv.norm_squared();
        if let Some(w) = w {
            let dw = w.row(i) - w.row(j);
            p[2] += 2.0 * dq.dot(&dw);
            p[3] = 2.0 * dv.dot(&dw);
            p[4] = dw.norm_squared();
        }
        for a in 0..5 {
            for b in 0..5 {
                fc[a + b] += p[a] * p[b];
            }
        }
        per_edge.push(p);
    }
    // Evaluate per edge, square, then sum: the summed coefficients are
    // O(edge length⁴) while the minimum is ~1e−28, so Horner on the global
    // degree-8 polynomial cancels catastrophically — the per-edge residual
    // cancellation, by contrast, is the physics being computed, and its
    // rounding enters f only multiplied by the (tiny) residual itself. The
    // global coefficients still serve for *locating* the roots.
    let f_of = |t: f64| -> f64 {
        per_edge
            .iter()
            .map(|p| {
                let r = p.iter().rev().fold(0.0, |acc, &c| acc * t + c);
                r * r
            })
            .sum()
    };
    // f′ and f″, also per edge, for the same reason.
    let df_of = |t: f64| -> (f64, f64) {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for p in &per_edge {
            let r = p.iter().rev().fold(0.0, |acc, &c| acc * t + c);
            let rp = ((4.0 * p[4] * t + 3.0 * p[3]) * t + 2.0 * p[2]) * t + p[1];
            let rpp = (12.0 * p[4] * t + 6.0 * p[3]) * t + 2.0 * p[2];
            d1 += 2.0 * r * rp;
            d2 += 2.0 * (rp * rp + r * rpp);
        }
        (d1, d2)
    };
    // Derivative coefficients g_k = (k+1)·fc_{k+1}, degree ≤ 7.
    let g: Vec<f64> = (0..8).map(|k| (k + 1) as f64 * fc[k + 1]).collect();
    let gmax = g.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
    if gmax <= f64::MIN_POSITIVE {
        return None;
    }
    let deg = (0..8).rev().find(|&k| g[k].abs() > 1e-14 * gmax)?;
    let mut cands = vec![1.0];
    if deg == 0 {
        return None;
    }
    // The raw coefficients span many orders of magnitude, which can make
    // the QR iteration on the companion matrix cycle. Substituting
    // t = scale·u with the Cauchy-style root bound as the scale keeps the
    // monic coefficients O(1); the iteration cap is then pure insurance.
    let mut scale = 0.0f64;
    for k in 0..deg {
        if g[k] != 0.0 {
            scale = scale.max((g[k].abs() / g[deg].abs()).powf(1.0 / (deg - k) as f64));
        }
    }
    if scale > 0.0 {
        let mut comp = DMatrix::zeros(deg, deg);
        for k in 0..deg {
            comp[(0, k)] = -g[deg - 1 - k] / (g[deg] * scale.powi(k as i32 + 1));
        }
        for k in 1..deg {
            comp[(k, k - 1)] = 1.0;
        }
        if let Some(schur) = Schur::try_new(comp, 1e-13, 300) {
            for ev in schur.complex_eigenvalues().iter() {
                if ev.im.abs() < 1e-9 * (1.0 + ev.re.abs()) {
                    cands.push(scale * ev.re);
                }
            }
        }
    }
    let best = cands
        .into_iter()
        .filter(|t| t.is_finite())
        .map(|t| (t, f_of(t)))
        .min_by(|x, y| x.1.total_cmp(&y.1));
    // At a quartic valley floor the derivative has a near-triple root, and
    // coefficient rounding smears the companion eigenvalues by the *cube
    // root* of the noise — about 1e−6 — which the quartic turns into an
    // objective floor near 1e−22. Monotone Newton steps on the per-edge
    // derivative recover the remaining digits (linear rate 2/3 on a triple
    // root, hence the generous iteration count).
    let (mut t, mut ft) = best?;
    for _ in 0..48 {
        let (d1, d2) = df_of(t);
        if d2 <= 0.0 || !d2.is_finite() {
            break;
        }
        let tn = t - d1 / d2;
        if !tn.is_finite() {
            break;
        }
        let ftn = f_of(tn);
        if ftn < ft {
            t = tn;
            ft = ftn;
        } else {
            break;
        }
    }
    Some((t, ft))
}

/// Two-phase descent.
///
/// Phase 1 is Levenberg–Marquardt: adaptive damping makes it reliable from
/// the strongly perturbed starts. Damping is also its weakness — collinear
/// vertices create curved quartic valleys (the buckling direction has
/// singular value proportional to the buckle height), and damped steps
/// crawl along them at rates too slow to reach the 1e−28 the fourth-root
/// law demands.
///
/// Phase 2 exploits the exact algebra instead: pure Gauss–Newton
/// directions, each minimized exactly along its line by [`line_min`]. On a
/// quartic valley the line residual is a perfect square, so the exact
/// search steps straight through the valley floor (the scalar model
/// `f = c²h⁴` with direction `−h/2` has its line minimum at `t = 2`, which
/// zeroes `h` outright rather than halving it).
fn descend(
    mut q: DMatrix<f64>,
    edges: &[(usize, usize)],
    d: &DMatrix<f64>,
) -> (DMatrix<f64>, f64) {
    let dim = q.nrows() * q.ncols();
    let mut f = edge_residuals(&q, edges, d).norm_squared();
    let mut lambda = 1e-4;
    for _ in 0..MAX_ITERS {
        if f <= KEEP_TOL {
            break;
        }
        let r = edge_residuals(&q, edges, d);
        let jac = edge_jacobian(&q, edges);
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * r;
        let scale = jtj.diagonal().amax().max(f64::MIN_POSITIVE);
        let mut accepted = false;
        for _ in 0..30 {
            let damped = &jtj + DMatrix::identity(dim, dim) * (lambda * scale);
            let Some(chol) = damped.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&jtr));
            let mut trial = q.clone();
            let flat = DVector::from_column_slice(trial.as_slice()) + step;
            trial.copy_from_slice(flat.as_slice());
            let tf = edge_residuals(&trial, edges, d).norm_squared();
            if tf < f {
                q = trial;
                f = tf;
                lambda = (lambda * 0.25).max(1e-14);
                accepted = true;
                break;
            }
            lambda *= 4.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    // The polish exists to traverse quartic valleys *near* solutions; a
    // restart that Levenberg–Marquardt left far off is a failed basin, not
    // a crawl, and exact searches there only waste the census budget.
    if f > 1e-6 {
        return (q, f);
    }
    for _ in 0..POLISH_ITERS {
        if f <= POLISH_TOL {
            break;
        }
        let r = edge_residuals(&q, edges, d);
        let jac = edge_jacobian(&q, edges);
        let svd = jac.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if smax <= 0.0 {
            break;
        }
        // Candidate directions. Truncated Gauss–Newton solves at several
        // levels: with more than one soft mode active, the min-norm
        // direction through the full Jacobian is dominated by whichever
        // near-null singular value is smallest (often pure noise), while a
        // coarser cut yields a clean direction along the dominant mode.
        // Each is normalized, keeping the polynomial coefficients
        // well-scaled for the companion-matrix root finder. The softest
        // right singular vectors join individually: the aggregated solves
        // scale their soft component by the residual projection, which
        // re-minimization of the stiff modes keeps microscopic.
        let mut dirs: Vec<DMatrix<f64>> = Vec::new();
        for cut in [1e-13, 1e-10, 1e-7, 1e-4] {
            let Ok(step) = svd.solve(&(-&r), cut * smax) else {
                continue;
            };
            let norm = step.norm();
            if norm <= f64::MIN_POSITIVE {
                continue;
            }
            let mut v = DMatrix::zeros(q.nrows(), q.ncols());
            v.copy_from_slice(step.as_slice());
            dirs.push(v / norm);
        }
        if let Some(vt) = svd.v_t.as_ref() {
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
            for &k in order.iter().take(4) {
                let mut v = DMatrix::zeros(q.nrows(), q.ncols());
                v.copy_from_slice(vt.row(k).transpose().as_slice());
                dirs.push(v);
            }
        }
        // Second-order escapes. Near a prestress lock every first-order
        // candidate sees dead flat, but each residual is exactly quadratic,
        // so the Hessian H = 2JᵀJ + 2Σ_e r_e·∇²r_e is *exact* (∇²r_e is the
        // constant edge Laplacian) and its negative eigendirections descend
        // quadratically — the prestress stability criterion run in reverse.
        // The thin SVD never sees these: with fewer edges than coordinates
        // they mostly live in the null space of J.
        {
            let (n, s) = q.shape();
            let mut hess = jac.transpose() * &jac;
            for (e, &(i, j)) in edges.iter().enumerate() {
                let re = 2.0 * r[e];
                for k in 0..s {
                    let (a, b) = (k * n + i, k * n + j);
                    hess[(a, a)] += re;
                    hess[(b, b)] += re;
                    hess[(a, b)] -= re;
                    hess[(b, a)] -= re;
                }
            }
            let eig = hess.symmetric_eigen();
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            for &k in order.iter().take(3) {
                if eig.eigenvalues[k] >= 0.0 {
                    break;
                }
                let mut v = DMatrix::zeros(n, s);
                v.copy_from_slice(eig.eigenvectors.column(k).as_slice());
                dirs.push(v);
            }
        }
        // Each direction is searched twice: along its straight line, and
        // along the geodesic-accelerated parabola q + t·v + t²·w. A
        // straight line exits a *curved* valley floor at second order,
        // capping the useful step length; `w` — the stiff-mode correction
        // solving J·w = −a against the second-order residual growth
        // a_e = ‖v_i − v_j‖² — bends the search path to hug the floor, so
        // one exact polynomial minimization covers a distance the straight
        // search would need thousands of crawling steps for.
        let mut best: Option<(f64, DMatrix<f64>)> = None;
        for v in &dirs {
            if let Some((t, ft)) = curve_min(&q, v, None, edges, d) {
                if best.as_ref().is_none_or(|(bf, _)| ft < *bf) {
                    best = Some((ft, v * t));
                }
            }
            let accel = DVector::from_fn(edges.len(), |e, _| {
                let (i, j) = edges[e];
                (v.row(i) - v.row(j)).norm_squared()
            });
            let Ok(wstep) = svd.solve(&(-accel), 1e-4 * smax) else {
                continue;
            };
            let mut w = DMatrix::zeros(q.nrows(), q.ncols());
            w.copy_from_slice(wstep.as_slice());
            if let Some((t, ft)) = curve_min(&q, v, Some(&w), edges, d) {
                if best.as_ref().is_none_or(|(bf, _)| ft < *bf) {
                    best = Some((ft, v * t + &w * (t * t)));
                }
            }
        }
        match best {
            Some((ft, dq)) if ft < f * (1.0 - 1e-9) => {
                q += dq;
                f = ft;
            }
            _ => break,
        }
    }
    let f = edge_residuals(&q, edges, d).norm_squared();
    (q, f)
}

/// Reflects vertex `i` across the affine hull of its graph neighbors, or
/// `None` when the hull fills the ambient space or already contains the
/// vertex. For a vertex of degree ≤ s the two mirror images satisfy its own
/// edge constraints *identically*: a descent locked with the vertex on the
/// wrong side cannot climb the ridge between the branches, but the
/// reflection lands on the other branch outright.
fn reflect_vertex(q: &DMatrix<f64>, i: usize, nbrs: &[usize]) -> Option<DMatrix<f64>> {
    if nbrs.is_empty() {
        return None;
    }
    let s = q.ncols();
    let mut c = DVector::zeros(s);
    for &j in nbrs {
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
        if svd.singular_values[k] > 1e-8 * smax.max(f64::MIN_POSITIVE) {
            hull_dim += 1;
            let dir = vt.row(k).transpose();
            w -= &dir * dir.dot(&x);
        }
    }
    if hull_dim >= s || w.norm() <= 1e-12 * (1.0 + x.norm()) {
        return None;
    }
    let mut out = q.clone();
    out.set_row(i, &(q.row(i) - 2.0 * w.transpose()));
    Some(out)
}

/// Searches for frameworks equivalent to `fw` inside dimension `s` by
/// minimizing `Σ_edges (‖q^i − q^j‖² − d_ij)²` over `n × s` configurations.
/// Starts are the input lifted to `s` dimensions (restart 0, unperturbed)
/// plus `restarts` Gaussian perturbations with standard deviation
/// `diameter / 4` per coordinate. Only minima with objective ≤ 1e−16 are
/// kept; an empty census beyond restart 0 is a valid outcome.
pub fn search_equivalent(
    fw: &Framework,
    s: usize,
    restarts: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<OracleResult> {
    cfg.validate()?;
    let (n, r) = (fw.n(), fw.dim());
    if s < r || s > n - 1 {
        return Err(Error::invalid(format!(
            "target dimension {s} outside [r, n-1] = [{r}, {}]",
            n - 1
        )));
    }
    let d = fw.edm();
    let edges: Vec<(usize, usize)> = fw.graph().edges().collect();
    let missing = fw.graph().missing_edges();
    let sigma = fw.diameter() / 4.0;

    let mut lifted = DMatrix::zeros(n, s);
    lifted.view_mut((0, 0), (n, r)).copy_from(fw.config());

    let mut found = Vec::new();
    let mut residual = 0.0f64;
    for restart in 0..=restarts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9));
        let start = if restart == 0 {
            lifted.clone()
        } else {
            let noise = DMatrix::from_fn(n, s, |_, _| {
                let g: f64 = rng.sample(StandardNormal);
                g * sigma
            });
            &lifted + noise
        };
        let (mut q, mut f) = descend(start, &edges, &d);
        // A taut chain can lock into a *spurious* minimum whose residual
        // pattern is a PSD self-stress of the straightened chain: there the
        // Hessian 2JᵀJ + 2Σ rₑ∇²rₑ is positive semidefinite, so no descent
        // direction exists at all, yet the objective (≈1e−17) sits a
        // fourth-root-law distance (≈1e−4) from any true solution. Escaping
        // needs a basin change, not a better step. Each resolution round
        // tries the targeted move first — mirror reflections, since a lock
        // usually means one vertex equilibrated on the wrong branch — then
        // one escalating random kick; new locks reached by a kick get the
        // reflection treatment on the next round.
        let mut stalled_rounds = 0u32;
        'resolve: for round in 0..12u32 {
            if f <= STUCK_TOL || f > KEEP_TOL || stalled_rounds >= 2 {
                break;
            }
            let round_start = f;
            // Rank snap, for s > r only: the out-of-plane coordinates of a
            // near-flat straggler form a *multi-dimensional* quartic valley
            // (every pairwise ‖z_i − z_j‖² enters the residuals), which no
            // one-dimensional curve search can finish. But the solutions it
            // shadows are exactly the lower-rank ones, so projecting out the
            // smallest principal components and re-descending reduces it to
            // the in-plane problem, where the exact searches do converge.
            for keep in r..s {
                let centered = center(&q);
                let svd = centered.svd(true, true);
                let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
                let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
                order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
                let mut sv = svd.singular_values.clone();
                for &k in order.iter().skip(keep) {
                    sv[k] = 0.0;
                }
                let flat = u * DMatrix::from_diagonal(&sv) * vt;
                let (kq, kf) = descend(flat, &edges, &d);
                if kf < f {
                    q = kq;
                    f = kf;
                }
                if f <= STUCK_TOL {
                    break 'resolve;
                }
            }
            for i in 0..n {
                let nbrs: Vec<usize> = edges
                    .iter()
                    .filter_map(|&(a, b)| {
                        (a == i).then_some(b).or_else(|| (b == i).then_some(a))
                    })
                    .collect();
                let Some(refl) = reflect_vertex(&q, i, &nbrs) else {
                    continue;
                };
                // The mirror start lands on the other branch; the midpoint
                // start symmetrizes instead — a chain bent by ε is straight
                // there to O(ε²), teleporting past the quartic valley that
                // the bent branches descend along.
                let mid = (&q + &refl) * 0.5;
                for start in [refl, mid] {
                    let (kq, kf) = descend(start, &edges, &d);
                    if kf < f {
                        q = kq;
                        f = kf;
                    }
                    if f <= STUCK_TOL {
                        break 'resolve;
                    }
                }
            }
            let scale = fw.diameter() * 2e-3 * 4.0f64.powi((round % 6) as i32);
            let jolt = DMatrix::from_fn(n, s, |_, _| {
                let g: f64 = rng.sample(StandardNormal);
                g * scale
            });
            let (kq, kf) = descend(&q + jolt, &edges, &d);
            if kf < f {
                q = kq;
                f = kf;
            }
            // Ultra-flat valleys (tangent-circle flexes) floor out above
            // the stuck threshold at f64 precision; two fruitless rounds
            // in a row mean this is such a floor, not an escapable lock.
            if f >= round_start * (1.0 - 1e-6) {
                stalled_rounds += 1;
            } else {
                stalled_rounds = 0;
            }
        }
        if f > KEEP_TOL {
            continue;
        }
        residual = residual.max(edge_residuals(&q, &edges, &d).amax());
        let centered = center(&q);
        let dim = numerics::rank(&(&centered * centered.transpose()), cfg)?;
        found.push(FoundConfiguration {
            config: centered,
            dim,
            objective: f,
        });
    }

    let intervals = missing
        .iter()
        .map(|&(i, j)| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for fc in &found {
                let v = (fc.config.row(i) - fc.config.row(j)).norm_squared();
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (lo, hi)
        })
        .collect();

    Ok(OracleResult {
        found,
        intervals,
        residual,
    })
}

// ─── consistency with the certified report ────────────────────────────────

/// Outcome of [`cross_check`]: empty `contradictions` means the empirical
/// evidence is compatible with every certified claim.
#[derive(Debug, Clone)]
pub struct ConsistencyVerdict {
    pub contradictions: Vec<String>,
    pub consistent: bool,
}

/// Compares certified claims against the oracle's observed intervals. Only
/// `Certified` verdicts can be contradicted: a certified universally linked
/// pair must show spread ≤ 1e−4, and certified universal rigidity must show
/// every spread ≤ 1e−4. `Unknown` is never contradicted — the fixture with
/// an edge dropped from the rigid 5-vertex framework is universally rigid
/// with zero observed spread, yet honestly reports `Unknown`.
pub fn cross_check(
    fw: &Framework,
    analysis: &Analysis,
    oracle: &OracleResult,
) -> Result<ConsistencyVerdict> {
    let missing = fw.graph().missing_edges();
    if oracle.intervals.len() != missing.len() {
        return Err(Error::invalid(
            "oracle result does not match the framework's missing pairs",
        ));
    }
    let mut contradictions = Vec::new();
    let spread_of = |pair: (usize, usize)| -> Option<f64> {
        missing
            .iter()
            .position(|&p| p == pair)
            .map(|k| oracle.spread(k))
    };

    for cert in &analysis.linked {
        let Property::UniversallyLinked { pair } = cert.property else {
            continue;
        };
        if cert.verdict != Verdict::Certified {
            continue;
        }
        match spread_of(pair) {
            Some(spread) if spread > 1e-4 => contradictions.push(format!(
                "pair ({}, {}) certified universally linked but oracle spread is {spread:.3e}",
                pair.0 + 1,
                pair.1 + 1
            )),
            Some(_) => {}
            None => contradictions.push(format!(
                "certified pair ({}, {}) is not a missing pair of the framework",
                pair.0 + 1,
                pair.1 + 1
            )),
        }
    }

    if analysis.rigidity.verdict == Verdict::Certified {
        for (k, &(i, j)) in missing.iter().enumerate() {
            let spread = oracle.spread(k);
            if spread > 1e-4 {
                contradictions.push(format!(
                    "universal rigidity certified but pair ({}, {}) has oracle spread {spread:.3e}",
                    i + 1,
                    j + 1
                ));
            }
        }
    }

    Ok(ConsistencyVerdict {
        consistent: contradictions.is_empty(),
        contradictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::analyze;
    use crate::fixtures;
    use crate::framework::edm_check;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn fold5_census_moves_only_the_fold_pair() {
        let fw = fixtures::fold5();
        let result = search_equivalent(&fw, 2, 200, 11, &cfg()).unwrap();
        assert!(result.found.len() > 100, "found {}", result.found.len());
        // Missing pairs in lex order: {1,5}, {3,4}, {4,5}.
        assert!(result.spread(0) <= 1e-6, "d15 spread {:.3e}", result.spread(0));
        assert!(result.spread(1) <= 1e-6, "d34 spread {:.3e}", result.spread(1));
        assert!(result.spread(2) >= 0.1, "d45 spread {:.3e}", result.spread(2));
        assert!(result.residual <= 1e-8);
    }

    #[test]
    fn fold5_in_three_dimensions_realizes_the_continuous_fold() {
        let fw = fixtures::fold5();
        let result = search_equivalent(&fw, 3, 60, 5, &cfg()).unwrap();
        assert!(result.found.iter().any(|fc| fc.dim == 3));
        // The fold sweeps d45² = 2 + 2cosθ; with many starts the observed
        // interval should cover a solid stretch of (0, 4).
        assert!(result.spread(2) >= 0.5);
        // The pinned pairs stay pinned even off the plane.
        assert!(result.spread(0) <= 1e-6);
        assert!(result.spread(1) <= 1e-6);
    }

    #[test]
    fn rectangle_census_stays_in_the_proven_interval() {
        let fw = fixtures::rectangle4();
        let result = search_equivalent(&fw, 2, 200, 11, &cfg()).unwrap();
        for (k, name) in [(0, "d13"), (1, "d24")] {
            let (lo, hi) = result.intervals[k];
            assert!(lo >= 1.0 - 1e-6, "{name} low endpoint {lo}");
            assert!(hi <= 9.0 + 1e-6, "{name} high endpoint {hi}");
            // The original squared diagonal is 5 and must be observed.
            assert!(lo <= 5.0 && 5.0 <= hi, "{name} interval [{lo}, {hi}]");
        }
    }

    #[test]
    fn rigid5_census_never_moves() {
        let fw = fixtures::rigid5();
        let result = search_equivalent(&fw, 3, 200, 11, &cfg()).unwrap();
        assert!(result.spread(0) <= 1e-6);
        assert!(result.spread(1) <= 1e-6);
    }

    #[test]
    fn found_configurations_are_genuine_equivalent_frameworks() {
        let fw = fixtures::fold5();
        let d = fw.edm();
        let result = search_equivalent(&fw, 3, 30, 3, &cfg()).unwrap();
        for fc in &result.found {
            for (i, j) in fw.graph().edges() {
                let v = (fc.config.row(i) - fc.config.row(j)).norm_squared();
                assert!((v - d[(i, j)]).abs() <= 1e-8);
            }
            let mut dq = DMatrix::zeros(fw.n(), fw.n());
            for i in 0..fw.n() {
                for j in 0..fw.n() {
                    dq[(i, j)] = (fc.config.row(i) - fc.config.row(j)).norm_squared();
                }
            }
            assert!(edm_check(&dq, &cfg()).unwrap().is_edm);
        }
    }

    #[test]
    fn restart_zero_keeps_the_input_so_intervals_contain_it() {
        let fw = fixtures::rectangle4();
        let d = fw.edm();
        let result = search_equivalent(&fw, 2, 0, 0, &cfg()).unwrap();
        assert_eq!(result.found.len(), 1);
        assert_eq!(result.found[0].dim, 2);
        for (k, &(i, j)) in fw.graph().missing_edges().iter().enumerate() {
            let (lo, hi) = result.intervals[k];
            assert!(lo <= d[(i, j)] && d[(i, j)] <= hi);
        }
    }

    #[test]
    fn oracle_is_deterministic_for_a_fixed_seed() {
        let fw = fixtures::fold5();
        let a = search_equivalent(&fw, 2, 40, 123, &cfg()).unwrap();
        let b = search_equivalent(&fw, 2, 40, 123, &cfg()).unwrap();
        assert_eq!(a.found.len(), b.found.len());
        assert_eq!(a.intervals, b.intervals);
        assert_eq!(a.residual, b.residual);
    }

    #[test]
    fn dimension_bounds_are_enforced() {
        let fw = fixtures::fold5();
        assert!(search_equivalent(&fw, 1, 2, 0, &cfg()).is_err());
        assert!(search_equivalent(&fw, 5, 2, 0, &cfg()).is_err());
    }

    #[test]
    fn cross_check_accepts_the_honest_reports() {
        let fw = fixtures::fold5();
        let analysis = analyze(&fw, &cfg(), 7).unwrap();
        let oracle = search_equivalent(&fw, 2, 100, 11, &cfg()).unwrap();
        let verdict = cross_check(&fw, &analysis, &oracle).unwrap();
        assert!(verdict.consistent, "{:?}", verdict.contradictions);

        // Unknown ≠ Refuted: zero spread alongside an Unknown rigidity
        // verdict is consistent.
        let fw2b = fixtures::rigid5_minus_edge();
        let analysis2b = analyze(&fw2b, &cfg(), 7).unwrap();
        assert_eq!(analysis2b.rigidity.verdict, Verdict::Unknown);
        let oracle2b = search_equivalent(&fw2b, 2, 100, 11, &cfg()).unwrap();
        let verdict2b = cross_check(&fw2b, &analysis2b, &oracle2b).unwrap();
        assert!(verdict2b.consistent, "{:?}", verdict2b.contradictions);
    }

    #[test]
    fn cross_check_flags_a_corrupted_certificate() {
        let fw = fixtures::fold5();
        let mut analysis = analyze(&fw, &cfg(), 7).unwrap();
        let oracle = search_equivalent(&fw, 2, 100, 11, &cfg()).unwrap();
        // Forge the {4,5} linked certificate: the oracle sees the fold.
        for cert in &mut analysis.linked {
            if cert.property == (Property::UniversallyLinked { pair: (3, 4) }) {
                cert.verdict = Verdict::Certified;
            }
        }
        let verdict = cross_check(&fw, &analysis, &oracle).unwrap();
        assert!(!verdict.consistent);
        assert!(verdict.contradictions[0].contains("(4, 5)"));
    }
}
