//! Gale matrices, the linear space of stress matrices, and PSD stress search.
//!
//! A *stress matrix* of a framework is a symmetric `Ω` with `ΩP = 0`,
//! `Ωe = 0`, and `Ω_ij = 0` on every missing edge. Writing `Z` for a Gale
//! matrix — a basis of the null space of `[P e]^T` — every stress matrix is
//! `Ω = Z Ψ Z^T` for a symmetric `Ψ` of order `n−r−1` subject to the linear
//! constraints `(Z Ψ Z^T)_ij = 0` on missing edges. That reduction is what
//! makes searching for a *positive semidefinite* stress tractable here:
//! `λ_min(Ψ)` is concave, any nonzero PSD `Ψ` can be normalized to
//! `trace Ψ = 1`, and projected subgradient ascent on that affine slice of
//! the constraint space finds the global optimum at the problem sizes this
//! crate targets. A facial refinement step then snaps near-singular optima
//! onto the boundary so rank decisions are clean.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::framework::Framework;
use crate::numerics::{self, ToleranceConfig};

/// A stress matrix together with its decisions.
#[derive(Debug, Clone)]
pub struct StressMatrix {
    /// The `n × n` stress matrix `Ω = Z Ψ Z^T`, normalized to `trace Ω = 1`
    /// when produced by the search.
    pub omega: DMatrix<f64>,
    /// `rank Ω` under the configured tolerance; always `≤ n − r − 1`.
    pub rank: usize,
    /// Whether `Ω` passes the PSD check.
    pub psd: bool,
}

/// Outcome of the PSD stress search.
#[derive(Debug, Clone)]
pub enum PsdStressOutcome {
    /// A nonzero PSD stress; the one maximizing `λ_min(Ψ)` on the trace-1
    /// slice among the search's candidates.
    Found(StressMatrix),
    /// No nonzero PSD stress exists: the stress space is trivial, its trace
    /// functional vanishes, or the concave optimum is certifiably negative.
    Absent,
    /// The optimizer stalled near zero without resolving the sign; carries
    /// the best (indefinite) iterate for diagnostics.
    Unknown(StressMatrix),
}

impl PsdStressOutcome {
    /// The found stress, if any.
    pub fn found(&self) -> Option<&StressMatrix> {
        match self {
            PsdStressOutcome::Found(s) => Some(s),
            _ => None,
        }
    }
}

/// Gale matrix of the framework: an orthonormal basis of
/// `N([P e]^T)`, of shape `n × (n−r−1)`.
///
/// # Errors
/// [`Error::EmptyGaleSpace`] when `r = n−1` (the points affinely span
/// `R^{n-1}`, so the null space is trivial).
pub fn gale_matrix(fw: &Framework) -> Result<DMatrix<f64>> {
    let (n, r) = (fw.n(), fw.dim());
    if r + 1 >= n {
        return Err(Error::EmptyGaleSpace { n });
    }
    let cfg = ToleranceConfig::default();
    // Rows: the r coordinate columns of P, then e.
    let mut a = DMatrix::zeros(r + 1, n);
    a.view_mut((0, 0), (r, n))
        .copy_from(&fw.config().transpose());
    a.row_mut(r).fill(1.0);
    let z = numerics::nullspace_basis(&a, &cfg)?;
    if z.ncols() != n - r - 1 {
        return Err(Error::InternalInconsistency(format!(
            "Gale space has dimension {} instead of n-r-1 = {}",
            z.ncols(),
            n - r - 1
        )));
    }
    Ok(z)
}

// ─── the stress space in Ψ coordinates ───────────────────────────────────

/// Symmetric matrices of order `nb` are coordinatized by their upper
/// triangle, row-major: `(0,0), (0,1), …, (0,nb−1), (1,1), …`.
fn sym_dim(nb: usize) -> usize {
    nb * (nb + 1) / 2
}

fn unvec_sym(nb: usize, v: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(nb, nb);
    let mut k = 0;
    for a in 0..nb {
        for b in a..nb {
            m[(a, b)] = v[k];
            m[(b, a)] = v[k];
            k += 1;
        }
    }
    m
}

/// Basis `{Ψ_1, …, Ψ_d}` of the linear space of symmetric `Ψ` with
/// `(Z Ψ Z^T)_ij = 0` for every missing edge `{i,j}`. An empty vector
/// (`d = 0`) means the only stress matrix is zero.
pub fn stress_space_basis(fw: &Framework, cfg: &ToleranceConfig) -> Result<Vec<DMatrix<f64>>> {
    let z = match gale_matrix(fw) {
        Ok(z) => z,
        Err(Error::EmptyGaleSpace { .. }) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let nb = z.ncols();
    let missing = fw.graph().missing_edges();
    let q = sym_dim(nb);
    // Constraint row per missing edge {i,j}: z_i^T Ψ z_j = 0, expanded in
    // the upper-triangle coordinates of Ψ.
    let mut c = DMatrix::zeros(missing.len(), q);
    for (row, &(i, j)) in missing.iter().enumerate() {
        let zi = z.row(i);
        let zj = z.row(j);
        let mut k = 0;
        for a in 0..nb {
            for b in a..nb {
                c[(row, k)] = if a == b {
                    zi[a] * zj[a]
                } else {
                    zi[a] * zj[b] + zi[b] * zj[a]
                };
                k += 1;
            }
        }
    }
    let null = numerics::nullspace_basis(&c, cfg)?;
    Ok((0..null.ncols())
        .map(|k| unvec_sym(nb, &null.column(k).into_owned()))
        .collect())
}

/// Diagnostic result of [`verify_stress`].
#[derive(Debug, Clone)]
pub struct StressCheck {
    /// Whether all three defining conditions hold.
    pub ok: bool,
    /// The first violated condition, with its residual, when `ok` is false.
    pub violation: Option<String>,
}

/// Checks the three defining conditions of a stress matrix — `ΩP = 0`,
/// `Ωe = 0`, and `Ω_ij = 0` on missing edges — reporting the first
/// violation. Residuals are measured relative to `max(1, ‖Ω‖_max)`.
pub fn verify_stress(fw: &Framework, omega: &DMatrix<f64>, cfg: &ToleranceConfig) -> StressCheck {
    let n = fw.n();
    let fail = |violation: String| StressCheck {
        ok: false,
        violation: Some(violation),
    };
    if omega.nrows() != n || omega.ncols() != n {
        return fail(format!(
            "stress matrix is {}x{}, needs {n}x{n}",
            omega.nrows(),
            omega.ncols()
        ));
    }
    let scale = omega.amax().max(1.0);
    let tol = cfg.psd_tol * scale;
    if (omega - omega.transpose()).amax() > tol {
        return fail("stress matrix is not symmetric".to_string());
    }
    let op = omega * fw.config();
    if op.amax() > tol {
        return fail(format!("ΩP = 0 violated, residual {:.3e}", op.amax()));
    }
    let oe = omega * DVector::from_element(n, 1.0);
    if oe.amax() > tol {
        return fail(format!("Ωe = 0 violated, residual {:.3e}", oe.amax()));
    }
    for (i, j) in fw.graph().missing_edges() {
        if omega[(i, j)].abs() > tol {
            return fail(format!(
                "zero pattern violated at missing edge ({}, {}): {:.3e}",
                i + 1,
                j + 1,
                omega[(i, j)]
            ));
        }
    }
    StressCheck {
        ok: true,
        violation: None,
    }
}

// ─── PSD stress search ───────────────────────────────────────────────────

struct PsiSlice {
    /// Basis of the stress constraint space in Ψ coordinates, `q × d`.
    basis: Vec<DMatrix<f64>>,
    /// Point of the slice `trace Ψ(x) = 1` with minimal norm.
    x0: DVector<f64>,
    /// Orthonormal directions spanning the slice's tangent space, `d × (d−1)`.
    tangent: DMatrix<f64>,
}

fn psi_of_x(basis: &[DMatrix<f64>], x: &DVector<f64>) -> DMatrix<f64> {
    let nb = basis[0].nrows();
    let mut psi = DMatrix::zeros(nb, nb);
    for (k, b) in basis.iter().enumerate() {
        psi += b * x[k];
    }
    psi
}

/// Supergradient of `x ↦ λ_min(Ψ(x))`: `g_k = v^T Ψ_k v` for a unit
/// eigenvector `v` of the smallest eigenvalue.
fn lambda_min_supergradient(
    basis: &[DMatrix<f64>],
    psi: &DMatrix<f64>,
) -> Result<(f64, DVector<f64>)> {
    let eig = numerics::sym_eig(psi)?;
    let v = eig.vectors.column(0);
    let g = DVector::from_fn(basis.len(), |k, _| (v.transpose() * &basis[k] * v)[(0, 0)]);
    Ok((eig.values[0], g))
}

/// Snaps a near-optimal iterate onto the boundary face it is approaching:
/// identify the near-null eigenvectors `U` of `Ψ(x)`, solve the least-squares
/// system `Ψ(x + δ)U = 0` with `trace` preserved, and keep the correction if
/// it improves `λ_min`. Repeats until no progress.
fn face_polish(slice: &PsiSlice, x: &DVector<f64>, cfg: &ToleranceConfig) -> Result<DVector<f64>> {
    let mut x = x.clone();
    let mut best = lambda_min_supergradient(&slice.basis, &psi_of_x(&slice.basis, &x))?.0;
    for _ in 0..4 {
        let psi = psi_of_x(&slice.basis, &x);
        let eig = numerics::sym_eig(&psi)?;
        let scale = numerics::spectral_scale(&eig).max(1.0);
        let snap = (cfg.psd_tol * 100.0).max(1e-6) * scale;
        let null_count = eig.values.iter().filter(|v| v.abs() <= snap).count();
        if null_count == 0 {
            break;
        }
        let u = eig.vectors.columns(0, null_count).into_owned();
        let nb = psi.nrows();
        // Unknown: tangent coordinates t with x' = x + Q t; rows: entries of
        // Ψ(x')U = 0.
        let td = slice.tangent.ncols();
        if td == 0 {
            break;
        }
        let mut a = DMatrix::zeros(nb * null_count, td);
        for t in 0..td
        {
            let dir = slice.tangent.column(t);
            let mut psi_dir = DMatrix::zeros(nb, nb);
            for (k, b) in slice.basis.iter().enumerate() {
                psi_dir += b * dir[k];
            }
            let block = &psi_dir * &u;
            for c in 0..null_count {
                for r in 0..nb {
                    a[(c * nb + r, t)] = block[(r, c)];
                }
            }
        }
        let rhs_block = &psi * &u;
        let mut rhs = DVector::zeros(nb * null_count);
        for c in 0..null_count {
            for r in 0..nb {
                rhs[c * nb + r] = -rhs_block[(r, c)];
            }
        }
        let svd = a.svd(true, true);
        let t = svd
            .solve(&rhs, cfg.rank_tol)
            .map_err(|e| Error::InternalInconsistency(format!("polish solve failed: {e}")))?;
        let candidate = &x + &slice.tangent * t;
        let lam = lambda_min_supergradient(&slice.basis, &psi_of_x(&slice.basis, &candidate))?.0;
        if lam > best + 1e-15 {
            best = lam;
            x = candidate;
        } else {
            break;
        }
    }
    Ok(x)
}

/// One subgradient ascent run from `start` (tangent coordinates), returning
/// the best slice point seen and a stall flag.
fn ascend(
    slice: &PsiSlice,
    start: &DVector<f64>,
    cfg: &ToleranceConfig,
) -> Result<(DVector<f64>, f64, bool)> {
    let mut t = start.clone();
    let x_of = |t: &DVector<f64>| &slice.x0 + &slice.tangent * t;
    let mut best_t = t.clone();
    let (mut best_f, _) = lambda_min_supergradient(&slice.basis, &psi_of_x(&slice.basis, &x_of(&t)))?;
    let mut f_at_midpoint = best_f;
    let iters = cfg.max_iters.max(1);
    for k in 1..=iters {
        let x = x_of(&t);
        let (f, g_x) = lambda_min_supergradient(&slice.basis, &psi_of_x(&slice.basis, &x))?;
        if f > best_f {
            best_f = f;
            best_t = t.clone();
        }
        if k == iters / 2 {
            f_at_midpoint = best_f;
        }
        let g_t = slice.tangent.transpose() * g_x;
        let norm = g_t.norm();
        if norm < 1e-15 {
            // Smooth optimum (simple eigenvalue with zero gradient).
            f_at_midpoint = best_f;
            break;
        }
        t += g_t * (0.5 / (norm * (k as f64).sqrt()));
    }
    let polished = face_polish(slice, &x_of(&best_t), cfg)?;
    let (f_polished, _) = lambda_min_supergradient(&slice.basis, &psi_of_x(&slice.basis, &polished))?;
    if f_polished > best_f {
        best_f = f_polished;
        best_t.copy_from(&(slice.tangent.transpose() * (&polished - &slice.x0)));
    }
    // Stalled: still improving materially during the second half of the run.
    let stalled = (best_f - f_at_midpoint).abs() > (1e-12f64).max(best_f.abs() * 1e-6);
    Ok((x_of(&best_t), best_f, stalled))
}

/// Number of random restarts (in addition to the deterministic center start).
const RESTARTS: usize = 20;

fn build_slice(basis: Vec<DMatrix<f64>>, cfg: &ToleranceConfig) -> Result<Option<PsiSlice>> {
    let d = basis.len();
    let traces = DVector::from_fn(d, |k, _| basis[k].trace());
    let tnorm = traces.norm();
    // If the trace functional vanishes on the whole space, every Ψ in it is
    // traceless, and a traceless PSD matrix is zero: no nonzero PSD stress.
    if tnorm < 1e-12 {
        return Ok(None);
    }
    let x0 = &traces / (tnorm * tnorm);
    let tangent = numerics::nullspace_basis(&DMatrix::from_fn(1, d, |_, k| traces[k]), cfg)?;
    Ok(Some(PsiSlice {
        basis,
        x0,
        tangent,
    }))
}

struct SearchCandidate {
    stress: StressMatrix,
    objective: f64,
    stalled: bool,
}

fn search_candidates(
    fw: &Framework,
    cfg: &ToleranceConfig,
    seed: u64,
    max_candidates: usize,
) -> Result<Vec<SearchCandidate>> {
    cfg.validate()?;
    let basis = stress_space_basis(fw, cfg)?;
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let Some(slice) = build_slice(basis, cfg)? else {
        return Ok(Vec::new());
    };
    let z = gale_matrix(fw)?;
    let td = slice.tangent.ncols();

    let mut endpoints: Vec<(DVector<f64>, f64, bool)> = Vec::new();
    // Deterministic center start, then seeded Gaussian restarts.
    let zero = DVector::zeros(td);
    endpoints.push(ascend(&slice, &zero, cfg)?);
    if td > 0 {
        for restart in 0..RESTARTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9));
            let start = DVector::from_fn(td, |_, _| rng.sample(StandardNormal));
            endpoints.push(ascend(&slice, &start, cfg)?);
        }
    }

    // Order best-first; dedupe by distance in slice coordinates.
    let mut order: Vec<usize> = (0..endpoints.len()).collect();
    order.sort_by(|&a, &b| endpoints[b].1.total_cmp(&endpoints[a].1).then(a.cmp(&b)));
    let mut picked: Vec<SearchCandidate> = Vec::new();
    let mut picked_x: Vec<DVector<f64>> = Vec::new();
    for idx in order {
        let (x, f, stalled) = &endpoints[idx];
        if picked_x.iter().any(|p| (p - x).norm() < 1e-6) {
            continue;
        }
        let psi = psi_of_x(&slice.basis, x);
        let omega = numerics::symmetrize(&(&z * &psi * z.transpose()));
        picked.push(SearchCandidate {
            stress: StressMatrix {
                rank: numerics::rank(&omega, cfg)?,
                psd: numerics::psd_check(&omega, cfg)?,
                omega,
            },
            objective: *f,
            stalled: *stalled,
        });
        picked_x.push(x.clone());
        if picked.len() >= max_candidates {
            break;
        }
    }
    Ok(picked)
}

/// Candidate stresses from the seeded search, deduplicated and ordered
/// best-first (`λ_min(Ψ)` descending, ties by earliest discovery).
///
/// The first entry is the stress [`find_psd_stress`] reports; later entries
/// are alternate optima from other restarts, useful when a certificate
/// depends on the choice of stress.
pub fn psd_stress_candidates(
    fw: &Framework,
    cfg: &ToleranceConfig,
    seed: u64,
    max_candidates: usize,
) -> Result<Vec<StressMatrix>> {
    Ok(search_candidates(fw, cfg, seed, max_candidates)?
        .into_iter()
        .map(|c| c.stress)
        .collect())
}

/// Searches for a nonzero PSD stress matrix of the framework.
///
/// Poses the search in Ψ coordinates on the affine slice `trace Ψ = 1`
/// (lossless: any nonzero PSD Ψ has positive trace) and maximizes the
/// concave function `λ_min(Ψ)` by projected subgradient ascent with seeded
/// restarts. Returns:
///
/// * [`PsdStressOutcome::Found`] when the best iterate passes the PSD check —
///   normalized to `trace Ω = 1`, with its rank;
/// * [`PsdStressOutcome::Absent`] when the stress space is trivial, traceless,
///   or the converged optimum is certifiably below `−psd_tol`;
/// * [`PsdStressOutcome::Unknown`] when the optimizer was still moving at the
///   iteration budget without reaching the PSD cone.
pub fn find_psd_stress(fw: &Framework, cfg: &ToleranceConfig, seed: u64) -> Result<PsdStressOutcome> {
    cfg.validate()?;
    let basis = stress_space_basis(fw, cfg)?;
    if basis.is_empty() {
        return Ok(PsdStressOutcome::Absent);
    }
    if build_slice(basis, cfg)?.is_none() {
        return Ok(PsdStressOutcome::Absent);
    }
    let candidates = search_candidates(fw, cfg, seed, 1)?;
    let Some(best) = candidates.into_iter().next() else {
        return Ok(PsdStressOutcome::Absent);
    };
    if best.stress.psd {
        return Ok(PsdStressOutcome::Found(best.stress));
    }
    // The optimum is negative. Trust it as a certificate of absence only if
    // the run converged and ended clearly below the PSD threshold; a stalled
    // run or one right at the threshold stays Unknown. (Ψ lives on the
    // trace-1 slice, so |λ| ≤ 1 and the absolute comparison is scale-free.)
    if !best.stalled && best.objective < -10.0 * cfg.psd_tol {
        Ok(PsdStressOutcome::Absent)
    } else {
        Ok(PsdStressOutcome::Unknown(best.stress))
    }
}
