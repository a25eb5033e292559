//! Deterministic dense symmetric linear algebra.
//!
//! Everything downstream — stress spaces, spectrahedron membership, face
//! computations — reduces to eigendecompositions, tolerance-based ranks and
//! null/column space bases of small dense matrices. This module wraps
//! nalgebra's factorizations behind a few conventions that the rest of the
//! crate relies on:
//!
//! * eigenvalues are returned sorted ascending;
//! * every eigen/singular vector is sign-normalized so that its
//!   largest-magnitude entry (first such entry on ties) is positive, making
//!   all reported witnesses reproducible across runs;
//! * rank and PSD decisions use *relative* thresholds scaled by
//!   `max(1, |λ|_max)`, so tiny and large matrices behave uniformly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Numerical thresholds governing rank, PSD, and convergence decisions.
///
/// All tolerances must be strictly positive and `max_iters` at least 1;
/// [`ToleranceConfig::validate`] enforces this at the API boundary.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ToleranceConfig {
    /// Relative threshold below which an eigen/singular value counts as zero.
    pub rank_tol: f64,
    /// Relative slack allowed on the smallest eigenvalue of a PSD matrix.
    pub psd_tol: f64,
    /// Tolerance for residuals of linear systems and factorizations.
    pub solver_tol: f64,
    /// Iteration budget for the seeded searches.
    pub max_iters: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_tol: 1e-9,
            psd_tol: 1e-8,
            solver_tol: 1e-10,
            max_iters: 2000,
        }
    }
}

impl ToleranceConfig {
    /// Default configuration with both decision tolerances (`rank_tol`,
    /// `psd_tol`) replaced by `tol`. This is what the CLI's `--tol` flag maps
    /// to.
    pub fn uniform(tol: f64) -> Self {
        ToleranceConfig {
            rank_tol: tol,
            psd_tol: tol,
            ..Default::default()
        }
    }

    /// Checks the invariants: every tolerance strictly positive and finite,
    /// `max_iters >= 1`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("psd_tol", self.psd_tol),
            ("solver_tol", self.solver_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Result of a symmetric eigendecomposition, `A = Q diag(values) Q^T`.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Eigenvalues in ascending order.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors, column `k` paired with `values[k]`,
    /// sign-normalized.
    pub vectors: DMatrix<f64>,
}

/// Returns `(A + A^T) / 2`, the symmetric part of a square matrix.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn check_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("matrix has non-finite entries"))
    }
}

fn check_square(a: &DMatrix<f64>, what: &str) -> Result<()> {
    if a.nrows() == a.ncols() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} expects a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )))
    }
}

/// Flips the sign of each column so its largest-magnitude entry (first one
/// on ties) is positive. Zero columns are left alone.
fn normalize_column_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut lead = 0.0f64;
        for &x in col.iter() {
            if x.abs() > lead.abs() {
                lead = x;
            }
        }
        if lead < 0.0 {
            col.neg_mut();
        }
    }
}

/// `‖A·Q − Q·diag(λ)‖_max` — zero exactly when the columns of `Q` are
/// eigenvectors of `A` with the claimed eigenvalues.
fn factorization_residual(a: &DMatrix<f64>, values: &DVector<f64>, q: &DMatrix<f64>) -> f64 {
    let mut r = a * q;
    for (k, mut col) in r.column_iter_mut().enumerate() {
        col.axpy(-values[k], &q.column(k), 1.0);
    }
    r.amax()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Slower than the
/// tridiagonal QR route but unconditionally accurate at these sizes, and
/// bit-deterministic (fixed sweep order, no shifts).
fn jacobi_eig(sym: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = sym.nrows();
    let mut m = sym.clone();
    let mut q = DMatrix::<f64>::identity(n, n);
    let scale = sym.amax().max(f64::MIN_POSITIVE);
    for _ in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m[(i, j)].abs());
            }
        }
        if off <= f64::EPSILON * scale {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = m[(p, r)];
                if apq == 0.0 {
                    continue;
                }
                // Rotation annihilating m[(p, r)] (Golub & Van Loan §8.5).
                let theta = (m[(r, r)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, r)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, r)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(r, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(r, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (qkp, qkq) = (q[(k, p)], q[(k, r)]);
                    q[(k, p)] = c * qkp - s * qkq;
                    q[(k, r)] = s * qkp + c * qkq;
                }
            }
        }
    }
    (DVector::from_fn(n, |i, _| m[(i, i)]), q)
}

/// Eigendecomposition of the symmetric part of `a`.
///
/// Eigenvalues come back ascending and eigenvectors follow the deterministic
/// sign convention, so repeated calls on the same input are bit-identical.
///
/// The fast path is nalgebra's tridiagonal QR, which on rare inputs
/// mis-accumulates its rotations and hands back an orthonormal basis that is
/// *not* an eigenbasis (the eigenvalues are still right). Every result is
/// therefore residual-checked, with a Jacobi fallback when the fast path is
/// wrong; the branch is input-determined, so determinism survives.
///
/// # Errors
/// `InvalidInput` if `a` is not square or has non-finite entries.
/// `InternalInconsistency` if neither backend produces a decomposition that
/// passes the residual check.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<SymEig> {
    check_square(a, "sym_eig")?;
    check_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SymEig {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = symmetrize(a);
    let tol = 1e-10 * sym.amax().max(1.0) * n as f64;
    let eig = sym.clone().symmetric_eigen();
    let (mut values, mut vectors) = (eig.eigenvalues, eig.eigenvectors);
    if factorization_residual(&sym, &values, &vectors) > tol {
        let (jv, jq) = jacobi_eig(&sym);
        if factorization_residual(&sym, &jv, &jq) > tol {
            return Err(Error::InternalInconsistency(
                "eigendecomposition failed the residual check on both backends".to_string(),
            ));
        }
        values = jv;
        vectors = jq;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted = DVector::from_fn(n, |k, _| values[order[k]]);
    let mut vectors = DMatrix::from_fn(n, n, |i, k| vectors[(i, order[k])]);
    normalize_column_signs(&mut vectors);
    Ok(SymEig {
        values: sorted,
        vectors,
    })
}

/// Largest absolute eigenvalue, i.e. the spectral norm of the symmetric part.
pub fn spectral_scale(eig: &SymEig) -> f64 {
    eig.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn lambda_min(a: &DMatrix<f64>) -> Result<f64> {
    let eig = sym_eig(a)?;
    Ok(if eig.values.is_empty() {
        0.0
    } else {
        eig.values[0]
    })
}

/// Rank of a symmetric matrix: the number of eigenvalues with
/// `|λ| > rank_tol · max(1, |λ|_max)`.
pub fn rank(a: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<usize> {
    let eig = sym_eig(a)?;
    let cut = cfg.rank_tol * spectral_scale(&eig).max(1.0);
    Ok(eig.values.iter().filter(|v| v.abs() > cut).count())
}

/// Rank of an arbitrary rectangular matrix via its singular values, with the
/// same relative threshold as [`rank`].
pub fn rank_rect(a: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<usize> {
    check_finite(a)?;
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0);
    }
    let sv = a.clone().singular_values();
    let scale = sv.iter().fold(0.0f64, |m, &v| m.max(v)).max(1.0);
    Ok(sv.iter().filter(|&&s| s > cfg.rank_tol * scale).count())
}

/// Orthonormal basis of the null space of a rectangular matrix.
///
/// The result is `ncols(a) × k` with `k = ncols(a) − rank(a)`; its columns
/// satisfy `‖A v‖ ≤ solver_tol`-grade residuals and follow the deterministic
/// sign convention. `k = 0` yields a matrix with zero columns.
pub fn nullspace_basis(a: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<DMatrix<f64>> {
    check_finite(a)?;
    let (r, c) = (a.nrows(), a.ncols());
    if c == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if r == 0 {
        return Ok(DMatrix::identity(c, c));
    }
    // Pad with zero rows when the matrix is wide: the thin SVD of the padded
    // square matrix carries the full right-singular basis.
    let padded;
    let work = if r < c {
        padded = {
            let mut m = DMatrix::zeros(c, c);
            m.view_mut((0, 0), (r, c)).copy_from(a);
            m
        };
        &padded
    } else {
        a
    };
    let svd = work.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::InternalInconsistency("SVD did not return V^T".into()))?;
    let sv = &svd.singular_values;
    let scale = sv.iter().fold(0.0f64, |m, &v| m.max(v)).max(1.0);
    let rk = sv.iter().filter(|&&s| s > cfg.rank_tol * scale).count();
    let mut basis = DMatrix::zeros(c, c - rk);
    for (out_k, row) in (rk..v_t.nrows()).enumerate() {
        for j in 0..c {
            basis[(j, out_k)] = v_t[(row, j)];
        }
    }
    normalize_column_signs(&mut basis);
    Ok(basis)
}

/// Orthonormal basis of the column space of a rectangular matrix.
///
/// The result is `nrows(a) × rank(a)`, sign-normalized; ordered by
/// decreasing singular value.
pub fn colspace_basis(a: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<DMatrix<f64>> {
    check_finite(a)?;
    let r = a.nrows();
    if r == 0 || a.ncols() == 0 {
        return Ok(DMatrix::zeros(r, 0));
    }
    let svd = a.clone().svd(true, false);
    let u = svd
        .u
        .ok_or_else(|| Error::InternalInconsistency("SVD did not return U".into()))?;
    let sv = &svd.singular_values;
    let scale = sv.iter().fold(0.0f64, |m, &v| m.max(v)).max(1.0);
    let rk = sv.iter().filter(|&&s| s > cfg.rank_tol * scale).count();
    let mut basis = u.columns(0, rk).into_owned();
    normalize_column_signs(&mut basis);
    Ok(basis)
}

/// Whether the symmetric part of `a` is positive semidefinite:
/// `λ_min ≥ −psd_tol · max(1, |λ|_max)`.
pub fn psd_check(a: &DMatrix<f64>, cfg: &ToleranceConfig) -> Result<bool> {
    let eig = sym_eig(a)?;
    if eig.values.is_empty() {
        return Ok(true);
    }
    Ok(eig.values[0] >= -cfg.psd_tol * spectral_scale(&eig).max(1.0))
}

/// Nearest positive semidefinite matrix in Frobenius norm: eigenvalues of
/// the symmetric part clipped at zero. Idempotent, and a fixed point exactly
/// on PSD inputs.
pub fn project_psd(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = sym_eig(a)?;
    let n = eig.values.len();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.values[k];
        if lam > 0.0 {
            let v = eig.vectors.column(k);
            out.ger(lam, &v, &v, 1.0);
        }
    }
    Ok(symmetrize(&out))
}
