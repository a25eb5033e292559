//! The Cayley configuration spectrahedron of a framework.
//!
//! Fix a framework with projected Gram matrix `X = V^T P P^T V` and missing
//! edges `{i,j} ∈ Ē(G)`. With `M^ij = −½ V^T E^ij V`, the set
//!
//! ```text
//! F = { y ∈ R^m̄ : X(y) := X + Σ y_ij M^ij ⪰ 0 }
//! ```
//!
//! parameterizes *all* frameworks equivalent to the input, in every
//! dimension at once: `y ∈ F` corresponds to an equivalent framework whose
//! squared distance on the missing edge `{i,j}` is `d_ij + y_ij`, and the
//! rank of `X(y)` is that framework's dimension. Rigidity questions become
//! facial geometry: the framework is universally rigid iff `F = {0}`,
//! dimensionally rigid iff `0` lies in the relative interior of `F`, and a
//! pair is universally linked iff `F` lies in the hyperplane `y_kl = 0`.
//!
//! This module builds `F`, decides membership, reconstructs the equivalent
//! framework behind a point, computes affine hulls of faces, compares
//! minimal faces, shoots boundary rays, and searches for maximum-rank
//! points. Everything is exact linear algebra except the max-rank search,
//! which is an explicitly labeled heuristic.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::framework::{build_v, realize, Framework};
use crate::numerics::{self, ToleranceConfig};

/// Random restarts for the max-rank ascent.
const RESTARTS: usize = 20;
/// Random chord probes when hunting for rank beyond the ascent optimum.
const CHORD_PROBES: usize = 16;
/// Ray parameter beyond which a direction is declared unbounded.
const RAY_UNBOUNDED: f64 = 1e6;
/// Tolerance membership fattens `F` by `O(psd_tol)`, so points that pass
/// `psd_check` can carry junk eigenvalues well above `rank_tol`. Rank
/// decisions inside the max-rank search therefore only count eigenvalues
/// above this multiple of `psd_tol` (times the spectral scale); everything
/// below is treated as an on-face zero to be snapped away.
const FACE_BAND: f64 = 100.0;

/// The spectrahedron `F = {y : X(y) ⪰ 0}` of one framework.
#[derive(Debug, Clone)]
pub struct CayleySpectrahedron {
    n: usize,
    /// Projected Gram matrix `X` of the input framework, order `n−1`.
    base_x: DMatrix<f64>,
    /// Missing edges in lexicographic order; `y` vectors use this indexing.
    missing: Vec<(usize, usize)>,
    /// `M^ij = −½ V^T E^ij V`, aligned with `missing`.
    m: Vec<DMatrix<f64>>,
    v: DMatrix<f64>,
}

/// Membership verdict with the diagnostic eigenvalue behind it.
#[derive(Debug, Clone, Copy)]
pub struct Membership {
    /// `λ_min(X(y)) ≥ −psd_tol · max(1, |λ|_max)`.
    pub member: bool,
    pub lambda_min: f64,
}

/// A face of `F` through an anchor point, with its affine hull.
///
/// The hull is `aff(face(y)) = {z : X(z)U = 0}` where `U` spans the null
/// space of `X(y)`; the anchor is a particular point of the hull and
/// `directions` an orthonormal basis of its linear part.
#[derive(Debug, Clone)]
pub struct FaceDescription {
    pub anchor: DVector<f64>,
    /// Orthonormal basis `U` of `N(X(anchor))`; empty when `X(anchor) ≻ 0`.
    pub nullspace: DMatrix<f64>,
    /// Orthonormal direction basis of the hull in `R^m̄`.
    pub directions: DMatrix<f64>,
}

impl FaceDescription {
    /// Dimension of the affine hull.
    pub fn dim(&self) -> usize {
        self.directions.ncols()
    }
}

/// How the null spaces of `X(y1)` and `X(y2)` relate.
///
/// Equal null spaces mean the two points lie in the relative interior of the
/// same minimal face; containment `N(X(y1)) ⊃ N(X(y2))` means `face(y1)` is
/// a proper face of `face(y2)` (the first point sits deeper in the boundary).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelintOrder {
    /// Same minimal face.
    Equal,
    /// `N(X(y1)) ⊋ N(X(y2))`.
    FirstContainsSecond,
    /// `N(X(y1)) ⊊ N(X(y2))`.
    SecondContainsFirst,
    Incomparable,
}

/// Result of the heuristic rank maximization over `F`.
#[derive(Debug, Clone)]
pub struct MaxRankPoint {
    pub y: DVector<f64>,
    pub rank: usize,
    pub lambda_min: f64,
    /// True when `X(y) ≻ 0` holds strictly (then `rank = n−1` is exact, not
    /// heuristic). Otherwise the reported rank is a lower bound on the true
    /// maximum over `F`.
    pub certified_interior: bool,
}

/// Builds the spectrahedron with the canonical `V`.
pub fn build_spectrahedron(fw: &Framework) -> Result<CayleySpectrahedron> {
    CayleySpectrahedron::new(fw)
}

impl CayleySpectrahedron {
    /// Builds `X` and the basis `{M^ij}` with the canonical `V`.
    pub fn new(fw: &Framework) -> Result<Self> {
        Self::with_v(fw, &build_v(fw.n())?)
    }

    /// Builds with a caller-supplied `V` whose columns are an orthonormal
    /// basis of `e⊥`. All membership and rank answers are invariant under
    /// this choice (congruence by the orthogonal factor relating two such
    /// `V`); the hook exists so tests can verify exactly that.
    pub fn with_v(fw: &Framework, v: &DMatrix<f64>) -> Result<Self> {
        let n = fw.n();
        if v.nrows() != n || v.ncols() != n - 1 {
            return Err(Error::invalid(format!(
                "V must be {n}x{}, got {}x{}",
                n - 1,
                v.nrows(),
                v.ncols()
            )));
        }
        if (v.transpose() * v - DMatrix::identity(n - 1, n - 1)).amax() > 1e-10 {
            return Err(Error::invalid("V columns are not orthonormal"));
        }
        if (DVector::from_element(n, 1.0).transpose() * v).amax() > 1e-10 {
            return Err(Error::invalid("V columns must be orthogonal to e"));
        }

        let p = fw.config();
        let vtp = v.transpose() * p;
        let base_x = numerics::symmetrize(&(&vtp * vtp.transpose()));
        let missing = fw.graph().missing_edges();
        let m: Vec<DMatrix<f64>> = missing
            .iter()
            .map(|&(i, j)| {
                let vi = v.row(i);
                let vj = v.row(j);
                -(vi.transpose() * vj + vj.transpose() * vi) * 0.5
            })
            .collect();

        // The M^ij are linearly independent (they biject with the missing
        // edges through K_V); a dependent set means the build is broken.
        let mbar = m.len();
        let mut stacked = DMatrix::zeros((n - 1) * (n - 1), mbar);
        for (k, mk) in m.iter().enumerate() {
            stacked.column_mut(k).copy_from_slice(mk.as_slice());
        }
        let cfg = ToleranceConfig::default();
        if numerics::rank_rect(&stacked, &cfg)? != mbar {
            return Err(Error::InternalInconsistency(
                "basis matrices M^ij are linearly dependent".to_string(),
            ));
        }

        Ok(Self {
            n,
            base_x,
            missing,
            m,
            v: v.clone(),
        })
    }

    /// Number of vertices of the underlying framework.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of missing edges `m̄` = dimension of the ambient `y`-space.
    pub fn m_bar(&self) -> usize {
        self.missing.len()
    }

    /// Missing edges in the order `y` vectors are indexed by.
    pub fn missing_edges(&self) -> &[(usize, usize)] {
        &self.missing
    }

    /// Position of a missing edge in the `y` indexing.
    pub fn index_of(&self, pair: (usize, usize)) -> Option<usize> {
        let key = (pair.0.min(pair.1), pair.0.max(pair.1));
        self.missing.iter().position(|&p| p == key)
    }

    /// The projected Gram matrix `X = X(0)`.
    pub fn base_x(&self) -> &DMatrix<f64> {
        &self.base_x
    }

    /// The basis matrix `M^ij` at position `idx` of the missing-edge order.
    pub fn m_matrix(&self, idx: usize) -> &DMatrix<f64> {
        &self.m[idx]
    }

    /// The `V` this spectrahedron was built with.
    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    fn check_y(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.m_bar() {
            return Err(Error::invalid(format!(
                "y has {} entries, the spectrahedron has {} missing edges",
                y.len(),
                self.m_bar()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("y has non-finite entries"));
        }
        Ok(())
    }

    fn x_at(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut x = self.base_x.clone();
        for (k, mk) in self.m.iter().enumerate() {
            x += mk * y[k];
        }
        x
    }

    /// `X(y) = X + Σ y_ij M^ij`.
    pub fn x_of_y(&self, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_y(y)?;
        Ok(self.x_at(y))
    }

    /// Whether `y ∈ F`, together with `λ_min(X(y))`.
    pub fn membership(&self, y: &DVector<f64>, cfg: &ToleranceConfig) -> Result<Membership> {
        let x = self.x_of_y(y)?;
        let eig = numerics::sym_eig(&x)?;
        let lambda_min = eig.values[0];
        let member = lambda_min >= -cfg.psd_tol * numerics::spectral_scale(&eig).max(1.0);
        Ok(Membership { member, lambda_min })
    }

    /// Reconstructs the equivalent framework behind `y ∈ F`: realizes the
    /// Gram matrix `V X(y) V^T`, so the result has dimension `rank X(y)`,
    /// the input's lengths on all edges, and squared distance `d_ij + y_ij`
    /// on each missing edge `{i,j}`.
    ///
    /// # Errors
    /// [`Error::InvalidInput`] when `y ∉ F` or `fw` is not the framework the
    /// spectrahedron was built from.
    pub fn equivalent_framework(
        &self,
        fw: &Framework,
        y: &DVector<f64>,
        cfg: &ToleranceConfig,
    ) -> Result<Framework> {
        if fw.n() != self.n || fw.graph().missing_edges() != self.missing {
            return Err(Error::invalid(
                "framework does not match the spectrahedron it is paired with",
            ));
        }
        let verdict = self.membership(y, cfg)?;
        if !verdict.member {
            return Err(Error::invalid(format!(
                "y is not in the spectrahedron (λ_min = {:.3e})",
                verdict.lambda_min
            )));
        }
        let x = self.x_at(y);
        let b = numerics::symmetrize(&(&self.v * x * self.v.transpose()));
        let q = realize(&b, cfg)?;
        let out = Framework::new(fw.graph().clone(), q)?;

        // Theorem-level postconditions; failing them means a numerics bug,
        // not bad input.
        let (d_old, d_new) = (fw.edm(), out.edm());
        let tol = 1e-8 * d_old.amax().max(1.0);
        for (i, j) in fw.graph().edges() {
            if (d_new[(i, j)] - d_old[(i, j)]).abs() > tol {
                return Err(Error::InternalInconsistency(format!(
                    "reconstructed framework changed edge ({}, {}) length",
                    i + 1,
                    j + 1
                )));
            }
        }
        for (k, &(i, j)) in self.missing.iter().enumerate() {
            if (d_new[(i, j)] - d_old[(i, j)] - y[k]).abs() > tol {
                return Err(Error::InternalInconsistency(format!(
                    "reconstructed framework missed d + y on pair ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(out)
    }

    /// The affine hull of the minimal face of `F` containing `y`:
    /// `aff(face(y)) = {z : X(z)U = 0}` for `U` spanning `N(X(y))`.
    pub fn face_affine_hull(
        &self,
        y: &DVector<f64>,
        cfg: &ToleranceConfig,
    ) -> Result<FaceDescription> {
        let verdict = self.membership(y, cfg)?;
        if !verdict.member {
            return Err(Error::invalid(format!(
                "face_affine_hull anchor is not in F (λ_min = {:.3e})",
                verdict.lambda_min
            )));
        }
        let x = self.x_at(y);
        let u = numerics::nullspace_basis(&x, cfg)?;
        let mbar = self.m_bar();
        let directions = if u.ncols() == 0 {
            // X(y) ≻ 0: no active constraints, the hull is all of R^m̄.
            DMatrix::identity(mbar, mbar)
        } else {
            numerics::nullspace_basis(&self.constraint_rows(&u), cfg)?
        };
        Ok(FaceDescription {
            anchor: y.clone(),
            nullspace: u,
            directions,
        })
    }

    /// Rows of the linear system `Σ_k z_k (M_k U) = −XU` in `z`, vectorized:
    /// column `k` holds `vec(M_k U)`.
    fn constraint_rows(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        let mut a = DMatrix::zeros((self.n - 1) * u.ncols(), self.m_bar());
        for (t, mt) in self.m.iter().enumerate() {
            let block = mt * u;
            a.column_mut(t).copy_from_slice(block.as_slice());
        }
        a
    }

    /// Compares the null spaces of `X(y1)` and `X(y2)` — equivalently, the
    /// minimal faces of `F` the two points sit in. Implemented as rank
    /// comparisons of the stacked matrix `[X(y1); X(y2)]`, never by matching
    /// basis vectors.
    pub fn relint_compare(
        &self,
        y1: &DVector<f64>,
        y2: &DVector<f64>,
        cfg: &ToleranceConfig,
    ) -> Result<RelintOrder> {
        for (label, y) in [("y1", y1), ("y2", y2)] {
            if !self.membership(y, cfg)?.member {
                return Err(Error::invalid(format!("{label} is not in F")));
            }
        }
        let (x1, x2) = (self.x_at(y1), self.x_at(y2));
        let r1 = numerics::rank(&x1, cfg)?;
        let r2 = numerics::rank(&x2, cfg)?;
        let d = self.n - 1;
        let mut stack = DMatrix::zeros(2 * d, d);
        stack.view_mut((0, 0), (d, d)).copy_from(&x1);
        stack.view_mut((d, 0), (d, d)).copy_from(&x2);
        // N(stack) = N(X1) ∩ N(X2), so rank(stack) = r1 says N(X1) ⊆ N(X2).
        let rs = numerics::rank_rect(&stack, cfg)?;
        Ok(match (rs == r1, rs == r2) {
            (true, true) => RelintOrder::Equal,
            (false, true) => RelintOrder::FirstContainsSecond,
            (true, false) => RelintOrder::SecondContainsFirst,
            (false, false) => RelintOrder::Incomparable,
        })
    }

    /// Largest `t ≥ 0` with `y0 + t·d ∈ F`, by bisection on the membership
    /// predicate; `f64::INFINITY` when `t = 10^6` is still feasible (`F` is
    /// convex, so feasibility at the cap certifies the whole segment).
    pub fn boundary_ray(
        &self,
        y0: &DVector<f64>,
        dir: &DVector<f64>,
        cfg: &ToleranceConfig,
    ) -> Result<f64> {
        self.check_y(dir)?;
        if dir.norm() < 1e-15 {
            return Err(Error::invalid("ray direction is zero"));
        }
        if !self.membership(y0, cfg)?.member {
            return Err(Error::invalid("ray origin is not in F"));
        }
        let feasible = |t: f64| -> Result<bool> {
            Ok(self.membership(&(y0 + dir * t), cfg)?.member)
        };
        if feasible(RAY_UNBOUNDED)? {
            return Ok(f64::INFINITY);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while feasible(hi)? {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            if hi - lo <= cfg.solver_tol * lo.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    // ─── max-rank search ──────────────────────────────────────────────────

    /// Heuristic maximizer of `rank X(y)` over `F`.
    ///
    /// Strategy: maximize the concave function `λ_min(X(y))` by projected
    /// subgradient ascent from seeded restarts; if the optimum is strictly
    /// positive the point is certified interior (`rank = n−1` exactly).
    /// Otherwise `F` is flat, and the search exploits a fact about PSD
    /// averages — `N(X(½y1 + ½y2)) = N(X(y1)) ∩ N(X(y2))` for `y1, y2 ∈ F` —
    /// so the mean of every feasible point found (ascent endpoints, random
    /// chord midpoints through the mean) attains the maximum rank among
    /// them. The result's rank never drops below `rank X(0)`, and is a
    /// lower bound on the true maximum unless `certified_interior`.
    ///
    /// Precision caveat: on a flat face the returned coordinates are
    /// accurate only to roughly `√psd_tol` in the directions tangent to the
    /// face — eigenvalues respond to tangential error at second order, so
    /// no spectral test can pin the point tighter. Callers needing
    /// first-order-exact face samples should combine [`Self::face_affine_hull`]
    /// at an exact anchor (such as `y = 0`) with [`Self::boundary_ray`].
    pub fn max_rank_point(&self, cfg: &ToleranceConfig, seed: u64) -> Result<MaxRankPoint> {
        cfg.validate()?;
        let mbar = self.m_bar();
        let zero = DVector::zeros(mbar);
        let mut points: Vec<DVector<f64>> = vec![zero.clone()];

        // Ascent endpoints, snapped into F where possible.
        let spread = 0.5 * self.base_x.amax().max(1.0);
        for restart in 0..=RESTARTS {
            let start = if restart == 0 {
                zero.clone()
            } else {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9));
                DVector::from_fn(mbar, |_, _| {
                    let g: f64 = rng.sample(StandardNormal);
                    g * spread
                })
            };
            let end = self.ascend_lambda_min(&start, cfg)?;
            if let Some(p) = self.snap_into_f(&end, cfg)? {
                points.push(p);
            }
        }

        // Chord midpoints through the running mean pick up flat directions
        // the ascent has no incentive to explore.
        let anchor = match self.snap_into_f(&mean(&points), cfg)? {
            Some(p) => {
                points.push(p.clone());
                p
            }
            None => zero.clone(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x00C0_FFEE));
        for _ in 0..CHORD_PROBES {
            let mut d = DVector::from_fn(mbar, |_, _| rng.sample::<f64, _>(StandardNormal));
            let norm = d.norm();
            if norm < 1e-12 {
                continue;
            }
            d /= norm;
            let cap = 64.0 * (1.0 + anchor.norm());
            let t_plus = self.boundary_ray(&anchor, &d, cfg)?.min(cap);
            let t_minus = self.boundary_ray(&anchor, &(-&d), cfg)?.min(cap);
            let midpoint = &anchor + &d * (0.5 * (t_plus - t_minus));
            if let Some(p) = self.snap_into_f(&midpoint, cfg)? {
                points.push(p);
            }
        }
        if let Some(p) = self.snap_into_f(&mean(&points), cfg)? {
            points.push(p);
        }

        // Max rank first, then λ_min, then earliest discovery. Rank here is
        // the band rank (eigenvalues clear of the membership fuzz), so a
        // poorly converged candidate cannot out-rank a clean one.
        let measure = |y: &DVector<f64>| -> Result<(usize, f64, bool)> {
            let eig = numerics::sym_eig(&self.x_at(y))?;
            let scale = numerics::spectral_scale(&eig).max(1.0);
            let cut = FACE_BAND * cfg.psd_tol * scale;
            let rank = eig.values.iter().filter(|l| **l > cut).count();
            Ok((rank, eig.values[0], eig.values[0] > cut))
        };
        let mut best: Option<MaxRankPoint> = None;
        for y in points {
            let (rank, lambda_min, certified_interior) = measure(&y)?;
            let better = match &best {
                None => true,
                Some(b) => rank > b.rank || (rank == b.rank && lambda_min > b.lambda_min),
            };
            if better {
                best = Some(MaxRankPoint {
                    y,
                    rank,
                    lambda_min,
                    certified_interior,
                });
            }
        }
        Ok(best.expect("y = 0 is always a candidate"))
    }

    /// Subgradient ascent on the concave `y ↦ λ_min(X(y))` with diminishing
    /// steps, returning the best iterate seen.
    fn ascend_lambda_min(
        &self,
        start: &DVector<f64>,
        cfg: &ToleranceConfig,
    ) -> Result<DVector<f64>> {
        let mut y = start.clone();
        let mut best = y.clone();
        let mut best_f = f64::NEG_INFINITY;
        let step = 0.5 * self.base_x.amax().max(1.0);
        for k in 1..=cfg.max_iters {
            let eig = numerics::sym_eig(&self.x_at(&y))?;
            if eig.values[0] > best_f {
                best_f = eig.values[0];
                best.copy_from(&y);
            }
            let v = eig.vectors.column(0);
            let g = DVector::from_fn(self.m_bar(), |t, _| (v.transpose() * &self.m[t] * v)[(0, 0)]);
            let norm = g.norm();
            if norm < 1e-14 {
                break;
            }
            y += g * (step / (norm * (k as f64).sqrt()));
        }
        Ok(best)
    }

    /// Tries to convert a near-feasible point into an exact-to-tolerance
    /// member of `F`: alternating projections between the affine family
    /// `{X(y)}` and the PSD cone, then a facial least-squares snap
    /// (`X(z)U = 0` for the near-null block `U`) that handles directions
    /// where the cone and the family meet tangentially. Returns `None` when
    /// the point cannot be certified feasible.
    fn snap_into_f(&self, y: &DVector<f64>, cfg: &ToleranceConfig) -> Result<Option<DVector<f64>>> {
        let mut y = y.clone();
        if !self.membership(&y, cfg)?.member {
            // Alternating projections: project X(y) onto the cone, then pull
            // the result back into the affine family by least squares.
            let a = self.constraint_rows(&DMatrix::identity(self.n - 1, self.n - 1));
            let svd = a.svd(true, true);
            for _ in 0..40 {
                let x = self.x_at(&y);
                let delta = numerics::project_psd(&x)? - &x;
                let rhs = DVector::from_column_slice(delta.as_slice());
                let t = svd
                    .solve(&rhs, cfg.rank_tol)
                    .map_err(|e| Error::InternalInconsistency(format!("projection solve: {e}")))?;
                if t.amax() < 1e-15 {
                    break;
                }
                y += t;
                if self.membership(&y, cfg)?.member {
                    break;
                }
            }
        }
        // Facial snap with escalating thresholds: treat the near-null block
        // `U` as an active face, solve X(z)U = 0 exactly, and keep the
        // correction when the block residual genuinely collapses. λ_min is
        // not the merit here — a point inside the tolerance fuzz can have
        // λ_min ≈ 0 while carrying junk eigenvalues that only this snap
        // removes. A threshold too large just fails the progress test.
        for _ in 0..3 {
            let eig = numerics::sym_eig(&self.x_at(&y))?;
            let scale = numerics::spectral_scale(&eig).max(1.0);
            let mut improved = false;
            for snap in [FACE_BAND * cfg.psd_tol, 1e-4, 1e-3] {
                let cut = snap * scale;
                let block = |values: &DVector<f64>| -> f64 {
                    values
                        .iter()
                        .filter(|l| l.abs() <= cut)
                        .map(|l| l.abs())
                        .sum()
                };
                let null_count = eig.values.iter().filter(|l| l.abs() <= cut).count();
                let before = block(&eig.values);
                if null_count == 0
                    || null_count == self.n - 1
                    || before <= 1e-12 * scale * null_count as f64
                {
                    continue;
                }
                let u = eig.vectors.columns(0, null_count).into_owned();
                let a = self.constraint_rows(&u);
                let xu = self.x_at(&y) * &u;
                let rhs = -DVector::from_column_slice(xu.as_slice());
                let svd = a.svd(true, true);
                let Ok(delta) = svd.solve(&rhs, cfg.rank_tol) else {
                    continue;
                };
                let z = &y + delta;
                let zeig = numerics::sym_eig(&self.x_at(&z))?;
                let zscale = numerics::spectral_scale(&zeig).max(1.0);
                let feasible = zeig.values[0] >= -cfg.psd_tol * zscale;
                if feasible && block(&zeig.values) < 0.25 * before {
                    y = z;
                    improved = true;
                    break;
                }
            }
            if !improved {
                break;
            }
        }
        Ok(if self.membership(&y, cfg)?.member {
            Some(y)
        } else {
            None
        })
    }

    // ─── grid export ──────────────────────────────────────────────────────

    /// CSV grid of `λ_min` and membership over a 2-D slice of the `y`-space:
    /// the two chosen missing-edge coordinates sweep `[lo, hi]` in `steps`
    /// samples each (all other coordinates held at 0). Output has a header
    /// `y_<i>_<j>,y_<k>_<l>,lambda_min,member` (1-based vertex labels) and
    /// `steps²` data rows, first coordinate in the outer loop.
    pub fn slice_csv(
        &self,
        pair_a: (usize, usize),
        pair_b: (usize, usize),
        lo: f64,
        hi: f64,
        steps: usize,
        cfg: &ToleranceConfig,
    ) -> Result<String> {
        let idx_a = self
            .index_of(pair_a)
            .ok_or_else(|| Error::invalid(format!(
                "pair ({}, {}) is not a missing edge",
                pair_a.0 + 1,
                pair_a.1 + 1
            )))?;
        let idx_b = self
            .index_of(pair_b)
            .ok_or_else(|| Error::invalid(format!(
                "pair ({}, {}) is not a missing edge",
                pair_b.0 + 1,
                pair_b.1 + 1
            )))?;
        if idx_a == idx_b {
            return Err(Error::invalid("slice pairs must be distinct"));
        }
        if steps < 2 {
            return Err(Error::invalid("slice needs at least 2 steps per axis"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("slice range must be finite with lo < hi"));
        }

        let (a, b) = (self.missing[idx_a], self.missing[idx_b]);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "y_{}_{},y_{}_{},lambda_min,member",
            a.0 + 1,
            a.1 + 1,
            b.0 + 1,
            b.1 + 1
        );
        let mut y = DVector::zeros(self.m_bar());
        for ia in 0..steps {
            let ya = lo + (hi - lo) * ia as f64 / (steps - 1) as f64;
            for ib in 0..steps {
                let yb = lo + (hi - lo) * ib as f64 / (steps - 1) as f64;
                y[idx_a] = ya;
                y[idx_b] = yb;
                let m = self.membership(&y, cfg)?;
                let _ = writeln!(out, "{ya},{yb},{},{}", m.lambda_min, m.member);
            }
        }
        Ok(out)
    }
}

fn mean(points: &[DVector<f64>]) -> DVector<f64> {
    let mut acc = DVector::zeros(points[0].len());
    for p in points {
        acc += p;
    }
    acc / points.len() as f64
}
