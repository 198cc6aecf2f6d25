//! Tolerance-aware numerical subspace algebra.
//!
//! Subspaces are stored as orthonormal bases produced by rank-revealing SVD.
//! Every rank decision goes through a single [`Tolerance`] so that containment,
//! intersection and preimage tests stay consistent across the crate.
//!
//! A recurring trap with relative rank thresholds: a matrix like `P_perp * Z`
//! whose entries are pure cancellation noise (`~1e-15`) would be judged
//! full-rank against its *own* largest singular value. Operations on derived
//! matrices therefore anchor the threshold to the scale of the generating
//! matrix (`sigma_max(Z)`, or 1 for projectors), never to the residue itself.

use nalgebra::{DMatrix, DVector};

/// How rank thresholds are derived from the stored scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TolMode {
    /// Threshold `rel * sigma_max * max(rows, cols)`.
    RelativeToLargestSingularValue,
    /// Threshold `rel` used as an absolute cutoff.
    Absolute,
}

/// Rank/containment tolerance threaded through all numeric decisions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub mode: TolMode,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            mode: TolMode::RelativeToLargestSingularValue,
        }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        assert!(rel > 0.0, "tolerance must be positive");
        Tolerance {
            rel,
            mode: TolMode::RelativeToLargestSingularValue,
        }
    }

    pub fn absolute(abs: f64) -> Self {
        assert!(abs > 0.0, "tolerance must be positive");
        Tolerance {
            rel: abs,
            mode: TolMode::Absolute,
        }
    }

    /// Singular-value cutoff for a matrix of the given shape and scale.
    pub fn rank_threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self.mode {
            TolMode::RelativeToLargestSingularValue => self.rel * sigma_max * rows.max(cols) as f64,
            TolMode::Absolute => self.rel,
        }
    }

    /// Residual bound for containment and zero tests on unit-scale quantities.
    pub fn residual(&self) -> f64 {
        self.rel
    }
}

/// Largest singular value, 0 for empty matrices.
pub fn sigma_max(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values()[0]
}

/// Smallest of the `min(rows, cols)` singular values.
pub fn sigma_min(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    sv[sv.len() - 1]
}

/// SVD with a full right factor: rows are padded with zeros so that `v_t`
/// spans all of `R^cols` (nalgebra computes thin factors).
fn svd_full_v(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(true, true);
    (
        svd.u.expect("svd requested u"),
        svd.singular_values,
        svd.v_t.expect("svd requested v_t"),
    )
}

fn count_above(sv: &DVector<f64>, threshold: f64) -> usize {
    sv.iter().filter(|&&s| s > threshold).count()
}

/// Number of singular values of `m` exceeding the tolerance threshold.
pub fn numerical_rank(m: &DMatrix<f64>, tol: &Tolerance) -> usize {
    numerical_rank_anchored(m, 0.0, tol)
}

/// Rank with the threshold anchored at `max(sigma_max(m), anchor)`.
pub fn numerical_rank_anchored(m: &DMatrix<f64>, anchor: f64, tol: &Tolerance) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let scale = sv[0].max(anchor);
    count_above(&sv, tol.rank_threshold(m.nrows(), m.ncols(), scale))
}

/// A linear subspace of `R^ambient`, stored as an orthonormal basis.
///
/// `dim() == 0` is the zero subspace, a first-class value.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: DMatrix<f64>,
    tol: Tolerance,
}

impl Subspace {
    /// The zero subspace `{0}` of `R^ambient`.
    pub fn zero(ambient: usize, tol: Tolerance) -> Self {
        Subspace {
            ambient,
            basis: DMatrix::zeros(ambient, 0),
            tol,
        }
    }

    /// The full space `R^ambient`.
    pub fn full(ambient: usize, tol: Tolerance) -> Self {
        Subspace {
            ambient,
            basis: DMatrix::identity(ambient, ambient),
            tol,
        }
    }

    /// Wraps a basis that is already orthonormal (checked).
    pub fn from_orthonormal(basis: DMatrix<f64>, tol: Tolerance) -> Self {
        let d = basis.ncols();
        let gram = basis.transpose() * &basis;
        let err = (&gram - DMatrix::identity(d, d)).abs().max();
        assert!(
            d == 0 || err <= 10.0 * tol.residual().max(1e-12),
            "basis is not orthonormal (gram deviation {err:e})"
        );
        Subspace {
            ambient: basis.nrows(),
            basis,
            tol,
        }
    }

    /// Column space of `m`.
    pub fn image(m: &DMatrix<f64>, tol: &Tolerance) -> Self {
        Self::image_anchored(m, 0.0, tol)
    }

    /// Column space with the rank threshold anchored at `anchor`; use the
    /// scale of the generating matrix when `m` is a product or residue.
    pub fn image_anchored(m: &DMatrix<f64>, anchor: f64, tol: &Tolerance) -> Self {
        let ambient = m.nrows();
        if m.ncols() == 0 || ambient == 0 {
            return Subspace::zero(ambient, *tol);
        }
        let svd = m.clone().svd(true, false);
        let sv = &svd.singular_values;
        let scale = sv[0].max(anchor);
        let r = count_above(sv, tol.rank_threshold(m.nrows(), m.ncols(), scale));
        let u = svd.u.expect("svd requested u");
        Subspace {
            ambient,
            basis: u.columns(0, r).into_owned(),
            tol: *tol,
        }
    }

    /// Null space of `m`.
    pub fn kernel(m: &DMatrix<f64>, tol: &Tolerance) -> Self {
        Self::kernel_anchored(m, 0.0, tol)
    }

    /// Null space with an anchored rank threshold.
    pub fn kernel_anchored(m: &DMatrix<f64>, anchor: f64, tol: &Tolerance) -> Self {
        let ambient = m.ncols();
        if ambient == 0 {
            return Subspace::zero(0, *tol);
        }
        if m.nrows() == 0 {
            return Subspace::full(ambient, *tol);
        }
        let (_, sv, v_t) = svd_full_v(m);
        let scale = sv[0].max(anchor);
        let r = count_above(&sv, tol.rank_threshold(m.nrows(), m.ncols(), scale));
        Subspace {
            ambient,
            basis: v_t.rows(r, ambient - r).transpose(),
            tol: *tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }

    /// Orthogonal projection of `v` onto the subspace: `B B^T v`.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        assert_eq!(v.len(), self.ambient, "vector/ambient dimension mismatch");
        if self.is_zero() {
            return DVector::zeros(self.ambient);
        }
        &self.basis * (self.basis.transpose() * v)
    }

    /// Norm of the component of `v` outside the subspace.
    pub fn residual_norm(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Projector onto the orthogonal complement, `I - B B^T`.
    fn complement_projector(&self) -> DMatrix<f64> {
        let eye = DMatrix::identity(self.ambient, self.ambient);
        if self.is_zero() {
            return eye;
        }
        eye - &self.basis * self.basis.transpose()
    }

    /// Orthogonal complement.
    pub fn complement(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient, self.tol);
        }
        if self.dim() == self.ambient {
            return Subspace::zero(self.ambient, self.tol);
        }
        Subspace::kernel_anchored(&self.basis.transpose(), 1.0, &self.tol)
    }

    /// Intersection, via the kernel of stacked complement projectors.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.ambient, self.tol);
        }
        if self.dim() == self.ambient {
            return other.clone();
        }
        if other.dim() == self.ambient {
            return self.clone();
        }
        let mut stacked = DMatrix::zeros(2 * self.ambient, self.ambient);
        stacked
            .view_mut((0, 0), (self.ambient, self.ambient))
            .copy_from(&self.complement_projector());
        stacked
            .view_mut((self.ambient, 0), (self.ambient, self.ambient))
            .copy_from(&other.complement_projector());
        Subspace::kernel_anchored(&stacked, 1.0, &self.tol)
    }

    /// Sum of subspaces: image of the concatenated bases.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        let d = self.dim() + other.dim();
        if d == 0 {
            return Subspace::zero(self.ambient, self.tol);
        }
        let mut cat = DMatrix::zeros(self.ambient, d);
        cat.view_mut((0, 0), (self.ambient, self.dim()))
            .copy_from(&self.basis);
        cat.view_mut((0, self.dim()), (self.ambient, other.dim()))
            .copy_from(&other.basis);
        Subspace::image_anchored(&cat, 1.0, &self.tol)
    }

    /// Whether `other` is contained in `self`: each basis vector of `other`
    /// leaves a residual of at most `eps` after projection onto `self`.
    pub fn contains(&self, other: &Subspace, eps: f64) -> bool {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        if other.is_zero() {
            return true;
        }
        let resid = &other.basis - &self.basis * (self.basis.transpose() * &other.basis);
        (0..resid.ncols()).all(|j| resid.column(j).norm() <= eps)
    }

    /// Whether the single direction `v` lies in the subspace.
    pub fn contains_vector(&self, v: &DVector<f64>, eps: f64) -> bool {
        self.residual_norm(v) <= eps * v.norm().max(1.0)
    }

    /// Spans the same subspace as `other` (mutual containment).
    pub fn same_span(&self, other: &Subspace, eps: f64) -> bool {
        self.contains(other, eps) && other.contains(self, eps)
    }
}

/// Set-theoretic preimage `Z^{-1} S = { v : Z v in S }`, computed as the
/// kernel of the complement projector applied to `Z`. Always contains
/// `ker Z`; the rank threshold is anchored at `sigma_max(Z)`.
pub fn preimage(z: &DMatrix<f64>, s: &Subspace, tol: &Tolerance) -> Subspace {
    assert_eq!(
        z.nrows(),
        s.ambient_dim(),
        "matrix rows / subspace ambient mismatch"
    );
    let anchor = sigma_max(z);
    if s.dim() == s.ambient_dim() {
        return Subspace::full(z.ncols(), *tol);
    }
    let projected = if s.is_zero() {
        z.clone()
    } else {
        z - s.basis() * (s.basis().transpose() * z)
    };
    Subspace::kernel_anchored(&projected, anchor, tol)
}
