//! System models, datasets, the noise annihilator and the affine model set.
//!
//! The affine set `Sigma(D) = { A : R = Q A P }` carries every model of the
//! state matrix that is consistent with the data once noise has been
//! annihilated. `P = X_-`, `Q = M` and
//! `R = M (X_+ - B U_-) + N (Y_- - C X_- - D U_-)`.

use nalgebra::DMatrix;
#[cfg(test)]
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::subspace::{numerical_rank, sigma_max, Subspace, Tolerance};

/// The known part of an LTI system. The state matrix is unknown to the
/// analyst; `a_true` is carried only for simulation and oracle checks.
#[derive(Debug, Clone)]
pub struct SystemModel {
    pub a_true: Option<DMatrix<f64>>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
}

impl SystemModel {
    pub fn new(
        a_true: Option<DMatrix<f64>>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        e: DMatrix<f64>,
        f: DMatrix<f64>,
    ) -> Result<Self> {
        let n = b.nrows();
        let m = b.ncols();
        let p = c.nrows();
        let l = e.ncols();
        if c.ncols() != n {
            return Err(Error::Dimension(format!(
                "C has {} columns, expected n = {n}",
                c.ncols()
            )));
        }
        if d.shape() != (p, m) {
            return Err(Error::Dimension(format!(
                "D is {:?}, expected ({p}, {m})",
                d.shape()
            )));
        }
        if e.nrows() != n || f.shape() != (p, l) {
            return Err(Error::Dimension(format!(
                "E is {:?} and F is {:?}, expected ({n}, l) and ({p}, l)",
                e.shape(),
                f.shape()
            )));
        }
        if let Some(a) = &a_true {
            if a.shape() != (n, n) {
                return Err(Error::Dimension(format!(
                    "A is {:?}, expected ({n}, {n})",
                    a.shape()
                )));
            }
        }
        let sys = SystemModel {
            a_true,
            b,
            c,
            d,
            e,
            f,
        };
        sys.check_finite()?;
        Ok(sys)
    }

    fn check_finite(&self) -> Result<()> {
        let all = [
            ("B", &self.b),
            ("C", &self.c),
            ("D", &self.d),
            ("E", &self.e),
            ("F", &self.f),
        ];
        for (name, m) in all {
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("system matrix {name}")));
            }
        }
        if let Some(a) = &self.a_true {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("system matrix A".into()));
            }
        }
        Ok(())
    }

    pub fn state_dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn noise_dim(&self) -> usize {
        self.e.ncols()
    }
}

/// Finite-horizon trajectory data `(X_-, X_+, U_-, Y_-)` with shared
/// column count `T`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x_minus: DMatrix<f64>,
    pub x_plus: DMatrix<f64>,
    pub u_minus: DMatrix<f64>,
    pub y_minus: DMatrix<f64>,
}

impl Dataset {
    pub fn new(
        x_minus: DMatrix<f64>,
        x_plus: DMatrix<f64>,
        u_minus: DMatrix<f64>,
        y_minus: DMatrix<f64>,
    ) -> Result<Self> {
        let t = x_minus.ncols();
        if t == 0 {
            return Err(Error::Dimension("horizon T must be at least 1".into()));
        }
        if x_plus.ncols() != t || u_minus.ncols() != t || y_minus.ncols() != t {
            return Err(Error::Dimension(
                "all data blocks must share the horizon T".into(),
            ));
        }
        if x_plus.nrows() != x_minus.nrows() {
            return Err(Error::Dimension(
                "X_minus and X_plus must have the same state dimension".into(),
            ));
        }
        let ds = Dataset {
            x_minus,
            x_plus,
            u_minus,
            y_minus,
        };
        for (name, m) in [
            ("X_minus", &ds.x_minus),
            ("X_plus", &ds.x_plus),
            ("U_minus", &ds.u_minus),
            ("Y_minus", &ds.y_minus),
        ] {
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("data block {name}")));
            }
        }
        Ok(ds)
    }

    pub fn horizon(&self) -> usize {
        self.x_minus.ncols()
    }

    pub fn state_dim(&self) -> usize {
        self.x_minus.nrows()
    }

    pub fn check_against(&self, sys: &SystemModel) -> Result<()> {
        if self.state_dim() != sys.state_dim()
            || self.u_minus.nrows() != sys.input_dim()
            || self.y_minus.nrows() != sys.output_dim()
        {
            return Err(Error::Dimension(
                "dataset block dimensions do not match the system".into(),
            ));
        }
        Ok(())
    }
}

/// Noise annihilator `[M N]` with `ker [M N] = im [E; F]`.
///
/// In the noise-free case the convention `M = I_n`, `N = 0` is used; the
/// output equation then enters the analysis through the `C P` rows rather
/// than through `N`.
#[derive(Debug, Clone)]
pub struct Annihilator {
    pub m: DMatrix<f64>,
    pub n: DMatrix<f64>,
}

impl Annihilator {
    /// The noise-free convention: `M = I_n`, `N = 0`.
    pub fn noise_free(n: usize, p: usize) -> Self {
        Annihilator {
            m: DMatrix::identity(n, n),
            n: DMatrix::zeros(n, p),
        }
    }

    /// Builds `[M N]` whose rows span the orthogonal complement of
    /// `im [E; F]`. Zero (or absent) noise channels yield the noise-free
    /// convention.
    pub fn compute(e: &DMatrix<f64>, f: &DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        let n = e.nrows();
        let p = f.nrows();
        if e.ncols() != f.ncols() {
            return Err(Error::Dimension(
                "E and F must have the same number of noise columns".into(),
            ));
        }
        let l = e.ncols();
        let mut stacked = DMatrix::zeros(n + p, l);
        stacked.view_mut((0, 0), (n, l)).copy_from(e);
        stacked.view_mut((n, 0), (p, l)).copy_from(f);
        if l == 0 || sigma_max(&stacked) <= tol.residual() {
            return Ok(Annihilator::noise_free(n, p));
        }
        let rows = Subspace::image(&stacked, tol).complement();
        let basis_t = rows.basis().transpose(); // l' x (n + p)
        Ok(Annihilator {
            m: basis_t.columns(0, n).into_owned(),
            n: basis_t.columns(n, p).into_owned(),
        })
    }

    /// Number of annihilated rows `l'`.
    pub fn row_dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn is_noise_free(&self) -> bool {
        let n = self.m.ncols();
        self.m.nrows() == n
            && (&self.m - DMatrix::identity(n, n)).abs().max() == 0.0
            && self.n.abs().max() == 0.0
    }

    /// Residuals of the defining identities: `[M N] [E; F] = 0` and
    /// `rank [M N] = n + p - rank [E; F]`. Returns `(product_residual,
    /// rank_ok)`; the rank identity is waived for the noise-free convention.
    pub fn validate(&self, e: &DMatrix<f64>, f: &DMatrix<f64>, tol: &Tolerance) -> (f64, bool) {
        let prod_res = (&self.m * e + &self.n * f).abs().max();
        if self.is_noise_free() {
            return (prod_res, true);
        }
        let n = e.nrows();
        let p = f.nrows();
        let mut stacked = DMatrix::zeros(n + p, e.ncols());
        stacked.view_mut((0, 0), (n, e.ncols())).copy_from(e);
        stacked.view_mut((n, 0), (p, e.ncols())).copy_from(f);
        let mut mn = DMatrix::zeros(self.row_dim(), n + p);
        mn.view_mut((0, 0), (self.row_dim(), n)).copy_from(&self.m);
        mn.view_mut((0, n), (self.row_dim(), p)).copy_from(&self.n);
        let rank_ok = numerical_rank(&mn, tol) == n + p - numerical_rank(&stacked, tol);
        (prod_res, rank_ok)
    }
}

/// The `(P, Q, R)` parameterization of the affine model set.
#[derive(Debug, Clone)]
pub struct AffineSetParams {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

impl AffineSetParams {
    /// `P = X_-`, `Q = M`, `R = M (X_+ - B U_-) + N (Y_- - C X_- - D U_-)`.
    pub fn compute(data: &Dataset, sys: &SystemModel, ann: &Annihilator) -> Result<Self> {
        data.check_against(sys)?;
        if ann.m.ncols() != sys.state_dim() || ann.n.ncols() != sys.output_dim() {
            return Err(Error::Dimension(
                "annihilator columns do not match system dimensions".into(),
            ));
        }
        let state_residue = &data.x_plus - &sys.b * &data.u_minus;
        let output_residue = &data.y_minus - &sys.c * &data.x_minus - &sys.d * &data.u_minus;
        Ok(AffineSetParams {
            p: data.x_minus.clone(),
            q: ann.m.clone(),
            r: &ann.m * state_residue + &ann.n * output_residue,
        })
    }

    pub fn horizon(&self) -> usize {
        self.p.ncols()
    }

    pub fn state_dim(&self) -> usize {
        self.p.nrows()
    }

    /// Membership test for the affine set: `|R - Q A P|_F <= tol * max(1, |R|_F)`.
    pub fn sigma_contains(&self, a: &DMatrix<f64>, tol: &Tolerance) -> bool {
        self.sigma_residual(a) <= tol.residual() * self.r.norm().max(1.0)
    }

    pub fn sigma_residual(&self, a: &DMatrix<f64>) -> f64 {
        assert_eq!(
            a.shape(),
            (self.state_dim(), self.state_dim()),
            "A must be n x n"
        );
        (&self.r - &self.q * a * &self.p).norm()
    }

    /// A minimum-norm least-squares member of the affine set, or `None` when
    /// the set is empty. The pseudoinverse of `A -> Q A P` factors as
    /// `Y -> Q^+ Y P^+`.
    pub fn sigma_representative(&self, tol: &Tolerance) -> Option<DMatrix<f64>> {
        let eps_q = tol.rank_threshold(self.q.nrows(), self.q.ncols(), sigma_max(&self.q));
        let eps_p = tol.rank_threshold(self.p.nrows(), self.p.ncols(), sigma_max(&self.p));
        let q_pinv = self.q.clone().pseudo_inverse(eps_q).ok()?;
        let p_pinv = self.p.clone().pseudo_inverse(eps_p).ok()?;
        let a0 = q_pinv * &self.r * p_pinv;
        if self.sigma_contains(&a0, tol) {
            Some(a0)
        } else {
            None
        }
    }
}

/// Largest absolute eigenvalue of a square matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Real parts of the eigenvalues, deduplicated to `eps` resolution.
pub fn real_eigenvalue_parts(a: &DMatrix<f64>, eps: f64) -> Vec<f64> {
    let mut parts: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.re).collect();
    parts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    parts.dedup_by(|x, y| (*x - *y).abs() <= eps);
    parts
}

/// Stacked n-step observability matrix `[C; CA; ...; CA^{n-1}]`.
pub fn observability_matrix(a: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let p = c.nrows();
    let mut obs = DMatrix::zeros(n * p, n);
    let mut block = c.clone();
    for k in 0..n {
        obs.view_mut((k * p, 0), (p, n)).copy_from(&block);
        block = &block * a;
    }
    obs
}
