//! The maximum weakly unobservable coefficient space `J*(D)`, its model-level
//! counterpart `V*(A, B, C, D)`, and the informativity verdict for strong
//! observability.
//!
//! Both subspaces are the largest fixed points of an output-nulling inclusion
//! and are computed with the standard invariant-subspace iteration: start from
//! the full space and intersect with the preimage of the current right-hand
//! side until the dimension stalls.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::model::{AffineSetParams, Annihilator, Dataset, SystemModel};
use crate::subspace::{preimage, sigma_max, Subspace, Tolerance};

/// Right-hand side of the coefficient-space inclusion:
/// span of `[Q P B_J, Q B; 0, D]` for the current iterate `J`.
fn rhs_span(
    qp: &DMatrix<f64>,
    qb: &DMatrix<f64>,
    d: &DMatrix<f64>,
    j_basis: &DMatrix<f64>,
    anchor: f64,
    tol: &Tolerance,
) -> Subspace {
    let lp = qp.nrows();
    let p = d.nrows();
    let dim_j = j_basis.ncols();
    let m = qb.ncols();
    let mut stacked = DMatrix::zeros(lp + p, dim_j + m);
    if dim_j > 0 {
        stacked
            .view_mut((0, 0), (lp, dim_j))
            .copy_from(&(qp * j_basis));
    }
    stacked.view_mut((0, dim_j), (lp, m)).copy_from(qb);
    stacked.view_mut((lp, dim_j), (p, m)).copy_from(d);
    Subspace::image_anchored(&stacked, anchor, tol)
}

/// Largest subspace `J` of the coefficient space with
/// `[R; C P] J  subset of  Q P J x {0} + im [Q B; D]`.
pub fn max_coeff_space(params: &AffineSetParams, sys: &SystemModel, tol: &Tolerance) -> Subspace {
    let t = params.horizon();
    let qp = &params.q * &params.p;
    let qb = &params.q * &sys.b;
    let lp = params.q.nrows();
    let p = sys.output_dim();

    // The map applied on the left of the inclusion.
    let mut lhs = DMatrix::zeros(lp + p, t);
    lhs.view_mut((0, 0), (lp, t)).copy_from(&params.r);
    lhs.view_mut((lp, 0), (p, t))
        .copy_from(&(&sys.c * &params.p));

    // Rank decisions on products with a shrinking iterate must stay on the
    // scale of the unrestricted maps.
    let mut scale_probe = DMatrix::zeros(lp + p, t + sys.input_dim());
    scale_probe.view_mut((0, 0), (lp, t)).copy_from(&qp);
    scale_probe
        .view_mut((0, t), (lp, sys.input_dim()))
        .copy_from(&qb);
    scale_probe
        .view_mut((lp, t), (p, sys.input_dim()))
        .copy_from(&sys.d);
    let anchor = sigma_max(&scale_probe).max(1e-300);

    let mut j = Subspace::full(t, *tol);
    for _ in 0..=t {
        let rhs = rhs_span(&qp, &qb, &sys.d, j.basis(), anchor, tol);
        let next = j.intersect(&preimage(&lhs, &rhs, tol));
        if next.dim() == j.dim() {
            break;
        }
        j = next;
    }
    debug_assert!(
        fixed_point_residual(params, sys, &j, tol) <= 10.0 * tol.residual(),
        "coefficient-space fixed point failed its certificate"
    );
    j
}

/// A posteriori certificate for `max_coeff_space`: the worst residual of
/// `[R; C P] b` outside the right-hand-side span, over basis vectors `b`.
pub fn fixed_point_residual(
    params: &AffineSetParams,
    sys: &SystemModel,
    j: &Subspace,
    tol: &Tolerance,
) -> f64 {
    if j.is_zero() {
        return 0.0;
    }
    let qp = &params.q * &params.p;
    let qb = &params.q * &sys.b;
    let lp = params.q.nrows();
    let p = sys.output_dim();
    let anchor = sigma_max(&qp).max(sigma_max(&qb)).max(sigma_max(&sys.d));
    let rhs = rhs_span(&qp, &qb, &sys.d, j.basis(), anchor.max(1e-300), tol);
    let mut mapped = DMatrix::zeros(lp + p, j.dim());
    mapped
        .view_mut((0, 0), (lp, j.dim()))
        .copy_from(&(&params.r * j.basis()));
    mapped
        .view_mut((lp, 0), (p, j.dim()))
        .copy_from(&(&sys.c * &params.p * j.basis()));
    let scale = sigma_max(&mapped).max(anchor).max(1.0);
    (0..j.dim())
        .map(|k| rhs.residual_norm(&mapped.column(k).into_owned()) / scale)
        .fold(0.0, f64::max)
}

/// Largest output-nulling controlled invariant subspace of `(A, B, C, D)`,
/// i.e. the weakly unobservable subspace of the model.
pub fn model_v_star(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    c: &DMatrix<f64>,
    d: &DMatrix<f64>,
    tol: &Tolerance,
) -> Subspace {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "A must be square");
    assert_eq!(c.ncols(), n, "C columns must match A");
    let p = c.nrows();
    let mut lhs = DMatrix::zeros(n + p, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(a);
    lhs.view_mut((n, 0), (p, n)).copy_from(c);

    let anchor = 1.0_f64.max(sigma_max(b)).max(sigma_max(d));
    let mut v = Subspace::full(n, *tol);
    for _ in 0..=n {
        let lp = n;
        let dim_v = v.dim();
        let m = b.ncols();
        let mut stacked = DMatrix::zeros(lp + p, dim_v + m);
        if dim_v > 0 {
            stacked.view_mut((0, 0), (n, dim_v)).copy_from(v.basis());
        }
        stacked.view_mut((0, dim_v), (n, m)).copy_from(b);
        stacked.view_mut((n, dim_v), (p, m)).copy_from(d);
        let rhs = Subspace::image_anchored(&stacked, anchor, tol);
        let next = v.intersect(&preimage(&lhs, &rhs, tol));
        if next.dim() == v.dim() {
            break;
        }
        v = next;
    }
    v
}

/// Verdict of the informativity test for strong observability, together with
/// the certifying subspaces and a witness when the test fails.
#[derive(Debug, Clone)]
pub struct InformativityReport {
    /// Maximum weakly unobservable coefficient space `J*(D)`.
    pub j_star: Subspace,
    /// Data-driven weakly unobservable subspace `P J*(D)`.
    pub v_star_data: Subspace,
    /// `C^{-1} im D  subset of  im P`.
    pub cond_image: bool,
    /// `J*(D)  subset of  ker P`.
    pub cond_kernel: bool,
    pub informative: bool,
    /// A `J*` direction with `P v != 0`, present exactly when the kernel
    /// condition fails.
    pub witness: Option<DVector<f64>>,
}

impl InformativityReport {
    pub fn evaluate(
        data: &Dataset,
        sys: &SystemModel,
        ann: &Annihilator,
        tol: &Tolerance,
    ) -> Result<Self> {
        let params = AffineSetParams::compute(data, sys, ann)?;
        let j_star = max_coeff_space(&params, sys, tol);
        Ok(Self::evaluate_with(&params, sys, j_star, tol))
    }

    /// Evaluates both informativity conditions for an already computed `J*`.
    pub fn evaluate_with(
        params: &AffineSetParams,
        sys: &SystemModel,
        j_star: Subspace,
        tol: &Tolerance,
    ) -> Self {
        let eps = 10.0 * tol.residual();
        let im_p = Subspace::image(&params.p, tol);
        let c_inv_im_d = preimage(&sys.c, &Subspace::image(&sys.d, tol), tol);
        let cond_image = im_p.contains(&c_inv_im_d, eps);

        let ker_p = Subspace::kernel(&params.p, tol);
        let cond_kernel = ker_p.contains(&j_star, eps);

        let witness = if cond_kernel {
            None
        } else {
            // basis direction of J* with the largest image under P; a failed
            // kernel condition guarantees J* is nonzero
            (0..j_star.dim())
                .map(|k| j_star.basis().column(k).into_owned())
                .max_by(|a, b| {
                    let na = (&params.p * a).norm();
                    let nb = (&params.p * b).norm();
                    na.partial_cmp(&nb).unwrap()
                })
        };

        let v_star_data = if j_star.is_zero() {
            Subspace::zero(params.state_dim(), *tol)
        } else {
            Subspace::image_anchored(&(&params.p * j_star.basis()), sigma_max(&params.p), tol)
        };

        InformativityReport {
            informative: cond_image && cond_kernel,
            j_star,
            v_star_data,
            cond_image,
            cond_kernel,
            witness,
        }
    }
}
