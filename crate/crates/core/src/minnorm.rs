//! Minimum-norm attacks and the distance-to-non-informativity metric.
//!
//! All perturbation is assigned to `X_+`: the other blocks keep identity
//! maps and self-consistent targets. For a fixed direction `v` the optimal
//! scaling has the closed form
//! `zeta* = X_+^T xi* = proj_{S_+}(v) / |proj_{S_+}(v)|^2`
//! with `S_+ = J*(D)^perp` intersected with `im X_+^T`, which reduces the
//! design to a two-variable problem in `(lambda, v)` solved by alternating
//! exact coordinate minimization with multi-start.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::max_coeff_space;
use crate::attack::pi_o;
use crate::error::{DataBlock, Error, Result};
use crate::model::{
    real_eigenvalue_parts, spectral_radius, AffineSetParams, Annihilator, Dataset, SystemModel,
};
use crate::subspace::{numerical_rank, preimage, sigma_max, sigma_min, Subspace, Tolerance};

/// Precomputed geometry for the minimum-norm design problem.
#[derive(Debug, Clone)]
pub struct MinNormProblem {
    pub data: Dataset,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub params: AffineSetParams,
    pub j_star: Subspace,
    /// Feasible direction space `J*(D)^perp` intersected with `ker(C X_-)`.
    pub k_space: Subspace,
    /// `J*(D)^perp` intersected with `im(X_+^T)`; projection target of the
    /// closed-form scaling.
    pub s_plus: Subspace,
    /// `X_+^{-1} pi_O(X_+)`; directions that cannot be rewritten.
    pub excluded: Subspace,
    pub noise_free: bool,
    pub tol: Tolerance,
    bu: DMatrix<f64>,
}

/// Builds the problem geometry; errors when the `X_+` block fails the
/// dimensional feasibility condition or no feasible direction exists.
pub fn build_problem(
    data: &Dataset,
    sys: &SystemModel,
    ann: &Annihilator,
    tol: &Tolerance,
) -> Result<MinNormProblem> {
    data.check_against(sys)?;
    let params = AffineSetParams::compute(data, sys, ann)?;
    let j_star = max_coeff_space(&params, sys, tol);

    let pi_plus = pi_o(&data.x_plus, &j_star, tol);
    let rank_plus = numerical_rank(&data.x_plus, tol);
    if pi_plus.dim() >= rank_plus {
        return Err(Error::DimensionalInfeasible {
            block: DataBlock::XPlus,
            dim_pi: pi_plus.dim(),
            rank: rank_plus,
        });
    }

    let j_perp = j_star.complement();
    let cx = &sys.c * &data.x_minus;
    let ker_cx = Subspace::kernel_anchored(&cx, sigma_max(&cx).max(1.0), tol);
    let k_space = j_perp.intersect(&ker_cx);
    if k_space.is_zero() {
        return Err(Error::EmptyFeasibleSpace);
    }

    let excluded = preimage(&data.x_plus, &pi_plus, tol);
    let s_plus = j_perp.intersect(&Subspace::image(&data.x_plus.transpose(), tol));
    debug_assert!(
        s_plus.same_span(&excluded.complement(), 1e-7),
        "the two constructions of S_+ disagree"
    );

    Ok(MinNormProblem {
        bu: &sys.b * &data.u_minus,
        data: data.clone(),
        b: sys.b.clone(),
        c: sys.c.clone(),
        params,
        j_star,
        k_space,
        s_plus,
        excluded,
        noise_free: ann.is_noise_free(),
        tol: *tol,
    })
}

impl MinNormProblem {
    /// The data-driven Hautus pencil `lambda X_- - X_+ + B U_-` applied to `v`.
    pub fn pencil_apply(&self, lambda: f64, v: &DVector<f64>) -> DVector<f64> {
        &self.data.x_minus * (v * lambda) - &self.data.x_plus * v + &self.bu * v
    }

    fn pencil_matrix(&self, lambda: f64) -> DMatrix<f64> {
        &self.data.x_minus * lambda - &self.data.x_plus + &self.bu
    }
}

/// Closed-form solution of the inner scaling problem: the minimum-norm
/// `xi` with `xi^T X_+ v = 1` and `xi^T X_+ w = 0` on `J*(D)`.
pub fn zeta_closed_form(
    v: &DVector<f64>,
    prob: &MinNormProblem,
    tol: &Tolerance,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let proj = prob.s_plus.project(v);
    let norm_sq = proj.norm_squared();
    if norm_sq.sqrt() <= 100.0 * tol.residual() * v.norm().max(1.0) {
        return Err(Error::ExcludedDirection);
    }
    let zeta = proj / norm_sq;
    let xt = prob.data.x_plus.transpose();
    let eps = tol.rank_threshold(xt.nrows(), xt.ncols(), sigma_max(&xt));
    let xi = xt
        .svd(true, true)
        .solve(&zeta, eps)
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok((zeta, xi))
}

/// The reduced objective `|pencil(lambda) v|^2 / |proj_{S_+}(v)|^2`;
/// scale-invariant in `v`.
pub fn objective(lambda: f64, v: &DVector<f64>, prob: &MinNormProblem) -> Result<f64> {
    let den = prob.s_plus.project(v).norm_squared();
    if den.sqrt() <= 100.0 * prob.tol.residual() * v.norm().max(1.0) {
        return Err(Error::ExcludedDirection);
    }
    Ok(prob.pencil_apply(lambda, v).norm_squared() / den)
}

#[derive(Debug, Clone)]
pub struct MultistartConfig {
    /// Real grid points added to the representative-spectrum starts.
    pub grid_points: usize,
    pub max_iters: usize,
    /// Relative objective decrease treated as converged.
    pub rel_tol: f64,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        MultistartConfig {
            grid_points: 16,
            max_iters: 200,
            rel_tol: 1e-10,
        }
    }
}

/// Result of the alternating minimization.
#[derive(Debug, Clone)]
pub struct MinNormSolution {
    pub lambda_star: f64,
    pub v_star: DVector<f64>,
    pub zeta_star: DVector<f64>,
    pub xi_star: DVector<f64>,
    pub delta_x_plus: DMatrix<f64>,
    pub phi_x_plus: DMatrix<f64>,
    pub objective_value: f64,
    pub frob_norm: f64,
    /// Row contribution ratios of the perturbation.
    pub rho: DVector<f64>,
    /// `d_UNOBS(Sigma(D)) * sigma_min(X_-)` when the noise-free hypothesis
    /// applies; `None` otherwise.
    pub perturbation_lower_bound: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Exact minimizer of the generalized Rayleigh quotient
/// `|pencil K c|^2 / |proj K c|^2` over the feasible parameterization,
/// restricted to the numerical range of the denominator Gram matrix.
fn v_step(lambda: f64, prob: &MinNormProblem) -> Option<DVector<f64>> {
    let k = prob.k_space.basis();
    let mk = prob.pencil_matrix(lambda) * k;
    let num = mk.transpose() * &mk;
    let sk = prob.s_plus.basis().transpose() * k;
    let gram = sk.transpose() * &sk;

    let eig = SymmetricEigen::new(gram);
    let g_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > prob.tol.residual() * g_max.max(1e-300))
        .collect();
    if keep.is_empty() {
        return None;
    }
    let mut whitener = DMatrix::zeros(k.ncols(), keep.len());
    for (col, &i) in keep.iter().enumerate() {
        let scaled = eig.eigenvectors.column(i) / eig.eigenvalues[i].sqrt();
        whitener.set_column(col, &scaled);
    }
    let reduced = whitener.transpose() * num * &whitener;
    let reig = SymmetricEigen::new(reduced);
    let mut best = 0;
    for i in 1..reig.eigenvalues.len() {
        if reig.eigenvalues[i] < reig.eigenvalues[best] {
            best = i;
        }
    }
    let c = &whitener * reig.eigenvectors.column(best);
    let v = k * c;
    let norm = v.norm();
    if norm == 0.0 {
        return None;
    }
    Some(v / norm)
}

/// Least-squares optimal eigenvalue for a fixed direction.
fn lambda_step(v: &DVector<f64>, prob: &MinNormProblem, fallback: f64) -> f64 {
    let a = &prob.data.x_minus * v;
    let b = &prob.data.x_plus * v - &prob.bu * v;
    let denom = a.norm_squared();
    if denom <= 0.0 {
        return fallback;
    }
    a.dot(&b) / denom
}

/// Alternating minimization over `(lambda, v)` with multi-start, followed by
/// assembly of the rank-one perturbation and its diagnostics.
pub fn alternating_solve(
    prob: &MinNormProblem,
    tol: &Tolerance,
    cfg: &MultistartConfig,
) -> Result<MinNormSolution> {
    let mut starts = Vec::new();
    let mut sbar = 1.0;
    if let Some(a0) = prob.params.sigma_representative(tol) {
        starts.extend(real_eigenvalue_parts(&a0, 1e-9));
        sbar = spectral_radius(&a0).max(1e-3);
    }
    if cfg.grid_points > 0 {
        for i in 0..cfg.grid_points {
            let frac = i as f64 / (cfg.grid_points - 1).max(1) as f64;
            starts.push(-2.0 * sbar + 4.0 * sbar * frac);
        }
    }

    let margin_floor = 100.0 * tol.residual();
    let mut best: Option<(f64, f64, DVector<f64>, usize, bool)> = None;
    for &start in &starts {
        let mut lambda = start;
        let mut prev = f64::INFINITY;
        let mut current: Option<(f64, DVector<f64>)> = None;
        let mut iterations = 0;
        let mut converged = false;
        for it in 0..cfg.max_iters {
            iterations = it + 1;
            let Some(v) = v_step(lambda, prob) else { break };
            lambda = lambda_step(&v, prob, lambda);
            let Ok(obj) = objective(lambda, &v, prob) else {
                break;
            };
            debug_assert!(obj <= prev * (1.0 + 1e-9) + 1e-12, "objective increased");
            current = Some((obj, v));
            if (prev - obj).abs() <= cfg.rel_tol * obj.max(1.0) {
                converged = true;
                break;
            }
            prev = obj;
        }
        let Some((obj, v)) = current else { continue };
        if prob.s_plus.project(&v).norm() <= margin_floor {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, ..)) => obj < *b,
        };
        if better {
            best = Some((obj, lambda, v, iterations, converged));
        }
    }

    let (objective_value, lambda_star, v_star, iterations, converged) =
        best.ok_or(Error::NoFeasibleOptimum)?;

    let (zeta_star, xi_star) = zeta_closed_form(&v_star, prob, tol)?;
    let x0 = &prob.data.x_minus * &v_star;
    let u0 = &prob.data.u_minus * &v_star;
    let x1 = &x0 * lambda_star + &prob.b * u0;
    let moved = &x1 - &prob.data.x_plus * &v_star;
    let delta_x_plus = &moved * zeta_star.transpose();
    let n = prob.data.state_dim();
    let phi_x_plus = DMatrix::identity(n, n) + &moved * xi_star.transpose();
    let frob_norm = delta_x_plus.norm();

    let rho = if frob_norm > 0.0 {
        contribution_ratios(&delta_x_plus)?
    } else {
        DVector::zeros(n)
    };

    let perturbation_lower_bound = if prob.noise_free {
        model_set_distance_from_params(&prob.params, &prob.c, tol, &GridConfig::default())
            .ok()
            .map(|d| d.value * sigma_min(&prob.data.x_minus))
    } else {
        None
    };

    Ok(MinNormSolution {
        lambda_star,
        v_star,
        zeta_star,
        xi_star,
        delta_x_plus,
        phi_x_plus,
        objective_value,
        frob_norm,
        rho,
        perturbation_lower_bound,
        iterations,
        converged,
    })
}

/// Search grid for the unobservability distance.
#[derive(Debug, Clone)]
pub struct GridConfig {
    pub coarse_step: f64,
    pub refine_rounds: usize,
    /// Members drawn when the model set is not a singleton.
    pub samples: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            coarse_step: 0.05,
            refine_rounds: 6,
            samples: 64,
        }
    }
}

fn pencil_sigma_min(re: f64, im: f64, a: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let p = c.nrows();
    let mut m = DMatrix::<Complex<f64>>::zeros(n + p, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex::new(-a[(i, j)], 0.0);
        }
        m[(i, i)] += Complex::new(re, im);
    }
    for i in 0..p {
        for j in 0..n {
            m[(n + i, j)] = Complex::new(c[(i, j)], 0.0);
        }
    }
    let sv = m.singular_values();
    sv[sv.len() - 1]
}

/// `inf over complex lambda of sigma_min([lambda I - A; C])`: the distance
/// from `(A, C)` to the unobservable pairs. Coarse grid over a disc of
/// radius `1.5 rho(A) + 1` (upper half only, by conjugate symmetry) with
/// shrinking-grid refinement; the function is 1-Lipschitz in `lambda`, so
/// the final step size bounds the error.
pub fn d_unobs(a: &DMatrix<f64>, c: &DMatrix<f64>, grid: &GridConfig) -> f64 {
    assert_eq!(a.nrows(), a.ncols(), "A must be square");
    assert_eq!(c.ncols(), a.ncols(), "C must be column-compatible with A");
    let radius = 1.5 * spectral_radius(a) + 1.0;
    let mut best = f64::INFINITY;
    let mut best_re = 0.0;
    let mut best_im = 0.0;
    let mut step = grid.coarse_step;

    let mut re = -radius;
    while re <= radius {
        let mut im = 0.0;
        while im <= radius {
            let s = pencil_sigma_min(re, im, a, c);
            if s < best {
                best = s;
                best_re = re;
                best_im = im;
            }
            im += step;
        }
        re += step;
    }

    for _ in 0..grid.refine_rounds {
        let new_step = step / 10.0;
        let (center_re, center_im) = (best_re, best_im);
        for i in -10..=10i32 {
            for j in -10..=10i32 {
                let re = center_re + i as f64 * new_step;
                let im = center_im + j as f64 * new_step;
                if im < 0.0 {
                    continue;
                }
                let s = pencil_sigma_min(re, im, a, c);
                if s < best {
                    best = s;
                    best_re = re;
                    best_im = im;
                }
            }
        }
        step = new_step;
    }
    best
}

/// Distance value together with whether it is a sampled upper bound.
#[derive(Debug, Clone, Copy)]
pub struct ModelSetDistance {
    pub value: f64,
    pub sampled: bool,
}

fn model_set_distance_from_params(
    params: &AffineSetParams,
    c: &DMatrix<f64>,
    tol: &Tolerance,
    grid: &GridConfig,
) -> Result<ModelSetDistance> {
    let a0 = params
        .sigma_representative(tol)
        .ok_or(Error::EmptyModelSet)?;
    let n = params.state_dim();
    let singleton = numerical_rank(&params.q, tol) == n && numerical_rank(&params.p, tol) == n;
    if singleton {
        return Ok(ModelSetDistance {
            value: d_unobs(&a0, c, grid),
            sampled: false,
        });
    }

    // Non-singleton affine family: sample members A_0 + sum c_i Delta_i with
    // Q Delta_i P = 0 and report the smallest distance found.
    let kron = params.p.transpose().kronecker(&params.q);
    let null = Subspace::kernel(&kron, tol);
    let mut best = d_unobs(&a0, c, grid);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let scale0 = sigma_max(&a0).max(1.0);
    for i in 0..grid.samples {
        if null.is_zero() {
            break;
        }
        let spread = scale0 * [0.1, 1.0, 10.0][i % 3];
        let coeffs = DVector::from_fn(null.dim(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let vec_delta = null.basis() * coeffs * spread;
        let delta = DMatrix::from_column_slice(n, n, vec_delta.as_slice());
        let candidate = &a0 + delta;
        let d = d_unobs(&candidate, c, grid);
        if d < best {
            best = d;
        }
    }
    Ok(ModelSetDistance {
        value: best,
        sampled: true,
    })
}

/// `inf over Sigma(D) of d_UNOBS(A)`; exact for the singleton noise-free
/// full-row-rank case, a sampled upper bound otherwise.
pub fn d_unobs_model_set(
    data: &Dataset,
    sys: &SystemModel,
    ann: &Annihilator,
    tol: &Tolerance,
    grid: &GridConfig,
) -> Result<ModelSetDistance> {
    let params = AffineSetParams::compute(data, sys, ann)?;
    model_set_distance_from_params(&params, &sys.c, tol, grid)
}

#[derive(Debug, Clone, Copy)]
pub struct PerturbationBoundAudit {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub distance: f64,
    pub sigma_min_x_minus: f64,
    pub sampled: bool,
}

/// Checks `|Delta|_F >= d_UNOBS(Sigma(D)) sigma_min(X_-)` for a computed
/// solution; requires the noise-free annihilator convention.
pub fn check_perturbation_bound(
    solution: &MinNormSolution,
    data: &Dataset,
    sys: &SystemModel,
    ann: &Annihilator,
    tol: &Tolerance,
    grid: &GridConfig,
) -> Result<PerturbationBoundAudit> {
    if !ann.is_noise_free() {
        return Err(Error::NoiseFreeRequired);
    }
    let dist = d_unobs_model_set(data, sys, ann, tol, grid)?;
    let smin = sigma_min(&data.x_minus);
    let lhs = solution.frob_norm;
    let rhs = dist.value * smin;
    Ok(PerturbationBoundAudit {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-8 * lhs.max(1.0),
        distance: dist.value,
        sigma_min_x_minus: smin,
        sampled: dist.sampled,
    })
}

/// Row contribution ratios `rho_i = |e_i^T Delta|^2 / |Delta|_F^2`.
pub fn contribution_ratios(delta: &DMatrix<f64>) -> Result<DVector<f64>> {
    let total = delta.norm_squared();
    if total <= 0.0 {
        return Err(Error::ZeroPerturbation);
    }
    Ok(DVector::from_fn(delta.nrows(), |i, _| {
        delta.row(i).norm_squared() / total
    }))
}
