//! Constructive data-transformation attacks.
//!
//! The attacker picks a coefficient direction `v` orthogonal to `J*(D)` and,
//! block by block, applies a rank-one update `Phi_Z = I + (z_tar - Z v) xi^T`
//! that rewrites `Z v` into a prescribed target while fixing every direction
//! of the original weakly unobservable coefficient space. The resulting
//! block-diagonal map is nonsingular, so the attacked data keep their rank
//! profile yet stop being informative for strong observability.
//!
//! A block whose target already coincides with `Z v` (in particular a zero
//! target paired with `v` in `ker Z`) needs no update at all and is left as
//! the identity; a nonsingular map cannot send a nonzero `Z v` to zero, so
//! zero targets are only reachable this way.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{max_coeff_space, InformativityReport};
use crate::error::{DataBlock, Error, Result};
use crate::model::{AffineSetParams, Annihilator, Dataset, SystemModel};
use crate::subspace::{numerical_rank, preimage, sigma_max, Subspace, Tolerance};

/// The eigenpair and initial input the attacker wants to embed.
#[derive(Debug, Clone)]
pub struct AttackSpec {
    pub lambda: f64,
    pub x0: DVector<f64>,
    pub u0: DVector<f64>,
}

impl AttackSpec {
    /// Checks `x0 != 0` and `C x0 = 0` (the zero-feedthrough design branch
    /// pins the injected state to the kernel of `C`).
    pub fn validate(&self, sys: &SystemModel, tol: &Tolerance) -> Result<()> {
        if self.x0.len() != sys.state_dim() || self.u0.len() != sys.input_dim() {
            return Err(Error::InvalidSpec(
                "x0/u0 lengths must match the system dimensions".into(),
            ));
        }
        if !self.lambda.is_finite()
            || self.x0.iter().any(|x| !x.is_finite())
            || self.u0.iter().any(|x| !x.is_finite())
        {
            return Err(Error::InvalidSpec("spec entries must be finite".into()));
        }
        let norm = self.x0.norm();
        if norm <= tol.residual() {
            return Err(Error::InvalidSpec("x0 must be nonzero".into()));
        }
        let c_res = (&sys.c * &self.x0).norm();
        if c_res > 10.0 * tol.residual() * sigma_max(&sys.c).max(1.0) * norm.max(1.0) {
            return Err(Error::InvalidSpec(format!(
                "C x0 must vanish (residual {c_res:e})"
            )));
        }
        Ok(())
    }
}

/// One-step virtual trajectory of the malicious model:
/// `x1 = lambda x0 + B u0` and `y0 = D u0`.
pub fn build_targets(spec: &AttackSpec, sys: &SystemModel) -> (DVector<f64>, DVector<f64>) {
    let x1 = &spec.x0 * spec.lambda + &sys.b * &spec.u0;
    let y0 = &sys.d * &spec.u0;
    (x1, y0)
}

/// The four per-block maps; the full transformation is their block diagonal.
#[derive(Debug, Clone)]
pub struct BlockTransform {
    pub phi_x_minus: DMatrix<f64>,
    pub phi_x_plus: DMatrix<f64>,
    pub phi_u: DMatrix<f64>,
    pub phi_y: DMatrix<f64>,
}

impl BlockTransform {
    pub fn identity(n: usize, m: usize, p: usize) -> Self {
        BlockTransform {
            phi_x_minus: DMatrix::identity(n, n),
            phi_x_plus: DMatrix::identity(n, n),
            phi_u: DMatrix::identity(m, m),
            phi_y: DMatrix::identity(p, p),
        }
    }

    pub fn block(&self, which: DataBlock) -> &DMatrix<f64> {
        match which {
            DataBlock::XMinus => &self.phi_x_minus,
            DataBlock::XPlus => &self.phi_x_plus,
            DataBlock::UMinus => &self.phi_u,
            DataBlock::YMinus => &self.phi_y,
        }
    }

    pub fn apply(&self, data: &Dataset) -> Dataset {
        Dataset {
            x_minus: &self.phi_x_minus * &data.x_minus,
            x_plus: &self.phi_x_plus * &data.x_plus,
            u_minus: &self.phi_u * &data.u_minus,
            y_minus: &self.phi_y * &data.y_minus,
        }
    }

    pub fn is_nonsingular(&self, tol: &Tolerance) -> bool {
        [
            &self.phi_x_minus,
            &self.phi_x_plus,
            &self.phi_u,
            &self.phi_y,
        ]
        .iter()
        .all(|m| numerical_rank(m, tol) == m.nrows())
    }
}

/// `pi_O(Z) = Z J*(D)`: the span of block outputs generated by the original
/// weakly unobservable coefficient space.
pub fn pi_o(z: &DMatrix<f64>, j_star: &Subspace, tol: &Tolerance) -> Subspace {
    assert_eq!(
        z.ncols(),
        j_star.ambient_dim(),
        "block columns / coefficient ambient mismatch"
    );
    if j_star.is_zero() {
        return Subspace::zero(z.nrows(), *tol);
    }
    Subspace::image_anchored(&(z * j_star.basis()), sigma_max(z), tol)
}

/// Per-block record of the rank-type feasibility condition.
#[derive(Debug, Clone, Copy)]
pub struct BlockFeasibility {
    pub block: DataBlock,
    pub dim_pi: usize,
    pub rank_z: usize,
    /// `dim pi_O(Z) < rank Z`
    pub dimensional_ok: bool,
}

#[derive(Debug, Clone)]
pub struct FeasibilityVerdict {
    pub blocks: [BlockFeasibility; 4],
    pub common_v_exists: bool,
}

impl FeasibilityVerdict {
    pub fn all_dimensional_ok(&self) -> bool {
        self.blocks.iter().all(|b| b.dimensional_ok)
    }

    pub fn block(&self, which: DataBlock) -> &BlockFeasibility {
        self.blocks
            .iter()
            .find(|b| b.block == which)
            .expect("all four blocks present")
    }

    pub fn first_failing(&self) -> Option<&BlockFeasibility> {
        self.blocks.iter().find(|b| !b.dimensional_ok)
    }
}

fn data_block(data: &Dataset, which: DataBlock) -> &DMatrix<f64> {
    match which {
        DataBlock::XMinus => &data.x_minus,
        DataBlock::XPlus => &data.x_plus,
        DataBlock::UMinus => &data.u_minus,
        DataBlock::YMinus => &data.y_minus,
    }
}

/// Evaluates the dimensional condition for every block and probes for a
/// common admissible direction.
pub fn check_feasibility(
    data: &Dataset,
    j_star: &Subspace,
    tol: &Tolerance,
    seed: u64,
) -> FeasibilityVerdict {
    let blocks = DataBlock::ALL.map(|which| {
        let z = data_block(data, which);
        let dim_pi = pi_o(z, j_star, tol).dim();
        let rank_z = numerical_rank(z, tol);
        BlockFeasibility {
            block: which,
            dim_pi,
            rank_z,
            dimensional_ok: dim_pi < rank_z,
        }
    });
    let verdict = FeasibilityVerdict {
        blocks,
        common_v_exists: false,
    };
    let common_v_exists =
        verdict.all_dimensional_ok() && choose_direction(data, j_star, tol, seed).is_ok();
    FeasibilityVerdict {
        common_v_exists,
        ..verdict
    }
}

const DIRECTION_RETRIES: usize = 64;

/// Margin of `v` outside the preimage `Z^{-1} pi_O(Z)`; positive means the
/// direction can be rewritten on that block.
fn preimage_margin(z: &DMatrix<f64>, j_star: &Subspace, v: &DVector<f64>, tol: &Tolerance) -> f64 {
    let excluded = preimage(z, &pi_o(z, j_star, tol), tol);
    if excluded.dim() == excluded.ambient_dim() {
        return 0.0;
    }
    excluded.complement().project(v).norm()
}

/// Draws a unit direction in `J*(D)^perp` that stays clear of every
/// `Z^{-1} pi_O(Z)`. Deterministic in the seed; exhaustion signals that the
/// geometric feasibility condition fails for some block.
pub fn choose_direction(
    data: &Dataset,
    j_star: &Subspace,
    tol: &Tolerance,
    seed: u64,
) -> Result<DVector<f64>> {
    choose_direction_in(
        data,
        j_star,
        &j_star.complement(),
        &DataBlock::ALL,
        tol,
        seed,
    )
}

/// Direction search restricted to `candidate_space`, with margin conditions
/// enforced only for `moving_blocks`.
fn choose_direction_in(
    data: &Dataset,
    j_star: &Subspace,
    candidate_space: &Subspace,
    moving_blocks: &[DataBlock],
    tol: &Tolerance,
    seed: u64,
) -> Result<DVector<f64>> {
    if candidate_space.is_zero() {
        return Err(Error::DirectionExhausted(0));
    }
    let t = candidate_space.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = 100.0 * tol.residual();
    // keep the best-conditioned admissible sample: the worst per-block
    // margin becomes a pivot denominator later
    let mut best: Option<(f64, DVector<f64>)> = None;
    for _ in 0..DIRECTION_RETRIES {
        let raw = DVector::from_fn(t, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let mut v = candidate_space.project(&raw);
        let norm = v.norm();
        if norm <= floor {
            continue;
        }
        v /= norm;
        let worst = moving_blocks
            .iter()
            .map(|&b| preimage_margin(data_block(data, b), j_star, &v, tol))
            .fold(f64::INFINITY, f64::min);
        if worst > floor && best.as_ref().map(|(m, _)| worst > *m).unwrap_or(true) {
            best = Some((worst, v));
        }
    }
    best.map(|(_, v)| v)
        .ok_or(Error::DirectionExhausted(DIRECTION_RETRIES))
}

/// Rank-one block map `Phi_Z = I + (z_tar - Z v) xi^T`.
///
/// Requires `xi^T Z v = 1` and `xi^T z_tar != 0`; then `Phi_Z` is
/// nonsingular, maps `Z v` to `z_tar`, and fixes `Z w` for every
/// `w in ker(xi^T Z)`.
pub fn rank_one_map(
    z: &DMatrix<f64>,
    v: &DVector<f64>,
    z_tar: &DVector<f64>,
    xi: &DVector<f64>,
    tol: &Tolerance,
) -> Result<DMatrix<f64>> {
    let mz = z.nrows();
    if v.len() != z.ncols() || z_tar.len() != mz || xi.len() != mz {
        return Err(Error::Dimension("rank_one_map operand sizes".into()));
    }
    let zv = z * v;
    let pivot = xi.dot(&zv);
    let scale = xi.norm() * zv.norm();
    if (pivot - 1.0).abs() > 1e-6_f64.max(10.0 * tol.residual() * scale.max(1.0)) {
        return Err(Error::RankOnePrecondition(format!(
            "xi^T Z v = {pivot} instead of 1"
        )));
    }
    let against_target = xi.dot(z_tar);
    if against_target.abs() <= tol.residual() * (xi.norm() * z_tar.norm()).max(1.0) {
        return Err(Error::RankOnePrecondition(
            "xi^T z_tar vanishes; the update would be singular".into(),
        ));
    }
    Ok(DMatrix::identity(mz, mz) + (z_tar - zv) * xi.transpose())
}

/// How a given block is realized by the attack.
#[derive(Debug, Clone)]
pub enum BlockConstruction {
    /// Target equals `Z v`; the block stays untouched.
    Identity,
    /// Rank-one update with the scaling vector that was used.
    RankOne { xi: DVector<f64> },
}

/// Outcome of a synthesized attack.
#[derive(Debug, Clone)]
pub struct AttackResult {
    pub transform: BlockTransform,
    pub attacked: Dataset,
    pub delta: Dataset,
    pub v: DVector<f64>,
    pub lambda: f64,
    pub x0: DVector<f64>,
    pub constructions: Vec<(DataBlock, BlockConstruction)>,
}

/// Picks `u_Z` in `pi_O(Z)^perp` maximizing the pivot `|u^T Z v|` (the
/// normalized projection of `Z v` onto that complement) and scales it so
/// that `xi^T Z v = 1`.
fn xi_for_block(
    z: &DMatrix<f64>,
    which: DataBlock,
    j_star: &Subspace,
    v: &DVector<f64>,
    tol: &Tolerance,
) -> Result<DVector<f64>> {
    let pi = pi_o(z, j_star, tol);
    let complement = pi.complement();
    if complement.is_zero() {
        return Err(Error::PivotTooSmall(which));
    }
    let zv = z * v;
    let mut u = complement.project(&zv);
    let proj_norm = u.norm();
    if proj_norm <= 100.0 * tol.residual() * sigma_max(z).max(1.0) {
        return Err(Error::PivotTooSmall(which));
    }
    u /= proj_norm;
    let pivot = u.dot(&zv);
    Ok(u / pivot)
}

/// Runs the full attack: feasibility gate, direction choice, per-block map
/// construction, and assembly of the attacked dataset.
///
/// Blocks whose targets must stay at `Z v` (zero targets force `v` into
/// `ker Z`) are realized as identities; the others get rank-one updates after
/// the target is checked to lie outside `pi_O(Z)`.
pub fn run_attack(
    data: &Dataset,
    sys: &SystemModel,
    ann: &Annihilator,
    spec: &AttackSpec,
    tol: &Tolerance,
    seed: u64,
) -> Result<AttackResult> {
    spec.validate(sys, tol)?;
    data.check_against(sys)?;
    let params = AffineSetParams::compute(data, sys, ann)?;
    let j_star = max_coeff_space(&params, sys, tol);

    // Dimensional gate from the data alone.
    let verdict = check_feasibility_blocks(data, &j_star, tol);
    if let Some(bad) = verdict.iter().find(|b| !b.dimensional_ok) {
        return Err(Error::DimensionalInfeasible {
            block: bad.block,
            dim_pi: bad.dim_pi,
            rank: bad.rank_z,
        });
    }

    let (x1, y0) = build_targets(spec, sys);
    let targets: [(DataBlock, DVector<f64>); 4] = [
        (DataBlock::XMinus, spec.x0.clone()),
        (DataBlock::XPlus, x1),
        (DataBlock::UMinus, spec.u0.clone()),
        (DataBlock::YMinus, y0),
    ];

    // Zero targets can only be met by directions inside the block kernel.
    let zero_floor = tol.residual();
    let mut candidate_space = j_star.complement();
    let mut moving = Vec::new();
    for (which, target) in &targets {
        let z = data_block(data, *which);
        if target.norm() <= zero_floor {
            candidate_space = candidate_space.intersect(&Subspace::kernel(z, tol));
        } else {
            moving.push(*which);
        }
    }

    // The targets of moving blocks must avoid pi_O(Z) for the scaling
    // construction to exist at all.
    for (which, target) in &targets {
        if !moving.contains(which) {
            continue;
        }
        let z = data_block(data, *which);
        let pi = pi_o(z, &j_star, tol);
        if pi.residual_norm(target) <= 10.0 * tol.residual() * target.norm() {
            return Err(Error::TargetInUnobservableImage(*which));
        }
    }

    let v = choose_direction_in(data, &j_star, &candidate_space, &moving, tol, seed)?;

    // An eigenvector has no intrinsic scale: matching the target family to
    // the data magnitude along `v` keeps the rank-one updates of the same
    // order as the data, so the attacked dataset stays well conditioned.
    let data_scale = (&data.x_minus * &v).norm();
    let scale = if data_scale > tol.residual() {
        data_scale / spec.x0.norm()
    } else {
        1.0
    };
    let targets: [(DataBlock, DVector<f64>); 4] =
        targets.map(|(which, target)| (which, target * scale));

    let mut transform =
        BlockTransform::identity(sys.state_dim(), sys.input_dim(), sys.output_dim());
    let mut constructions = Vec::with_capacity(4);
    for (which, target) in &targets {
        let z = data_block(data, *which);
        let zv = z * &v;
        if (target - &zv).norm() <= tol.residual() * zv.norm().max(1.0) {
            constructions.push((*which, BlockConstruction::Identity));
            continue;
        }
        let xi = xi_for_block(z, *which, &j_star, &v, tol)?;
        let phi = rank_one_map(z, &v, target, &xi, tol)?;
        match which {
            DataBlock::XMinus => transform.phi_x_minus = phi,
            DataBlock::XPlus => transform.phi_x_plus = phi,
            DataBlock::UMinus => transform.phi_u = phi,
            DataBlock::YMinus => transform.phi_y = phi,
        }
        constructions.push((*which, BlockConstruction::RankOne { xi }));
    }

    let attacked = transform.apply(data);
    let delta = Dataset {
        x_minus: &attacked.x_minus - &data.x_minus,
        x_plus: &attacked.x_plus - &data.x_plus,
        u_minus: &attacked.u_minus - &data.u_minus,
        y_minus: &attacked.y_minus - &data.y_minus,
    };
    Ok(AttackResult {
        transform,
        attacked,
        delta,
        v,
        lambda: spec.lambda,
        x0: &spec.x0 * scale,
        constructions,
    })
}

fn check_feasibility_blocks(
    data: &Dataset,
    j_star: &Subspace,
    tol: &Tolerance,
) -> [BlockFeasibility; 4] {
    DataBlock::ALL.map(|which| {
        let z = data_block(data, which);
        let dim_pi = pi_o(z, j_star, tol).dim();
        let rank_z = numerical_rank(z, tol);
        BlockFeasibility {
            block: which,
            dim_pi,
            rank_z,
            dimensional_ok: dim_pi < rank_z,
        }
    })
}

/// Residuals and verdicts for the three post-attack guarantees.
#[derive(Debug, Clone)]
pub struct AttackVerification {
    pub dim_j_before: usize,
    pub dim_j_after: usize,
    /// `v` orthogonal to the original `J*` (norm of its projection).
    pub v_orthogonality_residual: f64,
    /// Worst containment residual of `J*(D) + span{v}` inside `J*(D~)`.
    pub subspace_growth_residual: f64,
    pub growth_ok: bool,
    /// `|A* x0 - lambda x0| / |x0|` for the corrected model.
    pub eigen_residual: f64,
    /// Relative membership residual of `A*` in the attacked affine set.
    pub membership_residual: f64,
    pub model_set_ok: bool,
    pub post_attack_informative: bool,
    pub witness_image_norm: Option<f64>,
}

impl AttackVerification {
    pub fn all_passed(&self) -> bool {
        self.growth_ok && self.model_set_ok && !self.post_attack_informative
    }
}

/// Verifies the three conclusions on a concrete attacked dataset: coefficient
/// space growth, existence of a consistent model with the injected eigenpair
/// (built by a rank-one correction of any representative), and loss of
/// informativity.
pub fn verify_attack(
    attacked: &Dataset,
    sys: &SystemModel,
    ann: &Annihilator,
    j_star_before: &Subspace,
    v: &DVector<f64>,
    spec: &AttackSpec,
    tol: &Tolerance,
) -> Result<AttackVerification> {
    let params = AffineSetParams::compute(attacked, sys, ann)?;
    let j_after = max_coeff_space(&params, sys, tol);
    let eps = 100.0 * tol.residual();

    let v_orth = j_star_before.project(v).norm();
    let grown = j_star_before.sum(&Subspace::image(
        &DMatrix::from_column_slice(v.len(), 1, v.as_slice()),
        tol,
    ));
    let growth_residual = (0..grown.dim())
        .map(|k| j_after.residual_norm(&grown.basis().column(k).into_owned()))
        .fold(0.0, f64::max);
    let growth_ok = growth_residual <= eps && v_orth <= eps;

    let (eigen_residual, membership_residual, model_set_ok) = match params.sigma_representative(tol)
    {
        None => (f64::INFINITY, f64::INFINITY, false),
        Some(a0) => {
            let n = sys.state_dim();
            let w = &spec.x0 * spec.lambda - &a0 * &spec.x0;
            let correction = &w * spec.x0.transpose() / spec.x0.norm_squared();
            let a_star = a0 + correction;
            let eig_res = (&a_star * &spec.x0 - &spec.x0 * spec.lambda).norm() / spec.x0.norm();
            let member_res = params.sigma_residual(&a_star) / params.r.norm().max(1.0);
            let _ = n;
            (eig_res, member_res, eig_res <= 1e-8 && member_res <= 1e-8)
        }
    };

    let report = InformativityReport::evaluate_with(&params, sys, j_after.clone(), tol);
    let witness_image_norm = report.witness.as_ref().map(|w| (&params.p * w).norm());

    Ok(AttackVerification {
        dim_j_before: j_star_before.dim(),
        dim_j_after: j_after.dim(),
        v_orthogonality_residual: v_orth,
        subspace_growth_residual: growth_residual,
        growth_ok,
        eigen_residual,
        membership_residual,
        model_set_ok,
        post_attack_informative: report.informative,
        witness_image_norm,
    })
}
