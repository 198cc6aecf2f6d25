//! Data informativity for strong observability, and how to break it.
//!
//! Given finite trajectory data of a linear system with unknown state matrix,
//! this crate decides whether every model consistent with the data is
//! strongly observable, synthesizes invertible block transformations that
//! stealthily destroy that property by embedding a chosen weakly unobservable
//! eigenpair, and computes minimum-norm attacks together with the associated
//! distance-to-non-informativity vulnerability metric.
//!
//! Layering:
//! - [`subspace`]: tolerance-aware numerical subspace algebra,
//! - [`model`]: systems, datasets, the noise annihilator, the affine model set,
//! - [`analysis`]: weakly unobservable coefficient/state subspaces and the
//!   informativity verdict,
//! - [`attack`]: feasibility tests and the constructive rank-one attack,
//! - [`minnorm`]: minimum-norm attacks and the unobservability distance,
//! - [`datagen`]: trajectory simulation and the 5-node example system,
//! - [`io`]: CSV/JSON wire formats shared with the command-line tool.

pub mod analysis;
pub mod attack;
pub mod datagen;
pub mod error;
pub mod io;
pub mod minnorm;
pub mod model;
pub mod subspace;

pub use analysis::{max_coeff_space, model_v_star, InformativityReport};
pub use attack::{
    check_feasibility, choose_direction, pi_o, rank_one_map, run_attack, verify_attack,
    AttackResult, AttackSpec, AttackVerification, BlockTransform, FeasibilityVerdict,
};
pub use datagen::{line_network_5, pe_input, simulate, InputMode, NoiseMode, SimConfig, X0Mode};
pub use error::{DataBlock, Error, Result};
pub use minnorm::{
    alternating_solve, build_problem, check_perturbation_bound, contribution_ratios, d_unobs,
    d_unobs_model_set, objective, zeta_closed_form, GridConfig, MinNormProblem, MinNormSolution,
    MultistartConfig, PerturbationBoundAudit,
};
pub use model::{AffineSetParams, Annihilator, Dataset, SystemModel};
pub use subspace::{numerical_rank, preimage, sigma_max, sigma_min, Subspace, TolMode, Tolerance};
