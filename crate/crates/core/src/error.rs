use std::fmt;

use thiserror::Error;

/// Identifies one of the four data blocks of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DataBlock {
    XMinus,
    XPlus,
    UMinus,
    YMinus,
}

impl DataBlock {
    pub const ALL: [DataBlock; 4] = [
        DataBlock::XMinus,
        DataBlock::XPlus,
        DataBlock::UMinus,
        DataBlock::YMinus,
    ];
}

impl fmt::Display for DataBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DataBlock::XMinus => "X_minus",
            DataBlock::XPlus => "X_plus",
            DataBlock::UMinus => "U_minus",
            DataBlock::YMinus => "Y_minus",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entries in {0}")]
    NonFinite(String),

    #[error("invalid attack spec: {0}")]
    InvalidSpec(String),

    #[error(
        "dimensional feasibility fails for {block}: dim pi_O = {dim_pi} must be < rank = {rank}"
    )]
    DimensionalInfeasible {
        block: DataBlock,
        dim_pi: usize,
        rank: usize,
    },

    #[error("target vector for {0} lies inside pi_O({0}); rank-one construction impossible")]
    TargetInUnobservableImage(DataBlock),

    #[error("no admissible attack direction found after {0} attempts")]
    DirectionExhausted(usize),

    #[error("pivot u^T Z v below tolerance for {0}")]
    PivotTooSmall(DataBlock),

    #[error("rank-one map precondition violated: {0}")]
    RankOnePrecondition(String),

    #[error("affine model set is empty")]
    EmptyModelSet,

    #[error("feasible direction space J*^perp intersected with ker(C X_-) is zero")]
    EmptyFeasibleSpace,

    #[error("direction lies in the excluded preimage X_+^-1 pi_O(X_+)")]
    ExcludedDirection,

    #[error("minimum-norm solver found no feasible optimum")]
    NoFeasibleOptimum,

    #[error("operation requires the noise-free annihilator convention (M = I, N = 0)")]
    NoiseFreeRequired,

    #[error("persistency order {order} infeasible for m = {m}, T = {t}")]
    PeInfeasible { order: usize, m: usize, t: usize },

    #[error("persistently exciting input not found after {0} draws")]
    PeExhausted(usize),

    #[error("zero matrix has no contribution ratios")]
    ZeroPerturbation,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
