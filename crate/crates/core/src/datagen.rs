//! Trajectory simulation and test-family generation.
//!
//! All randomness flows through ChaCha8 seeded explicitly, so identical
//! configurations reproduce identical datasets bit for bit.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{Dataset, SystemModel};
use crate::subspace::{numerical_rank, Tolerance};

#[derive(Debug, Clone)]
pub enum X0Mode {
    RandomUnit,
    Given(DVector<f64>),
}

#[derive(Debug, Clone)]
pub enum InputMode {
    Zero,
    Random {
        scale: f64,
    },
    Pe {
        order: usize,
        scale: f64,
    },
    /// State feedback `u_k = K x_k` with a seeded random gain. Keeps the
    /// input rows inside the row space of `X_-`, which is what makes all
    /// four per-block attack feasibility conditions hold at once.
    Feedback {
        scale: f64,
    },
}

#[derive(Debug, Clone)]
pub enum NoiseMode {
    None,
    /// `w_k` drawn i.i.d. standard normal, entering through `E` and `F`
    /// (the structural class annihilated under the data assumptions).
    Structural {
        scale: f64,
    },
    /// Additive i.i.d. noise on states and outputs. This is outside the
    /// structural noise class; reports on such data are best-effort only.
    Gaussian {
        sigma: f64,
    },
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub t: usize,
    pub seed: u64,
    pub x0: X0Mode,
    pub input: InputMode,
    pub noise: NoiseMode,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn standard_normal_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| normal(rng))
}

/// Simulates the recursion `x_{k+1} = A x_k + B u_k + E w_k`,
/// `y_k = C x_k + D u_k + F w_k` and stacks the data blocks.
pub fn simulate(sys: &SystemModel, cfg: &SimConfig) -> Result<Dataset> {
    let a = sys
        .a_true
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("simulation requires A_true".into()))?;
    if cfg.t == 0 {
        return Err(Error::Dimension("horizon T must be at least 1".into()));
    }
    let n = sys.state_dim();
    let m = sys.input_dim();
    let p = sys.output_dim();
    let l = sys.noise_dim();
    let t = cfg.t;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let x0 = match &cfg.x0 {
        X0Mode::RandomUnit => {
            let v = DVector::from_fn(n, |_, _| normal(&mut rng));
            let norm = v.norm();
            if norm == 0.0 {
                DVector::from_element(n, 1.0 / (n as f64).sqrt())
            } else {
                v / norm
            }
        }
        X0Mode::Given(v) => {
            if v.len() != n {
                return Err(Error::Dimension("x0 length must equal n".into()));
            }
            v.clone()
        }
    };

    // Precomputed open-loop input; feedback is applied on the fly.
    let mut feedback_gain = None;
    let u_open = match &cfg.input {
        InputMode::Zero => DMatrix::zeros(m, t),
        InputMode::Random { scale } => standard_normal_matrix(&mut rng, m, t) * *scale,
        InputMode::Pe { order, scale } => pe_input(*order, m, t, rng.random::<u64>())? * *scale,
        InputMode::Feedback { scale } => {
            feedback_gain = Some(standard_normal_matrix(&mut rng, m, n) * *scale);
            DMatrix::zeros(m, t)
        }
    };

    let w = match &cfg.noise {
        NoiseMode::Structural { scale } => standard_normal_matrix(&mut rng, l, t) * *scale,
        _ => DMatrix::zeros(l, t),
    };
    let gauss_sigma = match &cfg.noise {
        NoiseMode::Gaussian { sigma } => *sigma,
        _ => 0.0,
    };

    let mut x = DMatrix::zeros(n, t + 1);
    x.set_column(0, &x0);
    let mut u = u_open;
    let mut y = DMatrix::zeros(p, t);
    for k in 0..t {
        if let Some(gain) = &feedback_gain {
            let uk = gain * x.column(k);
            u.set_column(k, &uk);
        }
        let mut yk = &sys.c * x.column(k) + &sys.d * u.column(k) + &sys.f * w.column(k);
        let mut next = a * x.column(k) + &sys.b * u.column(k) + &sys.e * w.column(k);
        if gauss_sigma > 0.0 {
            next += DVector::from_fn(n, |_, _| normal(&mut rng)) * gauss_sigma;
            yk += DVector::from_fn(p, |_, _| normal(&mut rng)) * gauss_sigma;
        }
        y.set_column(k, &yk);
        x.set_column(k + 1, &next);
    }

    Dataset::new(
        x.columns(0, t).into_owned(),
        x.columns(1, t).into_owned(),
        u,
        y,
    )
}

/// The 5-node line network used throughout: upper-bidiagonal state matrix,
/// inputs at nodes 1 and 4, and the first two nodes measured. Noise-free.
pub fn line_network_5() -> SystemModel {
    let a = DMatrix::from_row_slice(
        5,
        5,
        &[
            0.8, 0.1, 0.0, 0.0, 0.0, //
            0.0, 0.7, 0.1, 0.0, 0.0, //
            0.0, 0.0, 0.6, 0.02, 0.0, //
            0.0, 0.0, 0.0, 0.5, 0.05, //
            0.0, 0.0, 0.0, 0.0, 0.4,
        ],
    );
    let b = DMatrix::from_column_slice(5, 1, &[1.0, 0.0, 0.0, 1.0, 0.0]);
    let c = DMatrix::from_row_slice(2, 5, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    let d = DMatrix::zeros(2, 1);
    SystemModel::new(Some(a), b, c, d, DMatrix::zeros(5, 0), DMatrix::zeros(2, 0))
        .expect("static dimensions are consistent")
}

/// Depth-`depth` block Hankel matrix of the input signal.
pub fn block_hankel(u: &DMatrix<f64>, depth: usize) -> DMatrix<f64> {
    let m = u.nrows();
    let t = u.ncols();
    assert!(depth >= 1 && depth <= t, "hankel depth out of range");
    let cols = t - depth + 1;
    let mut h = DMatrix::zeros(depth * m, cols);
    for i in 0..depth {
        for j in 0..cols {
            h.view_mut((i * m, j), (m, 1)).copy_from(&u.column(i + j));
        }
    }
    h
}

/// Seeded random input whose depth-`order` block Hankel matrix has full row
/// rank; redrawn up to 8 times before giving up.
pub fn pe_input(order: usize, m: usize, t: usize, seed: u64) -> Result<DMatrix<f64>> {
    if order == 0 || m == 0 || order * m > t.saturating_sub(order - 1) {
        return Err(Error::PeInfeasible { order, m, t });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerance::default();
    for _ in 0..8 {
        let u = standard_normal_matrix(&mut rng, m, t);
        let h = block_hankel(&u, order);
        if numerical_rank(&h, &tol) == order * m {
            return Ok(u);
        }
    }
    Err(Error::PeExhausted(8))
}
