//! Nonnegative matrix factorization `V ≈ WH` by multiplicative updates
//! minimizing the Frobenius error.
//!
//! One iteration applies
//!
//! ```text
//! H := H ⊙ (WᵀV) ÷ (WᵀWH + ε)
//! W := W ⊙ (VHᵀ) ÷ (WHHᵀ + ε)
//! ```
//!
//! in that order, optionally followed by rescaling W's columns to unit sum
//! (with H's rows compensated so the product is unchanged). ε only ever
//! enters denominators, so an entry that reaches exactly zero stays zero.
//!
//! [`factorize`] runs several independently seeded restarts and keeps the
//! one with the smallest final error. Restarts may execute in parallel; the
//! result does not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{dense, Label, LabeledMatrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NmfError {
    #[error("input matrix has a negative entry at ({row}, {col})")]
    NegativeInput { row: usize, col: usize },
    #[error("rank {rank} exceeds min(n, m) = {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("column {topic} of W sums to zero")]
    ZeroColumn { topic: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn default_max_iters() -> usize {
    2000
}
fn default_rel_tol() -> f64 {
    1e-7
}
fn default_epsilon() -> f64 {
    1e-12
}
fn default_restarts() -> usize {
    1
}

/// Solver settings. Only `rank` is required when deserializing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmfConfig {
    pub rank: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Stop once the relative change of the error between iterations drops below this.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Added to every update denominator.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub normalize_w: bool,
}

impl NmfConfig {
    pub fn new(rank: usize) -> Self {
        NmfConfig {
            rank,
            max_iters: default_max_iters(),
            rel_tol: default_rel_tol(),
            epsilon: default_epsilon(),
            restarts: default_restarts(),
            seed: 0,
            normalize_w: false,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_normalize_w(mut self, normalize_w: bool) -> Self {
        self.normalize_w = normalize_w;
        self
    }

    pub fn validate(&self) -> Result<(), NmfError> {
        if self.rank == 0 {
            return Err(NmfError::InvalidConfig("rank must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(NmfError::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(NmfError::InvalidConfig("restarts must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(NmfError::InvalidConfig("epsilon must be positive".into()));
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return Err(NmfError::InvalidConfig("rel_tol must be nonnegative".into()));
        }
        Ok(())
    }
}

/// The result of [`factorize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(rename = "W")]
    pub w: LabeledMatrix,
    #[serde(rename = "H")]
    pub h: LabeledMatrix,
    /// Frobenius error after each iteration.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub config: NmfConfig,
    #[serde(default)]
    pub restart_index: usize,
}

impl Factorization {
    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    /// Last entry of the residual history.
    pub fn final_error(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruction(&self) -> LabeledMatrix {
        self.w
            .matmul(&self.h)
            .expect("W and H share topic labels by construction")
    }

    /// `iteration,residual` rows, one per iteration.
    pub fn residual_history_csv(&self) -> String {
        let mut out = String::from("iteration,residual\n");
        for (i, r) in self.residual_history.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, r));
        }
        out
    }
}

/// Labels `topic-1 .. topic-r`.
pub fn topic_labels(rank: usize) -> Vec<Label> {
    (1..=rank)
        .map(|g| Label::new(format!("topic-{g}")).expect("nonempty"))
        .collect()
}

fn check_nonnegative(v: &LabeledMatrix) -> Result<(), NmfError> {
    let m = v.ncols();
    match v.as_slice().iter().position(|&x| x < 0.0) {
        Some(k) => Err(NmfError::NegativeInput { row: k / m, col: k % m }),
        None => Ok(()),
    }
}

fn check_rank(v: &LabeledMatrix, rank: usize) -> Result<(), NmfError> {
    if rank == 0 {
        return Err(NmfError::InvalidConfig("rank must be at least 1".into()));
    }
    let max = v.nrows().min(v.ncols());
    if rank > max {
        return Err(NmfError::RankTooLarge { rank, max });
    }
    Ok(())
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of restart `k`: the (k+1)-th output of a SplitMix64 stream started at `seed`.
pub fn restart_seed(seed: u64, k: usize) -> u64 {
    splitmix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(k as u64 + 1)))
}

/// Random starting factors with i.i.d. entries uniform on (0, 1].
///
/// W is drawn first (row-major), then H, from a ChaCha8 stream seeded with `seed`.
pub fn initialize(
    v: &LabeledMatrix,
    rank: usize,
    seed: u64,
) -> Result<(LabeledMatrix, LabeledMatrix), NmfError> {
    check_nonnegative(v)?;
    check_rank(v, rank)?;
    let (n, m) = v.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |len: usize| -> Vec<f64> { (0..len).map(|_| 1.0 - rng.random::<f64>()).collect() };
    let w = draw(n * rank);
    let h = draw(rank * m);
    let topics = topic_labels(rank);
    Ok((
        LabeledMatrix::from_flat(v.row_labels().to_vec(), topics.clone(), w)?,
        LabeledMatrix::from_flat(topics, v.col_labels().to_vec(), h)?,
    ))
}

fn check_conform(v: &LabeledMatrix, w: &LabeledMatrix, h: &LabeledMatrix) -> Result<(), NmfError> {
    if w.nrows() != v.nrows() || h.ncols() != v.ncols() || w.ncols() != h.nrows() {
        return Err(MatrixError::DimensionMismatch {
            expected: format!("W {}x r, H r x {}", v.nrows(), v.ncols()),
            actual: format!("W {}x{}, H {}x{}", w.nrows(), w.ncols(), h.nrows(), h.ncols()),
        }
        .into());
    }
    Ok(())
}

/// One multiplicative update of H. With `epsilon == 0` a zero denominator is an error.
pub fn update_h(
    v: &LabeledMatrix,
    w: &LabeledMatrix,
    h: &LabeledMatrix,
    epsilon: f64,
) -> Result<LabeledMatrix, NmfError> {
    check_conform(v, w, h)?;
    let (n, m) = v.shape();
    let r = w.ncols();
    let mut out = h.as_slice().to_vec();
    kernels::update_h(v.as_slice(), w.as_slice(), &mut out, n, m, r, epsilon)?;
    Ok(LabeledMatrix::from_flat(
        h.row_labels().to_vec(),
        h.col_labels().to_vec(),
        out,
    )?)
}

/// One multiplicative update of W. With `epsilon == 0` a zero denominator is an error.
pub fn update_w(
    v: &LabeledMatrix,
    w: &LabeledMatrix,
    h: &LabeledMatrix,
    epsilon: f64,
) -> Result<LabeledMatrix, NmfError> {
    check_conform(v, w, h)?;
    let (n, m) = v.shape();
    let r = w.ncols();
    let mut out = w.as_slice().to_vec();
    kernels::update_w(v.as_slice(), &mut out, h.as_slice(), n, m, r, epsilon)?;
    Ok(LabeledMatrix::from_flat(
        w.row_labels().to_vec(),
        w.col_labels().to_vec(),
        out,
    )?)
}

/// Rescale W's columns to unit sum and H's rows by the old column sums,
/// leaving the product WH unchanged.
pub fn normalize_columns(
    w: &LabeledMatrix,
    h: &LabeledMatrix,
) -> Result<(LabeledMatrix, LabeledMatrix), NmfError> {
    if w.ncols() != h.nrows() {
        return Err(MatrixError::DimensionMismatch {
            expected: format!("{} rows in H", w.ncols()),
            actual: format!("{}", h.nrows()),
        }
        .into());
    }
    let (n, r) = w.shape();
    let m = h.ncols();
    let mut wv = w.as_slice().to_vec();
    let mut hv = h.as_slice().to_vec();
    kernels::normalize_columns(&mut wv, &mut hv, n, r, m)?;
    Ok((
        LabeledMatrix::from_flat(w.row_labels().to_vec(), w.col_labels().to_vec(), wv)?,
        LabeledMatrix::from_flat(h.row_labels().to_vec(), h.col_labels().to_vec(), hv)?,
    ))
}

/// H update, W update, optional normalization; returns the new factors and
/// `‖V − W'H'‖_F`.
pub fn step(
    v: &LabeledMatrix,
    w: &LabeledMatrix,
    h: &LabeledMatrix,
    config: &NmfConfig,
) -> Result<(LabeledMatrix, LabeledMatrix, f64), NmfError> {
    check_conform(v, w, h)?;
    let (n, m) = v.shape();
    let r = w.ncols();
    let mut wv = w.as_slice().to_vec();
    let mut hv = h.as_slice().to_vec();
    let err = kernels::step(v.as_slice(), &mut wv, &mut hv, n, m, r, config)?;
    Ok((
        LabeledMatrix::from_flat(w.row_labels().to_vec(), w.col_labels().to_vec(), wv)?,
        LabeledMatrix::from_flat(h.row_labels().to_vec(), h.col_labels().to_vec(), hv)?,
        err,
    ))
}

/// `V − WH` and its Frobenius norm.
pub fn residual(v: &LabeledMatrix, f: &Factorization) -> Result<(LabeledMatrix, f64), NmfError> {
    let approx = f.w.matmul(&f.h)?;
    let diff = v.subtract(&approx)?;
    let norm = diff.frobenius_norm();
    Ok((diff, norm))
}

struct Run {
    w: Vec<f64>,
    h: Vec<f64>,
    history: Vec<f64>,
    converged: bool,
}

fn run_restart(v: &LabeledMatrix, config: &NmfConfig, seed: u64) -> Result<Run, NmfError> {
    let (w0, h0) = initialize(v, config.rank, seed)?;
    let (n, m) = v.shape();
    let r = config.rank;
    let vv = v.as_slice();
    let mut w = w0.as_slice().to_vec();
    let mut h = h0.as_slice().to_vec();
    let mut prev = dense::frobenius_diff(vv, &dense::matmul(&w, &h, n, r, m));
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_iters {
        let err = kernels::step(vv, &mut w, &mut h, n, m, r, config)?;
        history.push(err);
        let change = (prev - err).abs() / prev.max(1e-30);
        prev = err;
        if change < config.rel_tol {
            converged = true;
            break;
        }
    }
    Ok(Run {
        w,
        h,
        history,
        converged,
    })
}

/// Factor a nonnegative matrix, keeping the best of `config.restarts` runs.
///
/// Restart `k` starts from [`initialize`] with [`restart_seed`]`(config.seed, k)`.
/// The returned run has the smallest final error, ties going to the lowest
/// restart index. A restart that fails (a W column dies under
/// `normalize_w`) is skipped; if every restart fails the first error is
/// returned.
pub fn factorize(v: &LabeledMatrix, config: &NmfConfig) -> Result<Factorization, NmfError> {
    config.validate()?;
    check_nonnegative(v)?;
    check_rank(v, config.rank)?;
    let (n, m) = v.shape();
    let r = config.rank;
    let topics = topic_labels(r);

    if v.as_slice().iter().all(|&x| x == 0.0) {
        return Ok(Factorization {
            w: LabeledMatrix::from_flat(v.row_labels().to_vec(), topics.clone(), vec![0.0; n * r])?,
            h: LabeledMatrix::from_flat(topics, v.col_labels().to_vec(), vec![0.0; r * m])?,
            residual_history: vec![0.0],
            iterations: 0,
            converged: true,
            config: config.clone(),
            restart_index: 0,
        });
    }

    let runs: Vec<Result<Run, NmfError>> = (0..config.restarts)
        .into_par_iter()
        .map(|k| run_restart(v, config, restart_seed(config.seed, k)))
        .collect();

    let mut best: Option<(usize, Run)> = None;
    let mut first_err = None;
    for (k, run) in runs.into_iter().enumerate() {
        match run {
            Ok(run) => {
                let better = match &best {
                    None => true,
                    Some((_, b)) => final_of(&run) < final_of(b),
                };
                if better {
                    best = Some((k, run));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let Some((k, run)) = best else {
        return Err(first_err.expect("at least one restart ran"));
    };
    finish(v, config, k, run)
}

/// Run restart `k` of `config` on its own, exactly as [`factorize`] would.
pub fn factorize_restart(v: &LabeledMatrix, config: &NmfConfig, k: usize) -> Result<Factorization, NmfError> {
    config.validate()?;
    let run = run_restart(v, config, restart_seed(config.seed, k))?;
    finish(v, config, k, run)
}

fn finish(v: &LabeledMatrix, config: &NmfConfig, k: usize, run: Run) -> Result<Factorization, NmfError> {
    let topics = topic_labels(config.rank);
    Ok(Factorization {
        w: LabeledMatrix::from_flat(v.row_labels().to_vec(), topics.clone(), run.w)?,
        h: LabeledMatrix::from_flat(topics, v.col_labels().to_vec(), run.h)?,
        iterations: run.history.len(),
        residual_history: run.history,
        converged: run.converged,
        config: config.clone(),
        restart_index: k,
    })
}

fn final_of(run: &Run) -> f64 {
    run.history.last().copied().unwrap_or(f64::INFINITY)
}

/// Unlabeled in-place update kernels on row-major buffers.
/// V is n×m, W is n×r, H is r×m.
mod kernels {
    use super::NmfError;
    use crate::matrix::{dense, MatrixError};

    fn apply_ratio(
        target: &mut [f64],
        numer: &[f64],
        denom: &[f64],
        cols: usize,
        epsilon: f64,
    ) -> Result<(), NmfError> {
        for (k, ((t, &num), &den)) in target.iter_mut().zip(numer).zip(denom).enumerate() {
            let den = den + epsilon;
            if den == 0.0 {
                if *t == 0.0 {
                    continue;
                }
                return Err(MatrixError::DivisionByZero { row: k / cols, col: k % cols }.into());
            }
            *t *= num / den;
        }
        Ok(())
    }

    pub fn update_h(
        v: &[f64],
        w: &[f64],
        h: &mut [f64],
        n: usize,
        m: usize,
        r: usize,
        epsilon: f64,
    ) -> Result<(), NmfError> {
        let wtv = dense::matmul_tn(w, v, n, r, m);
        let wtw = dense::matmul_tn(w, w, n, r, r);
        let wtwh = dense::matmul(&wtw, h, r, r, m);
        apply_ratio(h, &wtv, &wtwh, m, epsilon)?;
        debug_assert!(h.iter().all(|&x| x >= 0.0));
        Ok(())
    }

    pub fn update_w(
        v: &[f64],
        w: &mut [f64],
        h: &[f64],
        n: usize,
        m: usize,
        r: usize,
        epsilon: f64,
    ) -> Result<(), NmfError> {
        let vht = dense::matmul_nt(v, h, n, m, r);
        let hht = dense::matmul_nt(h, h, r, m, r);
        let whht = dense::matmul(w, &hht, n, r, r);
        apply_ratio(w, &vht, &whht, r, epsilon)?;
        debug_assert!(w.iter().all(|&x| x >= 0.0));
        Ok(())
    }

    pub fn normalize_columns(
        w: &mut [f64],
        h: &mut [f64],
        n: usize,
        r: usize,
        m: usize,
    ) -> Result<(), NmfError> {
        for g in 0..r {
            let sum: f64 = (0..n).map(|i| w[i * r + g]).sum();
            if sum <= 0.0 {
                return Err(NmfError::ZeroColumn { topic: g + 1 });
            }
            for i in 0..n {
                w[i * r + g] /= sum;
            }
            for x in &mut h[g * m..(g + 1) * m] {
                *x *= sum;
            }
        }
        Ok(())
    }

    pub fn step(
        v: &[f64],
        w: &mut [f64],
        h: &mut [f64],
        n: usize,
        m: usize,
        r: usize,
        config: &super::NmfConfig,
    ) -> Result<f64, NmfError> {
        update_h(v, w, h, n, m, r, config.epsilon)?;
        update_w(v, w, h, n, m, r, config.epsilon)?;
        if config.normalize_w {
            normalize_columns(w, h, n, r, m)?;
        }
        Ok(dense::frobenius_diff(v, &dense::matmul(w, h, n, r, m)))
    }
}
