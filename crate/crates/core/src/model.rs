//! The residual-block MLP forecaster.
//!
//! The network is a chain of `R` blocks. Each block runs `L` fully-connected
//! ReLU layers followed by two linear heads: a backcast that reconstructs the
//! block's lag input and a partial forecast. Block 1 sees the lag window
//! concatenated with the one-hot calendar features; every later block sees
//! only the running lag residual `x - backcast(s so far)`. The model output
//! is the sum of all partial forecasts.
//!
//! Everything is computed in `f64`, and gradients are exact subgradients of
//! the L1-regularized MAE objective (`sign(0) = 0` at both kinds of kinks).

use alloc::vec::Vec;
use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};

use crate::data::{WindowedDataset, CALENDAR_DIM, DEFAULT_HORIZON, DEFAULT_LAGS};
use crate::fmath;
use crate::{Error, Result};

/// Rows processed per forward chunk when predicting large datasets.
const PREDICT_CHUNK: usize = 8192;

/// Architecture hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ModelConfig {
    /// Number of residual blocks `R`.
    pub n_blocks: usize,
    /// Fully-connected ReLU layers per block `L`.
    pub n_fc_layers: usize,
    /// Units per fully-connected layer.
    pub width: usize,
    /// Lag-window length `K`.
    pub k: usize,
    /// Forecast horizon `H`.
    pub h: usize,
    /// Calendar feature dimensionality (block 1 only).
    pub cat_dim: usize,
    /// Weight sharing across blocks; kept for file compatibility, must stay
    /// disabled.
    pub share_weights: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            n_blocks: 3,
            n_fc_layers: 3,
            width: 512,
            k: DEFAULT_LAGS,
            h: DEFAULT_HORIZON,
            cat_dim: CALENDAR_DIM,
            share_weights: false,
        }
    }
}

impl ModelConfig {
    /// Default geometry at a given layer width (512 for the pool-wide model,
    /// 32 for a single-series one).
    pub fn with_width(width: usize) -> ModelConfig {
        ModelConfig {
            width,
            ..ModelConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_blocks < 1 || self.n_fc_layers < 1 || self.width < 1 || self.k < 1 || self.h < 1 {
            return Err(Error::Config("all architecture counts must be at least 1"));
        }
        if self.share_weights {
            return Err(Error::Config("weight sharing across blocks is not supported"));
        }
        Ok(())
    }

    /// Input dimensionality of the FC stack of `block` (0-based).
    pub fn block_input_dim(&self, block: usize) -> usize {
        self.k + if block == 0 { self.cat_dim } else { 0 }
    }
}

/// Exact number of scalars in a [`ModelParams`] with this configuration.
///
/// Closed form: `R * [(K w + w) + (L-1)(w^2 + w) + (w K + K) + (w H + H)]
/// + cat_dim * w`, the calendar input weights appearing in block 1 only.
pub fn parameter_count(cfg: &ModelConfig) -> usize {
    let (r, l, w, k, h) = (cfg.n_blocks, cfg.n_fc_layers, cfg.width, cfg.k, cfg.h);
    let per_block = (k * w + w) + (l - 1) * (w * w + w) + (w * k + k) + (w * h + h);
    r * per_block + cfg.cat_dim * w
}

/// One affine layer; `weights` maps inputs (rows) to outputs (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    fn zeros(input: usize, output: usize) -> Dense {
        Dense {
            weights: Array2::zeros((input, output)),
            bias: Array1::zeros(output),
        }
    }

    fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut z = x.dot(&self.weights);
        z += &self.bias;
        z
    }
}

/// Parameters of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParams {
    pub fc: Vec<Dense>,
    pub backcast: Dense,
    pub forecast: Dense,
}

/// All parameters of the forecaster.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub blocks: Vec<BlockParams>,
}

impl ModelParams {
    /// All-zero parameters for `cfg`; also the shape template for gradient
    /// and optimizer buffers.
    pub fn zeros(cfg: &ModelConfig) -> ModelParams {
        let blocks = (0..cfg.n_blocks)
            .map(|b| {
                let mut fc = Vec::with_capacity(cfg.n_fc_layers);
                let mut input = cfg.block_input_dim(b);
                for _ in 0..cfg.n_fc_layers {
                    fc.push(Dense::zeros(input, cfg.width));
                    input = cfg.width;
                }
                BlockParams {
                    fc,
                    backcast: Dense::zeros(cfg.width, cfg.k),
                    forecast: Dense::zeros(cfg.width, cfg.h),
                }
            })
            .collect();
        ModelParams {
            config: *cfg,
            blocks,
        }
    }

    /// Parameter tensors as flat slices in the canonical traversal order:
    /// block-major, FC layers then backcast then forecast, weights before
    /// biases.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for block in &self.blocks {
            for dense in block.fc.iter().chain([&block.backcast, &block.forecast]) {
                out.push(dense.weights.as_slice().expect("standard layout"));
                out.push(dense.bias.as_slice().expect("standard layout"));
            }
        }
        out
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for block in &mut self.blocks {
            for dense in block
                .fc
                .iter_mut()
                .chain([&mut block.backcast, &mut block.forecast])
            {
                out.push(dense.weights.as_slice_mut().expect("standard layout"));
                out.push(dense.bias.as_slice_mut().expect("standard layout"));
            }
        }
        out
    }

    /// Number of scalars actually stored.
    pub fn scalar_count(&self) -> usize {
        self.param_slices().iter().map(|s| s.len()).sum()
    }

    /// Sum of absolute parameter values (the L1 penalty mass).
    pub fn l1_norm(&self) -> f64 {
        self.param_slices()
            .iter()
            .map(|s| s.iter().map(|&x| fmath::abs(x)).sum::<f64>())
            .sum()
    }
}

/// Fresh parameters: weights uniform in `±sqrt(6 / fan_in)`, biases zero.
/// Deterministic for a fixed seed.
pub fn init_params(cfg: &ModelConfig, seed: u64) -> Result<ModelParams> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::zeros(cfg);
    for block in &mut params.blocks {
        for dense in block
            .fc
            .iter_mut()
            .chain([&mut block.backcast, &mut block.forecast])
        {
            let fan_in = dense.weights.nrows();
            let bound = fmath::sqrt(6.0 / fan_in as f64);
            let dist = Uniform::new(-bound, bound).expect("valid bounds");
            for w in dense.weights.iter_mut() {
                *w = dist.sample(&mut rng);
            }
        }
    }
    Ok(params)
}

/// Everything produced by one forward pass.
pub struct ForwardPass {
    /// Total forecast, the elementwise sum of `per_block`.
    pub forecast: Array2<f64>,
    /// Partial forecast of each block.
    pub per_block: Vec<Array2<f64>>,
    /// Running lag residual after each block's backcast subtraction.
    pub residual_trace: Vec<Array2<f64>>,
}

fn check_shapes(cfg: &ModelConfig, x_lags: &ArrayView2<f64>, x_exog: &ArrayView2<f64>) -> Result<()> {
    if x_lags.ncols() != cfg.k || x_exog.ncols() != cfg.cat_dim || x_lags.nrows() != x_exog.nrows() {
        return Err(Error::Shape(alloc::format!(
            "inputs {}x{} / {}x{} do not match model geometry (k={}, cat={})",
            x_lags.nrows(),
            x_lags.ncols(),
            x_exog.nrows(),
            x_exog.ncols(),
            cfg.k,
            cfg.cat_dim
        )));
    }
    Ok(())
}

fn relu_inplace(z: &mut Array2<f64>) {
    z.mapv_inplace(|v| if v > 0.0 { v } else { 0.0 });
}

/// Full forward pass keeping per-block outputs and residuals.
pub fn forward(p: &ModelParams, x_lags: ArrayView2<f64>, x_exog: ArrayView2<f64>) -> Result<ForwardPass> {
    check_shapes(&p.config, &x_lags, &x_exog)?;
    let m = x_lags.nrows();
    let mut residual = x_lags.to_owned();
    let mut total = Array2::zeros((m, p.config.h));
    let mut per_block = Vec::with_capacity(p.config.n_blocks);
    let mut residual_trace = Vec::with_capacity(p.config.n_blocks);
    for (b, block) in p.blocks.iter().enumerate() {
        let mut a = if b == 0 {
            ndarray::concatenate(Axis(1), &[residual.view(), x_exog.view()]).expect("row counts match")
        } else {
            residual.clone()
        };
        for dense in &block.fc {
            a = dense.apply(&a);
            relu_inplace(&mut a);
        }
        let backcast = block.backcast.apply(&a);
        let partial = block.forecast.apply(&a);
        residual -= &backcast;
        residual_trace.push(residual.clone());
        total += &partial;
        per_block.push(partial);
    }
    if !total.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("forward pass"));
    }
    Ok(ForwardPass {
        forecast: total,
        per_block,
        residual_trace,
    })
}

/// Forward pass computing only the total forecast.
fn forecast_only(p: &ModelParams, x_lags: ArrayView2<f64>, x_exog: ArrayView2<f64>) -> Result<Array2<f64>> {
    let m = x_lags.nrows();
    let mut residual = x_lags.to_owned();
    let mut total = Array2::zeros((m, p.config.h));
    for (b, block) in p.blocks.iter().enumerate() {
        let mut a = if b == 0 {
            ndarray::concatenate(Axis(1), &[residual.view(), x_exog.view()]).expect("row counts match")
        } else {
            residual.clone()
        };
        for dense in &block.fc {
            a = dense.apply(&a);
            relu_inplace(&mut a);
        }
        if b + 1 < p.blocks.len() {
            residual -= &block.backcast.apply(&a);
        }
        total += &block.forecast.apply(&a);
    }
    if !total.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("forward pass"));
    }
    Ok(total)
}

/// Point forecasts for every row of `d`; pure and row-independent.
pub fn predict(p: &ModelParams, d: &WindowedDataset) -> Result<Array2<f64>> {
    let x_lags = d.x_lags.view();
    let x_exog = d.x_exog.view();
    check_shapes(&p.config, &x_lags, &x_exog)?;
    let m = d.len();
    let mut out = Array2::zeros((m, p.config.h));
    let mut lo = 0;
    while lo < m {
        let hi = (lo + PREDICT_CHUNK).min(m);
        let chunk = forecast_only(
            p,
            x_lags.slice(s![lo..hi, ..]),
            x_exog.slice(s![lo..hi, ..]),
        )?;
        out.slice_mut(s![lo..hi, ..]).assign(&chunk);
        lo = hi;
    }
    Ok(out)
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Loss and exact subgradients of the L1-regularized MAE objective on one
/// batch: `mean |y - forecast| + lambda * sum |theta|`.
pub fn backward(
    p: &ModelParams,
    x_lags: ArrayView2<f64>,
    x_exog: ArrayView2<f64>,
    y: ArrayView2<f64>,
    lambda: f64,
) -> Result<(f64, ModelParams)> {
    debug_assert!(lambda >= 0.0);
    check_shapes(&p.config, &x_lags, &x_exog)?;
    if y.nrows() != x_lags.nrows() || y.ncols() != p.config.h {
        return Err(Error::Shape(alloc::format!(
            "targets {}x{} do not match batch of {} rows at horizon {}",
            y.nrows(),
            y.ncols(),
            x_lags.nrows(),
            p.config.h
        )));
    }
    let m = x_lags.nrows();
    let h = p.config.h;
    let n_blocks = p.config.n_blocks;
    let k = p.config.k;

    // Forward pass, caching each block's stack input and post-ReLU
    // activations.
    struct BlockCache {
        input: Array2<f64>,
        acts: Vec<Array2<f64>>,
    }
    let mut caches = Vec::with_capacity(n_blocks);
    let mut residual = x_lags.to_owned();
    let mut total = Array2::zeros((m, h));
    for (b, block) in p.blocks.iter().enumerate() {
        let input = if b == 0 {
            ndarray::concatenate(Axis(1), &[residual.view(), x_exog.view()]).expect("row counts match")
        } else {
            residual.clone()
        };
        let mut acts = Vec::with_capacity(block.fc.len());
        let mut a = input.clone();
        for dense in &block.fc {
            a = dense.apply(&a);
            relu_inplace(&mut a);
            acts.push(a.clone());
        }
        if b + 1 < n_blocks {
            residual -= &block.backcast.apply(&a);
        }
        total += &block.forecast.apply(&a);
        caches.push(BlockCache { input, acts });
    }

    // Data term and its gradient at the output.
    let mut err = total;
    err -= &y;
    let inv = 1.0 / (m * h) as f64;
    let data_loss = err.iter().map(|&e| fmath::abs(e)).sum::<f64>() * inv;
    let g_y = err.mapv_into(|e| sign(e) * inv);

    let mut grads = ModelParams::zeros(&p.config);
    // dL/d(residual entering the next block); the final residual is unused.
    let mut g_res: Array2<f64> = Array2::zeros((m, k));
    for b in (0..n_blocks).rev() {
        let block = &p.blocks[b];
        let cache = &caches[b];
        let a_top = cache.acts.last().expect("at least one FC layer");

        // Matmul results are written into the pre-allocated gradient
        // arrays so every tensor stays in standard layout.
        general_mat_mul(1.0, &a_top.t(), &g_y.view(), 0.0, &mut grads.blocks[b].forecast.weights);
        grads.blocks[b].forecast.bias = g_y.sum_axis(Axis(0));
        let mut g = g_y.dot(&block.forecast.weights.t());
        if b + 1 < n_blocks {
            // The backcast feeds the next residual with a minus sign.
            let g_back = g_res.mapv(|v| -v);
            general_mat_mul(
                1.0,
                &a_top.t(),
                &g_back.view(),
                0.0,
                &mut grads.blocks[b].backcast.weights,
            );
            grads.blocks[b].backcast.bias = g_back.sum_axis(Axis(0));
            g += &g_back.dot(&block.backcast.weights.t());
        }
        for l in (0..block.fc.len()).rev() {
            g.zip_mut_with(&cache.acts[l], |gi, &a| {
                if a <= 0.0 {
                    *gi = 0.0;
                }
            });
            let below: &Array2<f64> = if l == 0 { &cache.input } else { &cache.acts[l - 1] };
            general_mat_mul(1.0, &below.t(), &g.view(), 0.0, &mut grads.blocks[b].fc[l].weights);
            grads.blocks[b].fc[l].bias = g.sum_axis(Axis(0));
            if l > 0 || b > 0 {
                g = g.dot(&block.fc[l].weights.t());
            }
        }
        if b > 0 {
            // x^(b+1) = x^(b) - backcast^(b): the identity path adds the
            // downstream residual gradient to this block's input gradient.
            g += &g_res;
            g_res = g;
        }
    }

    // L1 penalty on every parameter, biases included.
    let mut l1 = 0.0;
    for (gs, ps) in grads.param_slices_mut().into_iter().zip(p.param_slices()) {
        for (g, &t) in gs.iter_mut().zip(ps) {
            l1 += fmath::abs(t);
            *g += lambda * sign(t);
        }
    }
    let loss = data_loss + lambda * l1;
    if !loss.is_finite() {
        return Err(Error::Numeric("loss"));
    }
    Ok((loss, grads))
}
