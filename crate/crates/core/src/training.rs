//! Mini-batch training with Adam and the two learning-rate schedules.
//!
//! Pool-wide training starts at `lr = 1e-3` and divides the rate by 10 on
//! each validation plateau (at most three times, a fourth plateau stops the
//! run). Fine-tuning starts at `lr = 1e-4`, divides by 10 every 20 epochs and
//! stops once validation loss plateaus. Both loops return the parameters of
//! the best-validation epoch; fine-tuning also snapshots the starting
//! parameters, so it can never end worse than it began on its own
//! validation rows.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{DatasetSplit, WindowedDataset};
use crate::derive_seed;
use crate::fmath;
use crate::model::{backward, init_params, predict, ModelConfig, ModelParams};
use crate::{Error, Result};

/// Learning-rate decay factor shared by both schedules.
pub const LR_DECAY_FACTOR: f64 = 10.0;
/// Maximum plateau-triggered decays before the next plateau stops training.
pub const MAX_PLATEAU_DECAYS: usize = 3;
/// Epoch period of the step schedule.
pub const STEP_DECAY_EPOCHS: usize = 20;

/// Learning-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Schedule {
    /// Divide by 10 when validation loss plateaus, at most three times; the
    /// following plateau ends training.
    PlateauDecay,
    /// Divide by 10 every 20 epochs; stop when validation loss plateaus.
    StepDecay,
}

/// Training hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    /// L1 regularization factor.
    pub lambda: f64,
    /// Initial learning rate.
    pub lr0: f64,
    pub schedule: Schedule,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without significant validation improvement before a plateau
    /// is declared.
    pub patience: usize,
    /// Minimum validation-loss drop that counts as improvement.
    pub min_delta: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// Defaults for training the pool-wide model.
    pub fn global() -> TrainConfig {
        TrainConfig {
            lambda: 1e-4,
            lr0: 1e-3,
            schedule: Schedule::PlateauDecay,
            batch_size: 512,
            max_epochs: 100,
            patience: 5,
            min_delta: 1e-4,
            seed: 0,
        }
    }

    /// Defaults for fine-tuning on a cluster.
    pub fn fine_tune() -> TrainConfig {
        TrainConfig {
            lr0: 1e-4,
            schedule: Schedule::StepDecay,
            max_epochs: 60,
            ..TrainConfig::global()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lr0 > 0.0) || self.batch_size < 1 || self.patience < 1 || self.lambda < 0.0 {
            return Err(Error::Config("lr0 > 0, batch_size >= 1, patience >= 1, lambda >= 0 required"));
        }
        Ok(())
    }
}

/// Adam accumulator state, flat over the canonical parameter traversal.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    beta1_pow: f64,
    beta2_pow: f64,
}

impl OptimizerState {
    pub fn new(n_params: usize) -> OptimizerState {
        OptimizerState {
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: alloc::vec![0.0; n_params],
            v: alloc::vec![0.0; n_params],
            beta1_pow: 1.0,
            beta2_pow: 1.0,
        }
    }

    fn begin_step(&mut self) -> (f64, f64) {
        self.t += 1;
        self.beta1_pow *= self.beta1;
        self.beta2_pow *= self.beta2;
        (1.0 - self.beta1_pow, 1.0 - self.beta2_pow)
    }

    fn step_segment(
        &mut self,
        offset: usize,
        theta: &mut [f64],
        grad: &[f64],
        lr: f64,
        corr: (f64, f64),
    ) -> bool {
        let (c1, c2) = corr;
        let mut finite = true;
        for i in 0..theta.len() {
            let g = grad[i];
            let idx = offset + i;
            self.m[idx] = self.beta1 * self.m[idx] + (1.0 - self.beta1) * g;
            self.v[idx] = self.beta2 * self.v[idx] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[idx] / c1;
            let v_hat = self.v[idx] / c2;
            theta[i] -= lr * m_hat / (fmath::sqrt(v_hat) + self.epsilon);
            finite &= theta[i].is_finite();
        }
        finite
    }

    /// One Adam step over a flat parameter vector covering the whole state.
    pub fn step_flat(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) -> Result<()> {
        if theta.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::Shape(alloc::format!(
                "optimizer state of {} parameters fed {} / {}",
                self.m.len(),
                theta.len(),
                grad.len()
            )));
        }
        let corr = self.begin_step();
        if !self.step_segment(0, theta, grad, lr, corr) {
            return Err(Error::Numeric("adam update"));
        }
        Ok(())
    }
}

/// One Adam step over a full parameter set.
pub fn adam_step(
    state: &mut OptimizerState,
    params: &mut ModelParams,
    grads: &ModelParams,
    lr: f64,
) -> Result<()> {
    let total: usize = params.scalar_count();
    if total != state.m.len() || grads.scalar_count() != total {
        return Err(Error::Shape(alloc::format!(
            "optimizer state of {} parameters fed a model of {}",
            state.m.len(),
            total
        )));
    }
    let corr = state.begin_step();
    let mut offset = 0;
    let mut finite = true;
    for (theta, grad) in params.param_slices_mut().into_iter().zip(grads.param_slices()) {
        finite &= state.step_segment(offset, theta, grad, lr, corr);
        offset += grad.len();
    }
    if !finite {
        return Err(Error::Numeric("adam update"));
    }
    Ok(())
}

/// Why a training loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum StopReason {
    /// All `max_epochs` epochs ran.
    MaxEpochs,
    /// Validation loss plateaued (step schedule, or a fourth plateau under
    /// the plateau schedule).
    EarlyStop,
}

/// One completed epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
}

/// Per-epoch history of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub stop_reason: StopReason,
    /// Epoch whose parameters were returned (0 = the starting parameters).
    pub best_epoch: usize,
    pub best_val_loss: f64,
    /// Validation loss of the starting parameters, when evaluated.
    pub initial_val_loss: Option<f64>,
    pub wall_time_s: f64,
}

/// Mean absolute error of the model on `d`, the penalty-free validation
/// objective used for plateau detection and model selection.
pub fn validation_loss(params: &ModelParams, d: &WindowedDataset) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::EmptyInput("validation set"));
    }
    let forecast = predict(params, d)?;
    let total: f64 = forecast
        .iter()
        .zip(d.y.iter())
        .map(|(&f, &a)| fmath::abs(a - f))
        .sum();
    Ok(total / (d.len() * d.h()) as f64)
}

struct Trainer<'a> {
    train: &'a WindowedDataset,
    validation: &'a WindowedDataset,
    tc: &'a TrainConfig,
    include_start_snapshot: bool,
}

impl Trainer<'_> {
    fn run(&self, mut params: ModelParams) -> Result<(ModelParams, TrainReport)> {
        self.tc.validate()?;
        if self.train.is_empty() {
            return Err(Error::EmptyInput("training set"));
        }
        #[cfg(feature = "std")]
        let t0 = std::time::Instant::now();

        let mut report = TrainReport {
            epochs: Vec::new(),
            stop_reason: StopReason::MaxEpochs,
            best_epoch: 0,
            best_val_loss: f64::NAN,
            initial_val_loss: None,
            wall_time_s: 0.0,
        };
        if self.tc.max_epochs == 0 {
            return Ok((params, report));
        }

        let mut best: Option<(f64, usize, ModelParams)> = None;
        if self.include_start_snapshot {
            let v0 = validation_loss(&params, self.validation)?;
            report.initial_val_loss = Some(v0);
            best = Some((v0, 0, params.clone()));
        }

        let mut opt = OptimizerState::new(params.scalar_count());
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(self.tc.seed, 1));
        let mut order: Vec<usize> = (0..self.train.len()).collect();

        let mut lr = self.tc.lr0;
        let mut plateau_best = f64::INFINITY;
        let mut since_improvement = 0usize;
        let mut decays = 0usize;

        for epoch in 1..=self.tc.max_epochs {
            if self.tc.schedule == Schedule::StepDecay {
                let decades = (epoch - 1) / STEP_DECAY_EPOCHS;
                lr = self.tc.lr0 / libm::pow(LR_DECAY_FACTOR, decades as f64);
            }

            order.shuffle(&mut shuffle_rng);
            let mut weighted_loss = 0.0;
            for batch_rows in order.chunks(self.tc.batch_size) {
                let batch = self.train.select_rows(batch_rows);
                let (loss, grads) = backward(
                    &params,
                    batch.x_lags.view(),
                    batch.x_exog.view(),
                    batch.y.view(),
                    self.tc.lambda,
                )?;
                adam_step(&mut opt, &mut params, &grads, lr)?;
                weighted_loss += loss * batch_rows.len() as f64;
            }
            let train_loss = weighted_loss / self.train.len() as f64;
            let val_loss = validation_loss(&params, self.validation)?;
            report.epochs.push(EpochRecord {
                epoch,
                train_loss,
                val_loss,
                lr,
            });

            let is_best = best.as_ref().map_or(true, |(b, _, _)| val_loss < *b);
            if is_best {
                best = Some((val_loss, epoch, params.clone()));
            }

            if val_loss < plateau_best - self.tc.min_delta {
                plateau_best = val_loss;
                since_improvement = 0;
            } else {
                since_improvement += 1;
                if since_improvement >= self.tc.patience {
                    match self.tc.schedule {
                        Schedule::PlateauDecay if decays < MAX_PLATEAU_DECAYS => {
                            lr /= LR_DECAY_FACTOR;
                            decays += 1;
                            since_improvement = 0;
                        }
                        _ => {
                            report.stop_reason = StopReason::EarlyStop;
                            break;
                        }
                    }
                }
            }
        }

        let (best_val, best_epoch, best_params) = best.expect("at least one epoch ran");
        report.best_epoch = best_epoch;
        report.best_val_loss = best_val;
        #[cfg(feature = "std")]
        {
            report.wall_time_s = t0.elapsed().as_secs_f64();
        }
        Ok((best_params, report))
    }
}

/// Trains a fresh model on the pooled training rows of `d`.
///
/// Deterministic: a fixed `(seed, data, config)` triple reproduces the exact
/// parameters and report.
pub fn train_global(
    d: &DatasetSplit,
    cfg: &ModelConfig,
    tc: &TrainConfig,
) -> Result<(ModelParams, TrainReport)> {
    cfg.validate()?;
    let params = init_params(cfg, derive_seed(tc.seed, 0))?;
    Trainer {
        train: &d.train,
        validation: &d.validation,
        tc,
        include_start_snapshot: false,
    }
    .run(params)
}

/// Fine-tunes `start` on the given (usually cluster-restricted) split.
///
/// The starting parameters count as the epoch-0 snapshot, so the returned
/// model's validation loss never exceeds `start`'s. `start` itself is never
/// mutated.
pub fn fine_tune(
    start: &ModelParams,
    d: &DatasetSplit,
    tc: &TrainConfig,
) -> Result<(ModelParams, TrainReport)> {
    start.config.validate()?;
    Trainer {
        train: &d.train,
        validation: &d.validation,
        tc,
        include_start_snapshot: true,
    }
    .run(start.clone())
}
