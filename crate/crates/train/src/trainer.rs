use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use vulngraph_data::{AttributedGraph, Dataset};
use vulngraph_segnn::{model_forward, SegnnParams};
use vulngraph_tensor::{Matrix, Tape};

use crate::adam::{adam_step, AdamConfig, AdamState};
use crate::checkpoint::{config_digest, save_checkpoint, Checkpoint};
use crate::eval::evaluate_model;
use crate::TrainError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Directory receiving one checkpoint file per epoch.
    pub checkpoint_dir: Option<PathBuf>,
    /// Stop after the first epoch whose test accuracy reaches this value.
    pub target_accuracy: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        TrainConfig {
            batch_size: 128,
            learning_rate: adam.learning_rate,
            epochs: 30,
            seed: 0,
            beta1: adam.beta1,
            beta2: adam.beta2,
            epsilon: adam.epsilon,
            checkpoint_dir: None,
            target_accuracy: None,
        }
    }
}

impl TrainConfig {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }

    fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 {
            return Err(TrainError::Invalid("batch size must be >= 1".into()));
        }
        if self.learning_rate <= 0.0 {
            return Err(TrainError::Invalid("learning rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub test_accuracy: Option<f64>,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub params: SegnnParams,
    pub adam: AdamState,
    pub history: Vec<EpochRecord>,
}

/// The shuffle order of epoch k depends only on (seed, k), never on how
/// many epochs ran before, so a resumed run replays identical batches.
pub fn epoch_shuffle_seed(seed: u64, epoch: usize) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in seed
        .to_le_bytes()
        .into_iter()
        .chain((epoch as u64).to_le_bytes())
    {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Mean loss and mean per-parameter gradient over a batch of graphs.
/// Each graph runs on its own tape; the reduction is a plain average, so
/// one batch update equals the mean of the per-graph updates exactly.
pub fn batch_gradients(params: &SegnnParams, batch: &[&AttributedGraph]) -> (f64, Vec<Matrix>) {
    assert!(!batch.is_empty(), "empty batch");
    let mut sum: Vec<Matrix> = params
        .params()
        .iter()
        .map(|p| Array2::zeros(p.dim()))
        .collect();
    let mut loss_sum = 0.0;
    for graph in batch {
        let mut tape = Tape::new();
        let fwd = model_forward(&mut tape, params, graph);
        let loss = tape.bce_loss(fwd.logit, graph.label as f64);
        loss_sum += tape.scalar(loss);
        tape.backward(loss);
        for (acc, id) in sum.iter_mut().zip(&fwd.param_ids) {
            *acc += &tape.grad(*id);
        }
    }
    let scale = 1.0 / batch.len() as f64;
    for g in &mut sum {
        *g *= scale;
    }
    (loss_sum * scale, sum)
}

fn checkpoint_path(dir: &Path, epoch: usize) -> PathBuf {
    dir.join(format!("epoch_{epoch:04}.json"))
}

fn run_epochs(
    mut params: SegnnParams,
    mut adam: AdamState,
    mut history: Vec<EpochRecord>,
    start_epoch: usize,
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(TrainError::Invalid("training set is empty".into()));
    }
    let digest = config_digest(&params.config, cfg);
    let adam_cfg = cfg.adam();

    for epoch in start_epoch..cfg.epochs {
        let mut order: Vec<usize> = (0..train.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(epoch_shuffle_seed(cfg.seed, epoch));
        order.shuffle(&mut rng);

        let mut loss_weighted = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&AttributedGraph> =
                chunk.iter().map(|&i| &train.graphs[i]).collect();
            let (batch_loss, grads) = batch_gradients(&params, &batch);
            loss_weighted += batch_loss * batch.len() as f64;
            let mut slots = params.params_mut();
            adam_step(&mut slots, &grads, &mut adam, &adam_cfg);
        }
        let train_loss = loss_weighted / train.len() as f64;
        if !train_loss.is_finite() {
            return Err(TrainError::Invalid(format!(
                "non-finite training loss at epoch {epoch}"
            )));
        }

        let test_accuracy = test.map(|ds| evaluate_model(&params, ds).accuracy());
        history.push(EpochRecord {
            epoch,
            train_loss,
            test_accuracy,
        });

        if let Some(dir) = &cfg.checkpoint_dir {
            let ckpt = Checkpoint::capture(&params, &adam, epoch + 1, &history, digest.clone());
            save_checkpoint(&ckpt, &checkpoint_path(dir, epoch + 1))?;
        }
        if let (Some(target), Some(acc)) = (cfg.target_accuracy, test_accuracy) {
            if acc >= target {
                break;
            }
        }
    }
    Ok(TrainOutcome {
        params,
        adam,
        history,
    })
}

/// Train from a fresh optimizer state.
pub fn train_model(
    params: SegnnParams,
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    let adam = AdamState::zeros_like(&params.params());
    run_epochs(params, adam, Vec::new(), 0, train, test, cfg)
}

/// Continue a checkpointed run. The checkpoint must have been written by
/// the same model/training configuration.
pub fn resume_training(
    ckpt: Checkpoint,
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    let expected = {
        let (params, _, _, _) = ckpt.clone().restore()?;
        config_digest(&params.config, cfg)
    };
    if ckpt.digest != expected {
        return Err(TrainError::Digest {
            found: ckpt.digest.clone(),
            expected,
        });
    }
    let (params, adam, epoch, history) = ckpt.restore()?;
    run_epochs(params, adam, history, epoch, train, test, cfg)
}

/// CSV loss curve: epoch, train_loss, test_acc.
pub fn write_history_csv(history: &[EpochRecord], path: &Path) -> Result<(), TrainError> {
    let mut out = String::from("epoch,train_loss,test_acc\n");
    for rec in history {
        let acc = rec
            .test_accuracy
            .map(|a| a.to_string())
            .unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", rec.epoch, rec.train_loss, acc));
    }
    std::fs::write(path, out).map_err(|source| TrainError::Io {
        action: "write",
        path: path.display().to_string(),
        source,
    })
}
