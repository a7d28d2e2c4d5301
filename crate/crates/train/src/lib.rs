//! Optimizer, training loop, evaluation, and checkpoint persistence for
//! the graph classifier.

mod adam;
mod checkpoint;
mod eval;
mod trainer;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use eval::{evaluate_model, predict, Metrics};
pub use trainer::{
    batch_gradients, epoch_shuffle_seed, resume_training, train_model, write_history_csv,
    EpochRecord, TrainConfig, TrainOutcome,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("failed to {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: String,
        source: std::io::Error,
    },
    #[error("bad checkpoint {path}: {message}")]
    Checkpoint { path: String, message: String },
    #[error("checkpoint version {found} unsupported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint was written for a different configuration (digest {found} != {expected})")]
    Digest { found: String, expected: String },
    #[error("{0}")]
    Invalid(String),
}
