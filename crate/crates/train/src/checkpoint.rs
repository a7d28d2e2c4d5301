use std::path::Path;

use serde::{Deserialize, Serialize};
use vulngraph_segnn::{SegnnConfig, SegnnParams};
use vulngraph_tensor::Matrix;

use crate::adam::AdamState;
use crate::trainer::{EpochRecord, TrainConfig};
use crate::TrainError;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixDoc {
    fn from_matrix(m: &Matrix) -> Self {
        MatrixDoc {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.iter().copied().collect(),
        }
    }

    fn to_matrix(&self) -> Result<Matrix, TrainError> {
        Matrix::from_shape_vec((self.rows, self.cols), self.data.clone())
            .map_err(|e| TrainError::Invalid(format!("bad matrix shape in checkpoint: {e}")))
    }
}

/// Everything needed to continue a run bitwise: weights, optimizer
/// moments, completed-epoch count, and the metric history so far.
/// serde_json writes f64 in shortest round-trip form, so the file is
/// lossless.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub digest: String,
    pub epoch: usize,
    pub config: SegnnConfig,
    pub param_names: Vec<String>,
    params: Vec<MatrixDoc>,
    adam_m: Vec<MatrixDoc>,
    adam_v: Vec<MatrixDoc>,
    adam_step: u64,
    pub history: Vec<EpochRecord>,
}

impl Checkpoint {
    pub fn capture(
        params: &SegnnParams,
        adam: &AdamState,
        epoch: usize,
        history: &[EpochRecord],
        digest: String,
    ) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            digest,
            epoch,
            config: params.config.clone(),
            param_names: params.names(),
            params: params.params().iter().map(|m| MatrixDoc::from_matrix(m)).collect(),
            adam_m: adam.m.iter().map(MatrixDoc::from_matrix).collect(),
            adam_v: adam.v.iter().map(MatrixDoc::from_matrix).collect(),
            adam_step: adam.step,
            history: history.to_vec(),
        }
    }

    /// Rebuild the parameter struct and optimizer state.
    pub fn restore(self) -> Result<(SegnnParams, AdamState, usize, Vec<EpochRecord>), TrainError> {
        let mut params = SegnnParams::init(self.config.clone(), 0);
        if params.names() != self.param_names {
            return Err(TrainError::Invalid(
                "checkpoint parameter layout does not match its configuration".into(),
            ));
        }
        let slots = params.params_mut();
        if slots.len() != self.params.len() {
            return Err(TrainError::Invalid("checkpoint parameter count mismatch".into()));
        }
        for (slot, doc) in slots.into_iter().zip(&self.params) {
            let m = doc.to_matrix()?;
            if m.dim() != slot.dim() {
                return Err(TrainError::Invalid(format!(
                    "checkpoint tensor shape {:?} does not match model shape {:?}",
                    m.dim(),
                    slot.dim()
                )));
            }
            *slot = m;
        }
        let adam = AdamState {
            m: self.adam_m.iter().map(|d| d.to_matrix()).collect::<Result<_, _>>()?,
            v: self.adam_v.iter().map(|d| d.to_matrix()).collect::<Result<_, _>>()?,
            step: self.adam_step,
        };
        Ok((params, adam, self.epoch, self.history))
    }
}

/// Stable digest tying a checkpoint to its model and training settings.
pub fn config_digest(model: &SegnnConfig, cfg: &TrainConfig) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(serde_json::to_string(model).expect("config serializes").as_bytes());
    eat(&cfg.batch_size.to_le_bytes());
    eat(&cfg.learning_rate.to_bits().to_le_bytes());
    eat(&cfg.seed.to_le_bytes());
    eat(&cfg.beta1.to_bits().to_le_bytes());
    eat(&cfg.beta2.to_bits().to_le_bytes());
    eat(&cfg.epsilon.to_bits().to_le_bytes());
    format!("{h:016x}")
}

pub fn save_checkpoint(ckpt: &Checkpoint, path: &Path) -> Result<(), TrainError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| TrainError::Io {
                action: "create",
                path: parent.display().to_string(),
                source,
            })?;
        }
    }
    let text = serde_json::to_string(ckpt).map_err(|e| TrainError::Checkpoint {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    std::fs::write(path, text).map_err(|source| TrainError::Io {
        action: "write",
        path: path.display().to_string(),
        source,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, TrainError> {
    let text = std::fs::read_to_string(path).map_err(|source| TrainError::Io {
        action: "read",
        path: path.display().to_string(),
        source,
    })?;
    let ckpt: Checkpoint = serde_json::from_str(&text).map_err(|e| TrainError::Checkpoint {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if ckpt.version != CHECKPOINT_VERSION {
        return Err(TrainError::Version {
            found: ckpt.version,
            expected: CHECKPOINT_VERSION,
        });
    }
    Ok(ckpt)
}
