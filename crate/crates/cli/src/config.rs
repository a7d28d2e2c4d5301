use std::path::Path;

use vulngraph_embed::EmbedConfig;
use vulngraph_segnn::SegnnConfig;

use crate::CliError;

/// Flat key=value pipeline configuration. Any key a flag can set can also
/// live in the file; flags win.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub embed: EmbedConfig,
    pub model: SegnnConfig,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub target_accuracy: Option<f64>,
    pub train_fraction: f64,
    pub min_nodes: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let embed = EmbedConfig::default();
        let model = SegnnConfig {
            feature_dim: 2 * embed.dim,
            ..SegnnConfig::default()
        };
        PipelineConfig {
            seed: 0,
            embed,
            model,
            batch_size: 128,
            learning_rate: 0.001,
            epochs: 30,
            target_accuracy: None,
            train_fraction: 0.8,
            min_nodes: 11,
        }
    }
}

fn parse_key<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::User(format!("bad value {value:?} for config key {key}")))
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::User(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = PipelineConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::User(format!(
                    "{}:{}: expected key = value, got {raw:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        // the model consumes concatenated block+graph embeddings
        cfg.model.feature_dim = 2 * cfg.embed.dim;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "seed" => self.seed = parse_key(key, value)?,
            "embed.dim" => self.embed.dim = parse_key(key, value)?,
            "embed.window" => self.embed.window = parse_key(key, value)?,
            "embed.negatives" => self.embed.negatives = parse_key(key, value)?,
            "embed.epochs" => self.embed.epochs = parse_key(key, value)?,
            "embed.learning_rate" => self.embed.learning_rate = parse_key(key, value)?,
            "embed.min_count" => self.embed.min_count = parse_key(key, value)?,
            "model.state_dim" => self.model.state_dim = parse_key(key, value)?,
            "model.recurrence_steps" => self.model.recurrence_steps = parse_key(key, value)?,
            "model.dense_dim" => self.model.dense_dim = parse_key(key, value)?,
            "model.leaky_slope" => self.model.leaky_slope = parse_key(key, value)?,
            "model.gat_dims" => {
                let dims: Result<Vec<usize>, _> = value
                    .split(',')
                    .map(|d| parse_key::<usize>(key, d.trim()))
                    .collect();
                let dims = dims?;
                if dims.is_empty() {
                    return Err(CliError::User("model.gat_dims must not be empty".into()));
                }
                self.model.gat_dims = dims;
            }
            "train.batch_size" => self.batch_size = parse_key(key, value)?,
            "train.learning_rate" => self.learning_rate = parse_key(key, value)?,
            "train.epochs" => self.epochs = parse_key(key, value)?,
            "train.target_accuracy" => self.target_accuracy = Some(parse_key(key, value)?),
            "train.fraction" => self.train_fraction = parse_key(key, value)?,
            "build.min_nodes" => self.min_nodes = parse_key(key, value)?,
            _ => return Err(CliError::User(format!("unknown config key {key}"))),
        }
        Ok(())
    }
}

/// Labeled sub-seed derivation (FNV-1a over the global seed and the stage
/// name) so one `--seed` reproduces the whole pipeline while stages stay
/// statistically independent.
pub fn stage_seed(seed: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in seed.to_le_bytes().into_iter().chain(stage.bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
