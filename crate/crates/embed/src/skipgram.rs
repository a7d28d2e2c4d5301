use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::table::EmbeddingTable;
use crate::EmbedError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: usize,
    pub seed: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 1,
            seed: 0,
        }
    }
}

impl EmbedConfig {
    fn validate(&self) {
        assert!(self.dim > 0, "dim must be positive");
        assert!(self.window >= 1, "window must be >= 1");
        assert!(self.epochs > 0, "epochs must be positive");
        assert!(self.learning_rate > 0.0, "learning rate must be positive");
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Loss and gradients for one (center, context, negatives) update:
/// L = -log sigma(u_ctx . v) - sum_n log sigma(-u_n . v).
///
/// Returns (loss, d v, d u_ctx, d u_negs). This is the exact rule the
/// trainer applies, factored out so it can be checked against finite
/// differences.
#[allow(clippy::type_complexity)]
pub fn sgns_loss_and_grads(
    v_center: &[f64],
    u_context: &[f64],
    u_negatives: &[Vec<f64>],
) -> (f64, Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let d = v_center.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let pos = dot(v_center, u_context);
    let mut loss = -sigmoid(pos).max(f64::MIN_POSITIVE).ln();
    // d/dpos of -log sigma(pos) is sigma(pos) - 1
    let pos_coeff = sigmoid(pos) - 1.0;

    let mut grad_center = vec![0.0; d];
    let mut grad_context = vec![0.0; d];
    for j in 0..d {
        grad_center[j] += pos_coeff * u_context[j];
        grad_context[j] += pos_coeff * v_center[j];
    }
    let mut grad_negs = Vec::with_capacity(u_negatives.len());
    for u_neg in u_negatives {
        let neg = dot(v_center, u_neg);
        loss -= sigmoid(-neg).max(f64::MIN_POSITIVE).ln();
        // d/dneg of -log sigma(-neg) is sigma(neg)
        let neg_coeff = sigmoid(neg);
        let mut g = vec![0.0; d];
        for j in 0..d {
            grad_center[j] += neg_coeff * u_neg[j];
            g[j] = neg_coeff * v_center[j];
        }
        grad_negs.push(g);
    }
    (loss, grad_center, grad_context, grad_negs)
}

/// Skip-gram with negative sampling. Single-threaded and fully
/// deterministic for a fixed seed.
///
/// Vocabulary order is (count desc, token asc). Negatives are drawn from
/// the unigram distribution raised to 0.75. The learning rate decays
/// linearly over all training pairs down to 1e-4 of its start value.
pub fn train_skipgram(corpus: &Corpus, cfg: &EmbedConfig) -> Result<EmbeddingTable, EmbedError> {
    cfg.validate();
    if corpus.is_empty() {
        return Err(EmbedError::EmptyCorpus);
    }
    let mut vocab: Vec<(String, usize)> = corpus
        .token_counts
        .iter()
        .filter(|(_, &c)| c >= cfg.min_count)
        .map(|(t, &c)| (t.clone(), c))
        .collect();
    if vocab.is_empty() {
        return Err(EmbedError::EmptyVocabulary);
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let vocab_size = vocab.len();
    let index: std::collections::HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.as_str(), i))
        .collect();

    // cumulative unigram^0.75 table for negative sampling
    let weights: Vec<f64> = vocab.iter().map(|(_, c)| (*c as f64).powf(0.75)).collect();
    let total_weight: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(vocab_size);
    let mut acc = 0.0;
    for w in &weights {
        acc += w;
        cumulative.push(acc);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.dim;
    let mut input: Array2<f64> =
        Array2::from_shape_fn((vocab_size, d), |_| (rng.random::<f64>() - 0.5) / d as f64);
    let mut output: Array2<f64> = Array2::zeros((vocab_size, d));

    // index sentences once
    let sentences: Vec<Vec<usize>> = corpus
        .sentences
        .iter()
        .map(|s| s.iter().filter_map(|t| index.get(t.as_str()).copied()).collect())
        .collect();
    let total_positions: usize = sentences.iter().map(|s| s.len()).sum::<usize>() * cfg.epochs;
    let mut processed = 0usize;

    let sample_negative = |rng: &mut ChaCha8Rng, exclude: usize| -> Option<usize> {
        if vocab_size < 2 {
            return None;
        }
        for _ in 0..16 {
            let x = rng.random::<f64>() * total_weight;
            let idx = cumulative.partition_point(|&c| c < x).min(vocab_size - 1);
            if idx != exclude {
                return Some(idx);
            }
        }
        None
    };

    for _epoch in 0..cfg.epochs {
        for sentence in &sentences {
            for (t, &center) in sentence.iter().enumerate() {
                let progress = processed as f64 / total_positions.max(1) as f64;
                let lr = (cfg.learning_rate * (1.0 - progress)).max(cfg.learning_rate * 1e-4);
                processed += 1;

                let b = rng.random_range(1..=cfg.window);
                let lo = t.saturating_sub(b);
                let hi = (t + b).min(sentence.len() - 1);
                for c in lo..=hi {
                    if c == t {
                        continue;
                    }
                    let context = sentence[c];
                    let negatives: Vec<usize> = (0..cfg.negatives)
                        .filter_map(|_| sample_negative(&mut rng, context))
                        .collect();

                    let v_center: Vec<f64> = input.row(center).to_vec();
                    let u_context: Vec<f64> = output.row(context).to_vec();
                    let u_negs: Vec<Vec<f64>> =
                        negatives.iter().map(|&nid| output.row(nid).to_vec()).collect();

                    let (_loss, g_center, g_context, g_negs) =
                        sgns_loss_and_grads(&v_center, &u_context, &u_negs);

                    for j in 0..d {
                        input[(center, j)] -= lr * g_center[j];
                        output[(context, j)] -= lr * g_context[j];
                    }
                    for (k, &nid) in negatives.iter().enumerate() {
                        for j in 0..d {
                            output[(nid, j)] -= lr * g_negs[k][j];
                        }
                    }
                }
            }
        }
    }

    let vocabulary: Vec<String> = vocab.into_iter().map(|(t, _)| t).collect();
    Ok(EmbeddingTable::new(vocabulary, input, cfg.clone()))
}
