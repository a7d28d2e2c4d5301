use ndarray::Array2;
use vulngraph_frontend::Cfg;

use crate::corpus::tokenize_normalized;
use crate::table::EmbeddingTable;

/// n x 2d feature matrix: per-node block embedding concatenated with the
/// shared graph-level embedding.
#[derive(Debug, Clone)]
pub struct NodeFeatures {
    pub matrix: Array2<f64>,
}

/// Arithmetic mean of the vectors of in-vocabulary tokens. Empty or
/// all-out-of-vocabulary input yields the zero vector.
pub fn embed_token_sequence(table: &EmbeddingTable, tokens: &[String]) -> Vec<f64> {
    let d = table.dim();
    // aggregate multiplicities per vocabulary index so the sum order is
    // independent of the token order (exact permutation invariance)
    let mut multiplicity = vec![0usize; table.len()];
    let mut count = 0usize;
    for tok in tokens {
        if let Some(idx) = table.lookup(tok) {
            multiplicity[idx] += 1;
            count += 1;
        }
    }
    let mut sum = vec![0.0; d];
    for (idx, &m) in multiplicity.iter().enumerate() {
        if m == 0 {
            continue;
        }
        for (j, v) in table.vectors.row(idx).iter().enumerate() {
            sum[j] += m as f64 * v;
        }
    }
    if count > 0 {
        for v in &mut sum {
            *v /= count as f64;
        }
    }
    sum
}

/// Row v = [embed(block v's code tokens) || embed(all block tokens)].
/// Entry/exit blocks have empty code, so their first half is zero.
pub fn build_node_features(cfg: &Cfg, table: &EmbeddingTable) -> NodeFeatures {
    let d = table.dim();
    let n = cfg.blocks.len();

    let block_tokens: Vec<Vec<String>> = cfg
        .blocks
        .iter()
        .map(|b| tokenize_normalized(&b.code_text).unwrap_or_default())
        .collect();
    let graph_tokens: Vec<String> = block_tokens.iter().flatten().cloned().collect();
    let graph_vec = embed_token_sequence(table, &graph_tokens);

    let mut matrix = Array2::zeros((n, 2 * d));
    for (i, tokens) in block_tokens.iter().enumerate() {
        let node_vec = embed_token_sequence(table, tokens);
        for j in 0..d {
            matrix[(i, j)] = node_vec[j];
            matrix[(i, d + j)] = graph_vec[j];
        }
    }
    NodeFeatures { matrix }
}
