//! Token corpus construction, skip-gram word embeddings with negative
//! sampling, and the concatenated node+graph feature matrices fed to the
//! model.

mod corpus;
mod features;
mod skipgram;
mod table;

pub use corpus::{build_corpus, normalize_token, Corpus};
pub use features::{build_node_features, embed_token_sequence, NodeFeatures};
pub use skipgram::{sgns_loss_and_grads, train_skipgram, EmbedConfig};
pub use table::EmbeddingTable;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("lexical error in function '{function}': {source}")]
    Lex {
        function: String,
        source: vulngraph_frontend::FrontendError,
    },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("vocabulary is empty after min_count filtering")]
    EmptyVocabulary,
    #[error("failed to {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: String,
        source: std::io::Error,
    },
    #[error("bad embedding table format: {0}")]
    Format(String),
}
