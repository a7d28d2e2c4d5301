//! Attributed graphs, dataset manifests, filtering/balancing/splitting,
//! JSON graph storage, and the synthetic labeled corpus generator.

mod dataset;
mod graph;
mod manifest;
mod synth;

pub use dataset::{balance_dataset, filter_min_size, split_dataset, Dataset, SplitSpec};
pub use graph::{load_graph, load_graph_file, save_graph, AttributedGraph, GraphMeta};
pub use manifest::{Manifest, ManifestRow};
pub use synth::{generate_synthetic_corpus, SyntheticCorpus, SyntheticFunction};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Frontend(#[from] vulngraph_frontend::FrontendError),
    #[error("failed to {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: String,
        source: std::io::Error,
    },
    #[error("bad graph file {path}: {message}")]
    Format { path: String, message: String },
    #[error("manifest row {row}: {message}")]
    Manifest { row: usize, message: String },
    #[error("dataset has a single class; balancing needs both labels")]
    SingleClass,
    #[error("{0}")]
    Invalid(String),
}
