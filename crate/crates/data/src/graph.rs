use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use vulngraph_embed::{build_node_features, EmbeddingTable};
use vulngraph_frontend::parse_dot;

use crate::DataError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct GraphMeta {
    pub function_name: String,
    /// Origin record from the manifest (cve id, template name, ...).
    pub origin: String,
}

/// A CFG reduced to structure plus features: node count, directed edge
/// list, n x F feature matrix, and a binary label (1 = vulnerable).
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub features: Array2<f64>,
    pub label: u8,
    pub meta: GraphMeta,
}

impl AttributedGraph {
    pub fn feature_width(&self) -> usize {
        self.features.ncols()
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.features.nrows() != self.n {
            return Err(DataError::Invalid(format!(
                "feature rows {} != node count {}",
                self.features.nrows(),
                self.n
            )));
        }
        for &(s, d) in &self.edges {
            if s >= self.n || d >= self.n {
                return Err(DataError::Invalid(format!(
                    "edge ({s}, {d}) out of range for {} nodes",
                    self.n
                )));
            }
        }
        if !self.features.iter().all(|v| v.is_finite()) {
            return Err(DataError::Invalid("non-finite feature entry".into()));
        }
        if self.label > 1 {
            return Err(DataError::Invalid(format!("label {} not in {{0,1}}", self.label)));
        }
        Ok(())
    }
}

/// Build an attributed graph from DOT text and a trained embedding table.
pub fn load_graph(
    dot_text: &str,
    table: &EmbeddingTable,
    label: u8,
    origin: &str,
) -> Result<AttributedGraph, DataError> {
    let cfg = parse_dot(dot_text)?;
    let features = build_node_features(&cfg, table).matrix;
    let graph = AttributedGraph {
        n: cfg.blocks.len(),
        edges: cfg.edges,
        features,
        label,
        meta: GraphMeta {
            function_name: cfg.function_name,
            origin: origin.to_string(),
        },
    };
    graph.validate()?;
    Ok(graph)
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// Row-major n x f; serde_json emits f64 in shortest round-trip
    /// decimal form, so the store is lossless.
    features: Vec<Vec<f64>>,
    label: u8,
    meta: GraphMeta,
}

pub fn save_graph(graph: &AttributedGraph, path: &Path) -> Result<(), DataError> {
    let doc = GraphDoc {
        n: graph.n,
        edges: graph.edges.clone(),
        features: graph.features.outer_iter().map(|r| r.to_vec()).collect(),
        label: graph.label,
        meta: graph.meta.clone(),
    };
    let json = serde_json::to_string(&doc).expect("graph serialization cannot fail");
    std::fs::write(path, json).map_err(|source| DataError::Io {
        action: "write",
        path: path.display().to_string(),
        source,
    })
}

pub fn load_graph_file(path: &Path) -> Result<AttributedGraph, DataError> {
    let json = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        action: "read",
        path: path.display().to_string(),
        source,
    })?;
    let doc: GraphDoc = serde_json::from_str(&json).map_err(|e| DataError::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let f = doc.features.first().map(|r| r.len()).unwrap_or(0);
    if doc.features.len() != doc.n || doc.features.iter().any(|r| r.len() != f) {
        return Err(DataError::Format {
            path: path.display().to_string(),
            message: "feature matrix shape mismatch".into(),
        });
    }
    let mut features = Array2::zeros((doc.n, f));
    for (i, row) in doc.features.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            features[(i, j)] = *v;
        }
    }
    let graph = AttributedGraph {
        n: doc.n,
        edges: doc.edges,
        features,
        label: doc.label,
        meta: doc.meta,
    };
    graph.validate().map_err(|e| DataError::Format {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(graph)
}
