use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::AttributedGraph;
use crate::DataError;

/// An ordered collection of attributed graphs. Operations never mutate
/// graphs, only select and reorder them.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub graphs: Vec<AttributedGraph>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(graphs: Vec<AttributedGraph>, provenance: impl Into<String>) -> Self {
        Dataset {
            graphs,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.graphs.iter().filter(|g| g.label == 1).count();
        (pos, self.len() - pos)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

/// Keep exactly the graphs with `n >= min_nodes`, preserving order.
pub fn filter_min_size(ds: &Dataset, min_nodes: usize) -> Dataset {
    Dataset {
        graphs: ds
            .graphs
            .iter()
            .filter(|g| g.n >= min_nodes)
            .cloned()
            .collect(),
        provenance: ds.provenance.clone(),
    }
}

/// Uniformly downsample the majority class (without replacement) to the
/// minority count. Deterministic per seed; relative order of the kept
/// graphs is preserved.
pub fn balance_dataset(ds: &Dataset, seed: u64) -> Result<Dataset, DataError> {
    let (pos, neg) = ds.class_counts();
    if pos == 0 || neg == 0 {
        return Err(DataError::SingleClass);
    }
    let (majority_label, minority) = if pos > neg { (1u8, neg) } else { (0u8, pos) };
    let majority_indices: Vec<usize> = ds
        .graphs
        .iter()
        .enumerate()
        .filter(|(_, g)| g.label == majority_label)
        .map(|(i, _)| i)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = majority_indices;
    chosen.shuffle(&mut rng);
    chosen.truncate(minority);
    let keep: std::collections::HashSet<usize> = chosen.into_iter().collect();

    let graphs: Vec<AttributedGraph> = ds
        .graphs
        .iter()
        .enumerate()
        .filter(|(i, g)| g.label != majority_label || keep.contains(i))
        .map(|(_, g)| g.clone())
        .collect();
    Ok(Dataset {
        graphs,
        provenance: ds.provenance.clone(),
    })
}

/// Seeded shuffle then partition: ceil(fraction * n) train graphs, the
/// rest test. Disjoint; union equals the input.
pub fn split_dataset(ds: &Dataset, spec: &SplitSpec) -> (Dataset, Dataset) {
    assert!(
        spec.train_fraction > 0.0 && spec.train_fraction < 1.0,
        "train fraction must be in (0, 1)"
    );
    let mut indices: Vec<usize> = (0..ds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    indices.shuffle(&mut rng);
    let train_count = (spec.train_fraction * ds.len() as f64).ceil() as usize;
    let train: Vec<AttributedGraph> = indices[..train_count]
        .iter()
        .map(|&i| ds.graphs[i].clone())
        .collect();
    let test: Vec<AttributedGraph> = indices[train_count..]
        .iter()
        .map(|&i| ds.graphs[i].clone())
        .collect();
    (
        Dataset::new(train, format!("{} [train]", ds.provenance)),
        Dataset::new(test, format!("{} [test]", ds.provenance)),
    )
}
