use serde::{Deserialize, Serialize};
use vulngraph_data::{AttributedGraph, Dataset};
use vulngraph_segnn::{forward_logit, SegnnParams};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl Metrics {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_positive + self.true_negative) as f64 / self.total() as f64
    }

    pub fn precision(&self) -> f64 {
        let denom = self.true_positive + self.false_positive;
        if denom == 0 {
            0.0
        } else {
            self.true_positive as f64 / denom as f64
        }
    }

    pub fn recall(&self) -> f64 {
        let denom = self.true_positive + self.false_negative;
        if denom == 0 {
            0.0
        } else {
            self.true_positive as f64 / denom as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let r = self.recall();
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

/// Predicted label for one graph: sigmoid(logit) >= 0.5, i.e. logit >= 0,
/// maps to class 1.
pub fn predict(params: &SegnnParams, graph: &AttributedGraph) -> u8 {
    (forward_logit(params, graph) >= 0.0) as u8
}

/// Confusion counts over a dataset. Order-invariant: each graph is scored
/// independently on its own tape.
pub fn evaluate_model(params: &SegnnParams, ds: &Dataset) -> Metrics {
    assert!(!ds.is_empty(), "evaluation set is empty");
    let mut m = Metrics::default();
    for g in &ds.graphs {
        match (g.label, predict(params, g)) {
            (1, 1) => m.true_positive += 1,
            (0, 1) => m.false_positive += 1,
            (0, 0) => m.true_negative += 1,
            (1, 0) => m.false_negative += 1,
            _ => unreachable!("labels are validated to 0/1"),
        }
    }
    m
}
