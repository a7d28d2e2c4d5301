//! The graph classifier: a gated graph recurrence over CFG structure,
//! three attention layers, a dense transform, global max pooling, and a
//! scalar logit head. All math runs on the reverse-mode tape from
//! `vulngraph-tensor`.

mod adjacency;
mod forward;
mod params;

pub use adjacency::AdjacencyView;
pub use forward::{
    forward_logit, gat_layer, ggrn_aggregate, ggrn_forward, gru_update, init_state,
    model_forward, AdjacencyTensors, ForwardGraph, GatTensors, GgrnTensors, SegnnTensors,
};
pub use params::{GatLayerParams, GgrnParams, SegnnConfig, SegnnParams};
