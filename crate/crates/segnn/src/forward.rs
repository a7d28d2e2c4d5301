use ndarray::Array2;
use vulngraph_data::AttributedGraph;
use vulngraph_tensor::{Activation, Matrix, Tape, TensorId};

use crate::adjacency::AdjacencyView;
use crate::params::{GatLayerParams, GgrnParams, SegnnParams};

#[derive(Debug, Clone, Copy)]
pub struct GgrnTensors {
    pub w_fwd: TensorId,
    pub w_bwd: TensorId,
    pub b_agg: TensorId,
    pub w_r: TensorId,
    pub u_r: TensorId,
    pub b_r: TensorId,
    pub w_u: TensorId,
    pub u_u: TensorId,
    pub b_u: TensorId,
    pub w_c: TensorId,
    pub u_c: TensorId,
    pub b_c: TensorId,
}

impl GgrnTensors {
    pub fn new(tape: &mut Tape, p: &GgrnParams) -> Self {
        GgrnTensors {
            w_fwd: tape.leaf(p.w_fwd.clone(), true),
            w_bwd: tape.leaf(p.w_bwd.clone(), true),
            b_agg: tape.leaf(p.b_agg.clone(), true),
            w_r: tape.leaf(p.w_r.clone(), true),
            u_r: tape.leaf(p.u_r.clone(), true),
            b_r: tape.leaf(p.b_r.clone(), true),
            w_u: tape.leaf(p.w_u.clone(), true),
            u_u: tape.leaf(p.u_u.clone(), true),
            b_u: tape.leaf(p.b_u.clone(), true),
            w_c: tape.leaf(p.w_c.clone(), true),
            u_c: tape.leaf(p.u_c.clone(), true),
            b_c: tape.leaf(p.b_c.clone(), true),
        }
    }

    fn ids(&self) -> [TensorId; 12] {
        [
            self.w_fwd, self.w_bwd, self.b_agg, self.w_r, self.u_r, self.b_r, self.w_u,
            self.u_u, self.b_u, self.w_c, self.u_c, self.b_c,
        ]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GatTensors {
    pub w: TensorId,
    pub a_src: TensorId,
    pub a_dst: TensorId,
}

impl GatTensors {
    pub fn new(tape: &mut Tape, p: &GatLayerParams) -> Self {
        GatTensors {
            w: tape.leaf(p.w.clone(), true),
            a_src: tape.leaf(p.a_src.clone(), true),
            a_dst: tape.leaf(p.a_dst.clone(), true),
        }
    }
}

/// Adjacency operators registered as constants: graph structure is data,
/// not a learnable quantity.
#[derive(Debug, Clone)]
pub struct AdjacencyTensors {
    pub a_in: TensorId,
    pub a_out: TensorId,
    pub mask: Vec<bool>,
}

impl AdjacencyTensors {
    pub fn new(tape: &mut Tape, view: &AdjacencyView) -> Self {
        AdjacencyTensors {
            a_in: tape.constant(view.a_in.clone()),
            a_out: tape.constant(view.a_out.clone()),
            mask: view.mask.clone(),
        }
    }
}

/// All model weights registered on one tape. `param_ids` follows the
/// canonical order of `SegnnParams::names`.
pub struct SegnnTensors {
    pub ggrn: GgrnTensors,
    pub gats: Vec<GatTensors>,
    pub dense_w: TensorId,
    pub dense_b: TensorId,
    pub head_w: TensorId,
    pub head_b: TensorId,
}

impl SegnnTensors {
    pub fn new(tape: &mut Tape, p: &SegnnParams) -> Self {
        let ggrn = GgrnTensors::new(tape, &p.ggrn);
        let gats = p.gats.iter().map(|g| GatTensors::new(tape, g)).collect();
        SegnnTensors {
            ggrn,
            gats,
            dense_w: tape.leaf(p.dense_w.clone(), true),
            dense_b: tape.leaf(p.dense_b.clone(), true),
            head_w: tape.leaf(p.head_w.clone(), true),
            head_b: tape.leaf(p.head_b.clone(), true),
        }
    }

    pub fn param_ids(&self) -> Vec<TensorId> {
        let mut out: Vec<TensorId> = self.ggrn.ids().to_vec();
        for g in &self.gats {
            out.push(g.w);
            out.push(g.a_src);
            out.push(g.a_dst);
        }
        out.extend([self.dense_w, self.dense_b, self.head_w, self.head_b]);
        out
    }
}

/// Initial recurrent state: node features copied into the leading columns
/// and zeros in the remainder. Registered as a constant; gradients stop at
/// the state, not the raw features.
pub fn init_state(tape: &mut Tape, features: &Matrix, state_dim: usize) -> TensorId {
    let (n, f) = features.dim();
    assert!(
        f <= state_dim,
        "feature width {f} exceeds state width {state_dim}"
    );
    let mut h0 = Array2::zeros((n, state_dim));
    h0.slice_mut(ndarray::s![.., ..f]).assign(features);
    tape.constant(h0)
}

/// Message aggregation a_v = sum_in W_fwd h_u + sum_out W_bwd h_w + b.
pub fn ggrn_aggregate(
    tape: &mut Tape,
    h: TensorId,
    adj: &AdjacencyTensors,
    g: &GgrnTensors,
) -> TensorId {
    let w_fwd_t = tape.matmul_transposed(h, g.w_fwd);
    let fwd = tape.matmul(adj.a_in, w_fwd_t);
    let w_bwd_t = tape.matmul_transposed(h, g.w_bwd);
    let bwd = tape.matmul(adj.a_out, w_bwd_t);
    let sum = tape.add(fwd, bwd);
    tape.add_row(sum, g.b_agg)
}

/// GRU cell over the aggregated message `a` and the previous state `h`.
pub fn gru_update(tape: &mut Tape, h: TensorId, a: TensorId, g: &GgrnTensors) -> TensorId {
    let gate = |tape: &mut Tape, w: TensorId, u: TensorId, b: TensorId, hh: TensorId| {
        let aw = tape.matmul_transposed(a, w);
        let hu = tape.matmul_transposed(hh, u);
        let s = tape.add(aw, hu);
        tape.add_row(s, b)
    };
    let r_pre = gate(tape, g.w_r, g.u_r, g.b_r, h);
    let r = tape.activation(r_pre, Activation::Sigmoid);
    let u_pre = gate(tape, g.w_u, g.u_u, g.b_u, h);
    let u = tape.activation(u_pre, Activation::Sigmoid);
    let rh = tape.mul(r, h);
    let c_pre = gate(tape, g.w_c, g.u_c, g.b_c, rh);
    let c = tape.activation(c_pre, Activation::Tanh);
    let keep = tape.const_minus(1.0, u);
    let kept = tape.mul(keep, h);
    let new = tape.mul(u, c);
    tape.add(kept, new)
}

pub fn ggrn_forward(
    tape: &mut Tape,
    h0: TensorId,
    adj: &AdjacencyTensors,
    g: &GgrnTensors,
    steps: usize,
) -> TensorId {
    let mut h = h0;
    for _ in 0..steps {
        let a = ggrn_aggregate(tape, h, adj, g);
        h = gru_update(tape, h, a, g);
    }
    h
}

/// One attention layer: project, score every neighbor pair, normalize
/// over the masked neighborhood, aggregate, then elu.
pub fn gat_layer(
    tape: &mut Tape,
    h: TensorId,
    mask: &[bool],
    gat: &GatTensors,
    slope: f64,
) -> TensorId {
    let wh = tape.matmul_transposed(h, gat.w);
    let s = tape.matmul(wh, gat.a_src);
    let t = tape.matmul(wh, gat.a_dst);
    let scores = tape.outer_sum(s, t);
    let e = tape.activation(scores, Activation::LeakyRelu(slope));
    let alpha = tape.masked_row_softmax(e, mask);
    let mixed = tape.matmul(alpha, wh);
    tape.activation(mixed, Activation::Elu)
}

pub struct ForwardGraph {
    pub logit: TensorId,
    pub pooled: TensorId,
    pub param_ids: Vec<TensorId>,
}

/// Full forward pass for one graph, returning the scalar logit.
pub fn model_forward(tape: &mut Tape, params: &SegnnParams, graph: &AttributedGraph) -> ForwardGraph {
    assert_eq!(
        graph.features.ncols(),
        params.config.feature_dim,
        "graph feature width does not match the model"
    );
    let tensors = SegnnTensors::new(tape, params);
    let param_ids = tensors.param_ids();
    let view = AdjacencyView::new(graph.n, &graph.edges);
    let adj = AdjacencyTensors::new(tape, &view);

    let h0 = init_state(tape, &graph.features, params.config.state_dim);
    let mut h = ggrn_forward(tape, h0, &adj, &tensors.ggrn, params.config.recurrence_steps);
    for gat in &tensors.gats {
        h = gat_layer(tape, h, &adj.mask, gat, params.config.leaky_slope);
    }
    let dense = tape.matmul_transposed(h, tensors.dense_w);
    let dense = tape.add_row(dense, tensors.dense_b);
    let dense = tape.activation(dense, Activation::Elu);
    let pooled = tape.reduce_max_rows(dense);
    let head = tape.matmul_transposed(pooled, tensors.head_w);
    let logit = tape.add_row(head, tensors.head_b);
    ForwardGraph {
        logit,
        pooled,
        param_ids,
    }
}

/// Inference-only logit on a scratch tape.
pub fn forward_logit(params: &SegnnParams, graph: &AttributedGraph) -> f64 {
    let mut tape = Tape::new();
    let fwd = model_forward(&mut tape, params, graph);
    tape.scalar(fwd.logit)
}
