use ndarray::{Array2, Axis};

use crate::Matrix;

/// Handle to a tensor recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorId(usize);

/// Elementwise activation kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Sigmoid,
    Tanh,
    /// Slope applied to negative inputs; the derivative at 0 is the slope.
    LeakyRelu(f64),
    Elu,
}

impl Activation {
    fn apply(&self, x: f64) -> f64 {
        match *self {
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::LeakyRelu(slope) => {
                if x > 0.0 {
                    x
                } else {
                    slope * x
                }
            }
            Activation::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp_m1()
                }
            }
        }
    }

    /// Derivative expressed through input `x` and output `y`.
    fn derivative(&self, x: f64, y: f64) -> f64 {
        match *self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            Activation::LeakyRelu(slope) => {
                if x > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Activation::Elu => {
                if x > 0.0 {
                    1.0
                } else {
                    y + 1.0
                }
            }
        }
    }
}

enum Op {
    Leaf,
    MatMul(TensorId, TensorId),
    MatMulT(TensorId, TensorId),
    Add(TensorId, TensorId),
    Sub(TensorId, TensorId),
    Mul(TensorId, TensorId),
    /// A (n x m) plus a row vector (1 x m) broadcast over rows.
    AddRow(TensorId, TensorId),
    Scale(TensorId, f64),
    /// c - x, elementwise. The constant drops out of the gradient.
    ConstMinus(#[allow(dead_code)] f64, TensorId),
    Activation(TensorId, Activation),
    /// Row-wise softmax over unmasked entries; masked entries exactly 0.
    MaskedRowSoftmax(TensorId, Vec<bool>),
    /// Columnwise max over rows; gradient routed to the first argmax row.
    ReduceMaxRows(TensorId),
    /// e_ij = s_i + t_j from two n x 1 columns.
    OuterSum(TensorId, TensorId),
    SumAll(TensorId),
    /// Stable binary cross-entropy from a 1x1 logit against a fixed label.
    BceLoss(TensorId, f64),
}

struct Node {
    value: Matrix,
    grad: Option<Matrix>,
    requires_grad: bool,
    op: Op,
}

/// A record of tensor operations supporting one reverse pass.
///
/// A tape and its tensors form a single-owner unit; distinct tapes are
/// independent and may be used concurrently.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn value(&self, id: TensorId) -> &Matrix {
        &self.nodes[id.0].value
    }

    /// Gradient of the last `backward` call with respect to `id`.
    /// Zero matrix if the tensor never received a gradient.
    pub fn grad(&self, id: TensorId) -> Matrix {
        let node = &self.nodes[id.0];
        match &node.grad {
            Some(g) => g.clone(),
            None => Array2::zeros(node.value.dim()),
        }
    }

    pub fn scalar(&self, id: TensorId) -> f64 {
        let v = self.value(id);
        assert_eq!(v.dim(), (1, 1), "scalar() on a non 1x1 tensor");
        v[(0, 0)]
    }

    fn push(&mut self, value: Matrix, requires_grad: bool, op: Op) -> TensorId {
        assert!(
            value.iter().all(|v| v.is_finite()),
            "non-finite value produced on tape at node {}",
            self.nodes.len()
        );
        self.nodes.push(Node {
            value,
            grad: None,
            requires_grad,
            op,
        });
        TensorId(self.nodes.len() - 1)
    }

    fn needs_grad(&self, id: TensorId) -> bool {
        self.nodes[id.0].requires_grad
    }

    /// Register an input tensor. `requires_grad` marks it as a target for
    /// gradient accumulation.
    pub fn leaf(&mut self, value: Matrix, requires_grad: bool) -> TensorId {
        self.push(value, requires_grad, Op::Leaf)
    }

    pub fn constant(&mut self, value: Matrix) -> TensorId {
        self.leaf(value, false)
    }

    pub fn matmul(&mut self, a: TensorId, b: TensorId) -> TensorId {
        let (am, ak) = self.value(a).dim();
        let (bk, bn) = self.value(b).dim();
        assert_eq!(ak, bk, "matmul shape mismatch: {am}x{ak} . {bk}x{bn}");
        let value = self.value(a).dot(self.value(b));
        let rg = self.needs_grad(a) || self.needs_grad(b);
        self.push(value, rg, Op::MatMul(a, b))
    }

    /// a . b^T, so row-major weight matrices stored as (out, in) apply
    /// without materializing a transpose.
    pub fn matmul_transposed(&mut self, a: TensorId, b: TensorId) -> TensorId {
        let (am, ak) = self.value(a).dim();
        let (bn, bk) = self.value(b).dim();
        assert_eq!(
            ak, bk,
            "matmul_transposed shape mismatch: {am}x{ak} . ({bn}x{bk})^T"
        );
        let value = self.value(a).dot(&self.value(b).t());
        let rg = self.needs_grad(a) || self.needs_grad(b);
        self.push(value, rg, Op::MatMulT(a, b))
    }

    pub fn add(&mut self, a: TensorId, b: TensorId) -> TensorId {
        assert_eq!(self.value(a).dim(), self.value(b).dim(), "add shape mismatch");
        let value = self.value(a) + self.value(b);
        let rg = self.needs_grad(a) || self.needs_grad(b);
        self.push(value, rg, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: TensorId, b: TensorId) -> TensorId {
        assert_eq!(self.value(a).dim(), self.value(b).dim(), "sub shape mismatch");
        let value = self.value(a) - self.value(b);
        let rg = self.needs_grad(a) || self.needs_grad(b);
        self.push(value, rg, Op::Sub(a, b))
    }

    /// Elementwise (Hadamard) product.
    pub fn mul(&mut self, a: TensorId, b: TensorId) -> TensorId {
        assert_eq!(self.value(a).dim(), self.value(b).dim(), "mul shape mismatch");
        let value = self.value(a) * self.value(b);
        let rg = self.needs_grad(a) || self.needs_grad(b);
        self.push(value, rg, Op::Mul(a, b))
    }

    /// Broadcast-add a 1 x m row vector to every row of an n x m matrix.
    pub fn add_row(&mut self, a: TensorId, row: TensorId) -> TensorId {
        let (_, m) = self.value(a).dim();
        let (r1, rm) = self.value(row).dim();
        assert_eq!((r1, rm), (1, m), "add_row shape mismatch");
        let value = self.value(a) + &self.value(row).row(0);
        let rg = self.needs_grad(a) || self.needs_grad(row);
        self.push(value, rg, Op::AddRow(a, row))
    }

    pub fn scale(&mut self, a: TensorId, c: f64) -> TensorId {
        let value = self.value(a) * c;
        let rg = self.needs_grad(a);
        self.push(value, rg, Op::Scale(a, c))
    }

    /// c - x elementwise (used for gate complements).
    pub fn const_minus(&mut self, c: f64, a: TensorId) -> TensorId {
        let value = self.value(a).mapv(|v| c - v);
        let rg = self.needs_grad(a);
        self.push(value, rg, Op::ConstMinus(c, a))
    }

    pub fn activation(&mut self, a: TensorId, kind: Activation) -> TensorId {
        let value = self.value(a).mapv(|v| kind.apply(v));
        let rg = self.needs_grad(a);
        self.push(value, rg, Op::Activation(a, kind))
    }

    /// Per-row softmax over the unmasked entries of an n x n score matrix,
    /// with max-subtraction for stability. Masked entries are exactly 0.
    ///
    /// Panics if any row is fully masked.
    pub fn masked_row_softmax(&mut self, scores: TensorId, mask: &[bool]) -> TensorId {
        let (n, m) = self.value(scores).dim();
        assert_eq!(mask.len(), n * m, "mask length mismatch");
        let mut value = Array2::zeros((n, m));
        let s = self.value(scores);
        for i in 0..n {
            let row_mask = &mask[i * m..(i + 1) * m];
            let mut max = f64::NEG_INFINITY;
            for j in 0..m {
                if row_mask[j] && s[(i, j)] > max {
                    max = s[(i, j)];
                }
            }
            assert!(max.is_finite(), "masked_row_softmax: row {i} fully masked");
            let mut denom = 0.0;
            for j in 0..m {
                if row_mask[j] {
                    let e = (s[(i, j)] - max).exp();
                    value[(i, j)] = e;
                    denom += e;
                }
            }
            for j in 0..m {
                if row_mask[j] {
                    value[(i, j)] /= denom;
                }
            }
        }
        let rg = self.needs_grad(scores);
        self.push(value, rg, Op::MaskedRowSoftmax(scores, mask.to_vec()))
    }

    /// Columnwise maximum, producing a 1 x m row. On ties the gradient
    /// goes to the lowest row index.
    pub fn reduce_max_rows(&mut self, a: TensorId) -> TensorId {
        let (n, m) = self.value(a).dim();
        assert!(n >= 1, "reduce_max_rows on empty tensor");
        let v = self.value(a);
        let mut out = Array2::zeros((1, m));
        for j in 0..m {
            let mut best = v[(0, j)];
            for i in 1..n {
                if v[(i, j)] > best {
                    best = v[(i, j)];
                }
            }
            out[(0, j)] = best;
        }
        let rg = self.needs_grad(a);
        self.push(out, rg, Op::ReduceMaxRows(a))
    }

    /// From two n x 1 columns build the n x n matrix e_ij = s_i + t_j.
    pub fn outer_sum(&mut self, s: TensorId, t: TensorId) -> TensorId {
        let (n, sc) = self.value(s).dim();
        assert_eq!(sc, 1, "outer_sum expects column vectors");
        assert_eq!(self.value(t).dim(), (n, 1), "outer_sum shape mismatch");
        let sv = self.value(s);
        let tv = self.value(t);
        let mut value = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                value[(i, j)] = sv[(i, 0)] + tv[(j, 0)];
            }
        }
        let rg = self.needs_grad(s) || self.needs_grad(t);
        self.push(value, rg, Op::OuterSum(s, t))
    }

    pub fn sum_all(&mut self, a: TensorId) -> TensorId {
        let total = self.value(a).sum();
        let rg = self.needs_grad(a);
        self.push(Array2::from_elem((1, 1), total), rg, Op::SumAll(a))
    }

    /// Numerically stable binary cross-entropy of a 1x1 logit against a
    /// fixed label: max(x,0) - x*y + log(1+exp(-|x|)).
    pub fn bce_loss(&mut self, logit: TensorId, y: f64) -> TensorId {
        assert_eq!(self.value(logit).dim(), (1, 1), "bce_loss expects a scalar logit");
        let x = self.value(logit)[(0, 0)];
        let loss = x.max(0.0) - x * y + (-x.abs()).exp().ln_1p();
        let rg = self.needs_grad(logit);
        self.push(Array2::from_elem((1, 1), loss), rg, Op::BceLoss(logit, y))
    }

    fn accumulate(&mut self, id: TensorId, contribution: Matrix) {
        let node = &mut self.nodes[id.0];
        match &mut node.grad {
            Some(g) => *g += &contribution,
            None => node.grad = Some(contribution),
        }
    }

    /// Reverse pass from a recorded 1x1 scalar. Populates gradients on
    /// every tensor marked `requires_grad` that the scalar depends on.
    pub fn backward(&mut self, loss: TensorId) {
        assert_eq!(
            self.value(loss).dim(),
            (1, 1),
            "backward requires a scalar loss"
        );
        for node in &mut self.nodes {
            node.grad = None;
        }
        self.nodes[loss.0].grad = Some(Array2::ones((1, 1)));

        for idx in (0..=loss.0).rev() {
            if !self.nodes[idx].requires_grad {
                continue;
            }
            let grad = match self.nodes[idx].grad.take() {
                Some(g) => g,
                None => continue,
            };
            // put it back for the caller to read
            self.nodes[idx].grad = Some(grad.clone());

            match &self.nodes[idx].op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let (a, b) = (*a, *b);
                    if self.needs_grad(a) {
                        let da = grad.dot(&self.nodes[b.0].value.t());
                        self.accumulate(a, da);
                    }
                    if self.needs_grad(b) {
                        let db = self.nodes[a.0].value.t().dot(&grad);
                        self.accumulate(b, db);
                    }
                }
                Op::MatMulT(a, b) => {
                    let (a, b) = (*a, *b);
                    if self.needs_grad(a) {
                        let da = grad.dot(&self.nodes[b.0].value);
                        self.accumulate(a, da);
                    }
                    if self.needs_grad(b) {
                        let db = grad.t().dot(&self.nodes[a.0].value);
                        self.accumulate(b, db);
                    }
                }
                Op::Add(a, b) => {
                    let (a, b) = (*a, *b);
                    if self.needs_grad(a) {
                        self.accumulate(a, grad.clone());
                    }
                    if self.needs_grad(b) {
                        self.accumulate(b, grad);
                    }
                }
                Op::Sub(a, b) => {
                    let (a, b) = (*a, *b);
                    if self.needs_grad(a) {
                        self.accumulate(a, grad.clone());
                    }
                    if self.needs_grad(b) {
                        self.accumulate(b, -grad);
                    }
                }
                Op::Mul(a, b) => {
                    let (a, b) = (*a, *b);
                    if self.needs_grad(a) {
                        let da = &grad * &self.nodes[b.0].value;
                        self.accumulate(a, da);
                    }
                    if self.needs_grad(b) {
                        let db = &grad * &self.nodes[a.0].value;
                        self.accumulate(b, db);
                    }
                }
                Op::AddRow(a, row) => {
                    let (a, row) = (*a, *row);
                    if self.needs_grad(a) {
                        self.accumulate(a, grad.clone());
                    }
                    if self.needs_grad(row) {
                        let summed = grad.sum_axis(Axis(0)).insert_axis(Axis(0));
                        self.accumulate(row, summed);
                    }
                }
                Op::Scale(a, c) => {
                    let (a, c) = (*a, *c);
                    if self.needs_grad(a) {
                        self.accumulate(a, grad * c);
                    }
                }
                Op::ConstMinus(_, a) => {
                    let a = *a;
                    if self.needs_grad(a) {
                        self.accumulate(a, -grad);
                    }
                }
                Op::Activation(a, kind) => {
                    let (a, kind) = (*a, *kind);
                    if self.needs_grad(a) {
                        let x = &self.nodes[a.0].value;
                        let y = &self.nodes[idx].value;
                        let mut da = grad;
                        ndarray::Zip::from(&mut da).and(x).and(y).for_each(|g, &x, &y| {
                            *g *= kind.derivative(x, y);
                        });
                        self.accumulate(a, da);
                    }
                }
                Op::MaskedRowSoftmax(a, mask) => {
                    let a = *a;
                    if self.needs_grad(a) {
                        let alpha = &self.nodes[idx].value;
                        let (n, m) = alpha.dim();
                        let mut da = Array2::zeros((n, m));
                        for i in 0..n {
                            let mut dot = 0.0;
                            for j in 0..m {
                                dot += grad[(i, j)] * alpha[(i, j)];
                            }
                            for j in 0..m {
                                if mask[i * m + j] {
                                    da[(i, j)] = alpha[(i, j)] * (grad[(i, j)] - dot);
                                }
                            }
                        }
                        self.accumulate(a, da);
                    }
                }
                Op::ReduceMaxRows(a) => {
                    let a = *a;
                    if self.needs_grad(a) {
                        let v = &self.nodes[a.0].value;
                        let (n, m) = v.dim();
                        let mut da = Array2::zeros((n, m));
                        for j in 0..m {
                            let mut arg = 0;
                            let mut best = v[(0, j)];
                            for i in 1..n {
                                if v[(i, j)] > best {
                                    best = v[(i, j)];
                                    arg = i;
                                }
                            }
                            da[(arg, j)] = grad[(0, j)];
                        }
                        self.accumulate(a, da);
                    }
                }
                Op::OuterSum(s, t) => {
                    let (s, t) = (*s, *t);
                    let n = grad.nrows();
                    if self.needs_grad(s) {
                        let ds = grad
                            .sum_axis(Axis(1))
                            .insert_axis(Axis(1))
                            .into_shape_with_order((n, 1))
                            .unwrap();
                        self.accumulate(s, ds);
                    }
                    if self.needs_grad(t) {
                        let dt = grad
                            .sum_axis(Axis(0))
                            .insert_axis(Axis(1))
                            .into_shape_with_order((n, 1))
                            .unwrap();
                        self.accumulate(t, dt);
                    }
                }
                Op::SumAll(a) => {
                    let a = *a;
                    if self.needs_grad(a) {
                        let g = grad[(0, 0)];
                        let da = Array2::from_elem(self.nodes[a.0].value.dim(), g);
                        self.accumulate(a, da);
                    }
                }
                Op::BceLoss(logit, y) => {
                    let (logit, y) = (*logit, *y);
                    if self.needs_grad(logit) {
                        let x = self.nodes[logit.0].value[(0, 0)];
                        let sigma = 1.0 / (1.0 + (-x).exp());
                        let da = Array2::from_elem((1, 1), grad[(0, 0)] * (sigma - y));
                        self.accumulate(logit, da);
                    }
                }
            }
        }
    }
}
