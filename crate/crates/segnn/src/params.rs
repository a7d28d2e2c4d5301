use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vulngraph_tensor::Matrix;

/// Architecture widths. The recurrent state width must be at least the
/// node feature width; features are zero-padded up to it.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SegnnConfig {
    pub state_dim: usize,
    pub feature_dim: usize,
    pub recurrence_steps: usize,
    pub gat_dims: Vec<usize>,
    pub dense_dim: usize,
    pub leaky_slope: f64,
}

impl Default for SegnnConfig {
    fn default() -> Self {
        SegnnConfig {
            state_dim: 200,
            feature_dim: 200,
            recurrence_steps: 3,
            gat_dims: vec![64, 64, 32],
            dense_dim: 16,
            leaky_slope: 0.2,
        }
    }
}

/// Gated graph recurrence weights, shared across all steps. Messages are
/// projected separately along forward and reversed edges; the update is a
/// GRU cell over the aggregated message.
#[derive(Debug, Clone, PartialEq)]
pub struct GgrnParams {
    pub w_fwd: Matrix,
    pub w_bwd: Matrix,
    pub b_agg: Matrix,
    pub w_r: Matrix,
    pub u_r: Matrix,
    pub b_r: Matrix,
    pub w_u: Matrix,
    pub u_u: Matrix,
    pub b_u: Matrix,
    pub w_c: Matrix,
    pub u_c: Matrix,
    pub b_c: Matrix,
}

/// One attention layer: a shared projection plus the two halves of the
/// scoring vector, so e_ij = leaky_relu(a_src . Wh_i + a_dst . Wh_j).
#[derive(Debug, Clone, PartialEq)]
pub struct GatLayerParams {
    pub w: Matrix,
    pub a_src: Matrix,
    pub a_dst: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegnnParams {
    pub config: SegnnConfig,
    pub ggrn: GgrnParams,
    pub gats: Vec<GatLayerParams>,
    pub dense_w: Matrix,
    pub dense_b: Matrix,
    pub head_w: Matrix,
    pub head_b: Matrix,
}

fn glorot(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-limit..limit))
}

impl SegnnParams {
    /// Glorot-uniform weights, zero biases, deterministic per seed.
    pub fn init(config: SegnnConfig, seed: u64) -> Self {
        assert!(
            config.feature_dim <= config.state_dim,
            "feature width {} exceeds state width {}",
            config.feature_dim,
            config.state_dim
        );
        assert!(!config.gat_dims.is_empty(), "need at least one attention layer");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = config.state_dim;
        let ggrn = GgrnParams {
            w_fwd: glorot(&mut rng, z, z),
            w_bwd: glorot(&mut rng, z, z),
            b_agg: Array2::zeros((1, z)),
            w_r: glorot(&mut rng, z, z),
            u_r: glorot(&mut rng, z, z),
            b_r: Array2::zeros((1, z)),
            w_u: glorot(&mut rng, z, z),
            u_u: glorot(&mut rng, z, z),
            b_u: Array2::zeros((1, z)),
            w_c: glorot(&mut rng, z, z),
            u_c: glorot(&mut rng, z, z),
            b_c: Array2::zeros((1, z)),
        };
        let mut gats = Vec::new();
        let mut prev = z;
        for &width in &config.gat_dims {
            gats.push(GatLayerParams {
                w: glorot(&mut rng, width, prev),
                a_src: glorot(&mut rng, width, 1),
                a_dst: glorot(&mut rng, width, 1),
            });
            prev = width;
        }
        let dense_w = glorot(&mut rng, config.dense_dim, prev);
        let dense_b = Array2::zeros((1, config.dense_dim));
        let head_w = glorot(&mut rng, 1, config.dense_dim);
        let head_b = Array2::zeros((1, 1));
        SegnnParams {
            config,
            ggrn,
            gats,
            dense_w,
            dense_b,
            head_w,
            head_b,
        }
    }

    /// Canonical parameter order shared by `params`, `params_mut`, the
    /// forward-pass leaves, and the optimizer state.
    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = [
            "ggrn.w_fwd",
            "ggrn.w_bwd",
            "ggrn.b_agg",
            "ggrn.w_r",
            "ggrn.u_r",
            "ggrn.b_r",
            "ggrn.w_u",
            "ggrn.u_u",
            "ggrn.b_u",
            "ggrn.w_c",
            "ggrn.u_c",
            "ggrn.b_c",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for i in 0..self.gats.len() {
            out.push(format!("gat{i}.w"));
            out.push(format!("gat{i}.a_src"));
            out.push(format!("gat{i}.a_dst"));
        }
        out.extend(["dense.w", "dense.b", "head.w", "head.b"].iter().map(|s| s.to_string()));
        out
    }

    pub fn params(&self) -> Vec<&Matrix> {
        let g = &self.ggrn;
        let mut out = vec![
            &g.w_fwd, &g.w_bwd, &g.b_agg, &g.w_r, &g.u_r, &g.b_r, &g.w_u, &g.u_u, &g.b_u,
            &g.w_c, &g.u_c, &g.b_c,
        ];
        for gat in &self.gats {
            out.push(&gat.w);
            out.push(&gat.a_src);
            out.push(&gat.a_dst);
        }
        out.push(&self.dense_w);
        out.push(&self.dense_b);
        out.push(&self.head_w);
        out.push(&self.head_b);
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Matrix> {
        let g = &mut self.ggrn;
        let mut out = vec![
            &mut g.w_fwd,
            &mut g.w_bwd,
            &mut g.b_agg,
            &mut g.w_r,
            &mut g.u_r,
            &mut g.b_r,
            &mut g.w_u,
            &mut g.u_u,
            &mut g.b_u,
            &mut g.w_c,
            &mut g.u_c,
            &mut g.b_c,
        ];
        for gat in &mut self.gats {
            out.push(&mut gat.w);
            out.push(&mut gat.a_src);
            out.push(&mut gat.a_dst);
        }
        out.push(&mut self.dense_w);
        out.push(&mut self.dense_b);
        out.push(&mut self.head_w);
        out.push(&mut self.head_b);
        out
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|m| m.len()).sum()
    }
}
