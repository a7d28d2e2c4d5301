use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vulngraph_data::{AttributedGraph, GraphMeta};
use vulngraph_segnn::{
    forward_logit, gat_layer, ggrn_aggregate, ggrn_forward, gru_update, init_state,
    model_forward, AdjacencyTensors, AdjacencyView, GatLayerParams, GatTensors, GgrnParams,
    GgrnTensors, SegnnConfig, SegnnParams,
};
use vulngraph_tensor::{numeric_gradient_check, Matrix, Tape};

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0))
}

fn zero_ggrn(z: usize) -> GgrnParams {
    GgrnParams {
        w_fwd: Array2::zeros((z, z)),
        w_bwd: Array2::zeros((z, z)),
        b_agg: Array2::zeros((1, z)),
        w_r: Array2::zeros((z, z)),
        u_r: Array2::zeros((z, z)),
        b_r: Array2::zeros((1, z)),
        w_u: Array2::zeros((z, z)),
        u_u: Array2::zeros((z, z)),
        b_u: Array2::zeros((1, z)),
        w_c: Array2::zeros((z, z)),
        u_c: Array2::zeros((z, z)),
        b_c: Array2::zeros((1, z)),
    }
}

fn small_config() -> SegnnConfig {
    SegnnConfig {
        state_dim: 8,
        feature_dim: 6,
        recurrence_steps: 2,
        gat_dims: vec![5, 4],
        dense_dim: 3,
        leaky_slope: 0.2,
    }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, feature_dim: usize) -> AttributedGraph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((v - 1, v));
    }
    for _ in 0..n {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !edges.contains(&(u, v)) {
            edges.push((u, v));
        }
    }
    AttributedGraph {
        n,
        edges,
        features: random_matrix(rng, n, feature_dim),
        label: 1,
        meta: GraphMeta::default(),
    }
}

#[test]
fn init_state_copies_features_and_pads_with_zeros() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let x = random_matrix(&mut rng, 4, 3);
    let mut tape = Tape::new();
    let h0 = init_state(&mut tape, &x, 7);
    let v = tape.value(h0);
    assert_eq!(v.dim(), (4, 7));
    for i in 0..4 {
        for j in 0..3 {
            assert_eq!(v[(i, j)].to_bits(), x[(i, j)].to_bits());
        }
        for j in 3..7 {
            assert_eq!(v[(i, j)], 0.0);
        }
    }
}

#[test]
#[should_panic(expected = "exceeds state width")]
fn init_state_rejects_features_wider_than_state() {
    let mut tape = Tape::new();
    init_state(&mut tape, &Array2::zeros((2, 5)), 4);
}

#[test]
fn zero_weight_gru_halves_the_state() {
    let z = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h0 = random_matrix(&mut rng, 3, z);
    let mut tape = Tape::new();
    let g = GgrnTensors::new(&mut tape, &zero_ggrn(z));
    let h = tape.constant(h0.clone());
    let a = tape.constant(Array2::zeros((3, z)));
    let h1 = gru_update(&mut tape, h, a, &g);
    // r = u = sigmoid(0) = 1/2, c = tanh(0) = 0, so h' = h/2 exactly
    for (got, want) in tape.value(h1).iter().zip(h0.iter()) {
        assert_eq!(got.to_bits(), (want * 0.5).to_bits());
    }
}

#[test]
fn saturated_update_gate_copies_the_state() {
    let z = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h0 = random_matrix(&mut rng, 3, z);
    let mut params = zero_ggrn(z);
    params.b_u = Array2::from_elem((1, z), -50.0);
    params.w_c = random_matrix(&mut rng, z, z);
    params.u_c = random_matrix(&mut rng, z, z);
    let mut tape = Tape::new();
    let g = GgrnTensors::new(&mut tape, &params);
    let h = tape.constant(h0.clone());
    let a = tape.constant(random_matrix(&mut rng, 3, z));
    let h1 = gru_update(&mut tape, h, a, &g);
    for (got, want) in tape.value(h1).iter().zip(h0.iter()) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn isolated_node_aggregates_only_the_bias() {
    let z = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut params = zero_ggrn(z);
    params.w_fwd = random_matrix(&mut rng, z, z);
    params.w_bwd = random_matrix(&mut rng, z, z);
    params.b_agg = random_matrix(&mut rng, 1, z);
    let mut tape = Tape::new();
    let g = GgrnTensors::new(&mut tape, &params);
    let adj = AdjacencyTensors::new(&mut tape, &AdjacencyView::new(1, &[]));
    let h = tape.constant(random_matrix(&mut rng, 1, z));
    let a = ggrn_aggregate(&mut tape, h, &adj, &g);
    for (got, want) in tape.value(a).iter().zip(params.b_agg.iter()) {
        assert_eq!(got.to_bits(), want.to_bits());
    }
}

#[test]
fn identity_forward_projection_routes_predecessor_state() {
    let z = 3;
    let mut params = zero_ggrn(z);
    params.w_fwd = Array2::eye(z);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h0 = random_matrix(&mut rng, 2, z);
    let mut tape = Tape::new();
    let g = GgrnTensors::new(&mut tape, &params);
    let adj = AdjacencyTensors::new(&mut tape, &AdjacencyView::new(2, &[(0, 1)]));
    let h = tape.constant(h0.clone());
    let a = ggrn_aggregate(&mut tape, h, &adj, &g);
    let v = tape.value(a);
    // node 1 receives node 0's state along the forward edge; node 0
    // receives nothing on the incoming side and w_bwd is zero
    for j in 0..z {
        assert_eq!(v[(0, j)], 0.0);
        assert_eq!(v[(1, j)].to_bits(), h0[(0, j)].to_bits());
    }
}

#[test]
fn zero_recurrence_steps_return_the_initial_state() {
    let z = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h0v = random_matrix(&mut rng, 3, z);
    let mut tape = Tape::new();
    let g = GgrnTensors::new(&mut tape, &zero_ggrn(z));
    let adj = AdjacencyTensors::new(&mut tape, &AdjacencyView::new(3, &[(0, 1), (1, 2)]));
    let h0 = tape.constant(h0v.clone());
    let h = ggrn_forward(&mut tape, h0, &adj, &g, 0);
    assert_eq!(h, h0);
}

#[test]
fn single_node_gat_is_elu_of_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let w = random_matrix(&mut rng, 3, 4);
    let params = GatLayerParams {
        w: w.clone(),
        a_src: random_matrix(&mut rng, 3, 1),
        a_dst: random_matrix(&mut rng, 3, 1),
    };
    let h0 = random_matrix(&mut rng, 1, 4);
    let mut tape = Tape::new();
    let gat = GatTensors::new(&mut tape, &params);
    let h = tape.constant(h0.clone());
    let out = gat_layer(&mut tape, h, &[true], &gat, 0.2);
    let wh = h0.dot(&w.t());
    for (got, pre) in tape.value(out).iter().zip(wh.iter()) {
        let want = if *pre > 0.0 { *pre } else { pre.exp() - 1.0 };
        assert!((got - want).abs() < 1e-14);
    }
}

#[test]
fn zero_scoring_vectors_give_uniform_neighborhood_attention() {
    // path 0 -> 1 -> 2: neighborhoods {0,1}, {0,1,2}, {1,2}
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = random_matrix(&mut rng, 3, 3);
    let params = GatLayerParams {
        w: w.clone(),
        a_src: Array2::zeros((3, 1)),
        a_dst: Array2::zeros((3, 1)),
    };
    let h0 = random_matrix(&mut rng, 3, 3);
    let view = AdjacencyView::new(3, &[(0, 1), (1, 2)]);
    let mut tape = Tape::new();
    let gat = GatTensors::new(&mut tape, &params);
    let h = tape.constant(h0.clone());
    let out = gat_layer(&mut tape, h, &view.mask, &gat, 0.2);

    let wh = h0.dot(&w.t());
    let hoods: [&[usize]; 3] = [&[0, 1], &[0, 1, 2], &[1, 2]];
    for (i, hood) in hoods.iter().enumerate() {
        for j in 0..3 {
            let mean: f64 =
                hood.iter().map(|&k| wh[(k, j)]).sum::<f64>() / hood.len() as f64;
            let want = if mean > 0.0 { mean } else { mean.exp() - 1.0 };
            let got = tape.value(out)[(i, j)];
            assert!((got - want).abs() < 1e-12, "node {i} col {j}: {got} vs {want}");
        }
    }
}

#[test]
fn logit_is_invariant_under_node_relabeling() {
    let config = small_config();
    let params = SegnnParams::init(config.clone(), 9);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..20 {
        let g = random_graph(&mut rng, 3 + trial % 8, config.feature_dim);
        let base = forward_logit(&params, &g);

        let mut perm: Vec<usize> = (0..g.n).collect();
        for i in (1..g.n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let mut features = Array2::zeros((g.n, config.feature_dim));
        for i in 0..g.n {
            for j in 0..config.feature_dim {
                features[(perm[i], j)] = g.features[(i, j)];
            }
        }
        let permuted = AttributedGraph {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect(),
            features,
            label: g.label,
            meta: g.meta.clone(),
        };
        let relabeled = forward_logit(&params, &permuted);
        assert!(
            (base - relabeled).abs() < 1e-9,
            "trial {trial}: {base} vs {relabeled}"
        );
    }
}

#[test]
fn full_model_gradient_matches_finite_differences() {
    let config = small_config();
    let base = SegnnParams::init(config.clone(), 11);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let graph = random_graph(&mut rng, 12, config.feature_dim);
    let y = 1.0;

    let assemble = |flat: &[Matrix]| {
        let mut p = base.clone();
        for (slot, m) in p.params_mut().into_iter().zip(flat) {
            *slot = m.clone();
        }
        p
    };
    let run = |flat: &[Matrix]| {
        let p = assemble(flat);
        let mut tape = Tape::new();
        let fwd = model_forward(&mut tape, &p, &graph);
        let loss = tape.bce_loss(fwd.logit, y);
        tape.scalar(loss)
    };

    let mut tape = Tape::new();
    let fwd = model_forward(&mut tape, &base, &graph);
    let loss = tape.bce_loss(fwd.logit, y);
    tape.backward(loss);
    let grads: Vec<Matrix> = fwd.param_ids.iter().map(|&id| tape.grad(id)).collect();

    let mut flat: Vec<Matrix> = base.params().into_iter().cloned().collect();
    let report = numeric_gradient_check(run, &mut flat, &grads, 1e-5, 64, 13);
    assert!(report.passes(1e-4), "max rel err {}", report.max_rel_err);
}

#[test]
fn every_parameter_receives_gradient() {
    let config = small_config();
    let params = SegnnParams::init(config.clone(), 14);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let graph = random_graph(&mut rng, 10, config.feature_dim);

    let mut tape = Tape::new();
    let fwd = model_forward(&mut tape, &params, &graph);
    let loss = tape.bce_loss(fwd.logit, 0.0);
    tape.backward(loss);
    for (name, id) in params.names().iter().zip(&fwd.param_ids) {
        let g = tape.grad(*id);
        assert!(
            g.iter().any(|v| *v != 0.0),
            "{name} received an all-zero gradient"
        );
    }
}

#[test]
fn init_is_seed_deterministic_with_zero_biases() {
    let a = SegnnParams::init(small_config(), 42);
    let b = SegnnParams::init(small_config(), 42);
    let c = SegnnParams::init(small_config(), 43);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.ggrn.b_agg.iter().all(|v| *v == 0.0));
    assert!(a.dense_b.iter().all(|v| *v == 0.0));
    assert!(a.head_b.iter().all(|v| *v == 0.0));
    // glorot bound for the widest matrix
    let limit = (6.0 / 16.0f64).sqrt();
    assert!(a.ggrn.w_fwd.iter().all(|v| v.abs() < limit));
    assert_eq!(a.names().len(), a.params().len());
}
