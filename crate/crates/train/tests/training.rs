use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vulngraph_data::{AttributedGraph, Dataset, GraphMeta};
use vulngraph_segnn::{SegnnConfig, SegnnParams};
use vulngraph_tensor::{Matrix, Tape};
use vulngraph_train::{
    adam_step, batch_gradients, evaluate_model, load_checkpoint, resume_training,
    save_checkpoint, train_model, write_history_csv, AdamConfig, AdamState, Checkpoint,
    Metrics, TrainConfig, TrainError,
};

fn small_config() -> SegnnConfig {
    SegnnConfig {
        state_dim: 8,
        feature_dim: 6,
        recurrence_steps: 1,
        gat_dims: vec![4],
        dense_dim: 3,
        leaky_slope: 0.2,
    }
}

/// Tiny separable dataset: class 1 rows lean positive, class 0 negative.
fn toy_dataset(count: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::new();
    for k in 0..count {
        let label = (k % 2) as u8;
        let n = rng.random_range(3..6usize);
        let sign = if label == 1 { 1.0 } else { -1.0 };
        let features = Array2::from_shape_fn((n, 6), |_| {
            sign * rng.random_range(0.5..1.5)
        });
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        graphs.push(AttributedGraph {
            n,
            edges,
            features,
            label,
            meta: GraphMeta::default(),
        });
    }
    Dataset::new(graphs, "toy")
}

fn flatten(p: &SegnnParams) -> Vec<u64> {
    p.params()
        .iter()
        .flat_map(|m| m.iter().map(|v| v.to_bits()))
        .collect()
}

#[test]
fn bce_closed_forms_and_gradient() {
    let mut tape = Tape::new();
    let zero = tape.leaf(Array2::zeros((1, 1)), true);
    let loss = tape.bce_loss(zero, 1.0);
    assert!((tape.scalar(loss) - std::f64::consts::LN_2).abs() < 1e-15);
    tape.backward(loss);
    // d/dx = sigmoid(0) - 1 = -1/2
    assert!((tape.grad(zero)[(0, 0)] + 0.5).abs() < 1e-15);

    let mut tape = Tape::new();
    let big = tape.leaf(Array2::from_elem((1, 1), 50.0), true);
    let loss = tape.bce_loss(big, 1.0);
    assert!(tape.scalar(loss) < 1e-20, "saturated positive logit");

    let mut tape = Tape::new();
    let x = tape.leaf(Array2::from_elem((1, 1), 0.7), true);
    let loss = tape.bce_loss(x, 0.0);
    tape.backward(loss);
    let sigma = 1.0 / (1.0 + (-0.7f64).exp());
    assert!((tape.grad(x)[(0, 0)] - sigma).abs() < 1e-12);
}

#[test]
fn adam_first_step_is_signed_learning_rate() {
    let cfg = AdamConfig::default();
    let mut a = Array2::from_elem((1, 2), 1.0);
    let g = Array2::from_shape_vec((1, 2), vec![0.5, -3.0]).unwrap();
    let mut state = AdamState::zeros_like(&[&a]);
    adam_step(&mut [&mut a], &[g], &mut state, &cfg);
    assert!((a[(0, 0)] - (1.0 - 0.001)).abs() < 1e-7);
    assert!((a[(0, 1)] - (1.0 + 0.001)).abs() < 1e-7);
    assert_eq!(state.step, 1);
}

#[test]
fn adam_zero_gradient_is_a_no_op() {
    let cfg = AdamConfig::default();
    let mut a = Array2::from_elem((2, 2), 0.25);
    let before = a.clone();
    let mut state = AdamState::zeros_like(&[&a]);
    adam_step(&mut [&mut a], &[Array2::zeros((2, 2))], &mut state, &cfg);
    assert_eq!(a, before);
}

#[test]
fn adam_matches_the_reference_recurrence() {
    let cfg = AdamConfig {
        learning_rate: 0.1,
        ..AdamConfig::default()
    };
    let mut a = Array2::from_elem((1, 1), 2.0);
    let mut state = AdamState::zeros_like(&[&a]);
    let grads = [0.3, -0.8, 0.1];

    // reference scalar implementation
    let (mut theta, mut m, mut v) = (2.0f64, 0.0f64, 0.0f64);
    for (t, g) in grads.iter().enumerate() {
        m = 0.9 * m + (1.0 - 0.9) * g;
        v = 0.999 * v + (1.0 - 0.999) * g * g;
        let mh = m / (1.0 - 0.9f64.powi(t as i32 + 1));
        let vh = v / (1.0 - 0.999f64.powi(t as i32 + 1));
        theta -= 0.1 * mh / (vh.sqrt() + 1e-8);
    }
    for g in grads {
        adam_step(
            &mut [&mut a],
            &[Array2::from_elem((1, 1), g)],
            &mut state,
            &cfg,
        );
    }
    assert_eq!(a[(0, 0)].to_bits(), theta.to_bits());
}

#[test]
fn adam_updates_tensors_independently() {
    let cfg = AdamConfig::default();
    let mut a = Array2::from_elem((1, 1), 1.0);
    let mut b = Array2::from_elem((1, 1), 1.0);
    let mut state = AdamState::zeros_like(&[&a, &b]);
    adam_step(
        &mut [&mut a, &mut b],
        &[Array2::from_elem((1, 1), 1.0), Array2::zeros((1, 1))],
        &mut state,
        &cfg,
    );
    assert!(a[(0, 0)] < 1.0);
    assert_eq!(b[(0, 0)], 1.0);
}

#[test]
fn batch_gradient_equals_mean_of_per_graph_gradients() {
    let params = SegnnParams::init(small_config(), 1);
    let ds = toy_dataset(5, 2);
    let batch: Vec<&AttributedGraph> = ds.graphs.iter().collect();
    let (batch_loss, batch_grads) = batch_gradients(&params, &batch);

    let mut sum: Vec<Matrix> = params
        .params()
        .iter()
        .map(|p| Array2::zeros(p.dim()))
        .collect();
    let mut loss_sum = 0.0;
    for g in &ds.graphs {
        let (l, grads) = batch_gradients(&params, &[g]);
        loss_sum += l;
        for (acc, g) in sum.iter_mut().zip(&grads) {
            *acc += g;
        }
    }
    let scale = 1.0 / batch.len() as f64;
    assert_eq!((loss_sum * scale).to_bits(), batch_loss.to_bits());
    for (manual, from_batch) in sum.iter().zip(&batch_grads) {
        for (x, y) in manual.iter().zip(from_batch.iter()) {
            assert_eq!((x * scale).to_bits(), y.to_bits(), "accumulation must be exact");
        }
    }
}

#[test]
fn training_is_seed_deterministic() {
    let ds = toy_dataset(12, 3);
    let cfg = TrainConfig {
        batch_size: 4,
        epochs: 2,
        seed: 9,
        ..TrainConfig::default()
    };
    let run = || {
        train_model(SegnnParams::init(small_config(), 9), &ds, Some(&ds), &cfg).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(flatten(&a.params), flatten(&b.params));
    assert_eq!(a.history, b.history);
    assert_eq!(a.history.len(), 2);
    assert!(a.history.iter().all(|r| r.train_loss.is_finite()));
}

#[test]
fn resumed_run_matches_uninterrupted_run_bitwise() {
    let ds = toy_dataset(10, 4);
    let dir = tempfile::tempdir().unwrap();
    let full_cfg = TrainConfig {
        batch_size: 4,
        epochs: 5,
        seed: 21,
        checkpoint_dir: Some(dir.path().join("full")),
        ..TrainConfig::default()
    };
    let init = SegnnParams::init(small_config(), 21);
    let full = train_model(init.clone(), &ds, Some(&ds), &full_cfg).unwrap();

    let partial_cfg = TrainConfig {
        epochs: 3,
        checkpoint_dir: Some(dir.path().join("partial")),
        ..full_cfg.clone()
    };
    train_model(init, &ds, Some(&ds), &partial_cfg).unwrap();
    let ckpt = load_checkpoint(&dir.path().join("partial/epoch_0003.json")).unwrap();
    let resumed = resume_training(ckpt, &ds, Some(&ds), &full_cfg).unwrap();

    assert_eq!(flatten(&full.params), flatten(&resumed.params));
    assert_eq!(full.history, resumed.history);
}

#[test]
fn constant_zero_model_predicts_the_positive_class() {
    // zero weights give logit 0; sigmoid(0) = 0.5 thresholds to class 1
    let mut params = SegnnParams::init(small_config(), 0);
    for p in params.params_mut() {
        p.fill(0.0);
    }
    let ds = toy_dataset(10, 5);
    let m = evaluate_model(&params, &ds);
    assert_eq!(m.true_positive + m.false_positive, 10);
    assert_eq!(m.true_negative + m.false_negative, 0);
    let positives = ds.graphs.iter().filter(|g| g.label == 1).count();
    assert!((m.accuracy() - positives as f64 / 10.0).abs() < 1e-15);
}

#[test]
fn evaluation_is_order_invariant() {
    let params = SegnnParams::init(small_config(), 6);
    let ds = toy_dataset(9, 7);
    let mut reversed = ds.graphs.clone();
    reversed.reverse();
    let a = evaluate_model(&params, &ds);
    let b = evaluate_model(&params, &Dataset::new(reversed, "toy"));
    assert_eq!(a, b);
}

#[test]
fn metric_formulas_follow_the_confusion_counts() {
    let m = Metrics {
        true_positive: 6,
        false_positive: 2,
        true_negative: 7,
        false_negative: 5,
    };
    assert_eq!(m.total(), 20);
    assert!((m.accuracy() - 13.0 / 20.0).abs() < 1e-15);
    assert!((m.precision() - 6.0 / 8.0).abs() < 1e-15);
    assert!((m.recall() - 6.0 / 11.0).abs() < 1e-15);
    let f1 = 2.0 * (6.0 / 8.0) * (6.0 / 11.0) / ((6.0 / 8.0) + (6.0 / 11.0));
    assert!((m.f1() - f1).abs() < 1e-15);

    let perfect = Metrics {
        true_positive: 5,
        true_negative: 5,
        ..Metrics::default()
    };
    assert_eq!(perfect.accuracy(), 1.0);
    assert_eq!(perfect.f1(), 1.0);
}

#[test]
fn checkpoint_round_trips_bitwise() {
    let ds = toy_dataset(8, 8);
    let cfg = TrainConfig {
        batch_size: 4,
        epochs: 1,
        seed: 2,
        ..TrainConfig::default()
    };
    let out = train_model(SegnnParams::init(small_config(), 2), &ds, None, &cfg).unwrap();
    let ckpt = Checkpoint::capture(&out.params, &out.adam, 1, &out.history, "d".into());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ckpt.json");
    save_checkpoint(&ckpt, &path).unwrap();
    let (params, adam, epoch, history) = load_checkpoint(&path).unwrap().restore().unwrap();
    assert_eq!(flatten(&out.params), flatten(&params));
    assert_eq!(adam, out.adam);
    assert_eq!(epoch, 1);
    assert_eq!(history, out.history);
}

#[test]
fn corrupted_and_mismatched_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"version\": 1, \"truncated").unwrap();
    assert!(matches!(
        load_checkpoint(&path),
        Err(TrainError::Checkpoint { .. })
    ));

    let ds = toy_dataset(6, 9);
    let cfg = TrainConfig {
        batch_size: 3,
        epochs: 1,
        seed: 5,
        checkpoint_dir: Some(dir.path().to_path_buf()),
        ..TrainConfig::default()
    };
    train_model(SegnnParams::init(small_config(), 5), &ds, None, &cfg).unwrap();
    let ckpt = load_checkpoint(&dir.path().join("epoch_0001.json")).unwrap();

    let mut wrong_version = ckpt.clone();
    wrong_version.version = 99;
    let vpath = dir.path().join("v99.json");
    std::fs::write(&vpath, serde_json::to_string(&wrong_version).unwrap()).unwrap();
    assert!(matches!(
        load_checkpoint(&vpath),
        Err(TrainError::Version { found: 99, .. })
    ));

    let other_cfg = TrainConfig {
        learning_rate: 0.5,
        ..cfg
    };
    assert!(matches!(
        resume_training(ckpt, &ds, None, &other_cfg),
        Err(TrainError::Digest { .. })
    ));
}

#[test]
fn history_csv_has_the_expected_layout() {
    let history = vec![
        vulngraph_train::EpochRecord {
            epoch: 0,
            train_loss: 0.75,
            test_accuracy: Some(0.5),
        },
        vulngraph_train::EpochRecord {
            epoch: 1,
            train_loss: 0.25,
            test_accuracy: None,
        },
    ];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    write_history_csv(&history, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "epoch,train_loss,test_acc\n0,0.75,0.5\n1,0.25,\n");
}
