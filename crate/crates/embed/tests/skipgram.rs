use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vulngraph_embed::{
    build_corpus, build_node_features, embed_token_sequence, sgns_loss_and_grads, train_skipgram,
    Corpus, EmbedConfig, EmbedError,
};
use vulngraph_frontend::{build_cfg, parse_function, tokenize};

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb).max(1e-300)
}

fn raw_corpus(sentences: &[&[&str]]) -> Corpus {
    let mut corpus = Corpus::default();
    for s in sentences {
        let sentence: Vec<String> = s.iter().map(|t| t.to_string()).collect();
        for t in &sentence {
            *corpus.token_counts.entry(t.clone()).or_insert(0) += 1;
        }
        corpus.sentences.push(sentence);
    }
    corpus
}

#[test]
fn sgns_gradient_matches_finite_differences() {
    let d = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let gen = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..d).map(|_| rng.random_range(-0.8..0.8)).collect()
    };
    let v = gen(&mut rng);
    let u = gen(&mut rng);
    let negs: Vec<Vec<f64>> = (0..3).map(|_| gen(&mut rng)).collect();

    let (_, gv, gu, gn) = sgns_loss_and_grads(&v, &u, &negs);

    let h = 1e-6;
    let loss_at = |v: &[f64], u: &[f64], negs: &[Vec<f64>]| sgns_loss_and_grads(v, u, negs).0;
    let rel = |a: f64, n: f64| (a - n).abs() / 1.0_f64.max(a.abs()).max(n.abs());

    for j in 0..d {
        let mut vp = v.clone();
        let mut vm = v.clone();
        vp[j] += h;
        vm[j] -= h;
        let num = (loss_at(&vp, &u, &negs) - loss_at(&vm, &u, &negs)) / (2.0 * h);
        assert!(rel(gv[j], num) < 1e-5, "center[{j}]: {} vs {num}", gv[j]);

        let mut up = u.clone();
        let mut um = u.clone();
        up[j] += h;
        um[j] -= h;
        let num = (loss_at(&v, &up, &negs) - loss_at(&v, &um, &negs)) / (2.0 * h);
        assert!(rel(gu[j], num) < 1e-5, "context[{j}]: {} vs {num}", gu[j]);

        for k in 0..negs.len() {
            let mut np = negs.clone();
            let mut nm = negs.clone();
            np[k][j] += h;
            nm[k][j] -= h;
            let num = (loss_at(&v, &u, &np) - loss_at(&v, &u, &nm)) / (2.0 * h);
            assert!(rel(gn[k][j], num) < 1e-5, "neg[{k}][{j}]: {} vs {num}", gn[k][j]);
        }
    }
}

/// p and q co-occur in every window; r appears only far from p.
/// Statistical oracle: the cosine separation must hold for >= 4 of 5
/// seeds.
#[test]
fn cooccurring_tokens_end_up_closer() {
    let mut sentences: Vec<&[&str]> = Vec::new();
    for _ in 0..60 {
        sentences.push(&["p", "q", "p", "q", "p", "q"]);
        sentences.push(&["r", "s", "r", "s", "r", "s"]);
    }
    let corpus = raw_corpus(&sentences);
    let mut hits = 0;
    for seed in 0..5 {
        let cfg = EmbedConfig {
            dim: 16,
            window: 2,
            epochs: 10,
            seed,
            ..EmbedConfig::default()
        };
        let table = train_skipgram(&corpus, &cfg).unwrap();
        let vec_of = |t: &str| table.vectors.row(table.lookup(t).unwrap()).to_vec();
        let (p, q, r) = (vec_of("p"), vec_of("q"), vec_of("r"));
        if cosine(&p, &q) > cosine(&p, &r) {
            hits += 1;
        }
    }
    assert!(hits >= 4, "cosine separation held for only {hits}/5 seeds");
}

#[test]
fn minimal_corpus_trains() {
    let corpus = raw_corpus(&[&["a", "b"]]);
    let cfg = EmbedConfig {
        dim: 4,
        window: 1,
        epochs: 1,
        ..EmbedConfig::default()
    };
    let table = train_skipgram(&corpus, &cfg).unwrap();
    assert_eq!(table.len(), 2);
    assert_eq!(table.dim(), 4);
}

#[test]
fn same_seed_is_bitwise_identical() {
    let corpus = build_corpus(&[
        ("f".into(), "int f(int a){if(a){a=1;}return a;}".into()),
        ("g".into(), "int g(int b){while(b){b=b-1;}return b;}".into()),
    ])
    .unwrap();
    let cfg = EmbedConfig {
        dim: 12,
        epochs: 3,
        seed: 9,
        ..EmbedConfig::default()
    };
    let t1 = train_skipgram(&corpus, &cfg).unwrap();
    let t2 = train_skipgram(&corpus, &cfg).unwrap();
    assert_eq!(t1.vocabulary, t2.vocabulary);
    assert_eq!(t1.vectors, t2.vectors);
    for (a, b) in t1.vectors.iter().zip(t2.vectors.iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn empty_corpus_and_vocab_errors() {
    let cfg = EmbedConfig::default();
    assert!(matches!(
        train_skipgram(&Corpus::default(), &cfg),
        Err(EmbedError::EmptyCorpus)
    ));
    let corpus = raw_corpus(&[&["a", "b"]]);
    let cfg = EmbedConfig {
        min_count: 10,
        ..EmbedConfig::default()
    };
    assert!(matches!(
        train_skipgram(&corpus, &cfg),
        Err(EmbedError::EmptyVocabulary)
    ));
}

#[test]
fn embedding_norms_stay_bounded() {
    let corpus = build_corpus(&[
        ("f".into(), "int f(int a){if(a>0){a=a+1;}else{a=a-1;}return a;}".into()),
        ("g".into(), "int g(int n){int s=0;while(n>0){s=s+n;n=n-1;}return s;}".into()),
    ])
    .unwrap();
    let cfg = EmbedConfig {
        dim: 20,
        epochs: 20,
        ..EmbedConfig::default()
    };
    let table = train_skipgram(&corpus, &cfg).unwrap();
    let max = table.vectors.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max < 100.0, "embedding entries diverged: max |entry| = {max}");
}

#[test]
fn table_round_trips_through_disk() {
    let corpus = raw_corpus(&[&["a", "b", "c", "a", "b"]]);
    let cfg = EmbedConfig {
        dim: 6,
        epochs: 2,
        ..EmbedConfig::default()
    };
    let table = train_skipgram(&corpus, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.txt");
    table.save(&path).unwrap();
    let loaded = vulngraph_embed::EmbeddingTable::load(&path).unwrap();
    assert_eq!(loaded.vocabulary, table.vocabulary);
    for (a, b) in loaded.vectors.iter().zip(table.vectors.iter()) {
        assert_eq!(a.to_bits(), b.to_bits(), "lossy float round trip");
    }
    assert_eq!(loaded.config.seed, table.config.seed);
}

#[test]
fn embed_sequence_mean_and_edge_cases() {
    let corpus = raw_corpus(&[&["a", "b", "a", "b"]]);
    let cfg = EmbedConfig {
        dim: 5,
        epochs: 1,
        window: 1,
        ..EmbedConfig::default()
    };
    let table = train_skipgram(&corpus, &cfg).unwrap();
    let va = table.vectors.row(table.lookup("a").unwrap()).to_vec();
    let vb = table.vectors.row(table.lookup("b").unwrap()).to_vec();

    // all tokens equal one vocab word -> that vector (exact for a
    // power-of-two count, within one ulp otherwise)
    let e = embed_token_sequence(&table, &["a".into(), "a".into()]);
    assert_eq!(e, va);
    let e = embed_token_sequence(&table, &["a".into(), "a".into(), "a".into()]);
    for j in 0..5 {
        assert!((e[j] - va[j]).abs() <= va[j].abs() * 1e-15);
    }

    // empty -> zero vector of length d
    assert_eq!(embed_token_sequence(&table, &[]), vec![0.0; 5]);

    // two in-vocab tokens -> elementwise mean
    let e = embed_token_sequence(&table, &["a".into(), "b".into()]);
    for j in 0..5 {
        assert!((e[j] - (va[j] + vb[j]) / 2.0).abs() < 1e-15);
    }

    // permutation invariance over the token multiset
    let fwd = embed_token_sequence(&table, &["a".into(), "b".into(), "a".into()]);
    let rev = embed_token_sequence(&table, &["a".into(), "a".into(), "b".into()]);
    assert_eq!(fwd, rev);

    // out-of-vocabulary only -> zero vector
    assert_eq!(embed_token_sequence(&table, &["zzz".into()]), vec![0.0; 5]);
}

#[test]
fn node_features_shape_and_structure() {
    let src = "int f(int a){if(a){a=1;}else{a=2;}return a;}";
    let ast = parse_function(&tokenize(src).unwrap(), src).unwrap();
    let cfg = build_cfg(&ast).cfg;
    let corpus = build_corpus(&[("f".into(), src.into())]).unwrap();
    let ecfg = EmbedConfig {
        dim: 7,
        epochs: 2,
        ..EmbedConfig::default()
    };
    let table = train_skipgram(&corpus, &ecfg).unwrap();
    let feats = build_node_features(&cfg, &table);
    let d = 7;
    assert_eq!(feats.matrix.dim(), (cfg.blocks.len(), 2 * d));

    // entry/exit rows: first d entries all zero
    for id in [cfg.entry_id, cfg.exit_id] {
        for j in 0..d {
            assert_eq!(feats.matrix[(id, j)], 0.0);
        }
    }
    // all rows share identical last d columns
    for i in 1..cfg.blocks.len() {
        for j in 0..d {
            assert_eq!(feats.matrix[(i, d + j)], feats.matrix[(0, d + j)]);
        }
    }
}

#[test]
fn single_block_function_halves_match() {
    // one body block whose code is the whole set of block tokens
    let src = "int f(){return 0;}";
    let ast = parse_function(&tokenize(src).unwrap(), src).unwrap();
    let cfg = build_cfg(&ast).cfg;
    let corpus = build_corpus(&[("f".into(), src.into())]).unwrap();
    let ecfg = EmbedConfig {
        dim: 6,
        epochs: 2,
        ..EmbedConfig::default()
    };
    let table = train_skipgram(&corpus, &ecfg).unwrap();
    let feats = build_node_features(&cfg, &table);
    let body = 2;
    for j in 0..6 {
        assert_eq!(feats.matrix[(body, j)], feats.matrix[(body, 6 + j)]);
    }
}
