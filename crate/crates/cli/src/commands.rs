use std::path::{Path, PathBuf};

use vulngraph_data::{
    balance_dataset, filter_min_size, generate_synthetic_corpus, load_graph, load_graph_file,
    save_graph, split_dataset, AttributedGraph, Dataset, Manifest, SplitSpec,
};
use vulngraph_embed::{
    build_corpus, build_node_features, train_skipgram, EmbedConfig, EmbeddingTable,
};
use vulngraph_frontend::{
    build_cfg, cfg_to_dot, parse_function, split_source_into_functions, tokenize,
};
use vulngraph_segnn::{forward_logit, SegnnParams};
use vulngraph_train::{
    evaluate_model, load_checkpoint, train_model, write_history_csv, Metrics, TrainConfig,
};

use crate::config::{stage_seed, PipelineConfig};
use crate::CliError;

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))
}

fn write_string(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::User(format!("cannot create {}: {e}", path.display())))
}

/// Sorted `.c` files under a directory (non-recursive).
fn source_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::User(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "c"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::User(format!(
            "no input files: {} contains no .c files",
            dir.display()
        )));
    }
    Ok(files)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed".into())
}

/// All functions from all `.c` files in a directory, with their source
/// file stems. Failures are collected per file, not per run.
fn collect_functions(
    files: &[PathBuf],
) -> (Vec<(String, String, String)>, Vec<String>) {
    let mut functions = Vec::new();
    let mut failures = Vec::new();
    for file in files {
        let stem = file_stem(file);
        let text = match std::fs::read_to_string(file) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("{}: {e}", file.display()));
                continue;
            }
        };
        match split_source_into_functions(&text) {
            Ok(list) => {
                for (name, body) in list {
                    functions.push((stem.clone(), name, body));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", file.display())),
        }
    }
    (functions, failures)
}

pub fn cmd_extract(src: &Path, out: &Path, keep_going: bool) -> Result<(), CliError> {
    let files = source_files(src)?;
    create_dir(out)?;
    let (functions, mut failures) = collect_functions(&files);
    let mut index = String::from("dot,file,function\n");
    let mut written = 0usize;
    for (stem, name, body) in &functions {
        let result = tokenize(body)
            .and_then(|tokens| parse_function(&tokens, body))
            .map(|ast| build_cfg(&ast));
        match result {
            Ok(build) => {
                let dot_name = format!("{stem}__{name}.dot");
                write_string(&out.join(&dot_name), &cfg_to_dot(&build.cfg))?;
                index.push_str(&format!("{dot_name},{stem}.c,{name}\n"));
                written += 1;
            }
            Err(e) => failures.push(format!("{stem}.c ({name}): {e}")),
        }
    }
    write_string(&out.join("index.csv"), &index)?;
    println!(
        "extract: {} files, {} functions, {} written, {} failed",
        files.len(),
        functions.len(),
        written,
        failures.len()
    );
    for f in &failures {
        eprintln!("  failed: {f}");
    }
    if !failures.is_empty() && !keep_going {
        return Err(CliError::User(format!(
            "{} function(s) failed to extract (use --keep-going to skip them)",
            failures.len()
        )));
    }
    Ok(())
}

pub fn cmd_embed(src: &Path, out: &Path, cfg: &PipelineConfig) -> Result<(), CliError> {
    let files = source_files(src)?;
    let (functions, failures) = collect_functions(&files);
    for f in &failures {
        eprintln!("  skipped: {f}");
    }
    let named: Vec<(String, String)> = functions
        .into_iter()
        .map(|(_, name, body)| (name, body))
        .collect();
    let corpus = build_corpus(&named).map_err(|e| CliError::User(e.to_string()))?;
    let embed_cfg = EmbedConfig {
        seed: stage_seed(cfg.seed, "embed"),
        ..cfg.embed.clone()
    };
    let table = train_skipgram(&corpus, &embed_cfg).map_err(|e| CliError::User(e.to_string()))?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            create_dir(parent)?;
        }
    }
    table.save(out).map_err(|e| CliError::User(e.to_string()))?;
    println!(
        "embed: vocabulary {} tokens, dimension {}, table {}",
        table.len(),
        table.dim(),
        out.display()
    );
    Ok(())
}

pub fn cmd_build(
    dots: &Path,
    table_path: &Path,
    manifest_path: &Path,
    out: &Path,
    balance: bool,
    cfg: &PipelineConfig,
) -> Result<(), CliError> {
    let table = EmbeddingTable::load(table_path).map_err(|e| CliError::User(e.to_string()))?;
    let manifest = Manifest::load(manifest_path).map_err(|e| CliError::User(e.to_string()))?;
    let mut graphs = Vec::new();
    for (row_idx, row) in manifest.rows.iter().enumerate() {
        let dot_path = dots.join(&row.path);
        let text = std::fs::read_to_string(&dot_path).map_err(|e| {
            CliError::User(format!(
                "manifest row {}: cannot read {}: {e}",
                row_idx + 1,
                dot_path.display()
            ))
        })?;
        let graph = load_graph(&text, &table, row.label, &row.origin).map_err(|e| {
            CliError::User(format!("manifest row {}: {e}", row_idx + 1))
        })?;
        graphs.push(graph);
    }
    let loaded = graphs.len();
    let ds = Dataset::new(graphs, manifest_path.display().to_string());
    let kept = filter_min_size(&ds, cfg.min_nodes);
    let dropped = loaded - kept.len();
    let final_ds = if balance {
        balance_dataset(&kept, stage_seed(cfg.seed, "balance"))
            .map_err(|e| CliError::User(e.to_string()))?
    } else {
        kept
    };
    create_dir(out)?;
    for (i, g) in final_ds.graphs.iter().enumerate() {
        save_graph(g, &out.join(format!("g{i:05}.json")))
            .map_err(|e| CliError::User(e.to_string()))?;
    }
    let (pos, neg) = final_ds.class_counts();
    println!(
        "build: {loaded} loaded, {dropped} dropped (< {} nodes), {} kept ({pos} vulnerable / {neg} clean)",
        cfg.min_nodes,
        final_ds.len()
    );
    Ok(())
}

pub fn cmd_synth(out: &Path, per_class: usize, cfg: &PipelineConfig) -> Result<(), CliError> {
    let corpus = generate_synthetic_corpus(per_class, stage_seed(cfg.seed, "synth"));
    corpus
        .write_files(out)
        .map_err(|e| CliError::User(e.to_string()))?;
    println!(
        "synth: {} functions ({per_class} per class) in {}",
        corpus.functions.len(),
        out.display()
    );
    Ok(())
}

/// All graph files of a dataset directory, in name order.
fn load_dataset(dir: &Path) -> Result<Dataset, CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::User(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::User(format!(
            "no graphs: {} contains no .json files",
            dir.display()
        )));
    }
    let graphs: Result<Vec<AttributedGraph>, _> = files.iter().map(|p| load_graph_file(p)).collect();
    Ok(Dataset::new(
        graphs.map_err(|e| CliError::User(e.to_string()))?,
        dir.display().to_string(),
    ))
}

fn metrics_json(m: &Metrics) -> String {
    serde_json::json!({
        "accuracy": m.accuracy(),
        "precision": m.precision(),
        "recall": m.recall(),
        "f1": m.f1(),
        "confusion": {
            "true_positive": m.true_positive,
            "false_positive": m.false_positive,
            "true_negative": m.true_negative,
            "false_negative": m.false_negative,
        },
    })
    .to_string()
}

pub fn cmd_train(dataset: &Path, out: &Path, cfg: &PipelineConfig) -> Result<(), CliError> {
    let ds = load_dataset(dataset)?;
    let width = ds.graphs[0].feature_width();
    if width != cfg.model.feature_dim {
        return Err(CliError::User(format!(
            "dataset feature width {width} does not match configured model width {}",
            cfg.model.feature_dim
        )));
    }
    let spec = SplitSpec {
        train_fraction: cfg.train_fraction,
        seed: stage_seed(cfg.seed, "split"),
    };
    let (train, test) = split_dataset(&ds, &spec);
    create_dir(out)?;
    let train_cfg = TrainConfig {
        batch_size: cfg.batch_size,
        learning_rate: cfg.learning_rate,
        epochs: cfg.epochs,
        seed: stage_seed(cfg.seed, "train"),
        checkpoint_dir: Some(out.join("checkpoints")),
        target_accuracy: cfg.target_accuracy,
        ..TrainConfig::default()
    };
    let params = SegnnParams::init(cfg.model.clone(), stage_seed(cfg.seed, "init"));
    let outcome = train_model(params, &train, Some(&test), &train_cfg)
        .map_err(|e| CliError::User(e.to_string()))?;

    write_history_csv(&outcome.history, &out.join("loss_curve.csv"))
        .map_err(|e| CliError::User(e.to_string()))?;
    let metrics = evaluate_model(&outcome.params, &test);
    write_string(&out.join("metrics.json"), &metrics_json(&metrics))?;
    let last = outcome.history.last().expect("at least one epoch");
    println!(
        "train: {} train / {} test graphs, {} epochs run, final loss {:.6}, test accuracy {:.4}",
        train.len(),
        test.len(),
        outcome.history.len(),
        last.train_loss,
        metrics.accuracy()
    );
    Ok(())
}

fn load_params(checkpoint: &Path) -> Result<SegnnParams, CliError> {
    let ckpt = load_checkpoint(checkpoint).map_err(|e| CliError::User(e.to_string()))?;
    let (params, _, _, _) = ckpt.restore().map_err(|e| CliError::User(e.to_string()))?;
    Ok(params)
}

pub fn cmd_eval(dataset: &Path, checkpoint: &Path) -> Result<(), CliError> {
    let ds = load_dataset(dataset)?;
    let params = load_params(checkpoint)?;
    let width = ds.graphs[0].feature_width();
    if width != params.config.feature_dim {
        return Err(CliError::User(format!(
            "dataset feature width {width} does not match checkpoint width {}",
            params.config.feature_dim
        )));
    }
    let metrics = evaluate_model(&params, &ds);
    println!("{}", metrics_json(&metrics));
    Ok(())
}

pub fn cmd_predict(source: &Path, table_path: &Path, checkpoint: &Path) -> Result<(), CliError> {
    let table = EmbeddingTable::load(table_path).map_err(|e| CliError::User(e.to_string()))?;
    let params = load_params(checkpoint)?;
    if 2 * table.dim() != params.config.feature_dim {
        return Err(CliError::User(format!(
            "embedding table width {} is incompatible with checkpoint feature width {}",
            table.dim(),
            params.config.feature_dim
        )));
    }
    let text = read_to_string(source)?;
    let functions =
        split_source_into_functions(&text).map_err(|e| CliError::User(e.to_string()))?;
    if functions.is_empty() {
        return Err(CliError::User(format!(
            "no functions found in {}",
            source.display()
        )));
    }
    for (name, body) in functions {
        let cfg = tokenize(&body)
            .and_then(|tokens| parse_function(&tokens, &body))
            .map(|ast| build_cfg(&ast).cfg)
            .map_err(|e| CliError::User(format!("{name}: {e}")))?;
        let features = build_node_features(&cfg, &table).matrix;
        let graph = AttributedGraph {
            n: cfg.blocks.len(),
            edges: cfg.edges,
            features,
            label: 0,
            meta: Default::default(),
        };
        let logit = forward_logit(&params, &graph);
        let prob = 1.0 / (1.0 + (-logit).exp());
        let label = (prob >= 0.5) as u8;
        println!("{name}: label {label} (p_vulnerable = {prob:.4})");
    }
    Ok(())
}
