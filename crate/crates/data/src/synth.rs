use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::manifest::{Manifest, ManifestRow};
use crate::DataError;

#[derive(Debug, Clone)]
pub struct SyntheticFunction {
    pub name: String,
    pub source: String,
    /// 1 = vulnerable variant, 0 = guarded variant.
    pub label: u8,
    /// Pattern template the function was drawn from.
    pub origin: String,
    /// Emitted `.c` file name (one function per file).
    pub file_name: String,
}

#[derive(Debug, Clone, Default)]
pub struct SyntheticCorpus {
    pub functions: Vec<SyntheticFunction>,
}

impl SyntheticCorpus {
    /// Manifest rows reference the DOT files the extractor will produce:
    /// `<stem>__<function>.dot`.
    pub fn manifest(&self) -> Manifest {
        Manifest {
            rows: self
                .functions
                .iter()
                .map(|f| ManifestRow {
                    path: format!(
                        "{}__{}.dot",
                        f.file_name.trim_end_matches(".c"),
                        f.name
                    )
                    .into(),
                    label: f.label,
                    origin: f.origin.clone(),
                })
                .collect(),
        }
    }

    /// Write one `.c` file per function plus `manifest.csv` into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<(), DataError> {
        std::fs::create_dir_all(dir).map_err(|source| DataError::Io {
            action: "create",
            path: dir.display().to_string(),
            source,
        })?;
        for f in &self.functions {
            let path = dir.join(&f.file_name);
            std::fs::write(&path, &f.source).map_err(|source| DataError::Io {
                action: "write",
                path: path.display().to_string(),
                source,
            })?;
        }
        self.manifest().save(&dir.join("manifest.csv"))
    }
}

struct NameGen<'a> {
    rng: &'a mut ChaCha8Rng,
}

impl<'a> NameGen<'a> {
    fn fresh(&mut self, stem: &str) -> String {
        format!("{}_{:x}", stem, self.rng.random_range(0x100..0x10000u32))
    }
}

// a couple of straight-line noise statements using existing scalars
fn noise_statements(rng: &mut ChaCha8Rng, vars: &[String]) -> String {
    let count = rng.random_range(0..3u32);
    let mut out = String::new();
    for _ in 0..count {
        let v = &vars[rng.random_range(0..vars.len())];
        let k = rng.random_range(1..9u32);
        match rng.random_range(0..3u32) {
            0 => out.push_str(&format!("    {v} = {v} + {k};\n")),
            1 => out.push_str(&format!("    {v} = {v} * 2 - {k};\n")),
            _ => out.push_str(&format!("    log_metric({v}, {k});\n")),
        }
    }
    out
}

// an if/else pair over existing scalars; always two non-empty branches so
// the diamond shape is preserved
fn noise_branch(rng: &mut ChaCha8Rng, vars: &[String]) -> String {
    let v = &vars[rng.random_range(0..vars.len())];
    let w = &vars[rng.random_range(0..vars.len())];
    let k = rng.random_range(1..9u32);
    format!(
        "    if ({v} > {k}) {{\n        {w} = {w} + 1;\n    }} else {{\n        {w} = {w} - {k};\n    }}\n",
    )
}

fn copy_loop(rng: &mut ChaCha8Rng, name: &str, vulnerable: bool) -> String {
    let mut names = NameGen { rng };
    let dst = names.fresh("dst");
    let src = names.fresh("src");
    let n = names.fresh("n");
    let i = names.fresh("i");
    let acc = names.fresh("acc");
    let scalars = [i.clone(), acc.clone()];
    let cond = if vulnerable {
        format!("{src}[{i}] != 0")
    } else {
        format!("{src}[{i}] != 0 && {i} < {n}")
    };
    let mut body = String::new();
    body.push_str(&format!("int {name}(char *{dst}, char *{src}, int {n}) {{\n"));
    body.push_str(&format!("    int {i} = 0;\n    int {acc} = 0;\n"));
    body.push_str(&noise_statements(rng, &scalars));
    body.push_str(&noise_branch(rng, &scalars));
    body.push_str(&format!(
        "    while ({cond}) {{\n        {dst}[{i}] = {src}[{i}];\n        {i} = {i} + 1;\n    }}\n"
    ));
    body.push_str(&noise_branch(rng, &scalars));
    body.push_str(&noise_statements(rng, &scalars));
    body.push_str(&format!("    return {i} + {acc};\n}}\n"));
    body
}

fn index_write(rng: &mut ChaCha8Rng, name: &str, vulnerable: bool) -> String {
    let mut names = NameGen { rng };
    let buf = names.fresh("buf");
    let idx = names.fresh("idx");
    let len = names.fresh("len");
    let val = names.fresh("val");
    let r = names.fresh("r");
    let scalars = [r.clone(), val.clone()];
    let write = if vulnerable {
        format!("    {buf}[{idx}] = {val};\n    {r} = {r} + 1;\n")
    } else {
        format!(
            "    if ({idx} >= 0 && {idx} < {len}) {{\n        {buf}[{idx}] = {val};\n        {r} = {r} + 1;\n    }}\n"
        )
    };
    let mut body = String::new();
    body.push_str(&format!(
        "int {name}(int *{buf}, int {idx}, int {len}, int {val}) {{\n"
    ));
    body.push_str(&format!("    int {r} = 0;\n"));
    body.push_str(&noise_statements(rng, &scalars));
    body.push_str(&noise_branch(rng, &scalars));
    body.push_str(&write);
    body.push_str(&noise_branch(rng, &scalars));
    body.push_str(&noise_statements(rng, &scalars));
    body.push_str(&format!("    return {r};\n}}\n"));
    body
}

fn null_deref_call(rng: &mut ChaCha8Rng, name: &str, vulnerable: bool) -> String {
    let mut names = NameGen { rng };
    let p = names.fresh("ptr");
    let r = names.fresh("res");
    let t = names.fresh("tmp");
    let scalars = [r.clone(), t.clone()];
    let usage = if vulnerable {
        format!("    {r} = read_value({p});\n")
    } else {
        format!("    if ({p} != 0) {{\n        {r} = read_value({p});\n    }}\n")
    };
    let mut body = String::new();
    body.push_str(&format!("int {name}(int *{p}, int {t}) {{\n"));
    body.push_str(&format!("    int {r} = 0;\n"));
    body.push_str(&noise_statements(rng, &scalars));
    body.push_str(&noise_branch(rng, &scalars));
    body.push_str(&usage);
    body.push_str(&noise_branch(rng, &scalars));
    body.push_str(&noise_statements(rng, &scalars));
    body.push_str(&format!("    return {r} + {t};\n}}\n"));
    body
}

const PATTERNS: &[(&str, fn(&mut ChaCha8Rng, &str, bool) -> String)] = &[
    ("copy-loop", copy_loop),
    ("index-write", index_write),
    ("null-deref-call", null_deref_call),
];

/// Emit `n_per_class` vulnerable and `n_per_class` guarded functions from
/// the planted-pattern templates, cycling through the patterns.
/// Deterministic per seed; every function builds a CFG with at least 11
/// nodes so the size filter keeps it.
pub fn generate_synthetic_corpus(n_per_class: usize, seed: u64) -> SyntheticCorpus {
    assert!(n_per_class >= 1, "n_per_class must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut functions = Vec::with_capacity(2 * n_per_class);
    for k in 0..n_per_class {
        for vulnerable in [true, false] {
            let (pattern_name, template) = PATTERNS[k % PATTERNS.len()];
            let tag = if vulnerable { "v" } else { "g" };
            let name = format!("fn_{tag}{k:05}");
            let source = template(&mut rng, &name, vulnerable);
            functions.push(SyntheticFunction {
                name: name.clone(),
                source,
                label: vulnerable as u8,
                origin: pattern_name.to_string(),
                file_name: format!("{name}.c"),
            });
        }
    }
    SyntheticCorpus { functions }
}
