use crate::cfg::{BasicBlock, BlockRole, Cfg, ENTRY_ID, EXIT_ID};
use crate::error::FrontendError;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, FrontendError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('\\') => out.push('\\'),
                Some('"') => out.push('"'),
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                other => {
                    return Err(FrontendError::DotSchema(format!(
                        "bad escape sequence \\{}",
                        other.map(String::from).unwrap_or_default()
                    )))
                }
            }
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Serialize a CFG to the DOT dialect used across the pipeline.
///
/// Deterministic: nodes in id order, then edges in stored order. Each
/// node carries `role` and `code` attributes; entry is always N0 and
/// exit N1.
pub fn cfg_to_dot(cfg: &Cfg) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph \"{}\" {{\n", escape(&cfg.function_name)));
    for block in &cfg.blocks {
        out.push_str(&format!(
            "  N{} [role=\"{}\", code=\"{}\"];\n",
            block.id,
            block.role.as_str(),
            escape(&block.code_text)
        ));
    }
    for (src, dst) in &cfg.edges {
        out.push_str(&format!("  N{src} -> N{dst};\n"));
    }
    out.push_str("}\n");
    out
}

fn parse_node_ref(s: &str, line_no: usize) -> Result<usize, FrontendError> {
    s.strip_prefix('N')
        .and_then(|rest| rest.parse::<usize>().ok())
        .ok_or_else(|| FrontendError::Dot {
            line: line_no,
            message: format!("expected node id like N0, found {s:?}"),
        })
}

// split `role="...", code="..."` honoring escapes
fn parse_attrs(s: &str, line_no: usize) -> Result<Vec<(String, String)>, FrontendError> {
    let mut attrs = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        while i < bytes.len() && (bytes[i] == b' ' || bytes[i] == b',') {
            i += 1;
        }
        if i >= bytes.len() {
            break;
        }
        let key_start = i;
        while i < bytes.len() && bytes[i] != b'=' {
            i += 1;
        }
        if i >= bytes.len() {
            return Err(FrontendError::Dot {
                line: line_no,
                message: "attribute without '='".into(),
            });
        }
        let key = s[key_start..i].trim().to_string();
        i += 1; // '='
        if i >= bytes.len() || bytes[i] != b'"' {
            return Err(FrontendError::Dot {
                line: line_no,
                message: format!("attribute {key} is not quoted"),
            });
        }
        i += 1;
        let val_start = i;
        loop {
            if i >= bytes.len() {
                return Err(FrontendError::Dot {
                    line: line_no,
                    message: format!("unterminated value for attribute {key}"),
                });
            }
            if bytes[i] == b'\\' {
                i += 2;
                continue;
            }
            if bytes[i] == b'"' {
                break;
            }
            i += 1;
        }
        let value = unescape(&s[val_start..i])?;
        i += 1;
        attrs.push((key, value));
    }
    Ok(attrs)
}

/// Parse the DOT dialect back into a [`Cfg`].
///
/// Validates the schema: every node declares `role` and `code`, ids are
/// dense with entry 0 and exit 1, and every edge references a declared
/// node.
pub fn parse_dot(text: &str) -> Result<Cfg, FrontendError> {
    let mut function_name = None;
    let mut nodes: Vec<(usize, BlockRole, String)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen_close = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if function_name.is_none() {
            let rest = line
                .strip_prefix("digraph")
                .ok_or_else(|| FrontendError::Dot {
                    line: line_no,
                    message: "expected 'digraph \"<name>\" {'".into(),
                })?
                .trim();
            let rest = rest.strip_suffix('{').ok_or_else(|| FrontendError::Dot {
                line: line_no,
                message: "expected '{' after digraph name".into(),
            })?;
            let name = rest.trim().trim_matches('"');
            function_name = Some(unescape(name)?);
            continue;
        }
        if line == "}" {
            seen_close = true;
            continue;
        }
        if seen_close {
            return Err(FrontendError::Dot {
                line: line_no,
                message: "content after closing '}'".into(),
            });
        }
        let line = line.strip_suffix(';').ok_or_else(|| FrontendError::Dot {
            line: line_no,
            message: "statement missing trailing ';'".into(),
        })?;
        if let Some(arrow) = line.find("->") {
            let src = parse_node_ref(line[..arrow].trim(), line_no)?;
            let dst = parse_node_ref(line[arrow + 2..].trim(), line_no)?;
            edges.push((src, dst));
        } else {
            let open = line.find('[').ok_or_else(|| FrontendError::Dot {
                line: line_no,
                message: "node statement missing attributes".into(),
            })?;
            let close = line.rfind(']').ok_or_else(|| FrontendError::Dot {
                line: line_no,
                message: "node statement missing ']'".into(),
            })?;
            let id = parse_node_ref(line[..open].trim(), line_no)?;
            let attrs = parse_attrs(&line[open + 1..close], line_no)?;
            let role_text = attrs
                .iter()
                .find(|(k, _)| k == "role")
                .map(|(_, v)| v.clone())
                .ok_or_else(|| FrontendError::DotSchema(format!("node N{id}: missing role attribute")))?;
            let role = BlockRole::parse(&role_text).ok_or_else(|| {
                FrontendError::DotSchema(format!("node N{id}: unknown role {role_text:?}"))
            })?;
            let code = attrs
                .iter()
                .find(|(k, _)| k == "code")
                .map(|(_, v)| v.clone())
                .ok_or_else(|| FrontendError::DotSchema(format!("node N{id}: missing code attribute")))?;
            nodes.push((id, role, code));
        }
    }

    let function_name = function_name.ok_or(FrontendError::Dot {
        line: 1,
        message: "empty document".into(),
    })?;
    if !seen_close {
        return Err(FrontendError::Dot {
            line: text.lines().count(),
            message: "missing closing '}'".into(),
        });
    }

    // ids must be dense from 0 with entry 0 and exit 1
    let n = nodes.len();
    let mut blocks: Vec<Option<BasicBlock>> = (0..n).map(|_| None).collect();
    for (id, role, code) in nodes {
        if id >= n {
            return Err(FrontendError::DotSchema(format!(
                "node id N{id} not dense in 0..{n}"
            )));
        }
        if blocks[id].is_some() {
            return Err(FrontendError::DotSchema(format!("duplicate node N{id}")));
        }
        blocks[id] = Some(BasicBlock {
            id,
            statements: Vec::new(),
            code_text: code,
            role,
        });
    }
    let blocks: Vec<BasicBlock> = blocks.into_iter().map(|b| b.unwrap()).collect();
    if n < 2 {
        return Err(FrontendError::DotSchema(
            "graph must contain at least entry and exit".into(),
        ));
    }
    if blocks[ENTRY_ID].role != BlockRole::Entry {
        return Err(FrontendError::DotSchema("node N0 must have role entry".into()));
    }
    if blocks[EXIT_ID].role != BlockRole::Exit {
        return Err(FrontendError::DotSchema("node N1 must have role exit".into()));
    }
    for &(src, dst) in &edges {
        if src >= n || dst >= n {
            return Err(FrontendError::DotSchema(format!(
                "edge N{src} -> N{dst} references an undeclared node"
            )));
        }
    }

    Ok(Cfg {
        function_name,
        blocks,
        edges,
        entry_id: ENTRY_ID,
        exit_id: EXIT_ID,
    })
}
