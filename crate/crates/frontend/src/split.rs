use crate::error::FrontendError;
use crate::lexer::{tokenize, Token, TokenKind};

fn is_type_keyword(t: &Token) -> bool {
    t.kind == TokenKind::Keyword && matches!(t.text.as_str(), "int" | "char" | "float" | "void")
}

/// Extract each top-level function definition from a translation unit,
/// verbatim with balanced braces. Prototypes (no body) are skipped.
pub fn split_source_into_functions(source: &str) -> Result<Vec<(String, String)>, FrontendError> {
    let tokens = tokenize(source)?;
    let mut functions = Vec::new();
    let mut i = 0;

    while i < tokens.len() {
        if !is_type_keyword(&tokens[i]) {
            i += 1;
            continue;
        }
        let start = i;
        let mut j = i + 1;
        while j < tokens.len() && tokens[j].text == "*" {
            j += 1;
        }
        if j >= tokens.len() || tokens[j].kind != TokenKind::Identifier {
            i += 1;
            continue;
        }
        let name = tokens[j].text.clone();
        j += 1;
        if j >= tokens.len() || tokens[j].text != "(" {
            i += 1;
            continue;
        }
        // find the matching ')'
        let mut depth = 0usize;
        while j < tokens.len() {
            match tokens[j].text.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            j += 1;
        }
        if j >= tokens.len() {
            let t = &tokens[start];
            return Err(FrontendError::Structure {
                line: t.line,
                column: t.column,
                message: format!("unbalanced parentheses in declaration of '{name}'"),
            });
        }
        j += 1;
        if j < tokens.len() && tokens[j].text == ";" {
            // prototype, no body
            i = j + 1;
            continue;
        }
        if j >= tokens.len() || tokens[j].text != "{" {
            i = j;
            continue;
        }
        // balanced-brace scan of the body
        let open = &tokens[j];
        let mut depth = 0usize;
        let mut end = None;
        while j < tokens.len() {
            match tokens[j].text.as_str() {
                "{" => depth += 1,
                "}" => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(j);
                        break;
                    }
                }
                _ => {}
            }
            j += 1;
        }
        let Some(end) = end else {
            return Err(FrontendError::Structure {
                line: open.line,
                column: open.column,
                message: format!("unbalanced braces in body of '{name}'"),
            });
        };
        let text_start = tokens[start].offset;
        let text_end = tokens[end].offset + 1;
        functions.push((name, source[text_start..text_end].to_string()));
        i = end + 1;
    }
    Ok(functions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_definitions_in_order() {
        let src = "int f(int a){return a;}\n\nchar g(){return 0;}\n";
        let fns = split_source_into_functions(src).unwrap();
        assert_eq!(fns.len(), 2);
        assert_eq!(fns[0].0, "f");
        assert_eq!(fns[0].1, "int f(int a){return a;}");
        assert_eq!(fns[1].0, "g");
    }

    #[test]
    fn prototype_is_skipped() {
        let fns = split_source_into_functions("int f(int);").unwrap();
        assert!(fns.is_empty());
    }

    #[test]
    fn nested_braces_do_not_split() {
        let src = "int f(int a){if(a){a=1;}while(a){a=0;}return a;}";
        let fns = split_source_into_functions(src).unwrap();
        assert_eq!(fns.len(), 1);
        assert_eq!(fns[0].1, src);
    }

    #[test]
    fn unbalanced_braces_report_position() {
        let err = split_source_into_functions("int f(){int a;").unwrap_err();
        assert!(matches!(err, FrontendError::Structure { .. }));
    }
}
