use std::collections::BTreeMap;

use vulngraph_frontend::{tokenize, Token, TokenKind};

use crate::EmbedError;

/// One sentence per function, tokens in source order, literals
/// normalized.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub sentences: Vec<Vec<String>>,
    pub token_counts: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.token_counts.values().sum()
    }
}

/// Integer literals collapse to `<INT>`, string literals to `<STR>`;
/// identifiers and everything else stay verbatim.
pub fn normalize_token(token: &Token) -> String {
    match token.kind {
        TokenKind::IntegerLiteral => "<INT>".to_string(),
        TokenKind::StringLiteral => "<STR>".to_string(),
        _ => token.text.clone(),
    }
}

pub fn tokenize_normalized(source: &str) -> Result<Vec<String>, vulngraph_frontend::FrontendError> {
    Ok(tokenize(source)?.iter().map(normalize_token).collect())
}

/// Build a corpus from function source texts: one sentence per function.
pub fn build_corpus(functions: &[(String, String)]) -> Result<Corpus, EmbedError> {
    let mut corpus = Corpus::default();
    for (name, source) in functions {
        let sentence = tokenize_normalized(source).map_err(|source| EmbedError::Lex {
            function: name.clone(),
            source,
        })?;
        if sentence.is_empty() {
            continue;
        }
        for tok in &sentence {
            *corpus.token_counts.entry(tok.clone()).or_insert(0) += 1;
        }
        corpus.sentences.push(sentence);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(name: &str, src: &str) -> (String, String) {
        (name.to_string(), src.to_string())
    }

    #[test]
    fn one_sentence_of_nine_tokens() {
        let corpus = build_corpus(&[f("f", "int f(){return 0;}")]).unwrap();
        assert_eq!(corpus.sentences.len(), 1);
        assert_eq!(corpus.sentences[0].len(), 9);
        assert_eq!(corpus.sentences[0][6], "<INT>");
    }

    #[test]
    fn duplicate_functions_double_counts() {
        let one = build_corpus(&[f("f", "int f(){return 0;}")]).unwrap();
        let two = build_corpus(&[f("f", "int f(){return 0;}"), f("g", "int f(){return 0;}")]).unwrap();
        for (tok, count) in &one.token_counts {
            assert_eq!(two.token_counts[tok], 2 * count);
        }
    }

    #[test]
    fn empty_input_gives_empty_corpus() {
        let corpus = build_corpus(&[]).unwrap();
        assert!(corpus.is_empty());
    }

    #[test]
    fn lex_error_carries_function_identity() {
        let err = build_corpus(&[f("bad", "int f(){ @ }")]).unwrap_err();
        assert!(err.to_string().contains("bad"));
    }

    #[test]
    fn string_literals_normalized() {
        let corpus = build_corpus(&[f("f", "void f(){log(\"hello world\");}")]).unwrap();
        assert!(corpus.token_counts.contains_key("<STR>"));
        assert!(!corpus.token_counts.keys().any(|k| k.contains("hello")));
    }
}
