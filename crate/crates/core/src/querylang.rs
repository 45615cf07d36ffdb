//! Query language: terms combined with `AND`, `OR` and `NEAR/k`.
//!
//! ```text
//! expr := or
//! or   := and ("OR" and)*
//! and  := near ("AND" near)*
//! near := atom ("NEAR/" INT atom)?
//! atom := TERM | "(" expr ")"
//! ```
//!
//! Keywords are case-insensitive. Terms are normalized and stemmed while
//! parsing, so the AST holds index stems.

use std::fmt;

use thiserror::Error;

use crate::textprep::Analyzer;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QueryAst {
    Term(String),
    And(Box<QueryAst>, Box<QueryAst>),
    Or(Box<QueryAst>, Box<QueryAst>),
    /// Fuzzy proximity of two terms within `width` positions.
    Near {
        width: u32,
        left: String,
        right: String,
    },
}

impl QueryAst {
    pub fn term(stem: impl Into<String>) -> Self {
        QueryAst::Term(stem.into())
    }

    pub fn and(left: QueryAst, right: QueryAst) -> Self {
        QueryAst::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: QueryAst, right: QueryAst) -> Self {
        QueryAst::Or(Box::new(left), Box::new(right))
    }

    pub fn near(width: u32, left: impl Into<String>, right: impl Into<String>) -> Self {
        QueryAst::Near {
            width,
            left: left.into(),
            right: right.into(),
        }
    }

    /// Left-nested OR over `terms`; `None` when `terms` is empty.
    pub fn any_of<I, S>(terms: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        terms.into_iter().map(QueryAst::term).reduce(QueryAst::or)
    }

    pub fn depth(&self) -> usize {
        match self {
            QueryAst::Term(_) | QueryAst::Near { .. } => 1,
            QueryAst::And(l, r) | QueryAst::Or(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Every stem mentioned by the query, in left-to-right order.
    pub fn terms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            QueryAst::Term(t) => out.push(t),
            QueryAst::Near { left, right, .. } => {
                out.push(left);
                out.push(right);
            }
            QueryAst::And(l, r) | QueryAst::Or(l, r) => {
                l.collect_terms(out);
                r.collect_terms(out);
            }
        }
    }
}

/// Canonical fully-parenthesized form.
pub fn render_query(ast: &QueryAst) -> String {
    ast.to_string()
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAst::Term(t) => f.write_str(t),
            QueryAst::And(l, r) => write!(f, "({l} AND {r})"),
            QueryAst::Or(l, r) => write!(f, "({l} OR {r})"),
            QueryAst::Near { width, left, right } => write!(f, "({left} NEAR/{width} {right})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("query parse error at column {column} (`{token}`): {message}")]
pub struct ParseError {
    pub message: String,
    pub token: String,
    /// 1-based character column.
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    LParen,
    RParen,
    And,
    Or,
    Near(u32),
    Word(String),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    text: String,
    column: usize,
}

fn is_near_keyword(word: &str) -> bool {
    word.eq_ignore_ascii_case("near")
        || word
            .get(..5)
            .is_some_and(|p| p.eq_ignore_ascii_case("near/"))
}

fn is_keyword(word: &str) -> bool {
    word.eq_ignore_ascii_case("and") || word.eq_ignore_ascii_case("or") || is_near_keyword(word)
}

/// True when `stem` can be rendered as a bare query term and read back.
pub fn is_renderable_term(stem: &str) -> bool {
    !stem.is_empty()
        && !is_keyword(stem)
        && !stem
            .chars()
            .any(|c| c.is_whitespace() || c == '(' || c == ')')
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '(' || c == ')' {
            tokens.push(Token {
                kind: if c == '(' {
                    TokenKind::LParen
                } else {
                    TokenKind::RParen
                },
                text: c.to_string(),
                column,
            });
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '(' && chars[i] != ')' {
            i += 1;
        }
        let word: String = chars[start..i].iter().collect();
        let kind = if word.eq_ignore_ascii_case("and") {
            TokenKind::And
        } else if word.eq_ignore_ascii_case("or") {
            TokenKind::Or
        } else if is_near_keyword(&word) {
            let err = |message: &str| ParseError {
                message: message.to_string(),
                token: word.clone(),
                column,
            };
            let Some(width) = word[4..].strip_prefix('/') else {
                return Err(err("NEAR requires an integer width, e.g. NEAR/5"));
            };
            match width.parse::<u32>() {
                Ok(0) => return Err(err("NEAR width must be at least 1")),
                Ok(k) => TokenKind::Near(k),
                Err(_) => return Err(err("NEAR requires an integer width, e.g. NEAR/5")),
            }
        } else {
            TokenKind::Word(word.clone())
        };
        tokens.push(Token {
            kind,
            text: word,
            column,
        });
    }
    tokens.push(Token {
        kind: TokenKind::End,
        text: "<end of query>".to_string(),
        column: chars.len() + 1,
    });
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    analyzer: &'a Analyzer,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::End {
            self.pos += 1;
        }
        tok
    }

    fn error(tok: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            message: message.into(),
            token: tok.text.clone(),
            column: tok.column,
        }
    }

    fn parse_or(&mut self) -> Result<QueryAst, ParseError> {
        let mut node = self.parse_and()?;
        while self.peek().kind == TokenKind::Or {
            self.bump();
            node = QueryAst::or(node, self.parse_and()?);
        }
        Ok(node)
    }

    fn parse_and(&mut self) -> Result<QueryAst, ParseError> {
        let mut node = self.parse_near()?;
        while self.peek().kind == TokenKind::And {
            self.bump();
            node = QueryAst::and(node, self.parse_near()?);
        }
        Ok(node)
    }

    fn parse_near(&mut self) -> Result<QueryAst, ParseError> {
        let left_tok = self.peek().clone();
        let left = self.parse_atom()?;
        let TokenKind::Near(width) = self.peek().kind else {
            return Ok(left);
        };
        let near_tok = self.bump();
        let right_tok = self.peek().clone();
        let right = self.parse_atom()?;
        let QueryAst::Term(left) = left else {
            return Err(Self::error(&left_tok, "NEAR operands must be single terms"));
        };
        let QueryAst::Term(right) = right else {
            return Err(Self::error(
                &right_tok,
                "NEAR operands must be single terms",
            ));
        };
        if let TokenKind::Near(_) = self.peek().kind {
            return Err(Self::error(
                self.peek(),
                format!("NEAR cannot be chained (after `{}`)", near_tok.text),
            ));
        }
        Ok(QueryAst::Near { width, left, right })
    }

    fn parse_atom(&mut self) -> Result<QueryAst, ParseError> {
        let tok = self.bump();
        match &tok.kind {
            TokenKind::LParen => {
                let inner = self.parse_or()?;
                let close = self.bump();
                if close.kind != TokenKind::RParen {
                    return Err(Self::error(&close, "expected `)`"));
                }
                Ok(inner)
            }
            TokenKind::Word(word) => match self.analyzer.analyze_term(word) {
                Some(stem) => Ok(QueryAst::Term(stem)),
                None => Err(Self::error(
                    &tok,
                    "term must be a single word with at least one letter",
                )),
            },
            TokenKind::End => Err(Self::error(&tok, "expected a term or `(`")),
            _ => Err(Self::error(&tok, "expected a term or `(`")),
        }
    }
}

/// Parses `text` into an AST, running every term through `analyzer`
/// (normalization and stemming; stop words are kept).
pub fn parse_query(text: &str, analyzer: &Analyzer) -> Result<QueryAst, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        analyzer,
    };
    if parser.peek().kind == TokenKind::End {
        return Err(Parser::error(parser.peek(), "empty query"));
    }
    let ast = parser.parse_or()?;
    let trailing = parser.peek();
    match trailing.kind {
        TokenKind::End => Ok(ast),
        TokenKind::RParen => Err(Parser::error(trailing, "unbalanced `)`")),
        _ => Err(Parser::error(trailing, "expected AND, OR or end of query")),
    }
}
