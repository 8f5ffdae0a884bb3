//! Nested prefix notation for pipelines, e.g.
//! `KNearestNeighbor(k=5, SelectKBest(k=10, INPUT))` or
//! `LogisticRegression(C=1.0, CombineDFs(INPUT, StandardScaler(INPUT)))`.
//!
//! Parameters come first, in schema order when serialized, followed by the
//! child node. Float parameters are written in Rust's shortest round-trip
//! form, so `deserialize(serialize(t)) == t` holds exactly.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Node, PipelineTree};
use crate::primitives::{OperatorKind, OperatorSpec, ParamDomain, ParamValue, SpecError, COMBINE_TOKEN};

const INPUT_TOKEN: &str = "INPUT";

pub fn serialize(t: &PipelineTree) -> String {
    let mut out = String::new();
    write_node(t.root(), &mut out);
    out
}

fn write_node(node: &Node, out: &mut String) {
    match node {
        Node::Leaf => out.push_str(INPUT_TOKEN),
        Node::Unary { spec, child } => {
            out.push_str(spec.kind().name());
            out.push('(');
            for (name, value) in spec.params() {
                match value {
                    ParamValue::Int(v) => write!(out, "{name}={v}, ").expect("write to String"),
                    ParamValue::Float(v) => write!(out, "{name}={v:?}, ").expect("write to String"),
                }
            }
            write_node(child, out);
            out.push(')');
        }
        Node::Combine { left, right } => {
            out.push_str(COMBINE_TOKEN);
            out.push('(');
            write_node(left, out);
            out.push_str(", ");
            write_node(right, out);
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unexpected `{found}`, expected {expected}")]
    Unexpected { found: String, expected: &'static str },
    #[error("unknown operator kind `{0}`")]
    UnknownKind(String),
    #[error("cannot read `{0}` as a number")]
    BadNumber(String),
    #[error(transparent)]
    Schema(#[from] SpecError),
    #[error("trailing input `{0}`")]
    Trailing(String),
}

/// Parse failure with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Ident(&'a str),
    Number(&'a str),
    Open,
    Close,
    Comma,
    Equals,
}

impl Token<'_> {
    fn text(&self) -> String {
        match self {
            Token::Ident(s) | Token::Number(s) => (*s).to_string(),
            Token::Open => "(".into(),
            Token::Close => ")".into(),
            Token::Comma => ",".into(),
            Token::Equals => "=".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token<'_>)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => tokens.push((start, Token::Open)),
            b')' => tokens.push((start, Token::Close)),
            b',' => tokens.push((start, Token::Comma)),
            b'=' => tokens.push((start, Token::Equals)),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((start, Token::Ident(&text[start..i])));
                continue;
            }
            c if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || matches!(bytes[i], b'.' | b'-' | b'+'))
                {
                    i += 1;
                }
                tokens.push((start, Token::Number(&text[start..i])));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().expect("in bounds");
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::Unexpected { found: ch.to_string(), expected: "a token" },
                });
            }
        }
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    at: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.at).map(|t| &t.1)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.at).map_or(self.len, |t| t.0)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { position: self.position(), kind }
    }

    fn next(&mut self, expected: &'static str) -> Result<Token<'a>, ParseError> {
        let token = self
            .tokens
            .get(self.at)
            .map(|t| t.1.clone())
            .ok_or_else(|| self.error(ParseErrorKind::UnexpectedEnd(expected)))?;
        self.at += 1;
        Ok(token)
    }

    fn expect(&mut self, want: Token<'static>, expected: &'static str) -> Result<(), ParseError> {
        let position = self.position();
        let token = self.next(expected)?;
        if token == want {
            Ok(())
        } else {
            Err(ParseError {
                position,
                kind: ParseErrorKind::Unexpected { found: token.text(), expected },
            })
        }
    }

    fn node(&mut self) -> Result<Node, ParseError> {
        let position = self.position();
        let token = self.next("an operator or INPUT")?;
        let name = match token {
            Token::Ident(name) => name,
            other => {
                return Err(ParseError {
                    position,
                    kind: ParseErrorKind::Unexpected { found: other.text(), expected: "an operator or INPUT" },
                })
            }
        };
        if name == INPUT_TOKEN {
            return Ok(Node::Leaf);
        }
        if name == COMBINE_TOKEN {
            self.expect(Token::Open, "`(`")?;
            let left = self.node()?;
            self.expect(Token::Comma, "`,`")?;
            let right = self.node()?;
            self.expect(Token::Close, "`)`")?;
            return Ok(Node::combine(left, right));
        }
        let kind = OperatorKind::from_token(name).ok_or(ParseError {
            position,
            kind: ParseErrorKind::UnknownKind(name.to_string()),
        })?;
        self.expect(Token::Open, "`(`")?;
        let mut params = Vec::new();
        while let (Some(Token::Ident(param)), Some(Token::Equals)) =
            (self.peek().cloned(), self.tokens.get(self.at + 1).map(|t| &t.1))
        {
            let param_position = self.position();
            self.at += 2;
            let value_position = self.position();
            let raw = match self.next("a number")? {
                Token::Number(raw) => raw,
                other => {
                    return Err(ParseError {
                        position: value_position,
                        kind: ParseErrorKind::Unexpected { found: other.text(), expected: "a number" },
                    })
                }
            };
            let value = parse_value(kind, param, raw).map_err(|kind| ParseError {
                position: if matches!(kind, ParseErrorKind::BadNumber(_)) { value_position } else { param_position },
                kind,
            })?;
            params.push((param.to_string(), value));
            self.expect(Token::Comma, "`,`")?;
        }
        let child = self.node()?;
        self.expect(Token::Close, "`)`")?;
        let spec = OperatorSpec::from_params(kind, &params).map_err(|e| ParseError {
            position,
            kind: ParseErrorKind::Schema(e),
        })?;
        Ok(Node::unary(spec, child))
    }
}

fn parse_value(kind: OperatorKind, param: &str, raw: &str) -> Result<ParamValue, ParseErrorKind> {
    let def = kind
        .params()
        .iter()
        .find(|d| d.name == param)
        .ok_or_else(|| SpecError::UnknownParam { kind, name: param.to_string() })?;
    match def.domain {
        ParamDomain::Int { .. } => raw
            .parse::<i64>()
            .map(ParamValue::Int)
            .map_err(|_| ParseErrorKind::BadNumber(raw.to_string())),
        ParamDomain::Float(_) => raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(ParamValue::Float)
            .ok_or_else(|| ParseErrorKind::BadNumber(raw.to_string())),
    }
}

/// Parses one pipeline. The result is not validated; see
/// [`validate`](super::validate).
pub fn deserialize(text: &str) -> Result<PipelineTree, ParseError> {
    let mut parser = Parser { tokens: tokenize(text)?, at: 0, len: text.len() };
    let root = parser.node()?;
    if let Some(token) = parser.peek() {
        return Err(parser.error(ParseErrorKind::Trailing(token.text())));
    }
    Ok(PipelineTree::new(root))
}
