//! Plain-text syntax for polynomials, `Phi` and operators.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := signed ('*' signed)*
//! signed   := '-' signed | factor
//! factor   := base ('^' uint)?
//! base     := rational | ident | '(' expr ')'
//! rational := uint ('/' uint)?
//! ```
//!
//! So `^` binds tighter than unary minus, which binds tighter than `*`.
//! Multiplication must be explicit. Error positions are 1-based
//! character columns into the input.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::diffop::{DiffOperator, PhiSpec};
use crate::poly::{Coefficient, Polynomial, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Slash,
    End,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Number => "number",
            TokenKind::Ident => "identifier",
            TokenKind::Plus => "'+'",
            TokenKind::Minus => "'-'",
            TokenKind::Star => "'*'",
            TokenKind::Caret => "'^'",
            TokenKind::LParen => "'('",
            TokenKind::RParen => "')'",
            TokenKind::Slash => "'/'",
            TokenKind::End => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based column of the first character.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },
}

impl DslError {
    pub fn position(&self) -> usize {
        match self {
            DslError::Syntax(e) => e.position,
            DslError::UnknownVariable { position, .. } => *position,
        }
    }
}

fn syntax(position: usize, expected: &[&str], found: impl Into<String>) -> DslError {
    DslError::Syntax(SyntaxError {
        position,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.into(),
    })
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '^' => TokenKind::Caret,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '/' => TokenKind::Slash,
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Number,
                    lexeme: chars[start..i].iter().collect(),
                    position: start + 1,
                });
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident,
                    lexeme: chars[start..i].iter().collect(),
                    position: start + 1,
                });
                continue;
            }
            other => {
                return Err(syntax(start + 1, &["expression"], format!("'{other}'")));
            }
        };
        i += 1;
        tokens.push(Token {
            kind,
            lexeme: c.to_string(),
            position: start + 1,
        });
    }
    tokens.push(Token {
        kind: TokenKind::End,
        lexeme: String::new(),
        position: chars.len() + 1,
    });
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    ring: &'a Ring,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.kind != TokenKind::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> DslError {
        let t = self.peek();
        let found = match t.kind {
            TokenKind::End => "end of input".to_string(),
            _ => format!("'{}'", t.lexeme),
        };
        syntax(t.position, expected, found)
    }

    fn expr(&mut self) -> Result<Polynomial, DslError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                TokenKind::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, DslError> {
        let mut acc = self.signed()?;
        while self.peek().kind == TokenKind::Star {
            self.bump();
            acc = &acc * &self.signed()?;
        }
        Ok(acc)
    }

    fn signed(&mut self) -> Result<Polynomial, DslError> {
        if self.peek().kind == TokenKind::Minus {
            self.bump();
            return Ok(-&self.signed()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Polynomial, DslError> {
        let base = self.base()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        self.bump();
        let tok = self.peek().clone();
        if tok.kind != TokenKind::Number {
            return Err(self.unexpected(&["non-negative integer exponent"]));
        }
        let exp: u32 = tok
            .lexeme
            .parse()
            .map_err(|_| syntax(tok.position, &["exponent below 2^32"], tok.lexeme.clone()))?;
        self.bump();
        Ok(base.pow(exp))
    }

    fn base(&mut self) -> Result<Polynomial, DslError> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Number => {
                self.bump();
                let num: BigInt = tok.lexeme.parse().expect("digit run");
                let mut den = BigInt::from(1);
                if self.peek().kind == TokenKind::Slash {
                    self.bump();
                    let d = self.peek().clone();
                    if d.kind != TokenKind::Number {
                        return Err(self.unexpected(&["denominator"]));
                    }
                    den = d.lexeme.parse().expect("digit run");
                    if den.is_zero() {
                        return Err(syntax(d.position, &["nonzero denominator"], "'0'"));
                    }
                    self.bump();
                }
                Ok(Polynomial::constant(self.ring, Coefficient::new(num, den)))
            }
            TokenKind::Ident => {
                self.bump();
                Polynomial::var(self.ring, &tok.lexeme).map_err(|_| DslError::UnknownVariable {
                    name: tok.lexeme.clone(),
                    position: tok.position,
                })
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().kind != TokenKind::RParen {
                    return Err(self.unexpected(&["')'", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected(&["number", "identifier", "'('", "'-'"])),
        }
    }
}

/// Parses `text` into a canonical polynomial over `ring`.
pub fn parse_poly(text: &str, ring: &Ring) -> Result<Polynomial, DslError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        ring,
    };
    let p = parser.expr()?;
    if parser.peek().kind != TokenKind::End {
        return Err(parser.unexpected(&["operator", "end of input"]));
    }
    Ok(p)
}

/// Parses an operator over the symbols `Dx`, `Dy`.
pub fn parse_operator(text: &str) -> Result<DiffOperator, DslError> {
    let symbol = parse_poly(text, &Ring::dxdy())?;
    Ok(DiffOperator::from_symbol(symbol).expect("Dx/Dy symbol ring"))
}

/// Parses `Phi` as a polynomial in `t`.
pub fn parse_phi(text: &str) -> Result<PhiSpec, DslError> {
    let phi = parse_poly(text, &Ring::t())?;
    Ok(PhiSpec::new(phi).expect("t ring"))
}

pub fn format_poly(p: &Polynomial) -> String {
    p.to_string()
}

pub fn format_operator(op: &DiffOperator) -> String {
    op.to_string()
}

/// Reads a fixture file: one expression per line, `#` starts a comment,
/// blank lines are skipped. Returns `(line number, expression)` pairs.
pub fn fixture_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some((i + 1, body))
        })
        .collect()
}
