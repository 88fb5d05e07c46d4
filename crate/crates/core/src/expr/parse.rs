//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := unary (('*'|'/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := NUMBER | VAR | CALL | '(' expr ')'
//! VAR   := 'x' [1-9][0-9]*
//! CALL  := ('max'|'min'|'abs'|'sign'|'exp'|'ln'|'relu') '(' expr (',' expr)* ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-x1^2`
//! is `-(x1^2)` and `2^-1` is `0.5`.

use super::ast::{BinOp, Expr, Expression, Func};
use super::ParseError;
use crate::coords::Dimension;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn err(&self, position: usize, message: impl Into<String>) -> ParseError {
        ParseError { position, message: message.into() }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let start = self.pos;
            let Some(&c) = self.bytes.get(self.pos) else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            let tok = match c {
                b'0'..=b'9' | b'.' => {
                    let int = self.digits();
                    let mut frac = 0;
                    if self.bytes.get(self.pos) == Some(&b'.') {
                        self.pos += 1;
                        frac = self.digits();
                    }
                    if int + frac == 0 {
                        return Err(self.err(start, "expected digits"));
                    }
                    if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
                        self.pos += 1;
                        if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                            self.pos += 1;
                        }
                        if self.digits() == 0 {
                            return Err(self.err(self.pos, "expected exponent digits"));
                        }
                    }
                    let text = &self.src[start..self.pos];
                    let v: f64 = text.parse().map_err(|_| self.err(start, format!("bad number {text:?}")))?;
                    if !v.is_finite() {
                        return Err(self.err(start, format!("number {text:?} is not finite")));
                    }
                    Tok::Num(v)
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    while self.pos < self.bytes.len()
                        && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let word = &self.src[start..self.pos];
                    match word.strip_prefix('x') {
                        Some(idx) if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) => {
                            if idx.starts_with('0') {
                                return Err(self.err(start, format!("bad variable {word:?}: indices start at x1")));
                            }
                            let i: usize = idx
                                .parse()
                                .map_err(|_| self.err(start, format!("variable index too large in {word:?}")))?;
                            Tok::Var(i)
                        }
                        _ => Tok::Ident(word.to_string()),
                    }
                }
                b'+' | b'-' | b'*' | b'/' | b'^' => {
                    self.pos += 1;
                    Tok::Op(c as char)
                }
                b'(' => {
                    self.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    self.pos += 1;
                    Tok::RParen
                }
                b',' => {
                    self.pos += 1;
                    Tok::Comma
                }
                _ => {
                    let ch = self.src[start..].chars().next().unwrap_or('?');
                    return Err(self.err(start, format!("unexpected character {ch:?}")));
                }
            };
            out.push((tok, start));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    d: Dimension,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { position: self.pos(), message: message.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Var(i) => {
                if i > self.d.get() {
                    return Err(ParseError {
                        position: pos,
                        message: format!("variable x{i} exceeds dimension {}", self.d),
                    });
                }
                Ok(Expr::Var(i - 1))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = Func::from_name(&name).ok_or_else(|| ParseError {
                    position: pos,
                    message: format!("unknown function {name:?}"),
                })?;
                self.expect(Tok::LParen, "'(' after function name")?;
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "')' closing the argument list")?;
                if args.len() != func.arity() {
                    return Err(ParseError {
                        position: pos,
                        message: format!("{} takes {} argument(s), got {}", func.name(), func.arity(), args.len()),
                    });
                }
                Ok(Expr::Call(func, args))
            }
            other => {
                self.at -= usize::from(other != Tok::End);
                Err(self.err(format!("expected a number, variable, call or '(', found {}", describe(&other))))
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Var(i) => format!("variable x{i}"),
        Tok::Ident(s) => format!("identifier {s:?}"),
        Tok::Op(c) => format!("'{c}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses `text` as a function of `d` variables.
pub fn parse(text: &str, d: Dimension) -> Result<Expression, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, at: 0, d };
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(format!("unexpected {} after expression", describe(p.peek()))));
    }
    Ok(Expression { d, root })
}
