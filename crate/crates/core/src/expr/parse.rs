//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 'e' | 'pi' | func '(' expr ')' | '(' expr ')' | piecewise
//! piecewise := 'piecewise' '(' piece (';' piece)* ')'
//! piece  := number ':' number '->' expr
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-x^2`
//! is `-(x^2)` and `2^-x^2` is `2^(-(x^2))`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{Constant, Expr, Func, Piece};

const MAX_DEPTH: usize = 200;

/// A malformed input string, with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Num(f64),
    Ident(&'a str),
    Sym(u8),
    Arrow,
    End,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{}'", *c as char),
            Tok::Arrow => write!(f, "'->'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the next token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok<'a>, usize), ParseError> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let Some(&c) = bytes.get(start) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || (c == b'.' && bytes.get(start + 1).is_some_and(u8::is_ascii_digit)) {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() {
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_alphanumeric() {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(&self.src[start..end]), start));
        }
        if c == b'-' && bytes.get(start + 1) == Some(&b'>') {
            self.pos += 2;
            return Ok((Tok::Arrow, start));
        }
        if b"+-*/^();:".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Sym(c), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(ParseError { position: start, message: format!("unexpected character '{ch}'") })
    }

    fn number(&mut self, start: usize) -> Result<(Tok<'a>, usize), ParseError> {
        let bytes = self.src.as_bytes();
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        let mut end = digits(start);
        if bytes.get(end) == Some(&b'.') {
            end = digits(end + 1);
        }
        if matches!(bytes.get(end), Some(b'e' | b'E')) {
            // only an exponent if digits follow; otherwise `e` is the next token
            let mut k = end + 1;
            if matches!(bytes.get(k), Some(b'+' | b'-')) {
                k += 1;
            }
            if bytes.get(k).is_some_and(u8::is_ascii_digit) {
                end = digits(k);
            }
        }
        let text = &self.src[start..end];
        let value: f64 = text.parse().map_err(|_| ParseError {
            position: start,
            message: format!("invalid number '{text}'"),
        })?;
        if !value.is_finite() {
            return Err(ParseError { position: start, message: format!("number '{text}' is out of range") });
        }
        self.pos = end;
        Ok((Tok::Num(value), start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok<'a>,
    at: usize,
    depth: usize,
}

pub(super) fn parse(src: &str) -> Result<Expr, ParseError> {
    let result = parse_inner(src);
    result.map_err(|mut err| {
        // keep the offset inside the input, even for errors at end of input
        err.position = err.position.min(src.len().saturating_sub(1));
        err
    })
}

fn parse_inner(src: &str) -> Result<Expr, ParseError> {
    let mut lexer = Lexer { src, pos: 0 };
    let (tok, at) = lexer.next()?;
    let mut p = Parser { lexer, tok, at, depth: 0 };
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error(format!("unexpected {} after expression", p.tok)));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn error(&self, message: String) -> ParseError {
        ParseError { position: self.at, message }
    }

    fn expect(&mut self, sym: u8) -> Result<(), ParseError> {
        if self.tok == Tok::Sym(sym) {
            self.bump()
        } else {
            Err(self.error(format!("expected '{}', found {}", sym as char, self.tok)))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply".to_string()));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Sym(b'+') => {
                    self.bump()?;
                    lhs = Expr::Add(Arc::new(lhs), Arc::new(self.term()?));
                }
                Tok::Sym(b'-') => {
                    self.bump()?;
                    lhs = Expr::Sub(Arc::new(lhs), Arc::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Sym(b'*') => {
                    self.bump()?;
                    lhs = Expr::Mul(Arc::new(lhs), Arc::new(self.unary()?));
                }
                Tok::Sym(b'/') => {
                    self.bump()?;
                    lhs = Expr::Div(Arc::new(lhs), Arc::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Sym(b'-') {
            self.enter()?;
            self.bump()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Arc::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok == Tok::Sym(b'^') {
            self.enter()?;
            self.bump()?;
            let exponent = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Pow(Arc::new(base), Arc::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Const(v))
            }
            Tok::Sym(b'(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                match name {
                    "x" => Ok(Expr::Var),
                    "e" => Ok(Expr::Named(Constant::E)),
                    "pi" => Ok(Expr::Named(Constant::Pi)),
                    "piecewise" => self.piecewise(at),
                    _ => {
                        let func = Func::from_name(name).ok_or_else(|| ParseError {
                            position: at,
                            message: format!("unknown identifier '{name}'"),
                        })?;
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::Apply(func, Arc::new(arg)))
                    }
                }
            }
            tok => Err(self.error(format!("expected an expression, found {tok}"))),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        match self.tok {
            Tok::Num(v) => {
                self.bump()?;
                Ok(v)
            }
            tok => Err(self.error(format!("expected a breakpoint number, found {tok}"))),
        }
    }

    fn piecewise(&mut self, at: usize) -> Result<Expr, ParseError> {
        self.expect(b'(')?;
        let mut pieces = Vec::new();
        loop {
            let start = self.number()?;
            self.expect(b':')?;
            let end = self.number()?;
            if self.tok != Tok::Arrow {
                return Err(self.error(format!("expected '->', found {}", self.tok)));
            }
            self.bump()?;
            let body_at = self.at;
            let body = self.expr()?;
            if body.has_piecewise() {
                return Err(ParseError { position: body_at, message: "pieces may not be piecewise".to_string() });
            }
            pieces.push(Piece { start, end, body });
            if self.tok == Tok::Sym(b';') {
                self.bump()?;
                continue;
            }
            self.expect(b')')?;
            break;
        }
        Expr::piecewise(pieces).map_err(|e| ParseError { position: at, message: e.to_string() })
    }
}
