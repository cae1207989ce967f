//! Recursive-descent parser for the one-variable expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' unary)?
//! unary  := '-'? atom
//! atom   := number | var | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func   := 'sin'|'cos'|'tan'|'exp'|'log'|'sqrt'|'abs'
//! ```
//!
//! The variable may be spelled `t`, `u` or `s`. Exponents must not depend on
//! the variable.

use super::ast::{BinaryOp, Expr, NamedConst, UnaryOp};
use super::ExprError;

/// Identifiers accepted as the single free variable.
pub const VARIABLE_NAMES: [&str; 3] = ["t", "u", "s"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                // Exponent part only when digits follow, so `2e` stays `2`, `e`.
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &src[start..j];
                let value: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number '{text}'")))?;
                if !value.is_finite() {
                    return Err(syntax(start, format!("number '{text}' is out of range")));
                }
                out.push((Tok::Num(value), start));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((Tok::Ident(src[start..j].to_string()), start));
                i = j;
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character '{ch}'")));
            }
        }
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.unary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.unary()?;
        if !exponent.is_constant() {
            return Err(ExprError::NonConstantExponent { offset: at });
        }
        Ok(Expr::binary(BinaryOp::Pow, base, exponent))
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let literal = matches!(self.peek(), Tok::Num(_));
            let arg = self.atom()?;
            return Ok(match arg {
                Expr::Const(v) if literal => Expr::Const(-v),
                arg => Expr::unary(UnaryOp::Neg, arg),
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if VARIABLE_NAMES.contains(&name.as_str()) {
                    return Ok(Expr::Var);
                }
                match name.as_str() {
                    "pi" => return Ok(Expr::Named(NamedConst::Pi)),
                    "e" => return Ok(Expr::Named(NamedConst::E)),
                    _ => {}
                }
                match UnaryOp::from_function_name(&name) {
                    Some(op) => {
                        self.expect(Tok::LParen)?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(Expr::unary(op, arg))
                    }
                    None => Err(ExprError::UnknownIdentifier { offset: at, name }),
                }
            }
            // `bump` does not advance past End, so report the offending token's own offset.
            other => Err(syntax(at, format!("unexpected {}", other.describe()))),
        }
    }
}

/// Parses one scalar expression.
pub fn parse_expression(source: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(source)?;
    let mut p = Parser { toks, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(syntax(p.offset(), "empty expression"));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.offset(),
            format!("unexpected {} after expression", p.peek().describe()),
        ));
    }
    Ok(e)
}

/// Parses a comma-separated triple `x, y, z`. Error offsets refer to the
/// whole input.
pub fn parse_curve(source: &str) -> Result<[Expr; 3], ExprError> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in source.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((start, &source[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &source[start..]));
    if parts.len() != 3 {
        return Err(ExprError::ComponentCount { found: parts.len() });
    }
    let mut out = Vec::with_capacity(3);
    for (offset, text) in parts {
        out.push(parse_expression(text).map_err(|e| e.shifted(offset))?);
    }
    let [x, y, z]: [Expr; 3] = out.try_into().expect("three components");
    Ok([x, y, z])
}
