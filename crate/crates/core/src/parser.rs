//! Expression grammar: lexer, recursive-descent parser and evaluation
//! against a model.
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := power ('*' power)*
//! power    := factor ('^' factor)*
//! factor   := rational | ident | 'd' '(' ident (',' ident)+ ')'
//!           | 'dx' '(' ident ')' | 'theta' '(' ident (',' ident)* ')'
//!           | '(' expr ')'
//! rational := int ('/' int)?
//! ```
//!
//! `^` is exponentiation between scalars (the exponent must be a literal
//! non-negative integer) and the wedge product between forms; the operand
//! kinds decide. A product that syntactically repeats the same odd factor is
//! rejected rather than silently evaluated to zero.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::form::GradedForm;
use crate::index::MultiIndex;
use crate::model::Model;
use crate::parity::Parity;
use crate::scalar::{GradedScalar, Rat};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

fn err<T>(span: Span, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        span,
        message: message.into(),
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug)]
struct Lexed {
    tok: Tok,
    span: Span,
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let mut line = first_line;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                chars.next();
                continue;
            }
            c if c.is_whitespace() => {
                col += 1;
                chars.next();
                continue;
            }
            '+' => out.push(Lexed { tok: Tok::Plus, span }),
            '-' => out.push(Lexed { tok: Tok::Minus, span }),
            '*' => out.push(Lexed { tok: Tok::Star, span }),
            '^' => out.push(Lexed { tok: Tok::Caret, span }),
            '/' => out.push(Lexed { tok: Tok::Slash, span }),
            '(' => out.push(Lexed { tok: Tok::LParen, span }),
            ')' => out.push(Lexed { tok: Tok::RParen, span }),
            ',' => out.push(Lexed { tok: Tok::Comma, span }),
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Lexed { tok: Tok::Int(s), span });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Lexed { tok: Tok::Ident(s), span });
                continue;
            }
            other => return err(span, format!("unexpected character `{other}`")),
        }
        chars.next();
        col += 1;
    }
    Ok(out)
}

/// Expression syntax tree.
#[derive(Clone, Debug)]
pub enum Expr {
    Rational(Rat, Span),
    Symbol(String, Span),
    Jet {
        field: String,
        coords: Vec<String>,
        span: Span,
    },
    Dx {
        coord: String,
        span: Span,
    },
    Theta {
        field: String,
        coords: Vec<String>,
        span: Span,
    },
    Neg(Box<Expr>, Span),
    Add(Box<Expr>, Box<Expr>, Span),
    Sub(Box<Expr>, Box<Expr>, Span),
    Mul(Box<Expr>, Box<Expr>, Span),
    Pow(Box<Expr>, Box<Expr>, Span),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Rational(_, s)
            | Expr::Symbol(_, s)
            | Expr::Jet { span: s, .. }
            | Expr::Dx { span: s, .. }
            | Expr::Theta { span: s, .. }
            | Expr::Neg(_, s)
            | Expr::Add(_, _, s)
            | Expr::Sub(_, _, s)
            | Expr::Mul(_, _, s)
            | Expr::Pow(_, _, s) => *s,
        }
    }
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    end: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Lexed> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Lexed> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> Span {
        self.peek().map(|l| l.span).unwrap_or(self.end)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Span, ParseError> {
        match self.next() {
            Some(l) if l.tok == tok => Ok(l.span),
            Some(l) => err(l.span, format!("expected {what}")),
            None => err(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match self.next() {
            Some(Lexed {
                tok: Tok::Ident(s),
                span,
            }) => Ok((s, span)),
            Some(l) => err(l.span, format!("expected {what}")),
            None => err(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let span = self.here();
        let negated = matches!(self.peek(), Some(l) if l.tok == Tok::Minus);
        if negated {
            self.next();
        }
        let mut acc = self.term()?;
        if negated {
            acc = Expr::Neg(Box::new(acc), span);
        }
        loop {
            match self.peek().map(|l| l.tok.clone()) {
                Some(Tok::Plus) => {
                    let op = self.next().unwrap().span;
                    let rhs = self.term()?;
                    acc = Expr::Add(Box::new(acc), Box::new(rhs), op);
                }
                Some(Tok::Minus) => {
                    let op = self.next().unwrap().span;
                    let rhs = self.term()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(rhs), op);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.power()?;
        while matches!(self.peek(), Some(l) if l.tok == Tok::Star) {
            let op = self.next().unwrap().span;
            let rhs = self.power()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs), op);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(l) if l.tok == Tok::Caret) {
            let op = self.next().unwrap().span;
            let rhs = self.factor()?;
            acc = Expr::Pow(Box::new(acc), Box::new(rhs), op);
        }
        Ok(acc)
    }

    fn index_list(&mut self, min: usize) -> Result<Vec<String>, ParseError> {
        let mut coords = Vec::new();
        while matches!(self.peek(), Some(l) if l.tok == Tok::Comma) {
            self.next();
            let (c, _) = self.expect_ident("a coordinate name")?;
            coords.push(c);
        }
        if coords.len() < min {
            return err(self.here(), "expected at least one derivative index");
        }
        Ok(coords)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let Some(l) = self.next() else {
            return err(self.end, "expected an expression");
        };
        match l.tok {
            Tok::Int(num) => {
                let numer: BigInt = num.parse().expect("lexer produced digits");
                if matches!(self.peek(), Some(t) if t.tok == Tok::Slash) {
                    self.next();
                    match self.next() {
                        Some(Lexed {
                            tok: Tok::Int(den),
                            ..
                        }) => {
                            let denom: BigInt = den.parse().expect("lexer produced digits");
                            if denom.is_zero() {
                                return err(l.span, "zero denominator");
                            }
                            Ok(Expr::Rational(BigRational::new(numer, denom), l.span))
                        }
                        _ => err(self.here(), "expected a denominator"),
                    }
                } else {
                    Ok(Expr::Rational(BigRational::from_integer(numer), l.span))
                }
            }
            Tok::Ident(name) if name == "d" && self.peek_is_lparen() => {
                self.expect(Tok::LParen, "`(`")?;
                let (field, _) = self.expect_ident("a field name")?;
                let coords = self.index_list(1)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Jet {
                    field,
                    coords,
                    span: l.span,
                })
            }
            Tok::Ident(name) if name == "dx" && self.peek_is_lparen() => {
                self.expect(Tok::LParen, "`(`")?;
                let (coord, _) = self.expect_ident("a coordinate name")?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Dx { coord, span: l.span })
            }
            Tok::Ident(name) if name == "theta" && self.peek_is_lparen() => {
                self.expect(Tok::LParen, "`(`")?;
                let (field, _) = self.expect_ident("a field name")?;
                let coords = self.index_list(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Theta {
                    field,
                    coords,
                    span: l.span,
                })
            }
            Tok::Ident(name) => Ok(Expr::Symbol(name, l.span)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Minus => {
                let inner = self.factor()?;
                Ok(Expr::Neg(Box::new(inner), l.span))
            }
            _ => err(l.span, "expected an expression"),
        }
    }

    fn peek_is_lparen(&self) -> bool {
        matches!(self.peek(), Some(l) if l.tok == Tok::LParen)
    }
}

/// Parses one expression; `first_line` seats diagnostics in a larger file.
pub fn parse_expr(text: &str, first_line: usize) -> Result<Expr, ParseError> {
    let toks = lex(text, first_line)?;
    let end = toks
        .last()
        .map(|l| Span {
            line: l.span.line,
            col: l.span.col + 1,
        })
        .unwrap_or(Span {
            line: first_line,
            col: 1,
        });
    let mut p = Parser { toks, pos: 0, end };
    let e = p.expr()?;
    if let Some(extra) = p.peek() {
        return err(extra.span, "unexpected trailing input");
    }
    Ok(e)
}

/// A parsed value: scalar or form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(GradedScalar),
    Form(GradedForm),
}

impl Value {
    pub fn into_scalar(self, span: Span) -> Result<GradedScalar, ParseError> {
        match self {
            Value::Scalar(s) => Ok(s),
            Value::Form(_) => Err(ParseError {
                span,
                message: "expected a scalar expression, found a form".into(),
            }),
        }
    }

    pub fn into_form(self, dim: u8) -> GradedForm {
        match self {
            Value::Scalar(s) => GradedForm::from_scalar(s),
            Value::Form(f) => f,
        }
    }
}

/// The identity of a syntactic factor, used to flag odd squares.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum FactorKey {
    Sym(String, Vec<String>),
}

fn resolve_index(
    model: &Model,
    coords: &[String],
    span: Span,
) -> Result<MultiIndex, ParseError> {
    let mut entries = Vec::new();
    for c in coords {
        match model.coord_index(c) {
            Some(i) => entries.push(i),
            None => return err(span, format!("unknown coordinate `{c}`")),
        }
    }
    if entries.len() > model.max_jet_order() {
        return err(
            span,
            format!(
                "jet order {} exceeds the bound {}",
                entries.len(),
                model.max_jet_order()
            ),
        );
    }
    Ok(MultiIndex::new(entries))
}

/// Evaluates an expression, validating as it goes.
pub fn eval(expr: &Expr, model: &Model) -> Result<Value, ParseError> {
    let mut odd_factors = Vec::new();
    eval_inner(expr, model, &mut odd_factors)
}

fn eval_inner(
    expr: &Expr,
    model: &Model,
    odd_factors: &mut Vec<(FactorKey, Span)>,
) -> Result<Value, ParseError> {
    let dim = model.dim();
    match expr {
        Expr::Rational(r, _) => Ok(Value::Scalar(GradedScalar::constant(dim, r.clone()))),
        Expr::Symbol(name, span) => {
            if let Some(i) = model.coord_index(name) {
                return Ok(Value::Scalar(GradedScalar::coord(dim, i)));
            }
            match model.resolve(name) {
                Ok(gen) => {
                    let sym = model.sym0(gen);
                    if sym.parity.is_odd() {
                        record_odd(odd_factors, FactorKey::Sym(name.clone(), vec![]), *span)?;
                    }
                    Ok(Value::Scalar(GradedScalar::sym(dim, sym)))
                }
                Err(_) => err(*span, format!("unknown identifier `{name}`")),
            }
        }
        Expr::Jet {
            field,
            coords,
            span,
        } => {
            let gen = model
                .resolve(field)
                .map_err(|_| ParseError {
                    span: *span,
                    message: format!("unknown field `{field}`"),
                })?;
            let idx = resolve_index(model, coords, *span)?;
            let sym = model.sym(gen, idx);
            if sym.parity.is_odd() {
                let mut sorted = coords.clone();
                sorted.sort();
                record_odd(odd_factors, FactorKey::Sym(field.clone(), sorted), *span)?;
            }
            Ok(Value::Scalar(GradedScalar::sym(dim, sym)))
        }
        Expr::Dx { coord, span } => match model.coord_index(coord) {
            Some(i) => Ok(Value::Form(GradedForm::dx(dim, i))),
            None => err(*span, format!("unknown coordinate `{coord}`")),
        },
        Expr::Theta {
            field,
            coords,
            span,
        } => {
            let gen = model.resolve(field).map_err(|_| ParseError {
                span: *span,
                message: format!("unknown field `{field}`"),
            })?;
            let idx = resolve_index(model, coords, *span)?;
            Ok(Value::Form(GradedForm::theta(dim, model.sym(gen, idx))))
        }
        Expr::Neg(inner, _) => {
            let v = eval_inner(inner, model, odd_factors)?;
            Ok(match v {
                Value::Scalar(s) => Value::Scalar(-&s),
                Value::Form(f) => Value::Form(-&f),
            })
        }
        Expr::Add(a, b, span) | Expr::Sub(a, b, span) => {
            // additive boundaries reset the repeated-factor tracking
            let mut left_factors = Vec::new();
            let va = eval_inner(a, model, &mut left_factors)?;
            let mut right_factors = Vec::new();
            let vb = eval_inner(b, model, &mut right_factors)?;
            let negate = matches!(expr, Expr::Sub(..));
            let _ = span;
            match (va, vb) {
                (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(if negate {
                    &x - &y
                } else {
                    &x + &y
                })),
                // scalars embed as (0, 0) forms
                (x, y) => {
                    let dim = model.dim();
                    let (x, y) = (x.into_form(dim), y.into_form(dim));
                    Ok(Value::Form(if negate { &x - &y } else { &x + &y }))
                }
            }
        }
        Expr::Mul(a, b, span) => {
            let va = eval_inner(a, model, odd_factors)?;
            let vb = eval_inner(b, model, odd_factors)?;
            match (va, vb) {
                (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(&x * &y)),
                (Value::Scalar(x), Value::Form(y)) => Ok(Value::Form(y.mul_scalar_left(&x))),
                (Value::Form(x), Value::Scalar(y)) => Ok(Value::Form(x.mul_scalar_right(&y))),
                (Value::Form(_), Value::Form(_)) => {
                    err(*span, "use `^` for the wedge product of forms")
                }
            }
        }
        Expr::Pow(a, b, span) => {
            let va = eval_inner(a, model, odd_factors)?;
            let vb = eval_inner(b, model, &mut Vec::new())?;
            match (va, vb) {
                (Value::Form(x), Value::Form(y)) => Ok(Value::Form(x.wedge(&y))),
                (Value::Scalar(base), Value::Scalar(_)) => {
                    let Expr::Rational(r, _) = &**b else {
                        return err(
                            *span,
                            "a scalar exponent must be a literal non-negative integer",
                        );
                    };
                    if !r.denom().is_one() || r.is_negative() {
                        return err(
                            *span,
                            "a scalar exponent must be a literal non-negative integer",
                        );
                    }
                    let e = r.numer().to_u32().ok_or_else(|| ParseError {
                        span: *span,
                        message: "exponent too large".into(),
                    })?;
                    if e > 1 && base.parity() == Some(Parity::Odd) && !base.is_zero() {
                        return err(
                            *span,
                            "power of an odd quantity vanishes; write the intended expression explicitly",
                        );
                    }
                    let mut acc = GradedScalar::one(model.dim());
                    for _ in 0..e {
                        acc = &acc * &base;
                    }
                    Ok(Value::Scalar(acc))
                }
                _ => err(*span, "`^` joins two forms (wedge) or a scalar and an integer"),
            }
        }
    }
}

fn record_odd(
    seen: &mut Vec<(FactorKey, Span)>,
    key: FactorKey,
    span: Span,
) -> Result<(), ParseError> {
    if seen.iter().any(|(k, _)| *k == key) {
        return err(
            span,
            "this odd factor is repeated in the product; the result is identically zero",
        );
    }
    seen.push((key, span));
    Ok(())
}

/// Parse and evaluate in one step.
pub fn parse_value(text: &str, model: &Model, first_line: usize) -> Result<Value, ParseError> {
    let expr = parse_expr(text, first_line)?;
    eval(&expr, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn model() -> Model {
        let mut m = Model::new(&["x", "y"]);
        m.declare_field("u", Parity::Even).unwrap();
        m.declare_field("c", Parity::Odd).unwrap();
        m
    }

    #[test]
    fn parses_half_ux_squared() {
        let m = model();
        let v = parse_value("1/2 * d(u,x)*d(u,x)", &m, 1).unwrap();
        let ux = GradedScalar::sym(2, m.sym(m.resolve("u").unwrap(), MultiIndex::single(0)));
        assert_eq!(v, Value::Scalar((&ux * &ux).scale(&rat(1, 2))));
        // the caret form is the same value
        let w = parse_value("1/2*d(u,x)^2", &m, 1).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn parses_contact_wedge() {
        let m = model();
        let v = parse_value("theta(u,x) ^ dx(x)", &m, 1).unwrap();
        match v {
            Value::Form(f) => {
                assert_eq!(f.bidegree(), Some((1, 1)));
            }
            _ => panic!("expected a form"),
        }
    }

    #[test]
    fn odd_square_is_flagged_not_zeroed() {
        let m = model();
        let e = parse_value("c * c", &m, 1).unwrap_err();
        assert!(e.message.contains("odd factor"));
        let e = parse_value("c^2", &m, 1).unwrap_err();
        assert!(e.message.contains("odd"));
        // distinct odd jets are fine
        assert!(parse_value("c * d(c,x)", &m, 1).is_ok());
        // and reuse across additive boundaries is fine
        assert!(parse_value("c + c", &m, 1).is_ok());
        // (u + c)^2 is legitimate: the base is not homogeneous odd
        assert!(parse_value("(u + c)^2", &m, 1).is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        let m = model();
        let e = parse_value("u + $", &m, 3).unwrap_err();
        assert_eq!(e.span.line, 3);
        assert_eq!(e.span.col, 5);
        let e = parse_value("u + w", &m, 1).unwrap_err();
        assert!(e.message.contains("unknown identifier"));
        let e = parse_value("(u + u", &m, 1).unwrap_err();
        assert!(e.message.contains("expected"));
    }

    #[test]
    fn wedge_requires_forms() {
        let m = model();
        assert!(parse_value("u ^ dx(x)", &m, 1).is_err());
        assert!(parse_value("dx(x) * dx(y)", &m, 1).is_err());
        assert!(parse_value("u ^ u", &m, 1).is_err());
    }

    #[test]
    fn jet_syntax_and_bounds() {
        let m = model().with_max_jet_order(2);
        assert!(parse_value("d(u,x,x)", &m, 1).is_ok());
        let e = parse_value("d(u,x,x,y)", &m, 1).unwrap_err();
        assert!(e.message.contains("exceeds"));
        assert!(parse_value("d(u)", &m, 1).is_err());
    }
}
