//! Recursive-descent parser for vector and scalar expressions.
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "·") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" integer)?
//! primary := number | "f1" | "f2" | "f3" | "xi" | "e" integer | name
//!          | "phi(" sum ")" | "eta(" sum ")" | "g(" sum "," sum ")"
//!          | "(" sum ")" | "{" sum "}" | "[" sum "]"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AmbientSpace, FormCoefficients, Vector};
use crate::symbolic::{Atom, Coefficient, Factor, SymbolicError, TensorExpr, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// `f1`, `f2`, `f3` as index 0, 1, 2.
    Coef(usize),
    Var(String),
    Xi,
    /// `e<k>`, one-based.
    Basis(usize),
    Phi(Box<Expr>),
    Eta(Box<Expr>),
    G(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

struct Lexer;

impl Lexer {
    fn run(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].1.is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].1.is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let end = chars.get(i).map_or(text.len(), |(p, _)| *p);
                let lit = &text[pos..end];
                let v: f64 = lit.parse().map_err(|_| ParseError {
                    position: chars[start].0,
                    message: format!("invalid number `{lit}`"),
                })?;
                out.push((pos, Tok::Num(v)));
            } else if c.is_alphabetic() || c == '_' {
                let start = pos;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let end = chars.get(i).map_or(text.len(), |(p, _)| *p);
                out.push((start, Tok::Ident(text[start..end].to_string())));
            } else if "+-*·^(){}[],".contains(c) {
                out.push((pos, Tok::Sym(if c == '·' { '*' } else { c })));
                i += 1;
            } else {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

const FUNCTIONS: [&str; 3] = ["phi", "eta", "g"];

impl Parser {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.primary()?;
        if self.eat('^') {
            match self.peek() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && *v >= 0.0 && *v <= 64.0 => {
                    let e = *v as u32;
                    self.at += 1;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => return self.err("exponent must be an integer in 0..=64"),
            }
        }
        Ok(base)
    }

    fn group(&mut self, open: char, close: char) -> Result<Expr, ParseError> {
        self.expect(open)?;
        let e = self.sum()?;
        self.expect(close)?;
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.at += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Sym('(')) => self.group('(', ')'),
            Some(Tok::Sym('{')) => self.group('{', '}'),
            Some(Tok::Sym('[')) => self.group('[', ']'),
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if self.peek() == Some(&Tok::Sym('(')) {
                    return self.call(&name, start);
                }
                if FUNCTIONS.contains(&name.as_str()) {
                    return Err(ParseError {
                        position: start,
                        message: format!("`{name}` needs arguments"),
                    });
                }
                Ok(match name.as_str() {
                    "f1" => Expr::Coef(0),
                    "f2" => Expr::Coef(1),
                    "f3" => Expr::Coef(2),
                    "xi" | "ξ" => Expr::Xi,
                    _ => match basis_index(&name) {
                        Some(k) => Expr::Basis(k),
                        None => Expr::Var(name),
                    },
                })
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }

    fn call(&mut self, name: &str, start: usize) -> Result<Expr, ParseError> {
        self.expect('(')?;
        let mut args = vec![self.sum()?];
        while self.eat(',') {
            args.push(self.sum()?);
        }
        self.expect(')')?;
        let arity = match name {
            "phi" | "φ" | "eta" | "η" => 1,
            "g" => 2,
            _ => {
                return Err(ParseError {
                    position: start,
                    message: format!("unknown function `{name}`"),
                })
            }
        };
        if args.len() != arity {
            return Err(ParseError {
                position: start,
                message: format!("`{name}` takes {arity} argument(s), got {}", args.len()),
            });
        }
        let mut it = args.into_iter().map(Box::new);
        let a = it.next().expect("arity checked");
        Ok(match name {
            "phi" | "φ" => Expr::Phi(a),
            "eta" | "η" => Expr::Eta(a),
            _ => Expr::G(a, it.next().expect("arity checked")),
        })
    }
}

fn basis_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('e')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses an expression; see the module grammar.
pub fn parse_vector_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let e = p.sum()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Numeric value of an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(Vector),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(x) => write!(f, "{x}"),
            Value::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

/// Bindings for numeric evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub space: &'a AmbientSpace,
    pub coefficients: Option<&'a FormCoefficients>,
    pub variables: &'a BTreeMap<String, Vector>,
}

enum Sym {
    Scalar(Vec<(Coefficient, Vec<Factor>)>),
    Vector(TensorExpr),
}

fn mismatch<T>(what: &str) -> Result<T, SymbolicError> {
    Err(SymbolicError::TypeMismatch(what.to_string()))
}

fn scalar_product(
    a: &[(Coefficient, Vec<Factor>)],
    b: &[(Coefficient, Vec<Factor>)],
) -> Vec<(Coefficient, Vec<Factor>)> {
    let mut out = Vec::new();
    for (ca, fa) in a {
        for (cb, fb) in b {
            let mut fs = fa.clone();
            fs.extend(fb.iter().cloned());
            out.push((ca * cb, fs));
        }
    }
    out
}

/// Scalar sums keep identical factor lists merged so that coefficient
/// groups stay one term per bracket entry.
fn scalar_sum(mut a: Vec<(Coefficient, Vec<Factor>)>, b: Vec<(Coefficient, Vec<Factor>)>) -> Vec<(Coefficient, Vec<Factor>)> {
    for (c, fs) in b {
        match a.iter_mut().find(|(_, f)| *f == fs) {
            Some(slot) => slot.0 = &slot.0 + &c,
            None => a.push((c, fs)),
        }
    }
    a.retain(|(c, _)| !c.is_zero());
    a
}

fn scale_vector(s: &[(Coefficient, Vec<Factor>)], v: &TensorExpr) -> TensorExpr {
    let mut terms = Vec::new();
    for (c, fs) in s {
        for t in &v.terms {
            let mut factors = fs.clone();
            factors.extend(t.factors.iter().cloned());
            terms.push(Term::new(c * &t.coeff, factors, t.vector.clone()));
        }
    }
    TensorExpr::from_terms(terms)
}

fn is_zero_scalar(s: &[(Coefficient, Vec<Factor>)]) -> bool {
    s.iter().all(|(c, _)| c.is_zero())
}

fn vector_of(s: Sym, what: &str) -> Result<TensorExpr, SymbolicError> {
    match s {
        Sym::Vector(v) => Ok(v),
        Sym::Scalar(x) if is_zero_scalar(&x) => Ok(TensorExpr::zero()),
        Sym::Scalar(_) => mismatch(&format!("{what} expects a vector")),
    }
}

impl Expr {
    fn symbolic(&self) -> Result<Sym, SymbolicError> {
        use Expr::*;
        Ok(match self {
            Num(v) => {
                if v.fract() != 0.0 || v.abs() > 9.0e15 {
                    return Err(SymbolicError::NotSymbolic(format!("non-integer constant {v}")));
                }
                Sym::Scalar(vec![(Coefficient::constant(*v as i64), Vec::new())])
            }
            Coef(i) => Sym::Scalar(vec![(Coefficient::var(*i), Vec::new())]),
            Var(v) => Sym::Vector(TensorExpr::var(v)),
            Xi => Sym::Vector(TensorExpr::atom(Atom::Xi)),
            Basis(k) => {
                return Err(SymbolicError::NotSymbolic(format!(
                    "basis vector e{k} needs a concrete structure"
                )))
            }
            Phi(a) => {
                let v = vector_of(a.symbolic()?, "phi")?;
                Sym::Vector(TensorExpr::from_terms(
                    v.terms
                        .into_iter()
                        .map(|t| Term::new(t.coeff, t.factors, t.vector.phi()))
                        .collect(),
                ))
            }
            Eta(a) => {
                let v = vector_of(a.symbolic()?, "eta")?;
                Sym::Scalar(
                    v.terms
                        .into_iter()
                        .map(|t| {
                            let mut fs = t.factors;
                            fs.push(Factor::Eta(t.vector));
                            (t.coeff, fs)
                        })
                        .collect(),
                )
            }
            G(a, b) => {
                let va = vector_of(a.symbolic()?, "g")?;
                let vb = vector_of(b.symbolic()?, "g")?;
                let mut out = Vec::new();
                for ta in &va.terms {
                    for tb in &vb.terms {
                        let mut fs = ta.factors.clone();
                        fs.extend(tb.factors.iter().cloned());
                        fs.push(Factor::G(ta.vector.clone(), tb.vector.clone()));
                        out.push((&ta.coeff * &tb.coeff, fs));
                    }
                }
                Sym::Scalar(out)
            }
            Neg(a) => match a.symbolic()? {
                Sym::Scalar(s) => Sym::Scalar(s.into_iter().map(|(c, f)| (-c, f)).collect()),
                Sym::Vector(v) => Sym::Vector(v.scaled(&Coefficient::constant(-1))),
            },
            Add(a, b) | Sub(a, b) => {
                let sign = if matches!(self, Sub(..)) { -1 } else { 1 };
                match (a.symbolic()?, b.symbolic()?) {
                    (Sym::Scalar(x), Sym::Scalar(y)) => Sym::Scalar(scalar_sum(
                        x,
                        y.into_iter().map(|(c, f)| (c * Coefficient::constant(sign), f)).collect(),
                    )),
                    (x, y) => {
                        let (vx, vy) = (vector_of(x, "sum")?, vector_of(y, "sum")?);
                        Sym::Vector(vx.plus(&vy.scaled(&Coefficient::constant(sign))))
                    }
                }
            }
            Mul(a, b) => match (a.symbolic()?, b.symbolic()?) {
                (Sym::Scalar(x), Sym::Scalar(y)) => Sym::Scalar(scalar_product(&x, &y)),
                (Sym::Scalar(x), Sym::Vector(v)) | (Sym::Vector(v), Sym::Scalar(x)) => {
                    Sym::Vector(scale_vector(&x, &v))
                }
                (Sym::Vector(_), Sym::Vector(_)) => return mismatch("product of two vectors"),
            },
            Pow(a, e) => match a.symbolic()? {
                Sym::Scalar(x) => {
                    let mut acc = vec![(Coefficient::one(), Vec::new())];
                    for _ in 0..*e {
                        acc = scalar_product(&acc, &x);
                    }
                    Sym::Scalar(scalar_sum(Vec::new(), acc))
                }
                Sym::Vector(_) => return mismatch("power of a vector"),
            },
        })
    }

    /// Symbolic reading as a vector expression. A scalar that is identically
    /// zero reads as the empty sum.
    pub fn to_tensor(&self) -> Result<TensorExpr, SymbolicError> {
        vector_of(self.symbolic()?, "expression")
    }

    pub fn eval_numeric(&self, ctx: &EvalContext<'_>) -> Result<Value, SymbolicError> {
        use Expr::*;
        let s = ctx.space;
        let vec_arg = |e: &Expr| -> Result<Vector, SymbolicError> {
            match e.eval_numeric(ctx)? {
                Value::Vector(v) => Ok(v),
                Value::Scalar(0.0) => Ok(s.zero()),
                Value::Scalar(_) => mismatch("expected a vector argument"),
            }
        };
        Ok(match self {
            Num(v) => Value::Scalar(*v),
            Coef(i) => {
                let f = ctx.coefficients.ok_or(SymbolicError::UnboundCoefficients)?;
                Value::Scalar([f.f1, f.f2, f.f3][*i])
            }
            Var(v) => {
                let x = ctx
                    .variables
                    .get(v)
                    .ok_or_else(|| SymbolicError::UnassignedVariable(v.clone()))?;
                if x.len() != s.dim() {
                    return Err(SymbolicError::DimensionMismatch {
                        expected: s.dim(),
                        found: x.len(),
                    });
                }
                Value::Vector(x.clone())
            }
            Xi => Value::Vector(s.xi().clone()),
            Basis(k) => {
                if *k == 0 || *k > s.dim() {
                    return Err(SymbolicError::BasisOutOfRange {
                        index: *k,
                        dim: s.dim(),
                    });
                }
                Value::Vector(s.basis_vector(k - 1))
            }
            Phi(a) => Value::Vector(s.phi(&vec_arg(a)?)),
            Eta(a) => Value::Scalar(s.eta(&vec_arg(a)?)),
            G(a, b) => Value::Scalar(s.g(&vec_arg(a)?, &vec_arg(b)?)),
            Neg(a) => match a.eval_numeric(ctx)? {
                Value::Scalar(x) => Value::Scalar(-x),
                Value::Vector(v) => Value::Vector(-v),
            },
            Add(a, b) | Sub(a, b) => {
                let sign = if matches!(self, Sub(..)) { -1.0 } else { 1.0 };
                match (a.eval_numeric(ctx)?, b.eval_numeric(ctx)?) {
                    (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x + sign * y),
                    (Value::Vector(x), Value::Vector(y)) => Value::Vector(x + y * sign),
                    (Value::Vector(x), Value::Scalar(y)) | (Value::Scalar(y), Value::Vector(x))
                        if y == 0.0 =>
                    {
                        Value::Vector(x)
                    }
                    _ => return mismatch("sum of a scalar and a vector"),
                }
            }
            Mul(a, b) => match (a.eval_numeric(ctx)?, b.eval_numeric(ctx)?) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x * y),
                (Value::Scalar(x), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(x)) => {
                    Value::Vector(v * x)
                }
                _ => return mismatch("product of two vectors"),
            },
            Pow(a, e) => match a.eval_numeric(ctx)? {
                Value::Scalar(x) => Value::Scalar(x.powi(*e as i32)),
                Value::Vector(_) => return mismatch("power of a vector"),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::standard_structure;

    fn eval(text: &str) -> Value {
        let s = standard_structure(2).unwrap();
        let vars = BTreeMap::new();
        let ctx = EvalContext {
            space: &s,
            coefficients: None,
            variables: &vars,
        };
        parse_vector_expr(text).unwrap().eval_numeric(&ctx).unwrap()
    }

    fn e(i: usize) -> Vector {
        standard_structure(2).unwrap().basis_vector(i - 1)
    }

    #[test]
    fn numeric_examples() {
        assert_eq!(eval("phi(e1)"), Value::Vector(e(2)));
        assert_eq!(eval("g(e1, phi(e2))"), Value::Scalar(-1.0));
        assert_eq!(eval("eta(xi)"), Value::Scalar(1.0));
        assert_eq!(eval("2*e1 - e3 · 0.5"), Value::Vector(e(1) * 2.0 - e(3) * 0.5));
        assert_eq!(eval("-(1.5e1)^2"), Value::Scalar(-225.0));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_vector_expr("g(X)").unwrap_err();
        assert_eq!(err.position, 0);
        assert!(err.message.contains("2 argument"));
        let err = parse_vector_expr("X + foo(Y)").unwrap_err();
        assert_eq!(err.position, 4);
        assert!(err.message.contains("unknown function"));
        let err = parse_vector_expr("X + ").unwrap_err();
        assert_eq!(err.position, 4);
        assert!(parse_vector_expr("phi + X").is_err());
        assert!(parse_vector_expr("X $ Y").is_err());
        assert!(parse_vector_expr("(X").is_err());
        assert!(parse_vector_expr("X Y").is_err());
    }

    #[test]
    fn numeric_errors() {
        let s = standard_structure(2).unwrap();
        let vars = BTreeMap::new();
        let ctx = EvalContext {
            space: &s,
            coefficients: None,
            variables: &vars,
        };
        let run = |t: &str| parse_vector_expr(t).unwrap().eval_numeric(&ctx).unwrap_err();
        assert_eq!(run("Q"), SymbolicError::UnassignedVariable("Q".into()));
        assert_eq!(run("e6"), SymbolicError::BasisOutOfRange { index: 6, dim: 5 });
        assert_eq!(run("f1*e1"), SymbolicError::UnboundCoefficients);
        assert!(matches!(run("e1*e2"), SymbolicError::TypeMismatch(_)));
    }

    #[test]
    fn symbolic_reading() {
        let t = parse_vector_expr("f1*{g(Y,Z)*X - g(X,Z)*Y}").unwrap().to_tensor().unwrap();
        assert_eq!(t.to_string(), "f1*g(Y,Z)*X - f1*g(X,Z)*Y");
        let t = parse_vector_expr("(f1 - f3)^2*phi(X)").unwrap().to_tensor().unwrap();
        assert_eq!(t.to_string(), "(f1^2 - 2*f1*f3 + f3^2)*phi(X)");
        assert!(parse_vector_expr("0").unwrap().to_tensor().unwrap().is_zero());
        assert!(parse_vector_expr("e1").unwrap().to_tensor().is_err());
        assert!(parse_vector_expr("0.5*X").unwrap().to_tensor().is_err());
        assert!(parse_vector_expr("g(X,Y)").unwrap().to_tensor().is_err());
    }
}
