//! Closed-form field expressions: `+ - * / ^`, unary minus, `abs min max`, trig, `exp log sqrt`,
//! the constants `pi` and `e`, and variables `x1..x3`. Expressions differentiate symbolically so
//! that jets of boundary data are exact.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func2 {
    Min,
    Max,
    Atan2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Call2(Func2, Box<Expr>, Box<Expr>),
}

fn func_name(f: Func) -> &'static str {
    match f {
        Func::Abs => "abs",
        Func::Sin => "sin",
        Func::Cos => "cos",
        Func::Tan => "tan",
        Func::Asin => "asin",
        Func::Acos => "acos",
        Func::Atan => "atan",
        Func::Exp => "exp",
        Func::Log => "log",
        Func::Sqrt => "sqrt",
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(g, a) => write!(f, "{}({a})", func_name(*g)),
            Expr::Call2(g, a, b) => {
                let name = match g {
                    Func2::Min => "min",
                    Func2::Max => "max",
                    Func2::Atan2 => "atan2",
                };
                write!(f, "{name}({a}, {b})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // Exponent part, only when followed by a digit (optionally signed).
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse().map_err(|_| Error::Expr(format!("bad number '{text}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Expr(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Expr(format!("expected '{c}' at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            // Right associative, and binds tighter than a leading minus on the left only.
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let a = self.expr()?;
                    let two = |p: &mut Parser, f: Func2| -> Result<Expr> {
                        p.expect(',')?;
                        let b = p.expr()?;
                        p.expect(')')?;
                        Ok(Expr::Call2(f, Box::new(a.clone()), Box::new(b)))
                    };
                    let one = match name.as_str() {
                        "abs" => Func::Abs,
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "tan" => Func::Tan,
                        "asin" => Func::Asin,
                        "acos" => Func::Acos,
                        "atan" => Func::Atan,
                        "exp" => Func::Exp,
                        "log" => Func::Log,
                        "sqrt" => Func::Sqrt,
                        "min" => return two(self, Func2::Min),
                        "max" => return two(self, Func2::Max),
                        "atan2" => return two(self, Func2::Atan2),
                        other => return Err(Error::Expr(format!("unknown function '{other}'"))),
                    };
                    self.expect(')')?;
                    return Ok(Expr::Call(one, Box::new(a)));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    "x1" => Ok(Expr::Var(0)),
                    "x2" => Ok(Expr::Var(1)),
                    "x3" => Ok(Expr::Var(2)),
                    other => Err(Error::Expr(format!("unknown identifier '{other}'"))),
                }
            }
            Some(t) => Err(Error::Expr(format!("unexpected token {t:?}"))),
            None => Err(Error::Expr("unexpected end of expression".into())),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: tokenize(s)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Expr(format!("trailing input after token {}", p.pos)));
    }
    Ok(e)
}

fn num(v: f64) -> Box<Expr> {
    Box::new(Expr::Num(v))
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x.get(*i).copied().unwrap_or(f64::NAN),
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match **b {
                    Expr::Num(k) if k.fract() == 0.0 && k.abs() < 64.0 => base.powi(k as i32),
                    _ => base.powf(b.eval(x)),
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Abs => v.abs(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.tan(),
                    Func::Asin => v.asin(),
                    Func::Acos => v.acos(),
                    Func::Atan => v.atan(),
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Sqrt => v.sqrt(),
                }
            }
            Expr::Call2(f, a, b) => {
                let (u, v) = (a.eval(x), b.eval(x));
                match f {
                    Func2::Min => u.min(v),
                    Func2::Max => u.max(v),
                    Func2::Atan2 => u.atan2(v),
                }
            }
        }
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Call2(_, a, b) => a.arity().max(b.arity()),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 1.0)
    }

    fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            (Expr::Num(u), Expr::Num(v)) => Expr::Num(u + v),
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    fn sub(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if b.is_zero() => a,
            _ if a.is_zero() => Expr::neg(b),
            (Expr::Num(u), Expr::Num(v)) => Expr::Num(u - v),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if a.is_zero() || b.is_zero() => Expr::Num(0.0),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            (Expr::Num(u), Expr::Num(v)) => Expr::Num(u * v),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return Expr::Num(0.0);
        }
        if b.is_one() {
            return a;
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    fn neg(a: Expr) -> Expr {
        match a {
            Expr::Num(v) => Expr::Num(-v),
            other => Expr::Neg(Box::new(other)),
        }
    }

    /// Indicator-free derivative: `min`/`max`/`abs` differentiate branchwise through
    /// comparisons encoded with `max(sign, 0)`-style selectors evaluated at run time.
    pub fn derivative(&self, i: usize) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(j) => Expr::Num(if *j == i { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.derivative(i)),
            Expr::Add(a, b) => Expr::add(a.derivative(i), b.derivative(i)),
            Expr::Sub(a, b) => Expr::sub(a.derivative(i), b.derivative(i)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(i), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(i)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.derivative(i), (**b).clone()),
                    Expr::mul((**a).clone(), b.derivative(i)),
                ),
                Expr::Pow(b.clone(), num(2.0)),
            ),
            Expr::Pow(a, b) => {
                let db = b.derivative(i);
                if db.is_zero() {
                    // d(a^k) = k a^(k−1) a'
                    let k = (**b).clone();
                    let km1 = Expr::sub(k.clone(), Expr::Num(1.0));
                    Expr::mul(Expr::mul(k, Expr::Pow(a.clone(), Box::new(km1))), a.derivative(i))
                } else {
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    Expr::mul(
                        self.clone(),
                        Expr::add(
                            Expr::mul(db, Expr::Call(Func::Log, a.clone())),
                            Expr::div(Expr::mul((**b).clone(), a.derivative(i)), (**a).clone()),
                        ),
                    )
                }
            }
            Expr::Call(f, a) => {
                let da = a.derivative(i);
                if da.is_zero() {
                    return Expr::Num(0.0);
                }
                let inner = (**a).clone();
                let outer = match f {
                    // sign(a) as a / |a|
                    Func::Abs => Expr::div(inner.clone(), Expr::Call(Func::Abs, a.clone())),
                    Func::Sin => Expr::Call(Func::Cos, a.clone()),
                    Func::Cos => Expr::neg(Expr::Call(Func::Sin, a.clone())),
                    Func::Tan => Expr::add(
                        Expr::Num(1.0),
                        Expr::Pow(Box::new(Expr::Call(Func::Tan, a.clone())), num(2.0)),
                    ),
                    Func::Asin => Expr::div(
                        Expr::Num(1.0),
                        Expr::Call(
                            Func::Sqrt,
                            Box::new(Expr::sub(Expr::Num(1.0), Expr::Pow(a.clone(), num(2.0)))),
                        ),
                    ),
                    Func::Acos => Expr::neg(Expr::div(
                        Expr::Num(1.0),
                        Expr::Call(
                            Func::Sqrt,
                            Box::new(Expr::sub(Expr::Num(1.0), Expr::Pow(a.clone(), num(2.0)))),
                        ),
                    )),
                    Func::Atan => Expr::div(
                        Expr::Num(1.0),
                        Expr::add(Expr::Num(1.0), Expr::Pow(a.clone(), num(2.0))),
                    ),
                    Func::Exp => self.clone(),
                    Func::Log => Expr::div(Expr::Num(1.0), inner),
                    Func::Sqrt => Expr::div(Expr::Num(0.5), self.clone()),
                };
                Expr::mul(outer, da)
            }
            Expr::Call2(f, a, b) => {
                let (da, db) = (a.derivative(i), b.derivative(i));
                match f {
                    // min(a,b) = (a + b − |a − b|)/2, max(a,b) = (a + b + |a − b|)/2
                    Func2::Min | Func2::Max => {
                        let s = if *f == Func2::Min { -0.5 } else { 0.5 };
                        let diff = Expr::sub((**a).clone(), (**b).clone());
                        let sign = Expr::div(diff.clone(), Expr::Call(Func::Abs, Box::new(diff)));
                        Expr::add(
                            Expr::mul(Expr::Num(0.5), Expr::add(da.clone(), db.clone())),
                            Expr::mul(Expr::mul(Expr::Num(s), sign), Expr::sub(da, db)),
                        )
                    }
                    // d atan2(a, b) = (b a' − a b') / (a² + b²)
                    Func2::Atan2 => Expr::div(
                        Expr::sub(Expr::mul((**b).clone(), da), Expr::mul((**a).clone(), db)),
                        Expr::add(Expr::Pow(a.clone(), num(2.0)), Expr::Pow(b.clone(), num(2.0))),
                    ),
                }
            }
        }
    }
}

/// A parsed expression bound to a dimension, with symbolic first and second derivatives.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    pub source: String,
    pub dim: usize,
    pub expr: Arc<Expr>,
    pub gradient: Arc<Vec<Expr>>,
    pub hessian: Arc<Vec<Expr>>,
}

impl CompiledExpr {
    pub fn new(source: &str, dim: usize) -> Result<Self> {
        let expr = parse(source)?;
        if expr.arity() > dim {
            return Err(Error::Expr(format!(
                "'{source}' uses x{} in dimension {dim}",
                expr.arity()
            )));
        }
        let gradient: Vec<Expr> = (0..dim).map(|i| expr.derivative(i)).collect();
        let hessian: Vec<Expr> = (0..dim * dim).map(|k| gradient[k / dim].derivative(k % dim)).collect();
        Ok(CompiledExpr {
            source: source.to_string(),
            dim,
            expr: Arc::new(expr),
            gradient: Arc::new(gradient),
            hessian: Arc::new(hessian),
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    pub fn gradient_at(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.dim, self.gradient.iter().map(|e| e.eval(x)))
    }

    pub fn hessian_at(&self, x: &[f64]) -> DMatrix<f64> {
        let m = DMatrix::from_iterator(self.dim, self.dim, self.hessian.iter().map(|e| e.eval(x)));
        (&m + m.transpose()) * 0.5
    }

    pub fn field(&self) -> ScalarField {
        let e = self.expr.clone();
        ScalarField::new(self.source.clone(), move |x| e.eval(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_functions() {
        let e = parse("1 + 2*3^2 - -4/2").unwrap();
        assert_eq!(e.eval(&[]), 1.0 + 18.0 + 2.0);
        assert_eq!(parse("-2^2").unwrap().eval(&[]), -4.0);
        assert_eq!(parse("2^3^2").unwrap().eval(&[]), 512.0);
        assert_eq!(parse("max(x1, x2) + min(1, abs(-3))").unwrap().eval(&[2.0, 5.0]), 6.0);
        assert!((parse("sin(pi/2) + cos(0) + 1e-1").unwrap().eval(&[]) - 2.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_identifiers() {
        assert!(matches!(parse("x4 + 1"), Err(Error::Expr(_))));
        assert!(matches!(parse("foo(1)"), Err(Error::Expr(_))));
        assert!(matches!(parse("1 +"), Err(Error::Expr(_))));
        assert!(matches!(parse("(1"), Err(Error::Expr(_))));
        assert!(matches!(CompiledExpr::new("x3", 2), Err(Error::Expr(_))));
    }

    #[test]
    fn symbolic_jets() {
        let c = CompiledExpr::new("0.5*(x1^2 + x2^2) - 0.5*x1*x2 + sin(x1)", 2).unwrap();
        let x = [0.3, -0.7];
        let g = c.gradient_at(&x);
        assert!((g[0] - (0.3 - 0.5 * -0.7 + 0.3f64.cos())).abs() < 1e-15);
        let h = c.hessian_at(&x);
        assert!((h[(0, 0)] - (1.0 - 0.3f64.sin())).abs() < 1e-15);
        assert!((h[(0, 1)] + 0.5).abs() < 1e-15);
        assert!((h[(1, 1)] - 1.0).abs() < 1e-15);
        let p = CompiledExpr::new("x1^x2", 2).unwrap();
        let g = p.gradient_at(&[2.0, 3.0]);
        assert!((g[0] - 12.0).abs() < 1e-12 && (g[1] - 8.0 * 2f64.ln()).abs() < 1e-12);
    }
}
