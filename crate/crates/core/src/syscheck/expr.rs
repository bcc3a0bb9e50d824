//! Polynomial expressions over `F_{q^n}` with a unary q-power operator.

use std::collections::HashMap;
use std::fmt;

use crate::fftower::{FieldElem, FieldTower};

use super::SysError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// `e^k` for a non-negative integer `k`.
    Pow(Box<Expr>, u32),
    /// `e^(q^k)`.
    Frob(Box<Expr>, u32),
}

impl Expr {
    pub fn eval(&self, f: &FieldTower, env: &[FieldElem]) -> FieldElem {
        match self {
            Expr::Const(c) => f.from_int(*c),
            Expr::Var(i) => env[*i],
            Expr::Neg(a) => f.neg(a.eval(f, env)),
            Expr::Add(a, b) => f.add(a.eval(f, env), b.eval(f, env)),
            Expr::Sub(a, b) => f.sub(a.eval(f, env), b.eval(f, env)),
            Expr::Mul(a, b) => f.mul(a.eval(f, env), b.eval(f, env)),
            Expr::Pow(a, k) => f.pow(a.eval(f, env), *k as u64),
            Expr::Frob(a, k) => f.frobenius_q_pow(a.eval(f, env), *k),
        }
    }

    /// Degree in `v`, counting a q-power of a degree-one term as degree one.
    /// Degree at most one means the expression is `F_p`-affine in `v`.
    pub fn degree_in(&self, v: usize) -> u32 {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => u32::from(*i == v),
            Expr::Neg(a) | Expr::Frob(a, _) => a.degree_in(v),
            Expr::Add(a, b) | Expr::Sub(a, b) => a.degree_in(v).max(b.degree_in(v)),
            Expr::Mul(a, b) => a.degree_in(v) + b.degree_in(v),
            Expr::Pow(a, k) => a.degree_in(v) * k,
        }
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(i) => {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
            Expr::Neg(a) | Expr::Frob(a, _) | Expr::Pow(a, _) => a.vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// Replaces every occurrence of variable `v` by `s`.
    pub fn substitute(&self, v: usize, s: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(v, s));
        match self {
            Expr::Var(i) if *i == v => s.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Pow(a, k) => Expr::Pow(sub(a), *k),
            Expr::Frob(a, k) => Expr::Frob(sub(a), *k),
        }
    }

    /// Renumbers variables through `map`.
    pub fn remap(&self, map: &impl Fn(usize) -> usize) -> Expr {
        let sub = |e: &Expr| Box::new(e.remap(map));
        match self {
            Expr::Var(i) => Expr::Var(map(*i)),
            Expr::Const(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(sub(a)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Mul(a, b) => Expr::Mul(sub(a), sub(b)),
            Expr::Pow(a, k) => Expr::Pow(sub(a), *k),
            Expr::Frob(a, k) => Expr::Frob(sub(a), *k),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |e| ExprDisplay { expr: e, names: self.names };
        match self.expr {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "{}", self.names[*i]),
            Expr::Neg(a) => write!(f, "-({})", d(a)),
            Expr::Add(a, b) => write!(f, "({} + {})", d(a), d(b)),
            Expr::Sub(a, b) => write!(f, "({} - {})", d(a), d(b)),
            Expr::Mul(a, b) => write!(f, "{}*{}", d(a), d(b)),
            Expr::Pow(a, k) => write!(f, "({})^{k}", d(a)),
            Expr::Frob(a, k) => write!(f, "({}){}", d(a), "^q".repeat(*k as usize)),
        }
    }
}

/// Parses `text` with variables looked up in `vars` and named
/// subexpressions in `defs` (inlined).
pub fn parse_expr(text: &str, vars: &[String], defs: &HashMap<String, Expr>) -> Result<Expr, SysError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, vars, defs, text };
    let e = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, SysError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Int(s.parse().map_err(|_| SysError::Parse(format!("bad integer {s} in `{text}`")))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(SysError::Parse(format!("unexpected `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
    defs: &'a HashMap<String, Expr>,
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> SysError {
        SysError::Parse(format!("{what} at token {} of `{}`", self.pos, self.text))
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, SysError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, SysError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, SysError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SysError> {
        let mut base = self.atom()?;
        while self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Tok::Int(k)) => {
                    self.pos += 1;
                    base = Expr::Pow(Box::new(base), u32::try_from(k).map_err(|_| self.error("exponent too large"))?);
                }
                Some(Tok::Ident(s)) if s == "q" => {
                    self.pos += 1;
                    base = match base {
                        Expr::Frob(inner, k) => Expr::Frob(inner, k + 1),
                        other => Expr::Frob(Box::new(other), 1),
                    };
                }
                _ => return Err(self.error("expected integer or `q` after `^`")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SysError> {
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(Expr::Const(k))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(Expr::Var(i))
                } else if let Some(e) = self.defs.get(&name) {
                    Ok(e.clone())
                } else {
                    Err(SysError::UnknownName(name))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fftower::make_tower;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence_and_frobenius() {
        let f = make_tower(3, 1, &[1, 3]).unwrap();
        let vars = names(&["x", "y"]);
        let e = parse_expr("2*x^q - x*y^2 + -(y)", &vars, &HashMap::new()).unwrap();
        let x = f.generator();
        let y = f.add(f.generator(), f.one());
        let expect = f.sub(f.sub(f.mul(f.from_int(2), f.frobenius_q(x)), f.mul(x, f.mul(y, y))), y);
        assert_eq!(e.eval(&f, &[x, y]), expect);
        let e2 = parse_expr("x^q^q", &vars, &HashMap::new()).unwrap();
        assert_eq!(e2, Expr::Frob(Box::new(Expr::Var(0)), 2));
    }

    #[test]
    fn affinity_degree() {
        let vars = names(&["x", "y"]);
        let d = HashMap::new();
        assert_eq!(parse_expr("x^q - x + y*y", &vars, &d).unwrap().degree_in(0), 1);
        assert_eq!(parse_expr("(x*y)^q", &vars, &d).unwrap().degree_in(0), 1);
        assert_eq!(parse_expr("x*x^q", &vars, &d).unwrap().degree_in(0), 2);
        assert_eq!(parse_expr("x^3", &vars, &d).unwrap().degree_in(0), 3);
    }

    #[test]
    fn errors() {
        let vars = names(&["x"]);
        let d = HashMap::new();
        assert!(matches!(parse_expr("x + z", &vars, &d), Err(SysError::UnknownName(_))));
        assert!(parse_expr("x +", &vars, &d).is_err());
        assert!(parse_expr("(x", &vars, &d).is_err());
        assert!(parse_expr("x ^ y", &vars, &d).is_err());
        assert!(parse_expr("x $ 2", &vars, &d).is_err());
    }

    #[test]
    fn definitions_inline() {
        let vars = names(&["x"]);
        let mut d = HashMap::new();
        d.insert("s".to_string(), parse_expr("x^q - x", &vars, &HashMap::new()).unwrap());
        let e = parse_expr("s*2", &vars, &d).unwrap();
        assert_eq!(e.degree_in(0), 1);
    }
}
