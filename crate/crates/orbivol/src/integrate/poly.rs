//! Polynomials in n variables over F_q[t], with a small text parser.

use std::collections::BTreeMap;

use crate::arith::{Field, FieldDescriptor, Fq};

use super::IntegrateError;

/// Dense polynomial in t, lowest degree first, no trailing zeros.
pub type TPoly = Vec<Fq>;

fn trim(mut a: TPoly) -> TPoly {
    while a.last() == Some(&Fq(0)) {
        a.pop();
    }
    a
}

pub fn tp_add(f: &FieldDescriptor, a: &[Fq], b: &[Fq]) -> TPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| f.add(a.get(i).copied().unwrap_or(Fq(0)), b.get(i).copied().unwrap_or(Fq(0))))
            .collect(),
    )
}

/// Product, truncated to degree < `prec` when given.
pub fn tp_mul(f: &FieldDescriptor, a: &[Fq], b: &[Fq], prec: Option<usize>) -> TPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut n = a.len() + b.len() - 1;
    if let Some(p) = prec {
        n = n.min(p);
    }
    let mut out = vec![Fq(0); n];
    for (i, &x) in a.iter().enumerate() {
        if x.0 == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

/// t-adic valuation; `None` for the zero polynomial.
pub fn tp_val(a: &[Fq]) -> Option<u32> {
    a.iter().position(|c| c.0 != 0).map(|v| v as u32)
}

/// A polynomial in `nvars` variables with coefficients in F_q[t].
#[derive(Clone, Debug)]
pub struct MPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, TPoly>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

impl MPoly {
    pub fn zero(field: &Field, nvars: usize) -> Self {
        MPoly { field: field.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, nvars: usize, c: TPoly) -> Self {
        let mut p = Self::zero(field, nvars);
        p.insert(vec![0; nvars], c);
        p
    }

    pub fn one(field: &Field, nvars: usize) -> Self {
        Self::constant(field, nvars, vec![Fq(1)])
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(field, nvars);
        p.insert(e, vec![Fq(1)]);
        p
    }

    /// The monomial t^k.
    pub fn t_power(field: &Field, nvars: usize, k: usize) -> Self {
        let mut c = vec![Fq(0); k + 1];
        c[k] = Fq(1);
        Self::constant(field, nvars, c)
    }

    fn insert(&mut self, e: Vec<u32>, c: TPoly) {
        let f = self.field.clone();
        let slot = self.terms.entry(e.clone()).or_default();
        *slot = tp_add(&f, slot, &c);
        if slot.is_empty() {
            self.terms.remove(&e);
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &TPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (e, c) in &o.terms {
            s.insert(e.clone(), c.clone());
        }
        s
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        let mut s = Self::zero(f, self.nvars);
        for (e, c) in &self.terms {
            s.insert(e.clone(), c.iter().map(|&x| f.neg(x)).collect());
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let f = &self.field;
        let mut s = Self::zero(f, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                s.insert(e, tp_mul(f, ca, cb, None));
            }
        }
        s
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.field, self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies every coefficient by the t-polynomial `c`.
    pub fn scale(&self, c: &[Fq]) -> Self {
        let f = &self.field;
        let mut s = Self::zero(f, self.nvars);
        for (e, a) in &self.terms {
            s.insert(e.clone(), tp_mul(f, a, c, None));
        }
        s
    }

    pub fn derivative(&self, i: usize) -> Self {
        let f = &self.field;
        let mut s = Self::zero(f, self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let k = f.from_int(e[i] as i64);
            let mut e2 = e.clone();
            e2[i] -= 1;
            s.insert(e2, c.iter().map(|&x| f.mul(k, x)).collect());
        }
        s
    }

    /// Constant coefficient (as a t-polynomial).
    pub fn constant_term(&self) -> TPoly {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_default()
    }

    /// Smallest t-valuation among the non-constant monomials.
    pub fn nonconstant_valuation(&self) -> Option<u32> {
        self.terms
            .iter()
            .filter(|(e, _)| e.iter().any(|&x| x > 0))
            .filter_map(|(_, c)| tp_val(c))
            .min()
    }

    /// Evaluation at a point of F_q^n after reducing coefficients mod t.
    pub fn eval_residue(&self, pt: &[Fq]) -> Fq {
        let f = &self.field;
        self.terms.iter().fold(Fq(0), |acc, (e, c)| {
            let c0 = c.first().copied().unwrap_or(Fq(0));
            let m = e.iter().zip(pt).fold(c0, |m, (&k, &x)| f.mul(m, f.pow(x, k as u64)));
            f.add(acc, m)
        })
    }

    /// Evaluation at a point with t-polynomial coordinates, modulo t^prec.
    pub fn eval_mod(&self, pt: &[TPoly], prec: usize) -> TPoly {
        let f = &self.field;
        let mut powers: Vec<Vec<TPoly>> = pt.iter().map(|x| vec![vec![Fq(1)], x.clone()]).collect();
        let mut acc = Vec::new();
        for (e, c) in &self.terms {
            let mut m: TPoly = c.iter().take(prec).copied().collect();
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = tp_mul(f, powers[i].last().unwrap(), &pt[i], Some(prec));
                    powers[i].push(next);
                }
                m = tp_mul(f, &m, &powers[i][k as usize], Some(prec));
            }
            acc = tp_add(f, &acc, &m);
        }
        acc
    }

    /// The polynomial y ↦ self(c + t^m y), c given by t-polynomial coordinates.
    pub fn recenter(&self, c: &[TPoly], m: usize) -> Self {
        let f = &self.field;
        let n = self.nvars;
        let lin: Vec<MPoly> = (0..n)
            .map(|i| {
                Self::constant(f, n, c[i].clone()).add(&Self::var(f, n, i).mul(&Self::t_power(f, n, m)))
            })
            .collect();
        let mut powers: Vec<Vec<MPoly>> = lin.iter().map(|l| vec![Self::one(f, n), l.clone()]).collect();
        let mut acc = Self::zero(f, n);
        for (e, coeff) in &self.terms {
            let mut term = Self::constant(f, n, coeff.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&lin[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize]);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Parses an expression in the given variables and `t`, e.g. `y^2 - x^3 - x`.
    pub fn parse(field: &Field, vars: &[String], text: &str) -> Result<Self, IntegrateError> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { field, vars, tokens, pos: 0 };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(IntegrateError::Parse(format!("trailing input in `{}`", text)));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, IntegrateError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
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
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| IntegrateError::Parse(format!("bad number {}", text)))?;
            out.push(Tok::Num(n));
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
            return Err(IntegrateError::Parse(format!("unexpected character `{}`", c)));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a Field,
    vars: &'a [String],
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
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

    fn expr(&mut self) -> Result<MPoly, IntegrateError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, IntegrateError> {
        let mut acc = self.unary()?;
        while self.eat('*') {
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MPoly, IntegrateError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Tok::Num(k)) if k >= 0 => {
                    self.pos += 1;
                    Ok(base.pow(k as u32))
                }
                _ => Err(IntegrateError::Parse("exponent must be a non-negative integer".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MPoly, IntegrateError> {
        let n = self.vars.len();
        let f = self.field;
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(k)) => {
                self.pos += 1;
                Ok(MPoly::constant(f, n, trim(vec![f.from_int(k)])))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(MPoly::var(f, n, i))
                } else if name == "t" {
                    Ok(MPoly::t_power(f, n, 1))
                } else {
                    Err(IntegrateError::Parse(format!("unknown variable `{}`", name)))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(IntegrateError::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            other => Err(IntegrateError::Parse(format!("unexpected token {:?}", other))),
        }
    }
}
