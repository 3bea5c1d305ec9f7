//! Parser for exact polynomial and coefficient literals.
//!
//! Accepted syntax is a sum of products of factors:
//!
//! ```text
//! expr   := [+|-] term ((+|-) term)*
//! term   := factor ([*] factor)*
//! factor := p[/q] | i | tK[^e] | yK[^e] | ( expr )
//! ```
//!
//! So `1/2 * y1^2 y2`, `(1/2+1/3 i) * y1 y2` and `(3/4) t1^2 t2 * y1` are
//! all valid. `i` needs the Q(i) ring and `tK` the parametric ring.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::monomial::MultiIndex;
use super::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for LiteralError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

type Poly<S> = BTreeMap<Vec<u32>, S>;

struct Parser {
    chars: Vec<char>,
    pos: usize,
    nvars: usize,
}

/// Parse a polynomial in `y1..y{nvars}`. Returns the nonzero terms in
/// canonical order.
pub fn parse_polynomial<S: Scalar>(
    input: &str,
    nvars: usize,
) -> Result<Vec<(MultiIndex, S)>, LiteralError> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
        nvars,
    };
    let poly: Poly<S> = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    let mut terms: Vec<_> = poly
        .into_iter()
        .map(|(e, c)| (MultiIndex::new(e), c))
        .collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(terms)
}

/// Parse a coefficient literal such as `-3/4`, `1/2-2 i` or `t1 - 1/3 t2^2`.
pub fn parse_scalar<S: Scalar>(input: &str) -> Result<S, LiteralError> {
    let terms = parse_polynomial::<S>(input, 0)?;
    Ok(terms.into_iter().next().map(|(_, c)| c).unwrap_or_else(S::zero))
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> LiteralError {
        LiteralError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr<S: Scalar>(&mut self) -> Result<Poly<S>, LiteralError> {
        let mut acc: Poly<S> = BTreeMap::new();
        let mut sign = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -S::one()
            }
            Some('+') => {
                self.pos += 1;
                S::one()
            }
            _ => S::one(),
        };
        loop {
            let t = self.term::<S>()?;
            for (e, c) in t {
                add_into(&mut acc, e, sign.clone() * c);
            }
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    sign = S::one();
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -S::one();
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term<S: Scalar>(&mut self) -> Result<Poly<S>, LiteralError> {
        let mut acc = self.factor::<S>()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.factor::<S>()?;
                    acc = mul_polys(&acc, &f);
                }
                Some(c) if c.is_ascii_digit() || c == '(' || c == 'y' || c == 't' || c == 'i' => {
                    let f = self.factor::<S>()?;
                    acc = mul_polys(&acc, &f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor<S: Scalar>(&mut self) -> Result<Poly<S>, LiteralError> {
        let next = self.peek();
        let start = self.pos;
        match next {
            None => Err(self.error("expected a factor, found end of input")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr::<S>()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut q = Rational::from_integer(num);
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    q /= Rational::from_integer(den);
                }
                Ok(constant(self.nvars, S::from_rational(q)))
            }
            Some('i') => {
                self.pos += 1;
                if self.chars.get(self.pos).is_some_and(|c| c.is_alphanumeric()) {
                    self.pos = start;
                    return Err(self.error("unknown identifier"));
                }
                match S::imaginary_unit() {
                    Some(unit) => Ok(constant(self.nvars, unit)),
                    None => {
                        self.pos = start;
                        Err(self.error(format!("`i` is not available in ring {}", S::RING)))
                    }
                }
            }
            Some(v @ ('y' | 't')) => {
                let var_pos = self.pos;
                self.pos += 1;
                let idx = self.small_integer()?;
                if idx == 0 {
                    self.pos = var_pos;
                    return Err(self.error("variables are numbered from 1"));
                }
                let exp = if self.peek() == Some('^') {
                    self.pos += 1;
                    self.skip_ws();
                    self.small_integer()?
                } else {
                    1
                };
                if v == 'y' {
                    if idx > self.nvars {
                        self.pos = var_pos;
                        return Err(self.error(format!(
                            "y{idx} out of range (system has {} variables)",
                            self.nvars
                        )));
                    }
                    let mut e = vec![0; self.nvars];
                    e[idx - 1] = exp as u32;
                    Ok(BTreeMap::from([(e, S::one())]))
                } else {
                    match S::parameter(idx) {
                        Some(t) => {
                            let mut v = S::one();
                            for _ in 0..exp {
                                v = v * t.clone();
                            }
                            Ok(constant(self.nvars, v))
                        }
                        None => {
                            self.pos = var_pos;
                            Err(self.error(format!(
                                "parameter t{idx} is not available in ring {}",
                                S::RING
                            )))
                        }
                    }
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn integer(&mut self) -> Result<BigInt, LiteralError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<BigInt>().map_err(|e| LiteralError {
            column: start + 1,
            message: e.to_string(),
        })
    }

    fn small_integer(&mut self) -> Result<usize, LiteralError> {
        let start = self.pos;
        let v = self.integer()?;
        usize::try_from(v).map_err(|_| LiteralError {
            column: start + 1,
            message: "integer too large".into(),
        })
    }
}

fn constant<S: Scalar>(nvars: usize, c: S) -> Poly<S> {
    let mut p = BTreeMap::new();
    if !c.is_zero() {
        p.insert(vec![0; nvars], c);
    }
    p
}

fn add_into<S: Scalar>(p: &mut Poly<S>, e: Vec<u32>, c: S) {
    if c.is_zero() {
        return;
    }
    let sum = match p.remove(&e) {
        Some(old) => old + c,
        None => c,
    };
    if !sum.is_zero() {
        p.insert(e, sum);
    }
}

fn mul_polys<S: Scalar>(a: &Poly<S>, b: &Poly<S>) -> Poly<S> {
    let mut out = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            add_into(&mut out, e, ca.clone() * cb.clone());
        }
    }
    out
}

impl<S: Scalar> super::series::GradedSeries<S> {
    /// Parse a literal into a series truncated at `truncation`.
    pub fn parse(input: &str, nvars: usize, truncation: u32) -> Result<Self, LiteralError> {
        let terms = parse_polynomial::<S>(input, nvars)?;
        Ok(Self::from_terms(nvars, truncation, terms).expect("parser yields consistent terms"))
    }
}
