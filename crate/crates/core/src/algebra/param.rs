//! Exact polynomials in the family parameters `t = (t1, ..., tm)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::scalar::{Rational, Ring, Scalar};

/// Exponent vector of a parameter monomial, trailing zeros trimmed so that
/// the constant monomial is the empty vector. Ordered by total degree, then
/// lexicographically from `t1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamMonomial(Vec<u32>);

impl ParamMonomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Self(exps)
    }

    pub fn constant() -> Self {
        Self(Vec::new())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        let exps = (0..len)
            .map(|i| self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0))
            .collect();
        Self(exps)
    }
}

impl Ord for ParamMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let len = self.0.len().max(other.0.len());
            for i in 0..len {
                let a = self.0.get(i).copied().unwrap_or(0);
                let b = other.0.get(i).copied().unwrap_or(0);
                match a.cmp(&b) {
                    Ordering::Equal => continue,
                    // larger power of an earlier parameter sorts first
                    ord => return ord.reverse(),
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for ParamMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `t` with rational coefficients. No zero coefficient
/// is ever stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamScalar {
    terms: BTreeMap<ParamMonomial, Rational>,
}

impl ParamScalar {
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (ParamMonomial, Rational)>,
    {
        let mut out = Self::default();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn monomial(exps: Vec<u32>, coeff: Rational) -> Self {
        Self::from_terms([(ParamMonomial::new(exps), coeff)])
    }

    fn add_term(&mut self, m: ParamMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMonomial, &Rational)> {
        self.terms.iter()
    }

    /// Total degree in `t`; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree() as i64).max().unwrap_or(-1)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&ParamMonomial::constant())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&ParamMonomial::constant()).cloned(),
            _ => None,
        }
    }

    /// Number of parameters the polynomial actually mentions.
    pub fn param_count(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    /// Exact value at a rational parameter point. `None` if the polynomial
    /// mentions a parameter beyond `point.len()`.
    pub fn evaluate(&self, point: &[Rational]) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            if m.0.len() > point.len() {
                return None;
            }
            let mut v = c.clone();
            for (t, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v *= num_traits::pow(t.clone(), e as usize);
                }
            }
            acc += v;
        }
        Some(acc)
    }
}

/// Total degree in `t` (`-1` for zero).
pub fn param_degree(s: &ParamScalar) -> i64 {
    s.degree()
}

pub fn param_constant_term(s: &ParamScalar) -> Rational {
    s.constant_term()
}

impl Zero for ParamScalar {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ParamScalar {
    fn one() -> Self {
        Self::monomial(Vec::new(), Rational::one())
    }
}

impl Add for ParamScalar {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for ParamScalar {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ParamScalar {
    type Output = Self;

    fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for ParamScalar {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Scalar for ParamScalar {
    const RING: Ring = Ring::Qt;

    fn from_rational(q: Rational) -> Self {
        Self::monomial(Vec::new(), q)
    }

    fn try_inverse(&self) -> Option<Self> {
        let c = self.as_constant()?;
        if c.is_zero() {
            None
        } else {
            Some(Self::from_rational(c.recip()))
        }
    }

    fn divisor_size(&self) -> Option<Rational> {
        self.as_constant().map(|c| c.abs())
    }

    fn magnitude(&self) -> Option<f64> {
        self.as_constant().and_then(|c| c.magnitude())
    }

    fn parameter(k: usize) -> Option<Self> {
        if k == 0 {
            return None;
        }
        let mut exps = vec![0; k];
        exps[k - 1] = 1;
        Some(Self::monomial(exps, Rational::one()))
    }

    fn to_literal(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mag = if i == 0 { c.clone() } else { c.abs() };
            if i > 0 {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&mag.to_string());
            for (k, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => out.push_str(&format!(" t{}", k + 1)),
                    _ => out.push_str(&format!(" t{}^{}", k + 1, e)),
                }
            }
        }
        out
    }

    fn as_rational(&self) -> Option<Rational> {
        self.as_constant()
    }

    fn t_profile(&self) -> (i64, bool, usize) {
        (self.degree(), self.constant_term().is_zero(), self.param_count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rational;

    fn t(k: usize) -> ParamScalar {
        ParamScalar::parameter(k).unwrap()
    }

    #[test]
    fn degree_and_constant() {
        let s = t(1) * t(1) * t(2) + t(1);
        assert_eq!(param_degree(&s), 3);
        assert_eq!(param_constant_term(&s), rational(0, 1));
        let five = ParamScalar::from_integer(5);
        assert_eq!(param_degree(&five), 0);
        assert_eq!(param_constant_term(&five), rational(5, 1));
        let zero = ParamScalar::zero();
        assert_eq!(param_degree(&zero), -1);
        assert_eq!(param_constant_term(&zero), rational(0, 1));
    }

    #[test]
    fn cancellation_drops_terms() {
        let s = t(1) + t(2) - t(1);
        assert_eq!(s, t(2));
        assert_eq!(s.param_count(), 2);
    }

    #[test]
    fn only_constants_invert() {
        assert!(t(1).try_inverse().is_none());
        let h = ParamScalar::from_rational(rational(1, 2));
        assert_eq!(h.try_inverse().unwrap(), ParamScalar::from_integer(2));
    }

    #[test]
    fn literal_and_evaluate() {
        let s = ParamScalar::from_rational(rational(1, 2)) * t(1) * t(1)
            - ParamScalar::from_integer(3) * t(1) * t(2)
            + ParamScalar::from_integer(5);
        assert_eq!(s.to_literal(), "5 + 1/2 t1^2 - 3 t1 t2");
        let v = s.evaluate(&[rational(2, 1), rational(1, 3)]).unwrap();
        assert_eq!(v, rational(5, 1));
        assert!(s.evaluate(&[rational(1, 1)]).is_none());
    }
}
