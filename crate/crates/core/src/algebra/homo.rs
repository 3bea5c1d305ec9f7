use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Signed;

use super::monomial::MultiIndex;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Homogeneous polynomial of a fixed total degree in `nvars` variables.
///
/// Terms are kept in the global monomial order; no zero coefficient is stored
/// and every stored exponent vector has total degree equal to `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomoPoly<S> {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> HomoPoly<S> {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exps: MultiIndex, coeff: S) -> Self {
        let mut p = Self::zero(exps.nvars(), exps.degree());
        p.add_term(exps, coeff);
        p
    }

    /// Build from terms, all of which must have total degree `degree`.
    pub fn from_terms<I>(nvars: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, S)>,
    {
        let mut p = Self::zero(nvars, degree);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::invalid(format!(
                    "monomial {m:?} has {} variables, expected {nvars}",
                    m.nvars()
                )));
            }
            if m.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: m.degree(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Option<&S> {
        self.terms.get(m)
    }

    /// Coefficient on `y1^degree`.
    pub fn pure_y1_coeff(&self) -> Option<&S> {
        self.terms.first_key_value().and_then(|(m, c)| m.is_pure_y1().then_some(c))
    }

    pub(crate) fn add_term(&mut self, m: MultiIndex, c: S) {
        debug_assert_eq!(m.degree(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_degree(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        debug_assert_eq!(self.degree, other.degree);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += factor * other`, degrees must agree.
    pub(crate) fn add_scaled(&mut self, other: &Self, factor: &S) {
        debug_assert_eq!(self.degree, other.degree);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), factor.clone() * c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, factor: &S) -> Self {
        if factor.is_zero() {
            return Self::zero(self.nvars, self.degree);
        }
        let mut out = Self::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), factor.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars, self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Multiply by the variable `y_{var+1}`.
    pub fn mul_var(&self, var: usize) -> Self {
        Self {
            nvars: self.nvars,
            degree: self.degree + 1,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul_var(var), c.clone()))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to `y_{var+1}` (0-based `var`).
    /// The derivative of a degree-0 polynomial is the empty polynomial of
    /// degree 0.
    pub fn partial(&self, var: usize) -> Self {
        let degree = self.degree.saturating_sub(1);
        let mut out = Self::zero(self.nvars, degree);
        for (m, c) in &self.terms {
            let e = m.get(var);
            if e == 0 {
                continue;
            }
            let m2 = m.div_var(var).expect("exponent checked positive");
            out.add_term(m2, S::from_integer(e as i64) * c.clone());
        }
        out
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HomoPoly<T> {
        let mut out = HomoPoly::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn try_map_coeffs<T: Scalar, E>(
        &self,
        f: impl Fn(&S) -> std::result::Result<T, E>,
    ) -> std::result::Result<HomoPoly<T>, E> {
        let mut out = HomoPoly::zero(self.nvars, self.degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn to_literal(&self) -> String {
        format_terms(self.terms.iter())
    }
}

/// Canonical literal `c * y1^a y2^b + ...` for an ordered term sequence.
pub(crate) fn format_terms<'a, S: Scalar>(
    terms: impl Iterator<Item = (&'a MultiIndex, &'a S)>,
) -> String {
    let mut out = String::new();
    for (i, (m, c)) in terms.enumerate() {
        let coeff = if let Some(q) = c.as_rational() {
            if i == 0 {
                q.to_string()
            } else {
                out.push_str(if q.is_negative() { " - " } else { " + " });
                q.abs().to_string()
            }
        } else {
            if i > 0 {
                out.push_str(" + ");
            }
            format!("({})", c.to_literal())
        };
        out.push_str(&coeff);
        if m.degree() > 0 {
            out.push_str(" * ");
            out.push_str(&m.to_string());
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
