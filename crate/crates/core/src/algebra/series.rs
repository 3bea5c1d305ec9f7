use std::collections::BTreeMap;

use super::homo::{format_terms, HomoPoly};
use super::monomial::MultiIndex;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Truncated power series stored as homogeneous components.
///
/// Coefficients are exact for degrees `<= truncation`; nothing above is
/// stored. Zero components are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSeries<S> {
    nvars: usize,
    truncation: u32,
    components: BTreeMap<u32, HomoPoly<S>>,
}

impl<S: Scalar> GradedSeries<S> {
    pub fn zero(nvars: usize, truncation: u32) -> Self {
        Self {
            nvars,
            truncation,
            components: BTreeMap::new(),
        }
    }

    /// The series `y_{var+1}` (0-based `var`).
    pub fn variable(nvars: usize, var: usize, truncation: u32) -> Self {
        Self::monomial(MultiIndex::var(nvars, var), S::one(), truncation)
    }

    pub fn monomial(m: MultiIndex, c: S, truncation: u32) -> Self {
        let mut s = Self::zero(m.nvars(), truncation);
        if m.degree() <= truncation {
            s.add_component(&HomoPoly::monomial(m, c));
        }
        s
    }

    /// Collect arbitrary terms; terms above `truncation` are dropped.
    pub fn from_terms<I>(nvars: usize, truncation: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, S)>,
    {
        let mut by_degree: BTreeMap<u32, Vec<(MultiIndex, S)>> = BTreeMap::new();
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::invalid(format!(
                    "exponent vector {:?} has length {}, expected {nvars}",
                    m.exponents(),
                    m.nvars()
                )));
            }
            if m.degree() <= truncation {
                by_degree.entry(m.degree()).or_default().push((m, c));
            }
        }
        let mut s = Self::zero(nvars, truncation);
        for (d, terms) in by_degree {
            s.add_component(&HomoPoly::from_terms(nvars, d, terms)?);
        }
        Ok(s)
    }

    pub fn from_components<I>(nvars: usize, truncation: u32, comps: I) -> Self
    where
        I: IntoIterator<Item = HomoPoly<S>>,
    {
        let mut s = Self::zero(nvars, truncation);
        for c in comps {
            s.add_component(&c);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, degree: u32) -> Option<&HomoPoly<S>> {
        self.components.get(&degree)
    }

    pub fn component_or_zero(&self, degree: u32) -> HomoPoly<S> {
        self.components
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| HomoPoly::zero(self.nvars, degree))
    }

    pub fn components(&self) -> impl Iterator<Item = &HomoPoly<S>> + '_ {
        self.components.values()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> + '_ {
        self.components.values().flat_map(|c| c.terms())
    }

    /// Lowest degree with a nonzero component.
    pub fn order(&self) -> Option<u32> {
        self.components.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.components.keys().next_back().copied()
    }

    /// Add a homogeneous component in place; ignored above the truncation.
    pub fn add_component(&mut self, p: &HomoPoly<S>) {
        debug_assert_eq!(p.nvars(), self.nvars);
        let d = p.degree();
        if d > self.truncation || p.is_zero() {
            return;
        }
        let entry = self
            .components
            .entry(d)
            .or_insert_with(|| HomoPoly::zero(self.nvars, d));
        entry.add_assign_unchecked(p);
        if entry.is_zero() {
            self.components.remove(&d);
        }
    }

    /// Sum, truncated at the smaller of the two truncations.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(self.truncation.min(other.truncation));
        for c in other.components.values() {
            out.add_component(c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.nvars, self.truncation);
        for c in self.components.values() {
            out.add_component(&c.scale(factor));
        }
        out
    }

    pub fn truncate(&self, truncation: u32) -> Self {
        Self {
            nvars: self.nvars,
            truncation,
            components: self
                .components
                .range(..=truncation)
                .map(|(d, c)| (*d, c.clone()))
                .collect(),
        }
    }

    /// Cauchy product truncated at total degree `n`.
    pub fn mul(&self, other: &Self, n: u32) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars, n);
        for (da, a) in &self.components {
            if *da > n {
                break;
            }
            for (db, b) in other.components.range(..=(n - da)) {
                debug_assert!(da + db <= n);
                out.add_component(&a.mul(b));
            }
        }
        out
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.truncation.saturating_sub(1));
        for c in self.components.values() {
            if c.degree() > 0 {
                out.add_component(&c.partial(var));
            }
        }
        out
    }

    /// Compose `self(args[0], ..., args[k-1])`, truncated at degree `n`.
    ///
    /// `self` has `k` variables and every argument must be a series in the
    /// same number of variables with no constant term.
    pub fn substitute(&self, args: &[GradedSeries<S>], n: u32) -> Result<Self> {
        if args.len() != self.nvars {
            return Err(Error::invalid(format!(
                "substitution needs {} arguments, got {}",
                self.nvars,
                args.len()
            )));
        }
        let target_vars = match args.first() {
            Some(a) => a.nvars,
            None => 0,
        };
        for (i, a) in args.iter().enumerate() {
            if a.nvars != target_vars {
                return Err(Error::invalid("substitution arguments differ in variable count"));
            }
            if a.component(0).is_some() {
                return Err(Error::ConstantTermPresent { index: i });
            }
        }

        let mut powers: Vec<Vec<Self>> = args
            .iter()
            .map(|_| vec![Self::constant(target_vars, n, S::one())])
            .collect();
        let mut out = Self::zero(target_vars, n);
        for (m, c) in self.terms() {
            // each argument has order >= 1, so degree > n contributes nothing
            if m.degree() > n {
                break;
            }
            let mut prod = Self::constant(target_vars, n, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&args[i], n);
                    powers[i].push(next);
                }
                prod = prod.mul(&powers[i][e as usize], n);
                if prod.is_zero() {
                    break;
                }
            }
            for comp in prod.components.values() {
                out.add_component(comp);
            }
        }
        Ok(out)
    }

    pub fn constant(nvars: usize, truncation: u32, c: S) -> Self {
        Self::monomial(MultiIndex::zero(nvars), c, truncation)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GradedSeries<T> {
        let mut out = GradedSeries::zero(self.nvars, self.truncation);
        for c in self.components.values() {
            out.add_component(&c.map_coeffs(&f));
        }
        out
    }

    pub fn try_map_coeffs<T: Scalar, E>(
        &self,
        f: impl Fn(&S) -> std::result::Result<T, E>,
    ) -> std::result::Result<GradedSeries<T>, E> {
        let mut out = GradedSeries::zero(self.nvars, self.truncation);
        for c in self.components.values() {
            out.add_component(&c.try_map_coeffs(&f)?);
        }
        Ok(out)
    }

    pub fn to_literal(&self) -> String {
        format_terms(self.terms())
    }
}
