//! Graded homological equation `L(H) = R` with `L = <B y2, d/dy2>`.
//!
//! `L = L_D + L_N`: `L_D` is diagonal in the monomial basis with eigenvalue
//! `<m~, lambda~>`, `L_N` comes from the strictly lower part of `B` and is
//! nilpotent on each homogeneous space.

use std::collections::BTreeMap;

use crate::algebra::{HomoPoly, MultiIndex, Rational, Scalar};
use crate::error::{Error, Result};
use crate::system::eigenvalue_from_diagonal;

/// `L(p) = sum_i (B y2)_i dp/dy_{i+2}`.
pub fn apply_l<S: Scalar>(b: &[Vec<S>], p: &HomoPoly<S>) -> HomoPoly<S> {
    let mut out = apply_l_strict(b, p);
    for (m, c) in p.terms() {
        let ev = eigenvalue_from_diagonal(m, b);
        out.add_term(m.clone(), ev * c.clone());
    }
    out
}

/// `L_N(p)`: the contribution of the strictly lower part of `B`.
fn apply_l_strict<S: Scalar>(b: &[Vec<S>], p: &HomoPoly<S>) -> HomoPoly<S> {
    let mut out = HomoPoly::zero(p.nvars(), p.degree());
    for (m, c) in p.terms() {
        for (i, row) in b.iter().enumerate() {
            let e = m.get(i + 1);
            if e == 0 {
                continue;
            }
            let base = m.div_var(i + 1).expect("positive exponent");
            let scaled = S::from_integer(e as i64) * c.clone();
            for (k, bik) in row.iter().enumerate().take(i) {
                if !bik.is_zero() {
                    out.add_term(base.mul_var(k + 1), bik.clone() * scaled.clone());
                }
            }
        }
    }
    out
}

/// One divisor `<m~, lambda~>` used by the solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorEntry<S> {
    pub value: S,
    /// `|x|` over Q, `|x|^2` over Q(i).
    pub size: Rational,
}

/// Divisors actually used, one entry per monomial, with the running minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallDivisorLog<S> {
    entries: BTreeMap<MultiIndex, DivisorEntry<S>>,
    minimum: Option<(MultiIndex, Rational)>,
}

impl<S> Default for SmallDivisorLog<S> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
            minimum: None,
        }
    }
}

impl<S: Scalar> SmallDivisorLog<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn record(&mut self, m: &MultiIndex, value: &S) {
        if self.entries.contains_key(m) {
            return;
        }
        let Some(size) = value.divisor_size() else {
            return;
        };
        if self.minimum.as_ref().is_none_or(|(_, s)| size < *s) {
            self.minimum = Some((m.clone(), size.clone()));
        }
        self.entries.insert(
            m.clone(),
            DivisorEntry {
                value: value.clone(),
                size,
            },
        );
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &DivisorEntry<S>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn minimum(&self) -> Option<(&MultiIndex, &Rational)> {
        self.minimum.as_ref().map(|(m, s)| (m, s))
    }

    /// Smallest divisor size among monomials of each degree.
    pub fn minimum_by_degree(&self) -> BTreeMap<u32, Rational> {
        let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
        for (m, e) in &self.entries {
            out.entry(m.degree())
                .and_modify(|s| {
                    if e.size < *s {
                        *s = e.size.clone()
                    }
                })
                .or_insert_with(|| e.size.clone());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution<S> {
    pub h: HomoPoly<S>,
    /// Number of nilpotent correction steps taken.
    pub corrections: usize,
}

/// Number of monomials of degree `d` in `n` variables.
pub fn monomial_count(n: usize, d: u32) -> usize {
    // C(d + n - 1, n - 1)
    let mut acc: u128 = 1;
    for k in 1..n as u128 {
        acc = acc * (d as u128 + k) / k;
    }
    acc as usize
}

/// The unique `H` with `L(H) = rhs` and no `y1^d` term.
pub fn solve<S: Scalar>(
    b: &[Vec<S>],
    rhs: &HomoPoly<S>,
    log: &mut SmallDivisorLog<S>,
) -> Result<Solution<S>> {
    let d = rhs.degree();
    if rhs.pure_y1_coeff().is_some() {
        return Err(Error::KernelComponentInRHS { degree: d });
    }
    let mut inverses: BTreeMap<MultiIndex, S> = BTreeMap::new();
    let mut divide = |p: &HomoPoly<S>, log: &mut SmallDivisorLog<S>| -> Result<HomoPoly<S>> {
        let mut out = HomoPoly::zero(p.nvars(), p.degree());
        for (m, c) in p.terms() {
            if m.is_pure_y1() {
                return Err(Error::KernelComponentInRHS { degree: d });
            }
            if !inverses.contains_key(m) {
                let ev = eigenvalue_from_diagonal(m, b);
                let inv = ev.try_inverse().ok_or_else(|| Error::ResonanceViolation {
                    witness: MultiIndex::new(m.exponents()[1..].to_vec()),
                })?;
                log.record(m, &ev);
                inverses.insert(m.clone(), inv);
            }
            out.add_term(m.clone(), inverses[m].clone() * c.clone());
        }
        Ok(out)
    };

    let bound = monomial_count(rhs.nvars(), d);
    let mut term = divide(rhs, log)?;
    let mut h = term.clone();
    let mut corrections = 0;
    loop {
        let next = divide(&apply_l_strict(b, &term), log)?.neg();
        if next.is_zero() {
            break;
        }
        corrections += 1;
        assert!(
            corrections < bound,
            "nilpotent correction did not terminate within {bound} steps"
        );
        h.add_assign_unchecked(&next);
        term = next;
    }
    Ok(Solution { h, corrections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, Rational};
    use crate::system::diagonal;

    type Q = Rational;

    fn p(lit: &str, n: usize, d: u32) -> HomoPoly<Q> {
        let terms = crate::algebra::parse_polynomial::<Q>(lit, n).unwrap();
        HomoPoly::from_terms(n, d, terms).unwrap()
    }

    fn minus_one() -> Vec<Vec<Q>> {
        diagonal(&[rational(-1, 1)])
    }

    #[test]
    fn operator_examples() {
        assert_eq!(apply_l(&minus_one(), &p("y1 y2", 2, 2)), p("-y1 y2", 2, 2));
        assert!(apply_l(&minus_one(), &p("y1^4", 2, 4)).is_zero());
        let b = vec![
            vec![rational(-1, 1), rational(0, 1)],
            vec![rational(1, 1), rational(-2, 1)],
        ];
        assert_eq!(apply_l(&b, &p("y2", 3, 1)), p("-y2", 3, 1));
        assert_eq!(apply_l(&b, &p("y3", 3, 1)), p("y2 - 2 y3", 3, 1));
    }

    #[test]
    fn solve_examples() {
        let mut log = SmallDivisorLog::new();
        let s = solve(&minus_one(), &p("-y1 y2", 2, 2), &mut log).unwrap();
        assert_eq!(s.h, p("y1 y2", 2, 2));
        let s = solve(&minus_one(), &p("-y1 y2^2", 2, 3), &mut log).unwrap();
        assert_eq!(s.h, p("1/2 y1 y2^2", 2, 3));
        let s = solve(&minus_one(), &HomoPoly::zero(2, 4), &mut log).unwrap();
        assert!(s.h.is_zero());
        assert_eq!(log.len(), 2);
        assert_eq!(log.minimum().unwrap().1, &rational(1, 1));
    }

    #[test]
    fn kernel_rhs_rejected() {
        let mut log = SmallDivisorLog::new();
        assert!(matches!(
            solve(&minus_one(), &p("y1^3 + y1 y2^2", 2, 3), &mut log),
            Err(Error::KernelComponentInRHS { degree: 3 })
        ));
    }

    #[test]
    fn nilpotent_part_round_trips() {
        let b = vec![
            vec![rational(-1, 1), rational(0, 1), rational(0, 1)],
            vec![rational(2, 1), rational(-3, 1), rational(0, 1)],
            vec![rational(-1, 2), rational(5, 1), rational(-2, 1)],
        ];
        let rhs = p("y1 y2^2 y3 - 3 y2^4 + 1/2 y1^2 y3 y4 + y2 y3 y4^2", 4, 4);
        let mut log = SmallDivisorLog::new();
        let s = solve(&b, &rhs, &mut log).unwrap();
        assert_eq!(apply_l(&b, &s.h), rhs);
        assert!(s.h.pure_y1_coeff().is_none());
        assert!(s.corrections > 0);
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_count(2, 3), 4);
        assert_eq!(monomial_count(3, 2), 6);
        assert_eq!(monomial_count(4, 0), 1);
    }
}
