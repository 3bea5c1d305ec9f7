//! Formal first integral `H = y1 + sum_{s>=2} H_s` of a factored system.

use std::collections::BTreeMap;

use crate::algebra::{GradedSeries, HomoPoly, MultiIndex, ParamScalar, Rational, Ring, Scalar};
use crate::error::{Error, Result};
use crate::homological::{apply_l, solve, SmallDivisorLog};
use crate::reduction::FactoredSystem;

/// Homogeneous pieces of the nonlinear field: `piece(j)[v]` is the degree
/// `j + 1` part of the `v`-th component of `(F1 y2, F2 y2)`.
#[derive(Debug, Clone)]
pub struct FieldPieces<S> {
    n: usize,
    /// Index `j - 1` for `j = 1..=max_j`.
    pieces: Vec<Vec<HomoPoly<S>>>,
}

impl<S: Scalar> FieldPieces<S> {
    pub fn new(fs: &FactoredSystem<S>) -> Self {
        let n = fs.n();
        let max_j = fs.truncation().saturating_sub(1);
        let rows: Vec<&[GradedSeries<S>]> = std::iter::once(fs.f1())
            .chain(fs.f2().iter().map(|r| r.as_slice()))
            .collect();
        let pieces = (1..=max_j)
            .map(|j| {
                rows.iter()
                    .map(|row| {
                        let mut acc = HomoPoly::zero(n, j + 1);
                        for (k, entry) in row.iter().enumerate() {
                            if let Some(c) = entry.component(j) {
                                acc.add_assign_unchecked(&c.mul_var(k + 1));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { n, pieces }
    }

    pub fn max_j(&self) -> u32 {
        self.pieces.len() as u32
    }

    pub fn piece(&self, j: u32) -> &[HomoPoly<S>] {
        &self.pieces[(j - 1) as usize]
    }

    /// `sum_v piece(j)[v] * dp/dy_v`.
    fn apply(&self, j: u32, p: &HomoPoly<S>) -> HomoPoly<S> {
        let mut acc = HomoPoly::zero(self.n, p.degree() + j);
        if p.degree() == 0 {
            return acc;
        }
        for (v, field) in self.piece(j).iter().enumerate() {
            if field.is_zero() {
                continue;
            }
            let dp = p.partial(v);
            if !dp.is_zero() {
                acc.add_assign_unchecked(&field.mul(&dp));
            }
        }
        acc
    }
}

/// Right-hand side for `H_{1+s}`:
/// `-sum_{j=1..s} [<F2_j y2, dH_{1+s-j}/dy2> + F1_j y2 dH_{1+s-j}/dy1]`.
pub fn rhs_at_degree<S: Scalar>(
    s: u32,
    pieces: &FieldPieces<S>,
    h: &GradedSeries<S>,
) -> Result<HomoPoly<S>> {
    let mut acc = HomoPoly::zero(pieces.n, 1 + s);
    for j in 1..=s.min(pieces.max_j()) {
        if let Some(hk) = h.component(1 + s - j) {
            acc.add_assign_unchecked(&pieces.apply(j, hk));
        }
    }
    let acc = acc.neg();
    if acc.pure_y1_coeff().is_some() {
        return Err(Error::KernelComponentInRHS { degree: 1 + s });
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstIntegral<S> {
    pub components: GradedSeries<S>,
    pub truncation: u32,
    pub divisors: SmallDivisorLog<S>,
    pub ring: Ring,
    /// Nilpotent correction steps per degree.
    pub corrections: BTreeMap<u32, usize>,
}

pub fn compute_first_integral<S: Scalar>(fs: &FactoredSystem<S>, n: u32) -> Result<FirstIntegral<S>> {
    if n > fs.truncation() {
        return Err(Error::invalid(format!(
            "requested degree {n} exceeds the factored system's truncation {}",
            fs.truncation()
        )));
    }
    let pieces = FieldPieces::new(fs);
    let mut h = GradedSeries::variable(fs.n(), 0, n);
    let mut divisors = SmallDivisorLog::new();
    let mut corrections = BTreeMap::new();
    for s in 1..n {
        let rhs = rhs_at_degree(s, &pieces, &h)?;
        let sol = solve(fs.b(), &rhs, &mut divisors)?;
        corrections.insert(1 + s, sol.corrections);
        h.add_component(&sol.h);
    }
    Ok(FirstIntegral {
        components: h,
        truncation: n,
        divisors,
        ring: S::RING,
        corrections,
    })
}

/// Graded components of `X(H)` for degrees `<= up_to`; zero components are
/// omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieDerivativeResidual<S> {
    pub components: BTreeMap<u32, HomoPoly<S>>,
}

impl<S: Scalar> LieDerivativeResidual<S> {
    /// Lowest degree with a nonzero component.
    pub fn first_nonzero(&self) -> Option<u32> {
        self.components.keys().next().copied()
    }

    pub fn vanishes_through(&self, degree: u32) -> bool {
        self.first_nonzero().is_none_or(|d| d > degree)
    }
}

pub fn lie_derivative<S: Scalar>(
    h: &GradedSeries<S>,
    fs: &FactoredSystem<S>,
    up_to: u32,
) -> LieDerivativeResidual<S> {
    let pieces = FieldPieces::new(fs);
    let mut out: BTreeMap<u32, HomoPoly<S>> = BTreeMap::new();
    let mut add = |p: HomoPoly<S>| {
        if p.is_zero() {
            return;
        }
        let d = p.degree();
        let e = out.entry(d).or_insert_with(|| HomoPoly::zero(p.nvars(), d));
        e.add_assign_unchecked(&p);
        if e.is_zero() {
            out.remove(&d);
        }
    };
    for hk in h.components() {
        let k = hk.degree();
        if k <= up_to {
            add(apply_l(fs.b(), hk));
        }
        for j in 1..=pieces.max_j() {
            if k + j > up_to {
                break;
            }
            add(pieces.apply(j, hk));
        }
    }
    LieDerivativeResidual { components: out }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamViolation {
    pub degree: u32,
    pub monomial: MultiIndex,
    pub coefficient: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamStructureReport {
    pub checked: usize,
    pub violations: Vec<ParamViolation>,
}

impl ParamStructureReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every coefficient of `H_s`, `s >= 2`, has `t`-degree at most `s - 1` and
/// no constant term.
pub fn verify_param_structure(h: &FirstIntegral<ParamScalar>) -> ParamStructureReport {
    let mut checked = 0;
    let mut violations = Vec::new();
    for comp in h.components.components() {
        let s = comp.degree();
        if s < 2 {
            continue;
        }
        for (m, c) in comp.terms() {
            checked += 1;
            let mut reasons = Vec::new();
            if c.degree() > s as i64 - 1 {
                reasons.push(format!("t-degree {} exceeds {}", c.degree(), s - 1));
            }
            if !num_traits::Zero::is_zero(&c.constant_term()) {
                reasons.push("nonzero constant term".to_string());
            }
            if !reasons.is_empty() {
                violations.push(ParamViolation {
                    degree: s,
                    monomial: m.clone(),
                    coefficient: c.to_literal(),
                    reason: reasons.join("; "),
                });
            }
        }
    }
    ParamStructureReport {
        checked,
        violations,
    }
}

impl FirstIntegral<ParamScalar> {
    /// Evaluate every coefficient at a rational parameter point.
    pub fn specialize(&self, point: &[Rational]) -> Result<FirstIntegral<Rational>> {
        let components = self.components.try_map_coeffs(|c| {
            c.evaluate(point)
                .ok_or_else(|| Error::invalid("coefficient mentions an unknown parameter"))
        })?;
        let mut divisors = SmallDivisorLog::new();
        for (m, e) in self.divisors.entries() {
            let v = e.value.as_constant().expect("divisors are parameter-free");
            divisors.record(m, &v);
        }
        Ok(FirstIntegral {
            components,
            truncation: self.truncation,
            divisors,
            ring: Ring::Q,
            corrections: self.corrections.clone(),
        })
    }
}
