//! Center curve, nonisolatedness test, and the shift to the factored form
//! `y1' = F1(y) y2`, `y2' = B y2 + F2(y) y2`.

use crate::algebra::{GradedSeries, HomoPoly, MultiIndex, Scalar};
use crate::error::{Error, Result};
use crate::system::SystemSpec;

/// `x2 = phi(x1)`, each component a series in `n` variables involving `x1`
/// only, of order at least 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterCurve<S> {
    pub phi: Vec<GradedSeries<S>>,
}

fn diagonal_inverses<S: Scalar>(b: &[Vec<S>]) -> Result<Vec<S>> {
    b.iter()
        .enumerate()
        .map(|(i, row)| row[i].try_inverse().ok_or(Error::ZeroEigenvalue { index: i }))
        .collect()
}

/// Arguments `(x1, phi_1, ..., phi_{n-1})` for composing with `phi`.
fn curve_args<S: Scalar>(n: usize, truncation: u32, phi: &[GradedSeries<S>]) -> Vec<GradedSeries<S>> {
    std::iter::once(GradedSeries::variable(n, 0, truncation))
        .chain(phi.iter().cloned())
        .collect()
}

/// Solve `B phi + f2(x1, phi) = 0` degree by degree with forward
/// substitution on the triangular `B`.
pub fn solve_implicit<S: Scalar>(spec: &SystemSpec<S>) -> Result<CenterCurve<S>> {
    let n = spec.n();
    let big_n = spec.truncation();
    let inv = diagonal_inverses(spec.b())?;
    let mut phi: Vec<GradedSeries<S>> = vec![GradedSeries::zero(n, big_n); n - 1];
    for d in 2..=big_n {
        // phi_{<d} suffices: a degree-d term of f2(x1, phi) never involves phi_d
        let args = curve_args(n, d, &phi);
        let rhs: Vec<HomoPoly<S>> = spec
            .f2()
            .iter()
            .map(|f| Ok(f.substitute(&args, d)?.component_or_zero(d)))
            .collect::<Result<_>>()?;
        let mut solved: Vec<HomoPoly<S>> = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let mut acc = rhs[i].neg();
            for (j, sj) in solved.iter().enumerate() {
                acc.add_scaled(sj, &(-spec.b()[i][j].clone()));
            }
            solved.push(acc.scale(&inv[i]));
        }
        for (p, s) in phi.iter_mut().zip(&solved) {
            p.add_component(s);
        }
    }
    Ok(CenterCurve { phi })
}

/// Same curve by the fixed-point iteration `phi <- -B^{-1} f2(x1, phi)`,
/// using a dense inverse of `B`. Each sweep fixes at least one more degree.
pub fn solve_implicit_fixed_point<S: Scalar>(spec: &SystemSpec<S>) -> Result<CenterCurve<S>> {
    let n = spec.n();
    let k = n - 1;
    let big_n = spec.truncation();
    let inv_diag = diagonal_inverses(spec.b())?;
    // lower-triangular inverse by column-wise forward substitution
    let mut binv = vec![vec![S::zero(); k]; k];
    for c in 0..k {
        for i in c..k {
            let mut acc = if i == c { S::one() } else { S::zero() };
            for j in c..i {
                acc = acc - spec.b()[i][j].clone() * binv[j][c].clone();
            }
            binv[i][c] = acc * inv_diag[i].clone();
        }
    }
    let mut phi: Vec<GradedSeries<S>> = vec![GradedSeries::zero(n, big_n); k];
    for _ in 0..big_n {
        let args = curve_args(n, big_n, &phi);
        let f: Vec<GradedSeries<S>> = spec
            .f2()
            .iter()
            .map(|f| f.substitute(&args, big_n))
            .collect::<Result<_>>()?;
        let next: Vec<GradedSeries<S>> = (0..k)
            .map(|i| {
                let mut acc = GradedSeries::zero(n, big_n);
                for (j, fj) in f.iter().enumerate() {
                    acc = acc.sub(&fj.scale(&binv[i][j]));
                }
                acc
            })
            .collect();
        if next == phi {
            break;
        }
        phi = next;
    }
    Ok(CenterCurve { phi })
}

/// `B phi + f2(x1, phi)` through the working degree; exactly zero for the
/// true curve.
pub fn center_residual<S: Scalar>(
    spec: &SystemSpec<S>,
    curve: &CenterCurve<S>,
) -> Result<Vec<GradedSeries<S>>> {
    let n = spec.n();
    let big_n = spec.truncation();
    let args = curve_args(n, big_n, &curve.phi);
    (0..n - 1)
        .map(|i| {
            let mut r = spec.f2()[i].substitute(&args, big_n)?;
            for (j, p) in curve.phi.iter().enumerate() {
                r = r.add(&p.scale(&spec.b()[i][j]));
            }
            Ok(r)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<S> {
    /// `f1(x1, phi(x1))` vanishes through the given degree.
    NonIsolatedUpTo(u32),
    /// First nonzero coefficient of `f1(x1, phi(x1))`.
    IsolatedAtDegree { degree: u32, witness: S },
}

impl<S: Scalar> Verdict<S> {
    pub fn into_result(self) -> Result<u32> {
        match self {
            Verdict::NonIsolatedUpTo(n) => Ok(n),
            Verdict::IsolatedAtDegree { degree, witness } => Err(Error::Isolated {
                degree,
                witness: witness.to_literal(),
            }),
        }
    }
}

pub fn nonisolated_check<S: Scalar>(
    spec: &SystemSpec<S>,
    curve: &CenterCurve<S>,
) -> Result<Verdict<S>> {
    let big_n = spec.truncation();
    let args = curve_args(spec.n(), big_n, &curve.phi);
    let g = spec.f1().substitute(&args, big_n)?;
    Ok(match g.order() {
        None => Verdict::NonIsolatedUpTo(big_n),
        Some(d) => {
            let comp = g.component(d).expect("order is a stored degree");
            let witness = comp
                .pure_y1_coeff()
                .cloned()
                .expect("composition along the curve involves x1 only");
            Verdict::IsolatedAtDegree { degree: d, witness }
        }
    })
}

/// `y1' = F1(y) y2`, `y2' = B y2 + F2(y) y2` with entries truncated at
/// `N - 1` so that every product with `y2` stays within degree `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredSystem<S> {
    n: usize,
    b: Vec<Vec<S>>,
    f1: Vec<GradedSeries<S>>,
    f2: Vec<Vec<GradedSeries<S>>>,
    truncation: u32,
}

impl<S: Scalar> FactoredSystem<S> {
    /// Assemble directly. Every entry must be a series in `n` variables with
    /// no constant term.
    pub fn new(
        b: Vec<Vec<S>>,
        f1: Vec<GradedSeries<S>>,
        f2: Vec<Vec<GradedSeries<S>>>,
        truncation: u32,
    ) -> Result<Self> {
        let n = b.len() + 1;
        let k = n - 1;
        if b.iter().any(|r| r.len() != k) || f1.len() != k || f2.len() != k || f2.iter().any(|r| r.len() != k) {
            return Err(Error::invalid(format!("factored system must have {k} columns")));
        }
        let trunc = truncation.saturating_sub(1);
        let fix = |s: &GradedSeries<S>| -> Result<GradedSeries<S>> {
            if s.nvars() != n {
                return Err(Error::invalid(format!("entry is not a series in {n} variables")));
            }
            if s.component(0).is_some() {
                return Err(Error::invalid("factored entries must have order at least 1"));
            }
            Ok(s.truncate(trunc))
        };
        Ok(Self {
            n,
            b,
            f1: f1.iter().map(fix).collect::<Result<_>>()?,
            f2: f2
                .iter()
                .map(|row| row.iter().map(fix).collect::<Result<_>>())
                .collect::<Result<_>>()?,
            truncation,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &[Vec<S>] {
        &self.b
    }

    pub fn f1(&self) -> &[GradedSeries<S>] {
        &self.f1
    }

    pub fn f2(&self) -> &[Vec<GradedSeries<S>>] {
        &self.f2
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// Nonlinear right-hand sides `(F1 y2, F2 y2)` through degree `N`.
    pub fn reconstruct(&self) -> (GradedSeries<S>, Vec<GradedSeries<S>>) {
        let dot = |row: &[GradedSeries<S>]| {
            let mut acc = GradedSeries::zero(self.n, self.truncation);
            for (j, e) in row.iter().enumerate() {
                let yj = GradedSeries::variable(self.n, j + 1, self.truncation);
                acc = acc.add(&e.mul(&yj, self.truncation));
            }
            acc
        };
        (dot(&self.f1), self.f2.iter().map(|r| dot(r)).collect())
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> Result<T> + Copy) -> Result<FactoredSystem<T>> {
        let b = self
            .b
            .iter()
            .map(|r| r.iter().map(f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let f1 = self.f1.iter().map(|s| s.try_map_coeffs(f)).collect::<Result<Vec<_>>>()?;
        let f2 = self
            .f2
            .iter()
            .map(|r| r.iter().map(|s| s.try_map_coeffs(f)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FactoredSystem::new(b, f1, f2, self.truncation)
    }
}

/// Split a series vanishing on `y2 = 0` as `sum_j G_j y_{j+1}`, assigning each
/// monomial to its smallest-index `y2`-variable. Returns the degree of the
/// first pure `y1` term if one is present.
fn factor_row<S: Scalar>(s: &GradedSeries<S>, n: usize, truncation: u32) -> Result<Vec<GradedSeries<S>>> {
    let mut row: Vec<Vec<(MultiIndex, S)>> = vec![Vec::new(); n - 1];
    for (m, c) in s.terms() {
        match (1..n).find(|&j| m.get(j) > 0) {
            Some(j) => row[j - 1].push((m.div_var(j).expect("positive exponent"), c.clone())),
            None => return Err(Error::NonVanishingOnCenter { degree: m.degree() }),
        }
    }
    row.into_iter()
        .map(|terms| GradedSeries::from_terms(n, truncation, terms))
        .collect()
}

/// Substitute `x1 = y1`, `x2 = y2 + phi(y1)` and factor out `y2`.
pub fn shift_and_factor<S: Scalar>(
    spec: &SystemSpec<S>,
    curve: &CenterCurve<S>,
) -> Result<FactoredSystem<S>> {
    let n = spec.n();
    let big_n = spec.truncation();
    let args: Vec<GradedSeries<S>> = std::iter::once(GradedSeries::variable(n, 0, big_n))
        .chain(
            curve
                .phi
                .iter()
                .enumerate()
                .map(|(i, p)| GradedSeries::variable(n, i + 1, big_n).add(p)),
        )
        .collect();
    let g1 = spec.f1().substitute(&args, big_n)?;
    // y2' = x2' - phi'(y1) x1' ; the linear part B y2 is split off, leaving
    // B phi + f2(shifted) - phi' g1
    let g2: Vec<GradedSeries<S>> = (0..n - 1)
        .map(|i| {
            let mut r = spec.f2()[i].substitute(&args, big_n)?;
            for (j, p) in curve.phi.iter().enumerate() {
                r = r.add(&p.scale(&spec.b()[i][j]));
            }
            let dphi = curve.phi[i].partial(0);
            Ok(r.sub(&dphi.mul(&g1, big_n)))
        })
        .collect::<Result<_>>()?;

    let first_pure = std::iter::once(&g1)
        .chain(&g2)
        .filter_map(|s| s.terms().filter(|(m, _)| m.is_pure_y1()).map(|(m, _)| m.degree()).min())
        .min();
    if let Some(degree) = first_pure {
        return Err(Error::NonVanishingOnCenter { degree });
    }
    let trunc = big_n - 1;
    let f1 = factor_row(&g1, n, trunc)?;
    let f2 = g2
        .iter()
        .map(|s| factor_row(s, n, trunc))
        .collect::<Result<Vec<_>>>()?;
    FactoredSystem::new(spec.b().to_vec(), f1, f2, big_n)
}

/// Everything the reduction produces for one system.
#[derive(Debug, Clone)]
pub struct Reduction<S> {
    pub curve: CenterCurve<S>,
    pub verdict: Verdict<S>,
    /// Present only when the singularity is nonisolated through `N`.
    pub factored: Option<FactoredSystem<S>>,
}

pub fn reduce<S: Scalar>(spec: &SystemSpec<S>) -> Result<Reduction<S>> {
    let curve = solve_implicit(spec)?;
    let verdict = nonisolated_check(spec, &curve)?;
    let factored = match verdict {
        Verdict::NonIsolatedUpTo(_) => Some(shift_and_factor(spec, &curve)?),
        Verdict::IsolatedAtDegree { .. } => None,
    };
    Ok(Reduction {
        curve,
        verdict,
        factored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, Rational};
    use crate::system::diagonal;

    type Q = Rational;

    fn s(lit: &str, n: usize, trunc: u32) -> GradedSeries<Q> {
        GradedSeries::parse(lit, n, trunc).unwrap()
    }

    fn sys(b: Vec<Vec<Q>>, f1: &str, f2: &[&str], trunc: u32) -> SystemSpec<Q> {
        let n = b.len() + 1;
        SystemSpec::new(
            b,
            s(f1, n, trunc),
            f2.iter().map(|l| s(l, n, trunc)).collect(),
            0,
            trunc,
        )
        .unwrap()
    }

    fn minus_one() -> Vec<Vec<Q>> {
        diagonal(&[rational(-1, 1)])
    }

    #[test]
    fn trivial_curve() {
        let spec = sys(minus_one(), "y1 y2", &["0"], 5);
        let c = solve_implicit(&spec).unwrap();
        assert!(c.phi[0].is_zero());
    }

    #[test]
    fn quadratic_curve() {
        let spec = sys(minus_one(), "0", &["y1^2"], 6);
        let c = solve_implicit(&spec).unwrap();
        assert_eq!(c.phi[0], s("y1^2", 2, 6));
    }

    #[test]
    fn catalan_curve() {
        // fixed point phi = x^2 + phi^2, iterated by hand to degree 8
        let spec = sys(minus_one(), "0", &["y1^2 + y2^2"], 8);
        let c = solve_implicit(&spec).unwrap();
        assert_eq!(c.phi[0], s("y1^2 + y1^4 + 2 y1^6 + 5 y1^8", 2, 8));
        assert_eq!(solve_implicit_fixed_point(&spec).unwrap(), c);
        assert!(center_residual(&spec, &c).unwrap().iter().all(|r| r.is_zero()));
    }

    #[test]
    fn verdicts() {
        let spec = sys(minus_one(), "y1 y2 - y1^3", &["y1^2"], 6);
        let c = solve_implicit(&spec).unwrap();
        assert_eq!(nonisolated_check(&spec, &c).unwrap(), Verdict::NonIsolatedUpTo(6));

        let spec = sys(minus_one(), "y1 y2", &["y1^2"], 6);
        let c = solve_implicit(&spec).unwrap();
        assert_eq!(
            nonisolated_check(&spec, &c).unwrap(),
            Verdict::IsolatedAtDegree {
                degree: 3,
                witness: rational(1, 1)
            }
        );

        let spec = sys(minus_one(), "0", &["y1^2 + y1 y2"], 6);
        let c = solve_implicit(&spec).unwrap();
        assert_eq!(nonisolated_check(&spec, &c).unwrap(), Verdict::NonIsolatedUpTo(6));
    }

    #[test]
    fn shifted_factorization() {
        let spec = sys(minus_one(), "y1 y2 - y1^3", &["y1^2"], 4);
        let c = solve_implicit(&spec).unwrap();
        let fs = shift_and_factor(&spec, &c).unwrap();
        assert_eq!(fs.f1()[0], s("y1", 2, 3));
        assert_eq!(fs.f2()[0][0], s("-2 y1^2", 2, 3));
    }

    #[test]
    fn smallest_index_tie_break() {
        let b = diagonal(&[rational(-1, 1), rational(-2, 1)]);
        let spec = sys(b, "y2 y3", &["0", "0"], 4);
        let c = solve_implicit(&spec).unwrap();
        let fs = shift_and_factor(&spec, &c).unwrap();
        assert_eq!(fs.f1()[0], s("y3", 3, 3));
        assert!(fs.f1()[1].is_zero());
    }

    #[test]
    fn isolated_input_is_rejected_by_the_shift() {
        let spec = sys(minus_one(), "y1 y2", &["y1^2"], 5);
        let c = solve_implicit(&spec).unwrap();
        assert!(matches!(
            shift_and_factor(&spec, &c),
            Err(Error::NonVanishingOnCenter { degree: 3 })
        ));
        let r = reduce(&spec).unwrap();
        assert!(r.factored.is_none());
    }

    #[test]
    fn lower_triangular_curve() {
        let b = vec![
            vec![rational(-1, 1), rational(0, 1)],
            vec![rational(1, 1), rational(-2, 1)],
        ];
        let spec = sys(b, "0", &["y1^2 + y2 y3", "y1^3 - y2^2"], 7);
        let c = solve_implicit(&spec).unwrap();
        assert!(center_residual(&spec, &c).unwrap().iter().all(|r| r.is_zero()));
        assert_eq!(solve_implicit_fixed_point(&spec).unwrap(), c);
    }
}
