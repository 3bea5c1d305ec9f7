//! Input systems `x1' = f1(x)`, `x2' = B x2 + f2(x)` and their validation.
//!
//! `B` is the lower-triangular linear part acting on `x2 = (x2, ..., xn)`;
//! its diagonal holds the nonzero eigenvalues. `f1` and `f2` start at
//! degree two.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    parse_polynomial, parse_scalar, GaussianRational, GradedSeries, LiteralError, MultiIndex,
    ParamScalar, Rational, Ring, Scalar,
};
use crate::error::{Error, Result};

/// Validated-shape description of an input system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpec<S> {
    n: usize,
    b: Vec<Vec<S>>,
    f1: GradedSeries<S>,
    f2: Vec<GradedSeries<S>>,
    params: usize,
    truncation: u32,
}

impl<S: Scalar> SystemSpec<S> {
    /// Check the structural invariants: dimensions, `N >= 2`, no constant or
    /// linear terms in the nonlinearities, and in parametric mode a constant
    /// `B` with nonlinear coefficients linear in `t`.
    ///
    /// Triangularity and the spectrum are checked by [`validate`].
    pub fn new(
        b: Vec<Vec<S>>,
        f1: GradedSeries<S>,
        f2: Vec<GradedSeries<S>>,
        params: usize,
        truncation: u32,
    ) -> Result<Self> {
        let n = b.len() + 1;
        if n < 2 {
            return Err(Error::invalid("dimension n must be at least 2"));
        }
        if truncation < 2 {
            return Err(Error::invalid("truncation degree N must be at least 2"));
        }
        if b.iter().any(|row| row.len() != n - 1) {
            return Err(Error::invalid(format!("B must be {0}x{0}", n - 1)));
        }
        if f2.len() != n - 1 {
            return Err(Error::invalid(format!(
                "f2 must have {} components, got {}",
                n - 1,
                f2.len()
            )));
        }
        let f1 = f1.truncate(truncation);
        let f2: Vec<_> = f2.iter().map(|s| s.truncate(truncation)).collect();
        for (name, s) in std::iter::once(("f1".to_string(), &f1))
            .chain(f2.iter().enumerate().map(|(i, s)| (format!("f2[{i}]"), s)))
        {
            if s.nvars() != n {
                return Err(Error::invalid(format!("{name} is not a series in {n} variables")));
            }
            if let Some(d) = s.order() {
                if d < 2 {
                    return Err(Error::invalid(format!(
                        "{name} has a term of degree {d}; nonlinearities must start at degree 2"
                    )));
                }
            }
        }
        let spec = Self {
            n,
            b,
            f1,
            f2,
            params,
            truncation,
        };
        if S::RING == Ring::Qt {
            spec.check_parametric()?;
        }
        Ok(spec)
    }

    fn check_parametric(&self) -> Result<()> {
        for (i, row) in self.b.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.as_rational().is_none() {
                    return Err(Error::invalid(format!(
                        "B[{i}][{j}] depends on the parameters; the linear part must be fixed"
                    )));
                }
            }
        }
        for (name, series) in std::iter::once(("f1".to_string(), &self.f1))
            .chain(self.f2.iter().enumerate().map(|(i, s)| (format!("f2[{i}]"), s)))
        {
            for (m, c) in series.terms() {
                let (degree, no_constant, count) = c.t_profile();
                if degree > 1 || !no_constant {
                    return Err(Error::invalid(format!(
                        "{name} coefficient of {m} is `{}`; parametric coefficients must be linear in t without constant term",
                        c.to_literal()
                    )));
                }
                if count > self.params {
                    return Err(Error::invalid(format!(
                        "{name} coefficient of {m} mentions t{count} but m_params = {}",
                        self.params
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> &[Vec<S>] {
        &self.b
    }

    pub fn f1(&self) -> &GradedSeries<S> {
        &self.f1
    }

    pub fn f2(&self) -> &[GradedSeries<S>] {
        &self.f2
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// Diagonal of `B`, the eigenvalues `lambda_2..lambda_n`.
    pub fn eigenvalues(&self) -> Vec<S> {
        (0..self.n - 1).map(|i| self.b[i][i].clone()).collect()
    }

    /// Same system with a different working degree.
    pub fn with_truncation(&self, truncation: u32) -> Result<Self> {
        Self::new(
            self.b.clone(),
            self.f1.clone(),
            self.f2.clone(),
            self.params,
            truncation,
        )
    }

    pub fn map_coeffs<T: Scalar>(
        &self,
        f: impl Fn(&S) -> Result<T> + Copy,
    ) -> Result<SystemSpec<T>> {
        let b = self
            .b
            .iter()
            .map(|row| row.iter().map(f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let f1 = self.f1.try_map_coeffs(f)?;
        let f2 = self
            .f2
            .iter()
            .map(|s| s.try_map_coeffs(f))
            .collect::<Result<Vec<_>>>()?;
        SystemSpec::new(b, f1, f2, if T::RING == Ring::Qt { self.params } else { 0 }, self.truncation)
    }
}

impl SystemSpec<ParamScalar> {
    /// Exact specialization at a rational parameter point.
    pub fn specialize(&self, point: &[Rational]) -> Result<SystemSpec<Rational>> {
        if point.len() != self.params {
            return Err(Error::invalid(format!(
                "parameter point has {} coordinates, family has {}",
                point.len(),
                self.params
            )));
        }
        self.map_coeffs(|c| {
            c.evaluate(point)
                .ok_or_else(|| Error::invalid("coefficient mentions an unknown parameter"))
        })
    }
}

/// `<m~, lambda~> = sum_{j >= 2} m_j lambda_j`, the eigenvalue of the
/// homological operator on the monomial `y^m`. `m` has `n` entries.
pub fn eigenvalue_of<S: Scalar>(m: &MultiIndex, spec: &SystemSpec<S>) -> S {
    eigenvalue_from_diagonal(m, spec.b())
}

pub(crate) fn eigenvalue_from_diagonal<S: Scalar>(m: &MultiIndex, b: &[Vec<S>]) -> S {
    let mut acc = S::zero();
    for (i, row) in b.iter().enumerate() {
        let e = m.get(i + 1);
        if e > 0 {
            acc = acc + S::from_integer(e as i64) * row[i].clone();
        }
    }
    acc
}

/// Smallest `|<m~, lambda~>|` seen during validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinDivisor<S> {
    /// Exact size: `|x|` over Q and the parametric ring, `|x|^2` over Q(i).
    pub size: Rational,
    pub value: S,
    /// The exponent vector `m~` over `y2..yn`.
    pub witness: MultiIndex,
}

/// Evidence that no resonance `<m~, lambda~> = 0` occurs for
/// `2 <= |m~| <= checked_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResonanceCertificate<S> {
    pub checked_degree: u32,
    pub min_divisor: MinDivisor<S>,
}

/// Check triangularity, nonzero eigenvalues and nonresonance through the
/// working degree.
pub fn validate<S: Scalar>(spec: &SystemSpec<S>) -> Result<ResonanceCertificate<S>> {
    let k = spec.n - 1;
    for (i, row) in spec.b.iter().enumerate() {
        for (j, e) in row.iter().enumerate().skip(i + 1) {
            if !e.is_zero() {
                return Err(Error::NotLowerTriangular { row: i, col: j });
            }
        }
    }
    let lambda = spec.eigenvalues();
    if let Some(i) = lambda.iter().position(|l| l.is_zero()) {
        return Err(Error::ZeroEigenvalue { index: i });
    }

    let mut best: Option<MinDivisor<S>> = None;
    for d in 2..=spec.truncation {
        for m in MultiIndex::all_of_degree(k, d) {
            let mut v = S::zero();
            for (e, l) in m.exponents().iter().zip(&lambda) {
                if *e > 0 {
                    v = v + S::from_integer(*e as i64) * l.clone();
                }
            }
            if v.is_zero() {
                return Err(Error::ResonanceViolation { witness: m });
            }
            let size = v.divisor_size().ok_or_else(|| {
                Error::invalid("eigenvalues must be parameter-independent constants")
            })?;
            if best.as_ref().is_none_or(|b| size < b.size) {
                best = Some(MinDivisor {
                    size,
                    value: v,
                    witness: m,
                });
            }
        }
    }
    Ok(ResonanceCertificate {
        checked_degree: spec.truncation,
        min_divisor: best.expect("at least one multi-index of degree 2"),
    })
}

// ---------------------------------------------------------------------------
// JSON input
// ---------------------------------------------------------------------------

/// An exact number in the input file: a literal string or a JSON integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactInput {
    Int(i64),
    Text(String),
}

impl ExactInput {
    fn text(&self) -> String {
        match self {
            ExactInput::Int(i) => i.to_string(),
            ExactInput::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermInput {
    pub coeff: ExactInput,
    pub exp: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub texp: Vec<u32>,
}

/// A polynomial given either as a term list or as one literal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyInput {
    Terms(Vec<TermInput>),
    Literal(String),
}

/// On-disk system description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub n: usize,
    #[serde(default = "default_ring")]
    pub ring: Ring,
    #[serde(default)]
    pub m_params: usize,
    #[serde(rename = "B")]
    pub b: Vec<Vec<ExactInput>>,
    pub f1: PolyInput,
    pub f2: Vec<PolyInput>,
    #[serde(rename = "N")]
    pub truncation: u32,
}

fn default_ring() -> Ring {
    Ring::Q
}

fn literal_err(location: String, e: LiteralError) -> Error {
    Error::parse(format!("{location}, column {}", e.column), e.message)
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::parse(
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    /// Build a typed system in ring `S`. `S` may differ from the declared
    /// ring when a ring override is in effect.
    pub fn to_spec<S: Scalar>(&self) -> Result<SystemSpec<S>> {
        let n = self.n;
        if n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        if self.b.len() != n - 1 {
            return Err(Error::invalid(format!("B must have {} rows", n - 1)));
        }
        let b = self
            .b
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| {
                        parse_scalar::<S>(&e.text()).map_err(|err| literal_err(format!("B[{i}][{j}]"), err))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let f1 = self.poly::<S>(&self.f1, "f1")?;
        let f2 = self
            .f2
            .iter()
            .enumerate()
            .map(|(i, p)| self.poly::<S>(p, &format!("f2[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let params = if S::RING == Ring::Qt { self.m_params } else { 0 };
        SystemSpec::new(b, f1, f2, params, self.truncation)
    }

    fn poly<S: Scalar>(&self, p: &PolyInput, name: &str) -> Result<GradedSeries<S>> {
        let n = self.n;
        let terms = match p {
            PolyInput::Literal(s) => {
                parse_polynomial::<S>(s, n).map_err(|e| literal_err(name.to_string(), e))?
            }
            PolyInput::Terms(list) => {
                let mut out = Vec::with_capacity(list.len());
                for (k, t) in list.iter().enumerate() {
                    let loc = format!("{name}[{k}]");
                    if t.exp.len() != n {
                        return Err(Error::parse(
                            format!("{loc}.exp"),
                            format!("expected {n} exponents, got {}", t.exp.len()),
                        ));
                    }
                    let mut c = parse_scalar::<S>(&t.coeff.text())
                        .map_err(|e| literal_err(format!("{loc}.coeff"), e))?;
                    for (j, &e) in t.texp.iter().enumerate() {
                        if e == 0 {
                            continue;
                        }
                        let tj = S::parameter(j + 1).ok_or_else(|| {
                            Error::parse(
                                format!("{loc}.texp"),
                                format!("parameter exponents need ring Qt, not {}", S::RING),
                            )
                        })?;
                        if j + 1 > self.m_params {
                            return Err(Error::parse(
                                format!("{loc}.texp"),
                                format!("t{} exceeds m_params = {}", j + 1, self.m_params),
                            ));
                        }
                        for _ in 0..e {
                            c = c * tj.clone();
                        }
                    }
                    out.push((MultiIndex::new(t.exp.clone()), c));
                }
                out
            }
        };
        GradedSeries::from_terms(n, self.truncation, terms)
    }

    /// Serialize a typed system back to the file format.
    pub fn from_spec<S: Scalar>(spec: &SystemSpec<S>) -> Self {
        let terms = |s: &GradedSeries<S>| {
            PolyInput::Terms(
                s.terms()
                    .map(|(m, c)| TermInput {
                        coeff: ExactInput::Text(c.to_literal()),
                        exp: m.exponents().to_vec(),
                        texp: Vec::new(),
                    })
                    .collect(),
            )
        };
        SystemFile {
            n: spec.n,
            ring: S::RING,
            m_params: spec.params,
            b: spec
                .b
                .iter()
                .map(|row| row.iter().map(|e| ExactInput::Text(e.to_literal())).collect())
                .collect(),
            f1: terms(&spec.f1),
            f2: spec.f2.iter().map(terms).collect(),
            truncation: spec.truncation,
        }
    }
}

/// A system in whichever ring the run uses.
#[derive(Debug, Clone)]
pub enum AnySystem {
    Q(SystemSpec<Rational>),
    Qi(SystemSpec<GaussianRational>),
    Qt(SystemSpec<ParamScalar>),
}

impl AnySystem {
    pub fn ring(&self) -> Ring {
        match self {
            AnySystem::Q(_) => Ring::Q,
            AnySystem::Qi(_) => Ring::Qi,
            AnySystem::Qt(_) => Ring::Qt,
        }
    }

    pub fn truncation(&self) -> u32 {
        match self {
            AnySystem::Q(s) => s.truncation(),
            AnySystem::Qi(s) => s.truncation(),
            AnySystem::Qt(s) => s.truncation(),
        }
    }
}

/// Parse a system file, optionally overriding its ring and working degree.
pub fn load_system(text: &str, ring: Option<Ring>, degree: Option<u32>) -> Result<AnySystem> {
    let mut file = SystemFile::from_json(text)?;
    if let Some(d) = degree {
        file.truncation = d;
    }
    Ok(match ring.unwrap_or(file.ring) {
        Ring::Q => AnySystem::Q(file.to_spec()?),
        Ring::Qi => AnySystem::Qi(file.to_spec()?),
        Ring::Qt => AnySystem::Qt(file.to_spec()?),
    })
}

/// Diagonal matrix with the given entries.
pub fn diagonal<S: Scalar>(entries: &[S]) -> Vec<Vec<S>> {
    let k = entries.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { entries[i].clone() } else { S::zero() })
                .collect()
        })
        .collect()
}
