use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::{parse_scalar, rational_to_f64, ParamScalar, Rational};
use crate::error::{Error, Result};
use crate::integral::compute_first_integral;
use crate::reduction::{reduce, Verdict};
use crate::system::{validate, SystemSpec};

use super::growth::{growth_analyze, GrowthReport};

/// One grid axis: `steps` evenly spaced rational values from `lo` to `hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    /// 1-based parameter index.
    pub param: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub steps: u32,
}

impl Axis {
    pub fn values(&self) -> Vec<Rational> {
        if self.steps == 1 {
            return vec![self.lo.clone()];
        }
        let width = (&self.hi - &self.lo) / Rational::from_integer((self.steps - 1).into());
        (0..self.steps)
            .map(|k| &self.lo + &width * Rational::from_integer(k.into()))
            .collect()
    }
}

/// Rectangular grid over the parameters; unlisted parameters are held at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    /// Parse `t1=lo:hi:steps,t2=...`; endpoints are exact literals.
    pub fn parse(text: &str) -> Result<Self> {
        let mut axes: Vec<Axis> = Vec::new();
        for (k, part) in text.split(',').map(str::trim).enumerate() {
            let loc = format!("grid axis {}", k + 1);
            let (name, range) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(&loc, "expected `tK=lo:hi:steps`"))?;
            let param: usize = name
                .trim()
                .strip_prefix('t')
                .and_then(|d| d.parse().ok())
                .filter(|&p| p >= 1)
                .ok_or_else(|| Error::parse(&loc, format!("unknown parameter `{}`", name.trim())))?;
            let fields: Vec<&str> = range.split(':').map(str::trim).collect();
            let [lo, hi, steps] = fields[..] else {
                return Err(Error::parse(&loc, "expected `lo:hi:steps`"));
            };
            let exact = |s: &str| {
                parse_scalar::<Rational>(s).map_err(|e| Error::parse(&loc, format!("`{s}`: {e}")))
            };
            let steps: u32 = steps
                .parse()
                .ok()
                .filter(|&s| s >= 1)
                .ok_or_else(|| Error::parse(&loc, "steps must be a positive integer"))?;
            if axes.iter().any(|a| a.param == param) {
                return Err(Error::parse(&loc, format!("t{param} listed twice")));
            }
            axes.push(Axis {
                param,
                lo: exact(lo)?,
                hi: exact(hi)?,
                steps,
            });
        }
        Ok(Self { axes })
    }

    /// All grid points in row-major order (last axis fastest), each a full
    /// parameter vector of length `params`.
    pub fn points(&self, params: usize) -> Result<Vec<Vec<Rational>>> {
        if let Some(a) = self.axes.iter().find(|a| a.param > params) {
            return Err(Error::invalid(format!(
                "grid mentions t{} but the family has {params} parameters",
                a.param
            )));
        }
        let mut points = vec![vec![Rational::zero(); params]];
        for axis in &self.axes {
            let vals = axis.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |v| {
                        let mut q = p.clone();
                        q[axis.param - 1] = v.clone();
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Done {
        growth: GrowthReport,
        /// Smallest `|<m~, lambda~>|` used by the solver (squared modulus over Q(i)).
        min_divisor: Option<f64>,
    },
    Failed {
        kind: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub index: usize,
    pub t: Vec<Rational>,
    pub outcome: PointOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub truncation: u32,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    /// Counts per class name, plus `failed`.
    pub fn summary(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for name in ["geometric", "factorial-like", "inconclusive", "failed"] {
            out.insert(name, 0);
        }
        for p in &self.points {
            let key = match &p.outcome {
                PointOutcome::Done { growth, .. } => growth.class.as_str(),
                PointOutcome::Failed { .. } => "failed",
            };
            *out.get_mut(key).expect("all keys present") += 1;
        }
        out
    }

    pub fn all_failed(&self) -> bool {
        !self.points.is_empty()
            && self
                .points
                .iter()
                .all(|p| matches!(p.outcome, PointOutcome::Failed { .. }))
    }
}

fn run_point(family: &SystemSpec<ParamScalar>, t: &[Rational]) -> Result<(GrowthReport, Option<f64>)> {
    let spec = family.specialize(t)?;
    validate(&spec)?;
    let red = reduce(&spec)?;
    if let Verdict::IsolatedAtDegree { .. } = red.verdict {
        red.verdict.into_result()?;
    }
    let fs = red.factored.expect("nonisolated verdict carries a factored system");
    let h = compute_first_integral(&fs, spec.truncation())?;
    let growth = growth_analyze(&h)?;
    let min_divisor = h.divisors.minimum().map(|(_, s)| rational_to_f64(s));
    Ok((growth, min_divisor))
}

/// Specialize the family at every grid point and classify coefficient
/// growth. Per-point failures are recorded, not propagated. `jobs` bounds
/// the worker count; results are always in grid order.
pub fn scan(family: &SystemSpec<ParamScalar>, grid: &GridSpec, jobs: usize) -> Result<ScanResult> {
    let points = grid.points(family.params())?;
    let work = |(index, t): (usize, Vec<Rational>)| {
        let outcome = match run_point(family, &t) {
            Ok((growth, min_divisor)) => PointOutcome::Done { growth, min_divisor },
            Err(e) => PointOutcome::Failed {
                kind: e.kind(),
                message: e.to_string(),
            },
        };
        ScanPoint { index, t, outcome }
    };
    let indexed: Vec<(usize, Vec<Rational>)> = points.into_iter().enumerate().collect();
    let mut results: Vec<ScanPoint> = if jobs <= 1 {
        indexed.into_iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
        pool.install(|| indexed.into_par_iter().map(work).collect())
    };
    results.sort_by_key(|p| p.index);
    Ok(ScanResult {
        truncation: family.truncation(),
        points: results,
    })
}

/// Decimal rendering of a grid coordinate for the CSV twin.
pub fn coordinate_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| rational_to_f64(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, GradedSeries, Scalar};
    use crate::diagnostics::GrowthClass;
    use crate::system::diagonal;

    #[test]
    fn grid_parsing() {
        let g = GridSpec::parse("t1=0:1:3, t2=-1/2:1/2:2").unwrap();
        let pts = g.points(2).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![rational(0, 1), rational(-1, 2)]);
        assert_eq!(pts[1], vec![rational(0, 1), rational(1, 2)]);
        assert_eq!(pts[2], vec![rational(1, 2), rational(-1, 2)]);
        assert!(GridSpec::parse("t1=0:1").is_err());
        assert!(GridSpec::parse("x=0:1:2").is_err());
        assert!(GridSpec::parse("t1=0:1:0").is_err());
        assert!(g.points(1).is_err());
    }

    fn family() -> SystemSpec<ParamScalar> {
        SystemSpec::new(
            diagonal(&[ParamScalar::from_integer(-1)]),
            GradedSeries::parse("t1 y1 y2", 2, 8).unwrap(),
            vec![GradedSeries::parse("t1 y1 y2", 2, 8).unwrap()],
            1,
            8,
        )
        .unwrap()
    }

    #[test]
    fn zero_parameter_is_linear() {
        let r = scan(&family(), &GridSpec::parse("t1=0:0:1").unwrap(), 1).unwrap();
        match &r.points[0].outcome {
            PointOutcome::Done { growth, .. } => {
                assert_eq!(growth.class, GrowthClass::Geometric);
                assert_eq!(growth.radius, Some(f64::INFINITY));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn jobs_do_not_change_results() {
        let grid = GridSpec::parse("t1=-1:1:5").unwrap();
        let a = scan(&family(), &grid, 1).unwrap();
        let b = scan(&family(), &grid, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.summary().values().sum::<usize>(), 5);
    }
}
