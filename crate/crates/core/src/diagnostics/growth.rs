use crate::algebra::{ParamScalar, Rational, Scalar};
use crate::error::{Error, Result};
use crate::integral::FirstIntegral;

/// Slope at or below `GEOMETRIC_FACTOR * median(rho)` reads as geometric.
pub const GEOMETRIC_FACTOR: f64 = 0.05;
/// Slope at or above `FACTORIAL_FACTOR * median(rho) / s_mid` reads as
/// factorial-like, `s_mid` being the median degree of the fit window.
pub const FACTORIAL_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    Geometric,
    FactorialLike,
    Inconclusive,
}

impl GrowthClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GrowthClass::Geometric => "geometric",
            GrowthClass::FactorialLike => "factorial-like",
            GrowthClass::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `(s, g_s)` for `s = 1..=N`.
    pub norms: Vec<(u32, f64)>,
    /// `(s, g_{s+1} / g_s)` where both norms are positive.
    pub ratios: Vec<(u32, f64)>,
    /// Inclusive degree window `[ceil(N/2), N-1]` used by the fit.
    pub window: (u32, u32),
    pub slope: Option<f64>,
    pub median_ratio: Option<f64>,
    pub class: GrowthClass,
    /// `1 / max_{s in window} g_s^{1/s}`; infinite when every norm in the
    /// window is zero. Only reported for geometric growth.
    pub radius: Option<f64>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Median of pairwise slopes.
fn theil_sen(points: &[(f64, f64)]) -> f64 {
    let mut slopes = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if b.0 != a.0 {
                slopes.push((b.1 - a.1) / (b.0 - a.0));
            }
        }
    }
    median(&mut slopes)
}

/// Classify a norm sequence `(s, g_s)` truncated at degree `n`.
pub fn classify_norms(norms: &[(u32, f64)], n: u32) -> Result<GrowthReport> {
    if n < 4 {
        return Err(Error::InsufficientDegrees { degree: n });
    }
    let lo = n.div_ceil(2);
    let hi = n - 1;
    let g = |s: u32| {
        norms
            .iter()
            .find(|(d, _)| *d == s)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    };
    let ratios: Vec<(u32, f64)> = (1..n)
        .filter_map(|s| {
            let (a, b) = (g(s), g(s + 1));
            (a > 0.0 && b > 0.0).then(|| (s, b / a))
        })
        .collect();
    let window_ratios: Vec<(f64, f64)> = ratios
        .iter()
        .filter(|(s, _)| (lo..=hi).contains(s))
        .map(|(s, r)| (*s as f64, *r))
        .collect();
    let window_all_zero = (lo..=n).all(|s| g(s) == 0.0);

    let mut report = GrowthReport {
        norms: norms.to_vec(),
        ratios,
        window: (lo, hi),
        slope: None,
        median_ratio: None,
        class: GrowthClass::Inconclusive,
        radius: None,
    };
    if window_all_zero {
        report.class = GrowthClass::Geometric;
        report.radius = Some(f64::INFINITY);
        return Ok(report);
    }
    if window_ratios.len() < 2 {
        return Ok(report);
    }
    let slope = theil_sen(&window_ratios);
    let med = median(&mut window_ratios.iter().map(|p| p.1).collect::<Vec<_>>());
    let s_mid = median(&mut window_ratios.iter().map(|p| p.0).collect::<Vec<_>>());
    report.slope = Some(slope);
    report.median_ratio = Some(med);
    report.class = if slope <= GEOMETRIC_FACTOR * med {
        GrowthClass::Geometric
    } else if slope >= FACTORIAL_FACTOR * med / s_mid {
        GrowthClass::FactorialLike
    } else {
        GrowthClass::Inconclusive
    };
    if report.class == GrowthClass::Geometric {
        let root = (lo..=n)
            .filter(|&s| g(s) > 0.0)
            .map(|s| g(s).powf(1.0 / s as f64))
            .fold(0.0f64, f64::max);
        report.radius = Some(1.0 / root);
    }
    Ok(report)
}

/// `g_s = max |coefficient|` over degree `s`, for `s = 1..=N`.
pub fn degree_norms<S: Scalar>(h: &FirstIntegral<S>) -> Result<Vec<(u32, f64)>> {
    (1..=h.truncation)
        .map(|s| {
            let mut best = 0.0f64;
            if let Some(c) = h.components.component(s) {
                for (_, v) in c.terms() {
                    let m = v.magnitude().ok_or_else(|| {
                        Error::invalid("growth analysis of a parametric integral needs a parameter point")
                    })?;
                    best = best.max(m);
                }
            }
            Ok((s, best))
        })
        .collect()
}

pub fn growth_analyze<S: Scalar>(h: &FirstIntegral<S>) -> Result<GrowthReport> {
    classify_norms(&degree_norms(h)?, h.truncation)
}

/// Parametric variant: specialize at `point` first.
pub fn growth_analyze_at(h: &FirstIntegral<ParamScalar>, point: &[Rational]) -> Result<GrowthReport> {
    growth_analyze(&h.specialize(point)?)
}
