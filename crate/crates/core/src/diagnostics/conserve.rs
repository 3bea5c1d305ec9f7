use crate::algebra::{rational_to_f64, GradedSeries, Rational};
use crate::error::{Error, Result};
use crate::integral::{lie_derivative, FirstIntegral};
use crate::reduction::FactoredSystem;

/// Default number of fixed steps per horizon.
pub const DEFAULT_STEPS: u32 = 2048;

/// Polynomial with `f64` coefficients for trajectory evaluation.
#[derive(Debug, Clone)]
struct FloatPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    fn new(s: &GradedSeries<Rational>) -> Self {
        Self {
            terms: s
                .terms()
                .map(|(m, c)| (m.exponents().to_vec(), rational_to_f64(c)))
                .collect(),
        }
    }

    fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(y)
                    .filter(|(k, _)| **k > 0)
                    .fold(*c, |acc, (k, v)| acc * v.powi(*k as i32))
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationProbe {
    pub radius: f64,
    pub horizon: f64,
    pub step: f64,
    /// `max_t |H_N(y(t)) - H_N(y(0))|`.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSummary {
    pub probes: Vec<ConservationProbe>,
    /// Least-squares slope of `log drift` against `log r`; absent when some
    /// drift is zero or fewer than two radii were given.
    pub slope: Option<f64>,
    /// Root-mean-square residual of that fit.
    pub fit_residual: Option<f64>,
    pub direction: Vec<f64>,
}

/// `(1, ..., 1) / sqrt(n)`.
pub fn default_direction(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rms = (points
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    (slope, rms)
}

/// Integrate the factored system from `r u` with classical RK4 and record
/// the drift of `H_N`.
///
/// The drift is carried as an extra state `q' = X(H_N)(y)`, `q(0) = 0`, with
/// `X(H_N)` expanded exactly before conversion, so `q(t)` is resolved even
/// where `H_N(y(t)) - H_N(y(0))` is below `f64` resolution of `H_N`.
pub fn conservation_probe(
    fs: &FactoredSystem<Rational>,
    h: &FirstIntegral<Rational>,
    radii: &[f64],
    horizon: f64,
    step: Option<f64>,
    direction: Option<&[f64]>,
) -> Result<ProbeSummary> {
    let n = fs.n();
    let u = direction.map(|d| d.to_vec()).unwrap_or_else(|| default_direction(n));
    if u.len() != n {
        return Err(Error::invalid(format!("direction must have {n} entries")));
    }
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let step = step.unwrap_or(horizon / DEFAULT_STEPS as f64);
    if !(step > 0.0) {
        return Err(Error::invalid("step must be positive"));
    }
    let steps = (horizon / step).round().max(1.0) as u64;

    let big_n = fs.truncation();
    let (g1, g2) = fs.reconstruct();
    let mut field: Vec<FloatPoly> = Vec::with_capacity(n);
    field.push(FloatPoly::new(&g1));
    for (i, gi) in g2.iter().enumerate() {
        let mut lin = gi.clone();
        for (j, bij) in fs.b()[i].iter().enumerate() {
            lin = lin.add(&GradedSeries::variable(n, j + 1, big_n).scale(bij));
        }
        field.push(FloatPoly::new(&lin));
    }
    let max_j = fs
        .f1()
        .iter()
        .chain(fs.f2().iter().flatten())
        .filter_map(|s| s.max_degree())
        .max()
        .unwrap_or(0);
    let residual = lie_derivative(&h.components, fs, h.truncation + max_j);
    let mut drift_rate = GradedSeries::zero(n, h.truncation + max_j);
    for c in residual.components.values() {
        drift_rate.add_component(c);
    }
    let drift_rate = FloatPoly::new(&drift_rate);

    let rhs = |state: &[f64]| -> Vec<f64> {
        let y = &state[..n];
        let mut out: Vec<f64> = field.iter().map(|f| f.eval(y)).collect();
        out.push(drift_rate.eval(y));
        out
    };

    let mut probes = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut state: Vec<f64> = u.iter().map(|c| r * c).collect();
        state.push(0.0);
        let mut drift = 0.0f64;
        for k in 0..steps {
            let k1 = rhs(&state);
            let s2: Vec<f64> = state.iter().zip(&k1).map(|(s, d)| s + 0.5 * step * d).collect();
            let k2 = rhs(&s2);
            let s3: Vec<f64> = state.iter().zip(&k2).map(|(s, d)| s + 0.5 * step * d).collect();
            let k3 = rhs(&s3);
            let s4: Vec<f64> = state.iter().zip(&k3).map(|(s, d)| s + step * d).collect();
            let k4 = rhs(&s4);
            for i in 0..state.len() {
                state[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if state.iter().any(|v| !v.is_finite() || v.abs() > 1e150) {
                return Err(Error::StepUnstable {
                    time: (k + 1) as f64 * step,
                });
            }
            drift = drift.max(state[n].abs());
        }
        probes.push(ConservationProbe {
            radius: r,
            horizon,
            step,
            drift,
        });
    }

    let (slope, fit_residual) = if probes.len() >= 2 && probes.iter().all(|p| p.drift > 0.0 && p.radius > 0.0) {
        let pts: Vec<(f64, f64)> = probes.iter().map(|p| (p.radius.ln(), p.drift.ln())).collect();
        let (s, res) = least_squares(&pts);
        (Some(s), Some(res))
    } else {
        (None, None)
    };
    Ok(ProbeSummary {
        probes,
        slope,
        fit_residual,
        direction: u,
    })
}
