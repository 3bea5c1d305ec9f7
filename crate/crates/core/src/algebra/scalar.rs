//! Coefficient rings.
//!
//! Every polynomial in the crate is generic over a [`Scalar`]. Three rings are
//! provided: exact rationals ([`Rational`]), Gaussian rationals
//! ([`GaussianRational`](super::GaussianRational)) and polynomials in the
//! family parameters ([`ParamScalar`](super::ParamScalar)).

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact arbitrary-precision rational number, always in lowest terms.
pub type Rational = BigRational;

/// Tag naming the coefficient ring of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    /// Rationals.
    #[serde(rename = "Q")]
    Q,
    /// Gaussian rationals.
    #[serde(rename = "Qi")]
    Qi,
    /// Polynomials in the parameters t1..tm with rational coefficients.
    #[serde(rename = "Qt")]
    Qt,
}

impl Ring {
    pub fn as_str(self) -> &'static str {
        match self {
            Ring::Q => "Q",
            Ring::Qi => "Qi",
            Ring::Qt => "Qt",
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Ring {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Q" => Ok(Ring::Q),
            "Qi" => Ok(Ring::Qi),
            "Qt" => Ok(Ring::Qt),
            other => Err(format!("unknown ring `{other}` (expected Q, Qi or Qt)")),
        }
    }
}

/// Exact commutative coefficient ring.
///
/// Values are immutable; all arithmetic returns fresh values.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Eq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    const RING: Ring;

    fn from_rational(q: Rational) -> Self;

    fn from_integer(i: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(i)))
    }

    /// Multiplicative inverse, if the value is a unit of the ring.
    ///
    /// For parameter polynomials only nonzero constants are units.
    fn try_inverse(&self) -> Option<Self>;

    /// Exact size used to rank small divisors: `|x|` over Q, `|x|^2` over
    /// Q(i), and `|c|` for a constant parameter polynomial `c`.
    fn divisor_size(&self) -> Option<Rational>;

    /// Floating-point modulus, when the value is numeric.
    fn magnitude(&self) -> Option<f64>;

    /// The imaginary unit, when the ring contains it.
    fn imaginary_unit() -> Option<Self> {
        None
    }

    /// The parameter `t_k` (1-based), when the ring contains it.
    fn parameter(_k: usize) -> Option<Self> {
        None
    }

    /// Canonical literal for the value.
    fn to_literal(&self) -> String;

    /// The value as a rational, when it lies in Q.
    fn as_rational(&self) -> Option<Rational>;

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    /// `(degree in t, constant term is zero, parameters mentioned)`.
    /// Constants have degree 0 (zero has -1) and mention no parameter.
    fn t_profile(&self) -> (i64, bool, usize) {
        (if self.is_zero() { -1 } else { 0 }, self.is_zero(), 0)
    }
}

impl Scalar for Rational {
    const RING: Ring = Ring::Q;

    fn from_rational(q: Rational) -> Self {
        q
    }

    fn try_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn divisor_size(&self) -> Option<Rational> {
        Some(self.abs())
    }

    fn magnitude(&self) -> Option<f64> {
        Some(rational_to_f64(self).abs())
    }

    fn to_literal(&self) -> String {
        self.to_string()
    }

    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

/// Correctly-scaled conversion that survives numerators and denominators far
/// outside the `f64` range.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Shift both to ~60 significant bits before dividing.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (q.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    let exp = shift_n - shift_d;
    (n / d) * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
