use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::scalar::{rational_to_f64, Rational, Ring, Scalar};

/// Exact element `re + im·i` of Q(i).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }
}

impl Add for GaussianRational {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Self::new(re, im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Scalar for GaussianRational {
    const RING: Ring = Ring::Qi;

    fn from_rational(q: Rational) -> Self {
        Self::new(q, Rational::zero())
    }

    fn try_inverse(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    fn divisor_size(&self) -> Option<Rational> {
        Some(self.norm_sqr())
    }

    fn magnitude(&self) -> Option<f64> {
        Some(rational_to_f64(&self.re).hypot(rational_to_f64(&self.im)))
    }

    fn imaginary_unit() -> Option<Self> {
        Some(Self::new(Rational::zero(), Rational::one()))
    }

    fn to_literal(&self) -> String {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => self.re.to_string(),
            (true, false) => format!("{} i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                format!("{}{}{} i", self.re, sign, self.im.abs())
            }
        }
    }

    fn as_rational(&self) -> Option<Rational> {
        self.im.is_zero().then(|| self.re.clone())
    }
}
