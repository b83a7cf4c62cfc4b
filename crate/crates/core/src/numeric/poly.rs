//! Polynomials with exact rational coefficients, converted to floating point
//! once for evaluation.

use std::ops::{Add, Mul, Sub};

use num_rational::Ratio;
use num_traits::Zero;

use crate::scalar::Real;

pub type Rational = Ratio<i128>;

/// Shorthand for the rational `num / den`.
pub fn q(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// Dense polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k as i128))
            .collect();
        Self::new(coeffs)
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Self {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / Rational::from_integer(k as i128 + 1)),
        );
        Self::new(coeffs)
    }

    pub fn scale(&self, s: Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Exact polynomial long division; returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let lead = *divisor.coeffs.last().expect("nonempty");
        assert!(!lead.is_zero(), "division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if self.degree() < dd {
            return (Self::new(vec![Rational::zero()]), self.clone());
        }
        let mut quot = vec![Rational::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
        rem.truncate(dd.max(1));
        (Self::new(quot), Self::new(rem))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval_exact(&self, x: Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_float<T: Real>(&self) -> FloatPoly<T> {
        FloatPoly {
            coeffs: self.coeffs.iter().map(|c| rational_to_real(*c)).collect(),
        }
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: Self) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &RationalPoly, k: usize| p.coeffs.get(k).copied().unwrap_or_else(Rational::zero);
        RationalPoly::new((0..n).map(|k| get(self, k) + get(rhs, k)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: Self) -> RationalPoly {
        self + &rhs.scale(q(-1, 1))
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: Self) -> RationalPoly {
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

/// Correctly rounded when numerator and denominator are exactly representable.
pub fn rational_to_real<T: Real>(c: Rational) -> T {
    let (n, d) = (*c.numer(), *c.denom());
    if n.abs() < (1i128 << 53) && d.abs() < (1i128 << 53) {
        T::lit(n as f64 / d as f64)
    } else {
        T::lit(n as f64) / T::lit(d as f64)
    }
}

/// Floating-point polynomial evaluated with Horner's scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Real> FloatPoly<T> {
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::from_usize(k).expect("degree"))
                .collect(),
        }
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Self {
        let mut coeffs = vec![T::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / T::from_usize(k + 1).expect("degree")),
        );
        Self { coeffs }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }
}
