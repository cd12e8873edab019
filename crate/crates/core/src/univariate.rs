//! Dense univariate polynomials with integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Polynomial `c_0 + c_1 x + ... + c_n x^n`; the last stored coefficient is
/// nonzero unless the polynomial is zero (empty vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UnivariatePoly {
    coeffs: Vec<BigInt>,
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `x`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &x + c)
    }
}

impl Add for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn add(self, rhs: &UnivariatePoly) -> UnivariatePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn sub(self, rhs: &UnivariatePoly) -> UnivariatePoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn neg(self) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &UnivariatePoly {
    type Output = UnivariatePoly;
    fn mul(self, rhs: &UnivariatePoly) -> UnivariatePoly {
        if self.is_zero() || rhs.is_zero() {
            return UnivariatePoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UnivariatePoly::new(out)
    }
}

impl fmt::Display for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c < &BigInt::zero() { "-" } else { "+" };
            let abs = if c < &BigInt::zero() { -c } else { c.clone() };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{abs}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{abs}x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = UnivariatePoly::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(UnivariatePoly::from_i64(&[0, 0]).is_zero());
    }

    #[test]
    fn arithmetic() {
        let x = UnivariatePoly::x();
        let one = UnivariatePoly::constant(1);
        let p = &(&x + &one) * &(&x - &one);
        assert_eq!(p, UnivariatePoly::from_i64(&[-1, 0, 1]));
        assert_eq!(p.to_string(), "x^2 - 1");
        assert_eq!(p.eval_i64(3), BigInt::from(8));
    }
}
