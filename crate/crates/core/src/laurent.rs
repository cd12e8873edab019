//! Exact multivariate Laurent polynomials over the integers.
//!
//! A [`LaurentPoly`] lives in `Z[u_1^{±1}, ..., u_n^{±1}]`, one variable per
//! quiver vertex. Terms are kept in a `BTreeMap` keyed by exponent vector, so
//! iteration (and serialization) is in lexicographic order and equality is
//! structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{check_len, Error, Result};
use crate::quiver::DimVector;
use crate::univariate::UnivariatePoly;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The variable `u_i` (0-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exp = vec![0; nvars];
        exp[i] = 1;
        Self::monomial(nvars, exp, 1)
    }

    pub fn monomial(nvars: usize, exp: Vec<i64>, c: impl Into<BigInt>) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length must match nvars");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { nvars, terms }
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            check_len(nvars, exp.len())?;
            p.add_term(exp, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Vec<i64>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exp: &[i64]) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&Vec<i64>, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn trailing_term(&self) -> Option<(&Vec<i64>, &BigInt)> {
        self.terms.iter().next()
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        check_len(self.nvars, rhs.nvars)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        check_len(self.nvars, rhs.nvars)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        check_len(self.nvars, rhs.nvars)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    /// Multiply by the monomial `u^exp`.
    pub fn shift(&self, exp: &[i64]) -> Result<Self> {
        check_len(self.nvars, exp.len())?;
        Ok(Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(exp).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact quotient `self / divisor` in the Laurent ring.
    ///
    /// Lexicographic order on `Z^n` is compatible with multiplication, so the
    /// leading term of a product is the product of leading terms and the
    /// quotient can be peeled off one leading term at a time. Every genuine
    /// quotient term is bounded below by `trailing(self) / trailing(divisor)`,
    /// which gives a termination criterion for inexact inputs.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        check_len(self.nvars, divisor.nvars)?;
        let Some((lead_d, lead_c)) = divisor.leading_term() else {
            return Err(Error::InexactDivision);
        };
        let Some((trail_a, _)) = self.trailing_term() else {
            return Ok(Self::zero(self.nvars));
        };
        let (trail_d, _) = divisor.trailing_term().expect("nonzero divisor");
        let floor: Vec<i64> = trail_a.iter().zip(trail_d).map(|(a, b)| a - b).collect();
        let lead_d = lead_d.clone();
        let lead_c = lead_c.clone();

        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((e, c)) = rem.leading_term() {
            let qe: Vec<i64> = e.iter().zip(&lead_d).map(|(a, b)| a - b).collect();
            if qe < floor {
                return Err(Error::InexactDivision);
            }
            let (qc, r) = c.div_rem(&lead_c);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            let step = Self::monomial(self.nvars, qe.clone(), qc.clone());
            rem = rem.try_sub(&(&step * divisor))?;
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    /// Per-variable minimum exponent; `None` for the zero polynomial.
    pub fn min_exponents(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |mut acc, e| {
            for (a, b) in acc.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
            acc
        }))
    }

    pub fn max_exponents(&self) -> Option<Vec<i64>> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |mut acc, e| {
            for (a, b) in acc.iter_mut().zip(e) {
                *a = (*a).max(*b);
            }
            acc
        }))
    }

    /// Denominator vector: the `d` with `x = P / prod u_i^{d_i}` and `P` a
    /// polynomial divisible by no `u_i`.
    pub fn denominator_vector(&self) -> Result<DimVector> {
        let mins = self.min_exponents().ok_or(Error::ZeroPolynomial)?;
        Ok(DimVector::new(mins.into_iter().map(|m| -m).collect()))
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// Canonical JSON encoding `{"n": .., "terms": [{"exp": [..], "coef": ..}]}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!({ "exp": e, "coef": bigint_to_json(c) }))
            .collect();
        json!({ "n": self.nvars, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("laurent polynomial JSON: {m}"));
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing \"n\""))? as usize;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"terms\""))?;
        let mut parsed = Vec::with_capacity(terms.len());
        for t in terms {
            let exp = t
                .get("exp")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("term without \"exp\""))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("non-integer exponent")))
                .collect::<Result<Vec<i64>>>()?;
            let coef = t
                .get("coef")
                .and_then(bigint_from_json)
                .ok_or_else(|| bad("term without integer \"coef\""))?;
            parsed.push((exp, coef));
        }
        Self::from_terms(n, parsed)
    }

    /// Evaluate the univariate polynomial `p` at `self`.
    pub fn substitute_univariate(p: &UnivariatePoly, x: &LaurentPoly) -> LaurentPoly {
        // Horner
        p.coeffs().iter().rev().fold(Self::zero(x.nvars), |acc, c| {
            let mut next = &acc * x;
            next.add_term(vec![0; x.nvars], c.clone());
            next
        })
    }
}

pub(crate) fn bigint_to_json(c: &BigInt) -> Value {
    let n: serde_json::Number = c.to_string().parse().expect("integer literal is valid JSON");
    Value::Number(n)
}

pub(crate) fn bigint_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.to_string().parse().ok(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr for &LaurentPoly {
            type Output = LaurentPoly;
            /// Panics if the operands have different variable counts; use
            /// the `try_*` form to get an error instead.
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$try(rhs).expect("Laurent polynomials over different rings")
            }
        }
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&BigInt::from(-1))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("u{}", i + 1)
                    } else {
                        format!("u{}^{}", i + 1, x)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{abs}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: usize) -> LaurentPoly {
        LaurentPoly::var(2, i)
    }

    fn z() -> LaurentPoly {
        let num = LaurentPoly::one(2) + u(0).pow(2) + u(1).pow(2);
        num.shift(&[-1, -1]).unwrap()
    }

    #[test]
    fn unit_cancellation() {
        let inv = LaurentPoly::monomial(2, vec![-1, 0], 1);
        assert_eq!(&u(0) * &inv, LaurentPoly::one(2));
    }

    #[test]
    fn difference_of_squares() {
        let lhs = &(&u(0) + &u(1)) * &(&u(0) - &u(1));
        let rhs = &u(0).pow(2) - &u(1).pow(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn z_squared_expansion() {
        // (1 + a^2 + b^2)^2 = 1 + 2a^2 + 2b^2 + a^4 + 2a^2b^2 + b^4, then / a^2 b^2
        let expected = LaurentPoly::from_terms(
            2,
            [
                (vec![-2, -2], 1),
                (vec![0, -2], 2),
                (vec![-2, 0], 2),
                (vec![2, -2], 1),
                (vec![0, 0], 2),
                (vec![-2, 2], 1),
            ]
            .into_iter()
            .map(|(e, c)| (e, BigInt::from(c))),
        )
        .unwrap();
        let zz = &z() * &z();
        assert_eq!(zz.len(), 6);
        assert_eq!(zz, expected);
    }

    #[test]
    fn mismatched_rings_error() {
        let a = LaurentPoly::one(2);
        let b = LaurentPoly::one(3);
        assert!(matches!(
            a.try_add(&b),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn denominators() {
        assert_eq!(u(0).denominator_vector().unwrap().as_slice(), &[-1, 0]);
        assert_eq!(z().denominator_vector().unwrap().as_slice(), &[1, 1]);
        for n in 1..=10u32 {
            let d = z().pow(n).denominator_vector().unwrap();
            assert_eq!(d.as_slice(), &[n as i64, n as i64]);
        }
        assert_eq!(
            LaurentPoly::zero(2).denominator_vector(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn substitution() {
        let one = UnivariatePoly::constant(1);
        assert_eq!(LaurentPoly::substitute_univariate(&one, &z()), LaurentPoly::one(2));
        let s2 = UnivariatePoly::from_i64(&[-1, 0, 1]);
        assert_eq!(
            LaurentPoly::substitute_univariate(&s2, &z()),
            &z().pow(2) - &LaurentPoly::one(2)
        );
        let f2 = UnivariatePoly::from_i64(&[-2, 0, 1]);
        let f2z = LaurentPoly::substitute_univariate(&f2, &z());
        assert_eq!(f2z, &z().pow(2) - &LaurentPoly::constant(2, 2));
        assert_eq!(f2z.denominator_vector().unwrap().as_slice(), &[2, 2]);
    }

    #[test]
    fn exact_division() {
        let a = &z() * &(&u(0) + &LaurentPoly::constant(2, 3));
        assert_eq!(a.div_exact(&z()).unwrap(), &u(0) + &LaurentPoly::constant(2, 3));
        let b = &u(0) + &LaurentPoly::one(2);
        assert_eq!(b.div_exact(&z()), Err(Error::InexactDivision));
        assert_eq!(
            LaurentPoly::constant(2, 3).div_exact(&LaurentPoly::constant(2, 2)),
            Err(Error::InexactDivision)
        );
    }

    #[test]
    fn display() {
        assert_eq!(z().to_string(), "u1*u2^-1 + u1^-1*u2 + u1^-1*u2^-1");
        assert_eq!((-&LaurentPoly::constant(1, 3)).to_string(), "-3");
    }

    #[test]
    fn json_is_canonical() {
        let v = z().to_json();
        assert_eq!(
            v.to_string(),
            r#"{"n":2,"terms":[{"coef":1,"exp":[-1,-1]},{"coef":1,"exp":[-1,1]},{"coef":1,"exp":[1,-1]}]}"#
        );
        assert_eq!(LaurentPoly::from_json(&v).unwrap(), z());
    }
}
