//! Rational functions in canonical form.
//!
//! A [`RationalFunction`] is a pair `num/den` of polynomials kept in the
//! unique canonical representative: numerator and denominator coprime, the
//! denominator primitive with integer coefficients and positive leading
//! coefficient, and zero represented as `0/1`. Every constructor and
//! arithmetic operation re-normalizes, so `==` on the struct is mathematical
//! equality of rational functions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::gcd::gcd;
use crate::poly::{Polynomial, VarSet};
use crate::{AlgebraError, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Builds `num/den` and normalizes. Fails if `den` is identically zero.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        assert!(num.vars() == den.vars(), "variable universe mismatch");
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        let mut rf = RationalFunction { num, den };
        rf.normalize();
        Ok(rf)
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let den = Polynomial::one(p.vars());
        RationalFunction { num: p, den }
    }

    pub fn zero(vars: &VarSet) -> Self {
        Self::from_polynomial(Polynomial::zero(vars))
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::from_polynomial(Polynomial::one(vars))
    }

    pub fn constant(vars: &VarSet, c: Rational) -> Self {
        Self::from_polynomial(Polynomial::constant(vars, c))
    }

    pub fn var(vars: &VarSet, name: &str) -> Option<Self> {
        Polynomial::var(vars, name).map(Self::from_polynomial)
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// `Some(c)` iff the value is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one(self.den.vars());
            return;
        }
        let g = gcd(&self.num, &self.den);
        if !g.is_one() {
            self.num = self.num.div_exact(&g).expect("gcd divides numerator");
            self.den = self.den.div_exact(&g).expect("gcd divides denominator");
        }
        // Scale so the denominator is integer-primitive with positive
        // leading coefficient; the rational unit moves into the numerator.
        let c = self.den.content_signed();
        self.den = self.den.div_rational(&c);
        self.num = self.num.div_rational(&c);
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if rhs.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow(&self, n: i32) -> Result<Self, AlgebraError> {
        if n < 0 {
            let inv = self.inverse()?;
            return inv.pow(-n);
        }
        let num = self.num.pow(n as u32);
        let den = self.den.pow(n as u32);
        // Coprimality is preserved by powers, but re-normalizing keeps the
        // invariant enforcement in one place.
        Self::new(num, den)
    }

    /// Exact partial derivative by the quotient rule.
    pub fn partial(&self, var: usize) -> Self {
        let num = &(&self.num.partial(var) * &self.den) - &(&self.num * &self.den.partial(var));
        let den = &self.den * &self.den;
        Self::new(num, den).expect("denominator square is nonzero")
    }

    pub fn partial_named(&self, name: &str) -> Option<Self> {
        self.vars().index_of(name).map(|i| self.partial(i))
    }

    /// Evaluates at a full assignment; a vanishing denominator is a pole
    /// error naming the denominator.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(AlgebraError::Pole {
                denominator: self.den.to_string(),
            });
        }
        Ok(self.num.eval(point) / d)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den).expect("product of nonzero denominators")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den).expect("product of nonzero denominators")
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &self.num * &rhs.num;
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den).expect("product of nonzero denominators")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

/// `num` alone when the denominator is 1, otherwise `(num)/(den)` with both
/// sides parenthesized so that printing and parsing are mutually inverse.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
