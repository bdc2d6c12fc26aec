//! Exact computer algebra over arbitrary-precision rationals.
//!
//! The crate provides the small symbolic kernel used by the outer-billiard
//! verification suite: sparse multivariate [`Polynomial`]s with graded-lex
//! term order, exact multivariate [`gcd`](gcd::gcd), canonically normalized
//! [`RationalFunction`]s, exact partial derivatives, and a plain-text
//! expression [parser](parse::parse_expression).
//!
//! Everything is exact: coefficients are `BigRational`, no floating point is
//! involved anywhere. Equality of rational functions is therefore decidable
//! and structural equality of the canonical form *is* mathematical equality.

pub mod gcd;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod ratfunc;

pub use monomial::Monomial;
pub use parse::{parse_expression, ParseError};
pub use poly::{Polynomial, VarSet};
pub use ratfunc::RationalFunction;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Scalar type underlying all coefficients: arbitrary-precision `p/q`,
/// always stored reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds `n/d` from machine integers. Panics if `d == 0`.
pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p/q` with an explicit denominator (`3` prints as
/// `3/1`). This is the interchange format used by exact-mode files.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`. Returns `None` on malformed input or
/// a zero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// Nonnegative gcd of two rationals: `gcd(a, b) = gcd(numerators) / lcm(denominators)`,
/// the largest rational dividing both to an integer. `rat_gcd(0, 0) = 0`.
pub fn rat_gcd(a: &Rational, b: &Rational) -> Rational {
    use num_integer::Integer;
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Rational::new(n, d)
}

/// Errors shared by rational-function arithmetic and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    /// A rational function was constructed with denominator identically zero.
    #[error("zero denominator")]
    ZeroDenominator,
    /// Division (or inversion) by the zero rational function.
    #[error("division by zero")]
    DivisionByZero,
    /// The denominator vanishes at the requested evaluation point.
    #[error("pole: denominator {denominator} vanishes at the evaluation point")]
    Pole { denominator: String },
}

#[allow(unused)]
fn is_one(r: &Rational) -> bool {
    r.is_one()
}
