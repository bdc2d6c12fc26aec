//! Sparse multivariate polynomials over `BigRational`.
//!
//! Terms are held in a `BTreeMap` keyed by [`Monomial`] under graded-lex
//! order, so iteration is always sorted and the leading term is the last
//! entry. The zero polynomial is the empty map; stored coefficients are
//! never zero. All arithmetic is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::monomial::Monomial;
use crate::{rat_gcd, Rational};

/// An ordered, immutable set of variable names shared by every polynomial in
/// a computation. Cloning is cheap (`Arc`); equality compares the names.
///
/// Mixing polynomials from different universes in one operation is a
/// programming error and panics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        for (i, n) in names.iter().enumerate() {
            assert!(!n.is_empty(), "empty variable name");
            assert!(
                !names[..i].contains(n),
                "duplicate variable name `{n}` in universe"
            );
        }
        VarSet(Arc::new(names))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0[idx]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|s| s.as_str())
    }
}

/// A sparse polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    vars: VarSet,
    terms: BTreeMap<Monomial, Rational>,
}

fn assert_same_vars(a: &Polynomial, b: &Polynomial) {
    assert!(
        a.vars == b.vars,
        "variable universe mismatch: {:?} vs {:?}",
        a.vars,
        b.vars
    );
}

impl Polynomial {
    pub fn zero(vars: &VarSet) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &VarSet, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(vars.len()), c);
        }
        Polynomial {
            vars: vars.clone(),
            terms,
        }
    }

    /// The variable `name` as a polynomial, or `None` if it is not in the
    /// universe.
    pub fn var(vars: &VarSet, name: &str) -> Option<Self> {
        vars.index_of(name).map(|i| Self::var_idx(vars, i))
    }

    pub fn var_idx(vars: &VarSet, idx: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(vars.len(), idx, 1), Rational::one());
        Polynomial {
            vars: vars.clone(),
            terms,
        }
    }

    /// Builds a polynomial from raw terms, summing duplicates and dropping
    /// zeros.
    pub fn from_terms<I>(vars: &VarSet, it: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in it {
            assert_eq!(m.nvars(), vars.len(), "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// `Some(c)` if the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next_back().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Leading term under graded lex, or `None` for the zero polynomial.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var)).max().unwrap_or(0)
    }

    pub fn mul_rational(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn div_rational(&self, c: &Rational) -> Self {
        assert!(!c.is_zero(), "division of polynomial by zero rational");
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v / c)).collect(),
        }
    }

    /// Multiplies by `c * m` in one pass.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, v)| (mm.mul(m), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < self.vars.len(), "variable index out of range");
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] = e - 1;
            out.add_term(
                Monomial::from_exps(exps),
                c * Rational::from_integer(e.into()),
            );
        }
        out
    }

    /// Evaluates at a full assignment (one value per universe variable).
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(
            point.len(),
            self.vars.len(),
            "evaluation point arity mismatch"
        );
        // Cache powers per variable up to the maximum exponent that occurs.
        let mut pows: Vec<Vec<Rational>> = Vec::with_capacity(point.len());
        for (i, x) in point.iter().enumerate() {
            let maxe = self.degree_in(i) as usize;
            let mut col = Vec::with_capacity(maxe + 1);
            col.push(Rational::one());
            for _ in 0..maxe {
                let last = col.last().unwrap() * x;
                col.push(last);
            }
            pows.push(col);
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t *= &pows[i][e as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Signed content: the rational `c` with `self = c * primitive_part()`,
    /// where the primitive part has coprime integer coefficients and a
    /// positive leading coefficient. Zero for the zero polynomial.
    pub fn content_signed(&self) -> Rational {
        let mut g = Rational::zero();
        for c in self.terms.values() {
            g = rat_gcd(&g, c);
        }
        if let Some((_, lc)) = self.leading() {
            if lc.is_negative() {
                g = -g;
            }
        }
        g
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content_signed();
        if c.is_zero() {
            self.clone()
        } else {
            self.div_rational(&c)
        }
    }

    /// Exact division: `Some(q)` with `self = q * d`, or `None` if `d` does
    /// not divide `self`. Greedy leading-term elimination under graded lex.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        assert_same_vars(self, d);
        assert!(!d.is_zero(), "exact division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(&self.vars));
        }
        if let Some(c) = d.as_constant() {
            return Some(self.div_rational(&c));
        }
        let (dm, dc) = d.leading().unwrap();
        let mut rem = self.clone();
        let mut q = Self::zero(&self.vars);
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.try_div(dm)?;
            let c = rc / dc;
            rem = &rem - &d.mul_term(&m, &c);
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `var`;
    /// entry `k` is the (polynomial) coefficient of `var^k`, with the
    /// variable's exponent zeroed out. Used by the gcd machinery.
    pub(crate) fn univariate_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(&self.vars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(var) as usize;
            let mut exps = m.exps().to_vec();
            exps[var] = 0;
            out[e].add_term(Monomial::from_exps(exps), c.clone());
        }
        out
    }

    /// Rebuilds from univariate coefficients produced by [`univariate_in`].
    pub(crate) fn from_univariate(vars: &VarSet, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut out = Self::zero(vars);
        for (e, coeff) in coeffs.iter().enumerate() {
            for (m, c) in &coeff.terms {
                let mut exps = m.exps().to_vec();
                debug_assert_eq!(exps[var], 0);
                exps[var] = e as u32;
                out.add_term(Monomial::from_exps(exps), c.clone());
            }
        }
        out
    }

    /// Common monomial factor of all terms (`1` for zero).
    pub(crate) fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(self.vars.len()),
        };
        it.fold(first, |acc, m| acc.gcd(m))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_same_vars(self, rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_same_vars(self, rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_same_vars(self, rhs);
        let mut out = Polynomial::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Prints terms in descending graded-lex order, e.g.
/// `-D1^4 + 5/3*D1^2*D2 - D2 + 1`. The output parses back to the same
/// polynomial.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut wrote_factor = false;
            if !mag.is_one() || m.is_one() {
                write!(f, "{mag}")?;
                wrote_factor = true;
            }
            for (v, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote_factor {
                    write!(f, "*")?;
                }
                wrote_factor = true;
                write!(f, "{}", self.vars.name(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;

    fn xy() -> VarSet {
        VarSet::new(&["x", "y"])
    }

    fn x(vs: &VarSet) -> Polynomial {
        Polynomial::var(vs, "x").unwrap()
    }

    fn y(vs: &VarSet) -> Polynomial {
        Polynomial::var(vs, "y").unwrap()
    }

    #[test]
    fn arithmetic_basics() {
        let vs = xy();
        let p = &x(&vs) + &y(&vs);
        let sq = &p * &p;
        let expect = Polynomial::from_terms(
            &vs,
            vec![
                (Monomial::from_exps(vec![2, 0]), rational(1, 1)),
                (Monomial::from_exps(vec![1, 1]), rational(2, 1)),
                (Monomial::from_exps(vec![0, 2]), rational(1, 1)),
            ],
        );
        assert_eq!(sq, expect);
        assert_eq!(p.pow(2), expect);
        assert!((&sq - &expect).is_zero());
    }

    #[test]
    fn cancellation_removes_terms() {
        let vs = xy();
        let p = &x(&vs) + &y(&vs);
        let q = &x(&vs) - &y(&vs);
        let diff = &(&p + &q) - &x(&vs).mul_rational(&rational(2, 1));
        assert!(diff.is_zero());
        assert_eq!(diff.num_terms(), 0);
    }

    #[test]
    fn partial_derivative() {
        let vs = xy();
        // d/dx (x^2 y) = 2 x y; d/dx (y) = 0.
        let p = &x(&vs).pow(2) * &y(&vs);
        let expect = x(&vs).mul_rational(&rational(2, 1));
        assert_eq!(p.partial(0), &expect * &y(&vs));
        assert!(y(&vs).partial(0).is_zero());
    }

    #[test]
    fn evaluation() {
        let vs = xy();
        let p = &(&x(&vs).pow(2) * &y(&vs)) + &Polynomial::constant(&vs, rational(1, 2));
        let v = p.eval(&[rational(2, 1), rational(3, 1)]);
        assert_eq!(v, rational(25, 2));
    }

    #[test]
    fn content_and_primitive_part() {
        let vs = xy();
        // -4x - 6y has content -2, primitive part 2x + 3y.
        let p = &x(&vs).mul_rational(&rational(-4, 1)) - &y(&vs).mul_rational(&rational(6, 1));
        assert_eq!(p.content_signed(), rational(-2, 1));
        let pp = p.primitive_part();
        assert_eq!(
            pp,
            &x(&vs).mul_rational(&rational(2, 1)) + &y(&vs).mul_rational(&rational(3, 1))
        );
        // x/2 + 1/3 normalizes to 3x + 2.
        let q = &x(&vs).mul_rational(&rational(1, 2)) + &Polynomial::constant(&vs, rational(1, 3));
        assert_eq!(q.content_signed(), rational(1, 6));
        assert_eq!(
            q.primitive_part(),
            &x(&vs).mul_rational(&rational(3, 1)) + &Polynomial::constant(&vs, rational(2, 1))
        );
    }

    #[test]
    fn exact_division() {
        let vs = xy();
        let p = &x(&vs).pow(2) - &y(&vs).pow(2);
        let d = &x(&vs) - &y(&vs);
        let q = p.div_exact(&d).expect("divides");
        assert_eq!(q, &x(&vs) + &y(&vs));
        assert!(p.div_exact(&(&d + &Polynomial::one(&vs))).is_none());
    }

    #[test]
    fn univariate_view_roundtrip() {
        let vs = xy();
        let p = &(&x(&vs).pow(2) * &y(&vs)) + &(&x(&vs) + &Polynomial::one(&vs));
        let coeffs = p.univariate_in(0);
        assert_eq!(coeffs.len(), 3);
        assert_eq!(Polynomial::from_univariate(&vs, 0, &coeffs), p);
    }

    #[test]
    fn display_is_sorted_and_signed() {
        let vs = VarSet::new(&["D1", "D2"]);
        let d1 = Polynomial::var(&vs, "D1").unwrap();
        let d2 = Polynomial::var(&vs, "D2").unwrap();
        let p = &(&d1.pow(2) - &d2.mul_rational(&rational(5, 3)))
            + &Polynomial::constant(&vs, rational(-1, 1));
        assert_eq!(p.to_string(), "D1^2 - 5/3*D2 - 1");
        assert_eq!(Polynomial::zero(&vs).to_string(), "0");
        assert_eq!(Polynomial::constant(&vs, rational(7, 2)).to_string(), "7/2");
    }

    #[test]
    #[should_panic(expected = "variable universe mismatch")]
    fn universe_mismatch_panics() {
        let a = Polynomial::one(&VarSet::new(&["x"]));
        let b = Polynomial::one(&VarSet::new(&["y"]));
        let _ = &a + &b;
    }
}
