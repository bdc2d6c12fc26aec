//! Power products and the graded lexicographic term order.

use std::cmp::Ordering;

/// A power product `x_0^{e_0} * ... * x_{n-1}^{e_{n-1}}`, stored as its
/// exponent vector. The variable universe (names and arity) lives in
/// [`crate::VarSet`]; a monomial only knows exponents.
///
/// `Ord` is graded lex: compare total degree first, then exponents
/// lexicographically with the first variable strongest. This is a monomial
/// order, which the exact-division and gcd routines rely on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    /// The empty product `1` in an `nvars`-variable universe.
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    /// `x_idx^exp`.
    pub fn var(nvars: usize, idx: usize, exp: u32) -> Self {
        assert!(
            idx < nvars,
            "variable index {idx} out of range for {nvars} variables"
        );
        let mut e = vec![0; nvars];
        e[idx] = exp;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.0[idx]
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference, or `None` if `other` does not divide `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.nvars(), other.nvars());
        let mut e = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            e.push(a.checked_sub(*b)?);
        }
        Some(Monomial(e.into_boxed_slice()))
    }

    /// Componentwise minimum: the largest monomial dividing both.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.nvars(), other.nvars());
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
