//! Exact multivariate polynomial gcd.
//!
//! The algorithm is the classical content-and-primitive-part recursion: view
//! both operands as univariate polynomials in the *last* variable of the
//! universe with coefficients in the remaining variables, split off the
//! coefficient content (a recursive gcd one variable down), and run a
//! subresultant polynomial remainder sequence on the primitive parts. The
//! base case is the rational gcd of constants.
//!
//! Growth of intermediate coefficients is kept polynomial by the
//! subresultant division rule; a cheap common-monomial extraction runs first
//! so that e.g. `gcd(x^3 y, x y^2)` never enters the PRS at all.
//!
//! The public [`gcd`] returns the canonical representative: the primitive
//! part with positive leading coefficient under graded lex, scaled by the
//! rational gcd of the operands' contents. For integer-coefficient inputs
//! this is the familiar integer-content convention, e.g.
//! `gcd(6x, 4x^2) = 2x`; the result is zero only when both inputs are zero.

use num_traits::{One, Signed};

use crate::monomial::Monomial;
use crate::poly::{Polynomial, VarSet};
use crate::{rat_gcd, Rational};

/// Canonical gcd of two polynomials in the same variable universe.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    assert!(a.vars() == b.vars(), "variable universe mismatch in gcd");
    if a.is_zero() {
        return abs_normalized(b);
    }
    if b.is_zero() {
        return abs_normalized(a);
    }
    // Split off the common monomial factor: in a UFD,
    // gcd(m_a * a', m_b * b') = gcd(m_a, m_b) * gcd(a', b') when a', b' have
    // trivial monomial content (no single variable divides them).
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a1 = div_monomial(a, &ma);
    let b1 = div_monomial(b, &mb);
    let core = gcd_rec(&a1, &b1, a.vars().len());
    // Strip whatever rational unit the recursion accumulated, then apply
    // the content convention.
    let unit_free = core.mul_term(&mg, &Rational::one()).primitive_part();
    let c = rat_gcd(&a.content_signed(), &b.content_signed());
    unit_free.mul_rational(&c)
}

/// `p` with its sign flipped if needed so the leading coefficient is
/// positive; `gcd(p, 0)` by convention.
fn abs_normalized(p: &Polynomial) -> Polynomial {
    p.primitive_part().mul_rational(&p.content_signed().abs())
}

fn div_monomial(p: &Polynomial, m: &Monomial) -> Polynomial {
    Polynomial::from_terms(
        p.vars(),
        p.terms()
            .map(|(mm, c)| (mm.try_div(m).expect("monomial content divides"), c.clone())),
    )
}

/// Gcd of polynomials supported on the first `act` variables. The result is
/// a gcd up to a nonzero rational unit (the caller normalizes).
fn gcd_rec(a: &Polynomial, b: &Polynomial, act: usize) -> Polynomial {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if act == 0 {
        let ca = a.as_constant().expect("no active variables");
        let cb = b.as_constant().expect("no active variables");
        return Polynomial::constant(a.vars(), rat_gcd(&ca, &cb));
    }
    let main = act - 1;
    let da = a.degree_in(main);
    let db = b.degree_in(main);
    if da == 0 && db == 0 {
        return gcd_rec(a, b, main);
    }
    if da == 0 {
        // `a` is free of the main variable, so it can only share factors
        // with the content of `b`.
        return gcd_rec(a, &content_wrt(b, main), main);
    }
    if db == 0 {
        return gcd_rec(&content_wrt(a, main), b, main);
    }
    let (ca, pa) = cont_pp(a, main);
    let (cb, pb) = cont_pp(b, main);
    let c = gcd_rec(&ca, &cb, main);
    let g = prs_gcd(
        UniPoly::new(&pa, main),
        UniPoly::new(&pb, main),
        a.vars(),
        main,
    );
    &c * &g
}

/// Content of `p` with respect to variable `main`: a gcd of its univariate
/// coefficients (computed one variable down).
fn content_wrt(p: &Polynomial, main: usize) -> Polynomial {
    let coeffs = p.univariate_in(main);
    let mut cont = Polynomial::zero(p.vars());
    for c in &coeffs {
        if c.is_zero() {
            continue;
        }
        cont = gcd_rec(&cont, c, main);
        if let Some(k) = cont.as_constant() {
            // Once the content collapses to a unit it cannot shrink further.
            if k.abs().is_one() {
                break;
            }
        }
    }
    cont
}

fn cont_pp(p: &Polynomial, main: usize) -> (Polynomial, Polynomial) {
    let cont = content_wrt(p, main);
    let pp = p.div_exact(&cont).expect("content divides");
    (cont, pp)
}

/// A polynomial viewed as univariate in one designated variable, with
/// polynomial coefficients that are free of that variable.
#[derive(Clone)]
struct UniPoly {
    coeffs: Vec<Polynomial>,
}

impl UniPoly {
    fn new(p: &Polynomial, main: usize) -> Self {
        let mut u = UniPoly {
            coeffs: p.univariate_in(main),
        };
        u.trim();
        u
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn deg(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.coeffs.len() - 1
    }

    fn lc(&self) -> &Polynomial {
        self.coeffs.last().expect("nonzero")
    }

    fn scale(&self, f: &Polynomial) -> UniPoly {
        let mut u = UniPoly {
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        };
        u.trim();
        u
    }

    /// `x^shift * f * self`.
    fn shift_scale(&self, shift: usize, f: &Polynomial) -> UniPoly {
        let vars = f.vars();
        let mut coeffs = vec![Polynomial::zero(vars); shift];
        coeffs.extend(self.coeffs.iter().map(|c| c * f));
        let mut u = UniPoly { coeffs };
        u.trim();
        u
    }

    fn sub(&self, rhs: &UniPoly) -> UniPoly {
        let vars = self
            .coeffs
            .first()
            .or_else(|| rhs.coeffs.first())
            .expect("one operand nonzero")
            .vars()
            .clone();
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Polynomial::zero(&vars);
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = rhs.coeffs.get(i).unwrap_or(&zero);
            coeffs.push(a - b);
        }
        let mut u = UniPoly { coeffs };
        u.trim();
        u
    }

    fn div_coeffs_exact(&self, d: &Polynomial) -> UniPoly {
        UniPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.div_exact(d).expect("subresultant divisor divides"))
                .collect(),
        }
    }
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a  mod  b`.
fn prem(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let d = b.lc().clone();
    let mut r = a.clone();
    let mut n = (a.deg() - b.deg() + 1) as i64;
    while !r.is_zero() && r.deg() >= b.deg() {
        let k = r.deg() - b.deg();
        let rl = r.lc().clone();
        r = r.scale(&d).sub(&b.shift_scale(k, &rl));
        n -= 1;
    }
    if n > 0 {
        r = r.scale(&d.pow(n as u32));
    }
    r
}

/// Subresultant PRS on operands primitive with respect to `main`. Returns a
/// gcd (up to unit) as a flat polynomial, itself primitive in `main`.
fn prs_gcd(pa: UniPoly, pb: UniPoly, vars: &VarSet, main: usize) -> Polynomial {
    let (mut a, mut b) = if pa.deg() >= pb.deg() {
        (pa, pb)
    } else {
        (pb, pa)
    };
    let one = Polynomial::one(vars);
    let mut g = one.clone();
    let mut h = one.clone();
    loop {
        let delta = (a.deg() - b.deg()) as u32;
        let r = prem(&a, &b);
        if r.is_zero() {
            let flat = Polynomial::from_univariate(vars, main, &b.coeffs);
            let (_, pp) = cont_pp(&flat, main);
            return pp;
        }
        if r.deg() == 0 {
            // Nonzero remainder of degree zero: the primitive parts are
            // coprime in the main variable.
            return one;
        }
        let denom = &g * &h.pow(delta);
        a = b;
        b = r.div_coeffs_exact(&denom);
        g = a.lc().clone();
        if delta > 0 {
            h = g
                .pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant invariant");
        }
    }
}
