//! One scalar interface for both arithmetic modes.
//!
//! Geometry and dynamics are generic over [`Scalar`], instantiated at `f64`
//! (fast, tolerance-based singularity detection) and at [`Rat`] (exact
//! arbitrary-precision rationals, where "negligible" means identically
//! zero). Every finite `f64` is a rational number, so promotion from float
//! to exact is lossless; the reverse direction rounds.

use std::fmt;

use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Exact scalar: arbitrary-precision rational, reduced, positive denominator.
pub type Rat = num_rational::BigRational;

/// Relative tolerance used by float-mode singularity and degeneracy tests:
/// a cross product counts as zero when `|cross| <= SINGULAR_EPS * scale^2`
/// with `scale` comparable to table diameter plus point magnitude.
pub const SINGULAR_EPS: f64 = 1e-12;

pub trait Scalar:
    Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Num + Signed + Send + Sync + 'static
{
    /// Whether arithmetic is exact; exact modes skip all tolerance logic.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// Lossless conversion from a finite `f64`.
    fn from_f64_exact(x: f64) -> Self;

    /// Nearest-float view (used for rendering and reports; may round).
    fn to_f64(&self) -> f64;

    /// False only for float infinities and NaN; rationals are always finite.
    fn is_finite(&self) -> bool;

    /// Treats `self` as a cross-product-sized quantity and tests whether it
    /// vanishes at the given squared scale: exactly zero in exact mode,
    /// `|self| <= SINGULAR_EPS * scale_sq` in float mode.
    fn negligible_at(&self, scale_sq: &Self) -> bool;

    /// Interchange formatting: shortest round-trip decimal for floats,
    /// explicit `p/q` for rationals.
    fn format_plain(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_f64_exact(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn negligible_at(&self, scale_sq: &Self) -> bool {
        self.abs() <= SINGULAR_EPS * scale_sq.abs()
    }

    fn format_plain(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Rat::from_integer(n.into())
    }

    fn from_f64_exact(x: f64) -> Self {
        Rat::from_float(x).expect("finite float converts exactly")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn negligible_at(&self, _scale_sq: &Self) -> bool {
        self.is_zero()
    }

    fn format_plain(&self) -> String {
        obl_cas::format_rational(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_to_rational_is_lossless() {
        for x in [0.1, -3.25, 1.0 / 3.0, 2.0f64.powi(-40), 12345.678] {
            let r = Rat::from_f64_exact(x);
            assert_eq!(Scalar::to_f64(&r), x);
        }
        assert_eq!(Rat::from_f64_exact(0.5), Rat::new(1.into(), 2.into()));
        // 0.1 is *not* 1/10 as a float; the conversion must preserve the
        // exact binary value rather than the decimal appearance.
        assert_ne!(Rat::from_f64_exact(0.1), Rat::new(1.into(), 10.into()));
    }

    #[test]
    fn negligible_is_mode_dependent() {
        let tiny = 1e-20f64;
        assert!(tiny.negligible_at(&1.0));
        assert!(!0.1f64.negligible_at(&1.0));
        let r = Rat::new(1.into(), 10u64.pow(19).into());
        assert!(!r.negligible_at(&Rat::from_int(1)));
        assert!(Rat::zero().negligible_at(&Rat::from_int(1)));
    }

    #[test]
    fn plain_formatting() {
        assert_eq!(0.5f64.format_plain(), "0.5");
        assert_eq!(Rat::new(3.into(), 2.into()).format_plain(), "3/2");
        assert_eq!(Rat::from_int(-4).format_plain(), "-4/1");
    }
}
