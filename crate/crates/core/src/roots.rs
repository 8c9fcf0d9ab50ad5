//! Exact square-root machinery: floor roots of rationals and certified
//! rational brackets around irrational roots.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Denominator used for the welfare-bound brackets: width 10^-12.
pub fn default_bracket_denom() -> BigInt {
    BigInt::from(10u8).pow(12)
}

/// `⌊√x⌋` for a non-negative rational `x`.
///
/// The floor of the real root is the integer square root of `⌊x⌋`: if
/// `(m+1)^2 ≤ x` then, being an integer, `(m+1)^2 ≤ ⌊x⌋`.
pub fn floor_sqrt(x: &Rational) -> BigInt {
    debug_assert!(!x.is_negative());
    (x.numer() / x.denom()).sqrt()
}

/// The largest multiple of `1/denom` whose square is at most `x`.
pub fn floor_sqrt_with_denom(x: &Rational, denom: &BigInt) -> Rational {
    let scaled = Rational::new(x.numer() * denom * denom, x.denom().clone());
    Rational::new(floor_sqrt(&scaled), denom.clone())
}

/// A certified enclosure of `√x`: `lo ≤ √x ≤ hi`, with `lo = hi` exactly
/// when `x` is the square of a rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootBracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootBracket {
    pub fn exact(value: Rational) -> Self {
        RootBracket { hi: value.clone(), lo: value }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Applies an exact affine map `scale · r + offset`, flipping endpoints
    /// when the scale is negative.
    pub fn affine(&self, scale: &Rational, offset: &Rational) -> Self {
        let a = scale * &self.lo + offset;
        let b = scale * &self.hi + offset;
        if a <= b {
            RootBracket { lo: a, hi: b }
        } else {
            RootBracket { lo: b, hi: a }
        }
    }

    /// Clamps both endpoints below at zero.
    pub fn clamped(&self) -> Self {
        let zero = Rational::zero();
        RootBracket {
            lo: self.lo.clone().max(zero.clone()),
            hi: self.hi.clone().max(zero),
        }
    }
}

/// Encloses `√x` for non-negative `x`: exact when `x` is a perfect rational
/// square, otherwise an interval of width `1/denom`.
pub fn sqrt_bracket(x: &Rational, denom: &BigInt) -> RootBracket {
    debug_assert!(!x.is_negative());
    let numer_root = x.numer().sqrt();
    let denom_root = x.denom().sqrt();
    if &numer_root * &numer_root == *x.numer() && &denom_root * &denom_root == *x.denom() {
        return RootBracket::exact(Rational::new(numer_root, denom_root));
    }
    let lo = floor_sqrt_with_denom(x, denom);
    let hi = &lo + Rational::new(BigInt::one(), denom.clone());
    RootBracket { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn floor_sqrt_of_rationals() {
        assert_eq!(floor_sqrt(&int(25)), BigInt::from(5));
        assert_eq!(floor_sqrt(&int(24)), BigInt::from(4));
        assert_eq!(floor_sqrt(&rat(100, 9)), BigInt::from(3));
        assert_eq!(floor_sqrt(&rat(1, 5)), BigInt::zero());
    }

    #[test]
    fn sqrt_with_denom_rounds_down() {
        let q = BigInt::from(1_000_000u32);
        assert_eq!(floor_sqrt_with_denom(&int(4), &q), int(2));
        let r = floor_sqrt_with_denom(&int(2), &q);
        assert!(&r * &r <= int(2));
        let step = Rational::new(BigInt::one(), q);
        let next = &r + step;
        assert!(&next * &next > int(2));
    }

    #[test]
    fn brackets_detect_perfect_squares() {
        let denom = default_bracket_denom();
        assert_eq!(sqrt_bracket(&rat(1, 100), &denom), RootBracket::exact(rat(1, 10)));
        assert_eq!(sqrt_bracket(&rat(9, 4), &denom), RootBracket::exact(rat(3, 2)));
        let b = sqrt_bracket(&rat(1, 5), &denom);
        assert!(!b.is_exact());
        assert_eq!(&b.hi - &b.lo, Rational::new(BigInt::one(), default_bracket_denom()));
    }

    proptest! {
        #[test]
        fn bracket_encloses_root(n in 0i64..50_000, d in 1i64..1000) {
            let x = rat(n, d);
            let b = sqrt_bracket(&x, &default_bracket_denom());
            prop_assert!(&b.lo * &b.lo <= x);
            prop_assert!(&b.hi * &b.hi >= x);
            prop_assert!(b.lo >= Rational::zero());
        }
    }
}
