//! Scalar types the discretization is generic over.
//!
//! Every quantity that enters assembly (knots, quadrature moments, element
//! integrals) is exact rational first. A [`Scalar`] only needs to know how to
//! round a rational into itself, so the float, double-double and exact paths
//! share one code path and differ only in the final conversion.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, Num, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_rational(q: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Value rounded to double-double; exact types round once.
    fn to_two_float(&self) -> TwoFloat {
        TwoFloat::from(self.to_f64())
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

/// Floating scalars usable by iterative solvers (f64 and double-double).
pub trait RealScalar: Scalar + Float {}

impl<T: Scalar + Float> RealScalar for T {}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(q: &BigRational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for TwoFloat {
    fn from_rational(q: &BigRational) -> Self {
        let hi = ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
        if !hi.is_finite() || hi == 0.0 {
            return TwoFloat::from(hi);
        }
        let rest = q - BigRational::from_float(hi).expect("finite");
        let lo = ToPrimitive::to_f64(&rest).unwrap_or(0.0);
        TwoFloat::new_add(hi, lo)
    }

    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }

    fn to_two_float(&self) -> TwoFloat {
        *self
    }
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_two_float(&self) -> TwoFloat {
        TwoFloat::from_rational(self)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// Double-double quotient by long division on the high words.
///
/// `TwoFloat`'s own division forms its correction term without a fused
/// multiply-add, which leaves quotients accurate only to about 1e-16.
pub fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

/// Exact rational from a small integer ratio.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a"`, `"a/b"` or `"-a/b"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Formats a rational as `NUM/DEN` (or `NUM` when integral).
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_keeps_the_low_word() {
        let third = rat(1, 3);
        let x = TwoFloat::from_rational(&third);
        let back = x * TwoFloat::from(3.0) - TwoFloat::from(1.0);
        assert!(Scalar::to_f64(&back.abs()) < 1e-31);
        assert!(x.lo() != 0.0);
    }

    #[test]
    fn double_double_division_and_root() {
        let third = dd_div(TwoFloat::from(1.0), TwoFloat::from(3.0));
        let back = third * 3.0 - 1.0;
        assert!(Scalar::to_f64(&back.abs()) < 1e-31);
        let a = TwoFloat::new_add(7.0, 1e-20);
        let b = TwoFloat::new_add(3.0, 1e-21);
        let r = dd_div(a, b) * b - a;
        assert!(Scalar::to_f64(&r.abs()) < 1e-30);
        let two = TwoFloat::from(2.0);
        let s = two.sqrt();
        assert!(Scalar::to_f64(&(s * s - two).abs()) < 1e-30);
    }

    #[test]
    fn rational_round_trip_through_text() {
        for s in ["0", "7", "-3/2", "91177/35"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(format_rational(&q), s);
        }
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn f64_conversion_is_correctly_rounded() {
        assert_eq!(<f64 as Scalar>::from_rational(&rat(1, 10)), 0.1);
        assert_eq!(<f64 as Scalar>::from_rational(&rat(-7, 720)), -7.0 / 720.0);
    }
}
