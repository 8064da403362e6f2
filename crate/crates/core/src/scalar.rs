//! Scalar backends for the recursion.
//!
//! The engine is generic over [`Scalar`]. Three concrete backends exist:
//! hardware `f64`, exact rationals ([`Rational`]) and binary floats of
//! configurable precision ([`BigFloat`]). [`Dual2`] wraps any of them with a
//! truncated second-order Taylor part so that derivatives with respect to a
//! single parameter can be threaded through the same code path.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use dashu::base::{SquareRoot, SquareRootRem};
use dashu::float::round::mode::HalfEven;
use dashu::float::FBig;
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

/// Exact rational scalar.
pub type Rational = RBig;

/// Binary floating point with a per-value precision in bits.
pub type BigFloat = FBig<HalfEven, 2>;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// Whatever is needed to create constants (precision for big floats).
    type Context: Clone + Debug + Send + Sync;

    fn from_i64(ctx: &Self::Context, value: i64) -> Self;

    fn from_ratio(ctx: &Self::Context, value: &Rational) -> Self;

    /// `None` when the backend cannot represent an inexact input.
    fn from_f64(ctx: &Self::Context, value: f64) -> Option<Self>;

    fn mul_ref(&self, rhs: &Self) -> Self;

    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool;

    fn is_negative(&self) -> bool;

    /// Square root; `None` if negative or not representable (irrational
    /// roots under the rational backend).
    fn sqrt(&self) -> Option<Self>;

    /// Full-precision textual form.
    fn render(&self) -> String;

    fn zero(ctx: &Self::Context) -> Self {
        Self::from_i64(ctx, 0)
    }

    fn one(ctx: &Self::Context) -> Self {
        Self::from_i64(ctx, 1)
    }
}

impl Scalar for f64 {
    type Context = ();

    fn from_i64(_: &(), value: i64) -> Self {
        value as f64
    }

    fn from_ratio(_: &(), value: &Rational) -> Self {
        value.to_f64().value()
    }

    fn from_f64(_: &(), value: f64) -> Option<Self> {
        Some(value)
    }

    #[inline]
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }

    fn render(&self) -> String {
        format!("{self:e}")
    }
}

impl Scalar for Rational {
    type Context = ();

    fn from_i64(_: &(), value: i64) -> Self {
        RBig::from(value)
    }

    fn from_ratio(_: &(), value: &Rational) -> Self {
        value.clone()
    }

    fn from_f64(_: &(), _value: f64) -> Option<Self> {
        None
    }

    #[inline]
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn to_f64(&self) -> f64 {
        RBig::to_f64(self).value()
    }

    fn is_zero(&self) -> bool {
        RBig::is_zero(self)
    }

    fn is_negative(&self) -> bool {
        self.numerator() < &IBig::ZERO
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let num = exact_sqrt(&UBig::try_from(self.numerator().clone()).ok()?)?;
        let den = exact_sqrt(self.denominator())?;
        Some(RBig::from_parts(IBig::from(num), den))
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

fn exact_sqrt(value: &UBig) -> Option<UBig> {
    let (root, rem) = value.sqrt_rem();
    rem.is_zero().then_some(root)
}

/// Working precision of a [`BigFloat`] computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    bits: usize,
}

impl Precision {
    pub fn from_digits(digits: u32) -> Self {
        let bits = (f64::from(digits) * BITS_PER_DIGIT).ceil() as usize;
        Self { bits: bits.max(24) }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn digits(&self) -> u32 {
        (self.bits as f64 / BITS_PER_DIGIT).floor() as u32
    }
}

impl Scalar for BigFloat {
    type Context = Precision;

    fn from_i64(ctx: &Precision, value: i64) -> Self {
        BigFloat::from(value).with_precision(ctx.bits).value()
    }

    fn from_ratio(ctx: &Precision, value: &Rational) -> Self {
        let num = BigFloat::from(value.numerator().clone())
            .with_precision(ctx.bits)
            .value();
        let den = BigFloat::from(value.denominator().clone())
            .with_precision(ctx.bits)
            .value();
        num / den
    }

    fn from_f64(ctx: &Precision, value: f64) -> Option<Self> {
        let exact = BigFloat::try_from(value).ok()?;
        Some(exact.with_precision(ctx.bits).value())
    }

    #[inline]
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self).value()
    }

    fn is_zero(&self) -> bool {
        self.repr().is_zero()
    }

    fn is_negative(&self) -> bool {
        self.repr().significand() < &IBig::ZERO
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if Scalar::is_zero(self) {
            return Some(self.clone());
        }
        Some(SquareRoot::sqrt(self))
    }

    fn render(&self) -> String {
        let digits = (self.precision() as f64 / BITS_PER_DIGIT).floor() as usize;
        let decimal = self.to_decimal().value();
        format!("{:.*e}", digits.saturating_sub(1), decimal)
    }
}

/// Value with first and second derivative with respect to one parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual2<S> {
    pub value: S,
    pub first: S,
    pub second: S,
}

impl<S: Scalar> Dual2<S> {
    pub fn constant(value: S, ctx: &S::Context) -> Self {
        Self {
            value,
            first: S::zero(ctx),
            second: S::zero(ctx),
        }
    }

    /// The independent variable itself: derivative one, curvature zero.
    pub fn variable(value: S, ctx: &S::Context) -> Self {
        Self {
            value,
            first: S::one(ctx),
            second: S::zero(ctx),
        }
    }
}

impl<S: Scalar> Add for Dual2<S> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            first: self.first + rhs.first,
            second: self.second + rhs.second,
        }
    }
}

impl<'a, S: Scalar> Add<&'a Dual2<S>> for Dual2<S> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: &'a Self) -> Self {
        Self {
            value: self.value + &rhs.value,
            first: self.first + &rhs.first,
            second: self.second + &rhs.second,
        }
    }
}

impl<S: Scalar> AddAssign for Dual2<S> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.value += rhs.value;
        self.first += rhs.first;
        self.second += rhs.second;
    }
}

impl<S: Scalar> Sub for Dual2<S> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self {
            value: self.value - rhs.value,
            first: self.first - rhs.first,
            second: self.second - rhs.second,
        }
    }
}

impl<'a, S: Scalar> Sub<&'a Dual2<S>> for Dual2<S> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: &'a Self) -> Self {
        Self {
            value: self.value - &rhs.value,
            first: self.first - &rhs.first,
            second: self.second - &rhs.second,
        }
    }
}

impl<S: Scalar> Neg for Dual2<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            first: -self.first,
            second: -self.second,
        }
    }
}

impl<S: Scalar> Dual2<S> {
    #[inline]
    fn product(&self, rhs: &Self) -> Self {
        let value = self.value.mul_ref(&rhs.value);
        let first = self.value.mul_ref(&rhs.first) + self.first.mul_ref(&rhs.value);
        let cross = self.first.mul_ref(&rhs.first);
        let second = self.value.mul_ref(&rhs.second)
            + self.second.mul_ref(&rhs.value)
            + cross.clone()
            + cross;
        Self {
            value,
            first,
            second,
        }
    }

    fn quotient(&self, rhs: &Self) -> Self {
        let value = self.value.clone() / &rhs.value;
        let first = (self.first.clone() - value.mul_ref(&rhs.first)) / &rhs.value;
        let cross = first.mul_ref(&rhs.first);
        let second =
            (self.second.clone() - cross.clone() - cross - value.mul_ref(&rhs.second)) / &rhs.value;
        Self {
            value,
            first,
            second,
        }
    }
}

impl<S: Scalar> Mul for Dual2<S> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.product(&rhs)
    }
}

impl<'a, S: Scalar> Mul<&'a Dual2<S>> for Dual2<S> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: &'a Self) -> Self {
        self.product(rhs)
    }
}

impl<S: Scalar> Div for Dual2<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.quotient(&rhs)
    }
}

impl<'a, S: Scalar> Div<&'a Dual2<S>> for Dual2<S> {
    type Output = Self;
    fn div(self, rhs: &'a Self) -> Self {
        self.quotient(rhs)
    }
}

impl<S: Scalar> Scalar for Dual2<S> {
    type Context = S::Context;

    fn from_i64(ctx: &S::Context, value: i64) -> Self {
        Self::constant(S::from_i64(ctx, value), ctx)
    }

    fn from_ratio(ctx: &S::Context, value: &Rational) -> Self {
        Self::constant(S::from_ratio(ctx, value), ctx)
    }

    fn from_f64(ctx: &S::Context, value: f64) -> Option<Self> {
        S::from_f64(ctx, value).map(|v| Self::constant(v, ctx))
    }

    #[inline]
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.product(rhs)
    }

    fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero() && self.first.is_zero() && self.second.is_zero()
    }

    fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    fn sqrt(&self) -> Option<Self> {
        let root = self.value.sqrt()?;
        if root.is_zero() {
            return None;
        }
        let twice = root.clone() + &root;
        let first = self.first.clone() / &twice;
        let second = (self.second.clone() - first.mul_ref(&first) - first.mul_ref(&first)) / &twice;
        Some(Self {
            value: root,
            first,
            second,
        })
    }

    fn render(&self) -> String {
        self.value.render()
    }
}

/// Parses a decimal literal (`-1.25e-3`), an integer or a fraction `p/q`
/// into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if RBig::is_zero(&den) {
            return None;
        }
        return Some(num / den);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = RBig::from(digits.parse::<UBig>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten_pow = RBig::from(UBig::from(10u8).pow(scale.unsigned_abs() as usize));
    if scale >= 0 {
        value *= ten_pow;
    } else {
        value /= ten_pow;
    }
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rat(num: i64, den: i64) -> Rational {
        RBig::from(num) / RBig::from(den)
    }

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_rational("0.01"), Some(rat(1, 100)));
        assert_eq!(parse_rational("-2.5e-3"), Some(rat(-1, 400)));
        assert_eq!(parse_rational("12"), Some(rat(12, 1)));
        assert_eq!(parse_rational("1e2"), Some(rat(100, 1)));
        assert_eq!(parse_rational("3/9"), Some(rat(1, 3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn rational_sqrt_only_when_exact() {
        assert_eq!(Scalar::sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(Scalar::sqrt(&rat(1, 2)), None);
        assert_eq!(Scalar::sqrt(&rat(-1, 4)), None);
    }

    #[test]
    fn big_float_carries_requested_digits() {
        let ctx = Precision::from_digits(40);
        let third = BigFloat::from_ratio(&ctx, &rat(1, 3));
        let back = third.clone() * BigFloat::from_i64(&ctx, 3) - BigFloat::one(&ctx);
        assert!(Scalar::to_f64(&back).abs() < 1e-39);
        assert!(third
            .render()
            .starts_with("3.33333333333333333333333333333333333333"));
        let two = BigFloat::from_i64(&ctx, 2);
        let root = Scalar::sqrt(&two).unwrap();
        assert_relative_eq!(
            Scalar::to_f64(&root),
            std::f64::consts::SQRT_2,
            max_relative = 1e-15
        );
    }

    #[test]
    fn dual_product_rule_and_quotient_rule() {
        // f(x) = x^3 / (1 + x) at x = 2
        let x = Dual2::variable(2.0, &());
        let one = Dual2::<f64>::one(&());
        let f = x.clone() * &x * &x / (one + &x);
        assert_relative_eq!(f.value, 8.0 / 3.0);
        // f' = (3x^2(1+x) - x^3)/(1+x)^2 = (36 - 8)/9
        assert_relative_eq!(f.first, 28.0 / 9.0, max_relative = 1e-14);
        // f'' = 2x(x^2 + 3x + 3)/(1+x)^3 = 4 * 13 / 27
        assert_relative_eq!(f.second, 52.0 / 27.0, max_relative = 1e-14);
    }

    #[test]
    fn dual_sqrt() {
        let x = Dual2::variable(4.0, &());
        let r = Scalar::sqrt(&x).unwrap();
        assert_relative_eq!(r.value, 2.0);
        assert_relative_eq!(r.first, 0.25);
        assert_relative_eq!(r.second, -1.0 / 32.0);
    }
}
