//! Scalar fields used by the algebraic layer.
//!
//! Everything above this module is written against [`Field`], so the same
//! classification code runs over exact rationals ([`Q`]) or over `f64` with a
//! configurable zero tolerance ([`R64`]). Rank and membership decisions are exact in
//! the first case and tolerance-based in the second.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseScalarError;

/// Arbitrary precision rational number.
pub type Q = BigRational;

/// Default zero tolerance used by [`R64`] (relative to the magnitude of the data).
pub const FLOAT_TOL: f64 = 1e-9;

thread_local! {
    static TOLERANCE: Cell<f64> = const { Cell::new(FLOAT_TOL) };
}

/// Current zero tolerance of [`R64`] on this thread.
pub fn float_tolerance() -> f64 {
    TOLERANCE.with(Cell::get)
}

/// Runs `f` with the [`R64`] zero tolerance set to `tol`, restoring the
/// previous value afterwards.
pub fn with_float_tolerance<T>(tol: f64, f: impl FnOnce() -> T) -> T {
    struct Restore(f64);
    impl Drop for Restore {
        fn drop(&mut self) {
            TOLERANCE.with(|t| t.set(self.0));
        }
    }
    let _restore = Restore(TOLERANCE.with(|t| t.replace(tol)));
    f()
}

pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// True when arithmetic and zero tests are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;
    /// Converts a float. Exact fields take the binary value verbatim.
    fn from_f64(x: f64) -> Self;
    /// Converts a rational (rounding for inexact fields).
    fn from_rational(x: &Q) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Panics on division by zero.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    /// Zero test against the magnitude `scale` of the surrounding data.
    fn negligible(&self, scale: f64) -> bool {
        let _ = scale;
        self.is_zero()
    }

    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }

    fn inv(&self) -> Self {
        Self::one().div(self)
    }

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Sign as -1, 0 or 1 (zero test as in [`Field::is_zero`]).
    fn signum(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.to_f64() < 0.0 {
            -1
        } else {
            1
        }
    }

    /// Nearby field element for a float estimate: a small-denominator
    /// rational for exact fields, the float itself otherwise.
    fn snap(x: f64) -> Option<Self>;

    /// String form used in JSON reports (`"a/b"` for rationals).
    fn to_report(&self) -> String;

    /// The exact rational value, for exact fields.
    fn to_rational(&self) -> Option<Q> {
        None
    }
}

/// Denominator cap used when snapping float estimates to rationals.
pub const SNAP_MAX_DEN: u64 = 1_000_000;

impl Field for Q {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Q::from_integer(BigInt::from(n))
    }
    fn ratio(num: i64, den: i64) -> Self {
        Q::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(x: &Q) -> Self {
        x.clone()
    }
    fn from_f64(x: f64) -> Self {
        Q::from_float(x).expect("finite float")
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(!Zero::is_zero(rhs), "rational division by zero");
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        self.to_f64_lossy()
    }
    fn signum(&self) -> i8 {
        if Zero::is_zero(self) {
            0
        } else if Signed::is_negative(self) {
            -1
        } else {
            1
        }
    }
    fn snap(x: f64) -> Option<Self> {
        rationalize(x, SNAP_MAX_DEN)
    }
    fn to_report(&self) -> String {
        format_rational(self)
    }
    fn to_rational(&self) -> Option<Q> {
        Some(self.clone())
    }
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for Q {
    fn to_f64_lossy(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                // Shift both parts down until they fit.
                let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(900);
                let n = (self.numer() >> shift).to_f64().unwrap_or(0.0);
                let d = (self.denom() >> shift).to_f64().unwrap_or(1.0);
                n / d
            }
        }
    }
}

/// `f64` with tolerance-based zero tests.
#[derive(Clone, Copy, PartialEq, PartialOrd, Debug, Default)]
pub struct R64(pub f64);

impl Field for R64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        R64(0.0)
    }
    fn one() -> Self {
        R64(1.0)
    }
    fn from_i64(n: i64) -> Self {
        R64(n as f64)
    }
    fn ratio(num: i64, den: i64) -> Self {
        R64(num as f64 / den as f64)
    }
    fn from_rational(x: &Q) -> Self {
        R64(x.to_f64_lossy())
    }
    fn from_f64(x: f64) -> Self {
        R64(x)
    }
    fn add(&self, rhs: &Self) -> Self {
        R64(self.0 + rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        R64(self.0 - rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        R64(self.0 * rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(rhs.0 != 0.0, "float division by zero");
        R64(self.0 / rhs.0)
    }
    fn neg(&self) -> Self {
        R64(-self.0)
    }
    fn is_zero(&self) -> bool {
        self.0.abs() <= float_tolerance()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.0.abs() <= float_tolerance() * scale.max(f64::MIN_POSITIVE)
    }
    fn to_f64(&self) -> f64 {
        self.0
    }
    fn snap(x: f64) -> Option<Self> {
        x.is_finite().then_some(R64(x))
    }
    fn to_report(&self) -> String {
        format!("{:e}", self.0)
    }
}

impl fmt::Display for R64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Formats as `"a/b"` with `b > 0` and `gcd(a, b) = 1` (integers get `/1`).
pub fn format_rational(x: &Q) -> String {
    // BigRational is always stored reduced with a positive denominator.
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"a/b"`, `"a"` or a plain decimal literal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Q, ParseScalarError> {
    let s = s.trim();
    let bad = || ParseScalarError(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Ok(Q::from_integer(n));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Q> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = Q::from_integer(BigInt::from_str(&all).ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    if scale >= 0 {
        for _ in 0..scale {
            value *= &ten;
        }
    } else {
        for _ in 0..(-scale) {
            value /= &ten;
        }
    }
    Some(if neg { -value } else { value })
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via continued fractions. Returns `None` for non-finite input.
pub fn rationalize(x: f64, max_den: u64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut rem = x.abs();
    // Convergents h/k.
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let limit = BigInt::from(max_den);
    for _ in 0..64 {
        let a = rem.floor();
        let a_int = BigInt::from(a as u64);
        let h2 = &a_int * &h1 + &h0;
        let k2 = &a_int * &k1 + &k0;
        if k2 > limit {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = rem - a;
        if frac < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
        if !rem.is_finite() || rem > 1e18 {
            break;
        }
    }
    if k1.is_zero() {
        return Some(<Q as Zero>::zero());
    }
    let q = Q::new(h1, k1);
    Some(if neg { -q } else { q })
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (continued fraction descent).
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    debug_assert!(lo <= hi);
    if lo.is_integer() {
        return lo.clone();
    }
    if Signed::is_negative(hi) {
        return -simplest_between(&-hi, &-lo);
    }
    if !Signed::is_positive(lo) {
        return <Q as Zero>::zero();
    }
    let ceil = lo.ceil();
    if &ceil <= hi {
        return ceil;
    }
    // Both ends share the integer part n: recurse on the reciprocals.
    let n = lo.floor();
    let inner = simplest_between(&(hi - &n).recip(), &(lo - &n).recip());
    n + inner.recip()
}

/// Absolute value as a rational.
pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_rational_in_interval() {
        let third = Q::ratio(1, 3);
        let eps = Q::ratio(1, 1000);
        assert_eq!(simplest_between(&(&third - &eps), &(&third + &eps)), third);
        assert_eq!(simplest_between(&Q::ratio(-7, 5), &Q::ratio(-6, 5)), Q::ratio(-4, 3));
        assert_eq!(simplest_between(&Q::ratio(-1, 2), &Q::ratio(1, 2)), <Q as Zero>::zero());
        let big = Q::new(BigInt::from(123_456_789_011i64), BigInt::from(98_765_432_101i64));
        let tiny = Q::new(BigInt::one(), BigInt::from(10u64).pow(30));
        assert_eq!(simplest_between(&(&big - &tiny), &(&big + &tiny)), big);
    }

    #[test]
    fn rational_format_is_reduced() {
        assert_eq!(format_rational(&Q::ratio(4, -6)), "-2/3");
        assert_eq!(format_rational(&Q::from_i64(5)), "5/1");
        assert_eq!(format_rational(&<Q as Zero>::zero()), "0/1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), Q::ratio(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), Q::from_i64(-7));
        assert_eq!(parse_rational("0.25").unwrap(), Q::ratio(1, 4));
        assert_eq!(parse_rational("-1.5e1").unwrap(), Q::from_i64(-15));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn continued_fraction_recovers_small_rationals() {
        assert_eq!(rationalize(0.75, 1_000_000).unwrap(), Q::ratio(3, 4));
        assert_eq!(rationalize(-2.0 / 3.0, 1_000_000).unwrap(), Q::ratio(-2, 3));
        assert_eq!(rationalize(1e-14, 1_000_000).unwrap(), <Q as Zero>::zero());
        let pi = rationalize(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(pi, Q::ratio(355, 113));
    }

    #[test]
    fn float_zero_is_relative() {
        assert!(R64(1e-7).negligible(1e3));
        assert!(!R64(1e-7).negligible(1.0));
    }
}
