//! Exact rationals with a machine-word fast path.
//!
//! Values that fit in `i64/i64` are kept inline; everything else falls back to
//! `BigRational`. The representation is canonical (lowest terms, positive
//! denominator, inline whenever possible), so structural equality and hashing
//! agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Scalar field used by the generic linear algebra.
pub trait Field:
    Clone + PartialOrd + Num + Signed + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl Field for f64 {}
impl Field for BigRational {}
impl Field for Rational {}

#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    #[inline]
    pub fn from_int(v: i64) -> Self {
        Rational(Repr::Small(v, 1))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(v))
    }

    /// `n/d`; panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_i128(n as i128, d as i128)
    }

    pub fn new_big(n: BigInt, d: BigInt) -> Self {
        Self::from_big(BigRational::new(n, d))
    }

    #[inline]
    fn from_i128(mut n: i128, mut d: i128) -> Self {
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        Self::from_reduced_i128(n, d)
    }

    #[inline]
    fn from_reduced_i128(n: i128, d: i128) -> Self {
        if let (Ok(a), Ok(b)) = (i64::try_from(n), i64::try_from(d)) {
            Rational(Repr::Small(a, b))
        } else {
            Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            ))))
        }
    }

    /// Canonicalizes an already-reduced `BigRational`.
    pub fn from_big(v: BigRational) -> Self {
        if let (Some(a), Some(b)) = (v.numer().to_i64(), v.denom().to_i64()) {
            Rational(Repr::Small(a, b))
        } else {
            Rational(Repr::Big(Box::new(v)))
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Numerator and denominator when both fit in `i64`.
    #[inline]
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match &self.0 {
            Repr::Small(n, d) => Some((*n, *d)),
            Repr::Big(_) => None,
        }
    }

    #[inline]
    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// Integer value if this is an integer fitting in `i64`.
    pub fn to_i64_exact(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(Integer::div_floor(n, d)),
            Repr::Big(b) => b.floor().to_integer(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(-Integer::div_floor(&-(*n as i128), &(*d as i128))),
            Repr::Big(b) => b.ceil().to_integer(),
        }
    }

    pub fn floor_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, d) => Some(Integer::div_floor(n, d)),
            Repr::Big(b) => b.floor().to_integer().to_i64(),
        }
    }

    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                assert!(*n != 0, "division by zero");
                Self::from_reduced_i128(
                    (*d as i128) * (n.signum() as i128),
                    (*n as i128).abs(),
                )
            }
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// `self * k` for a machine integer.
    #[inline]
    pub fn mul_i64(&self, k: i64) -> Self {
        match &self.0 {
            Repr::Small(n, d) => {
                let g = gcd_u64(k.unsigned_abs(), *d as u64) as i64;
                let (k, d) = if g > 1 { (k / g, d / g) } else { (k, *d) };
                Self::from_reduced_i128(*n as i128 * k as i128, d as i128)
            }
            Repr::Big(b) => Self::from_big(&**b * BigRational::from_integer(BigInt::from(k))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Rational::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    #[inline]
    fn add_ref(&self, o: &Self) -> Self {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            if b == d {
                return Self::from_i128(*a as i128 + *c as i128, *b as i128);
            }
            let n = *a as i128 * *d as i128 + *c as i128 * *b as i128;
            return Self::from_i128(n, *b as i128 * *d as i128);
        }
        Self::from_big(self.to_big() + o.to_big())
    }

    #[inline]
    fn sub_ref(&self, o: &Self) -> Self {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            if b == d {
                return Self::from_i128(*a as i128 - *c as i128, *b as i128);
            }
            let n = *a as i128 * *d as i128 - *c as i128 * *b as i128;
            return Self::from_i128(n, *b as i128 * *d as i128);
        }
        Self::from_big(self.to_big() - o.to_big())
    }

    #[inline]
    fn mul_ref(&self, o: &Self) -> Self {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &o.0) {
            if *a == 0 || *c == 0 {
                return Rational::zero();
            }
            let g1 = gcd_u64(a.unsigned_abs(), *d as u64) as i128;
            let g2 = gcd_u64(c.unsigned_abs(), *b as u64) as i128;
            let n = (*a as i128 / g1) * (*c as i128 / g2);
            let den = (*b as i128 / g2) * (*d as i128 / g1);
            return Self::from_reduced_i128(n, den);
        }
        Self::from_big(self.to_big() * o.to_big())
    }

    #[inline]
    fn div_ref(&self, o: &Self) -> Self {
        self.mul_ref(&o.recip())
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, o: &Self) -> bool {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}
impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match &self.0 {
            Repr::Small(a, b) => {
                0u8.hash(h);
                a.hash(h);
                b.hash(h);
            }
            Repr::Big(x) => {
                1u8.hash(h);
                x.hash(h);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}
impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::new_big(n, d))
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident, $atr:ident, $am:ident) => {
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, o: &'a Rational) -> Rational {
                self.$imp(o)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, o: Rational) -> Rational {
                self.$imp(&o)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, o: &'a Rational) -> Rational {
                self.$imp(o)
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            #[inline]
            fn $m(self, o: Rational) -> Rational {
                self.$imp(&o)
            }
        }
        impl $atr<Rational> for Rational {
            #[inline]
            fn $am(&mut self, o: Rational) {
                *self = self.$imp(&o);
            }
        }
        impl<'a> $atr<&'a Rational> for Rational {
            #[inline]
            fn $am(&mut self, o: &'a Rational) {
                *self = self.$imp(o);
            }
        }
    };
}

forward_binop!(Add, add, add_ref, AddAssign, add_assign);
forward_binop!(Sub, sub, sub_ref, SubAssign, sub_assign);
forward_binop!(Mul, mul, mul_ref, MulAssign, mul_assign);
forward_binop!(Div, div, div_ref, DivAssign, div_assign);

impl Rem for Rational {
    type Output = Rational;
    fn rem(self, o: Rational) -> Rational {
        Rational::from_big(self.to_big() % o.to_big())
    }
}

impl Neg for Rational {
    type Output = Rational;
    #[inline]
    fn neg(self) -> Rational {
        -&self
    }
}

impl Neg for &Rational {
    type Output = Rational;
    #[inline]
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational::from_reduced_i128(-(*n as i128), *d as i128),
            Repr::Big(b) => Rational::from_big(-(**b).clone()),
        }
    }
}

impl Zero for Rational {
    #[inline]
    fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }
    #[inline]
    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

impl One for Rational {
    #[inline]
    fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }
}

impl Num for Rational {
    type FromStrRadixErr = ParseRationalError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix)
            .map(Rational::from_big)
            .map_err(|_| ParseRationalError(s.to_string()))
    }
}

impl Signed for Rational {
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }
    fn abs_sub(&self, o: &Self) -> Self {
        if self <= o {
            Rational::zero()
        } else {
            self - o
        }
    }
    fn signum(&self) -> Self {
        if self.is_positive() {
            Rational::one()
        } else if self.is_negative() {
            Rational::from_int(-1)
        } else {
            Rational::zero()
        }
    }
    #[inline]
    fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }
    #[inline]
    fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }
}

impl FromPrimitive for Rational {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Rational::from_int(n))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Rational::from_i128(n as i128, 1))
    }
}

impl ToPrimitive for Rational {
    fn to_i64(&self) -> Option<i64> {
        self.to_i64_exact()
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64_exact().and_then(|v| u64::try_from(v).ok())
    }
    fn to_f64(&self) -> Option<f64> {
        Some(Rational::to_f64(self))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_bigint(v)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational::from_big(v)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(it: I) -> Self {
        it.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(it: I) -> Self {
        it.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(it: I) -> Self {
        it.fold(Rational::one(), |a, b| a * b)
    }
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(v: &BigInt) -> BigInt {
    assert!(!v.is_negative());
    v.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn lowest_terms() {
        assert_eq!(r(6, -4), r(-3, 2));
        assert_eq!(r(6, -4).to_string(), "-3/2");
        assert_eq!(r(0, -7), Rational::zero());
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rational::from_int(i64::MAX);
        let sq = &big * &big;
        assert!(sq.as_small().is_none());
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(back.as_small().is_some());
        let m = Rational::from_int(i64::MIN);
        assert_eq!(-(-&m), m);
    }

    #[test]
    fn parse_and_floor() {
        let x: Rational = "-7/2".parse().unwrap();
        assert_eq!(x.floor(), BigInt::from(-4));
        assert_eq!(x.ceil(), BigInt::from(-3));
        assert!("1/0".parse::<Rational>().is_err());
        let y: Rational = "123456789012345678901234567890/3".parse().unwrap();
        assert!(y.is_integer());
    }

    fn arb_rat() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-50i64..50, 1i64..50).prop_map(|(a, b)| r(a, b)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(a, b)| r(a, b)),
        ]
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in arb_rat(), b in arb_rat()) {
            let (x, y) = (a.to_big(), b.to_big());
            prop_assert_eq!((&a + &b).to_big(), &x + &y);
            prop_assert_eq!((&a - &b).to_big(), &x - &y);
            prop_assert_eq!((&a * &b).to_big(), &x * &y);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_big(), &x / &y);
            }
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
            prop_assert_eq!(a.mul_i64(-7).to_big(), &x * BigRational::from_integer(BigInt::from(-7)));
        }
    }
}
