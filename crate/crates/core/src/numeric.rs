//! Exact scalars.
//!
//! [`Rational`] stores values as a reduced `i64` fraction while they fit and
//! promotes to a big rational otherwise. The representation is canonical:
//! a value that fits in `i64/i64` is never held in the big form, so
//! structural equality and hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(BigRational),
}

/// Arbitrary-precision rational number in canonical form.
#[derive(Clone)]
pub struct Rational(Repr);

fn small_from_i128(num: i128, den: i128) -> Option<Rational> {
    debug_assert!(den != 0);
    if den == 1 {
        return i64::try_from(num).ok().map(|num| Rational(Repr::Small { num, den: 1 }));
    }
    if let (Ok(n), Ok(d)) = (i64::try_from(num), i64::try_from(den)) {
        if n != i64::MIN && d > 0 {
            let g = n.unsigned_abs().gcd(&d.unsigned_abs()) as i64;
            return Some(Rational(Repr::Small { num: n / g, den: d / g }));
        }
    }
    let g = num.gcd(&den);
    let (mut n, mut d) = if g > 1 { (num / g, den / g) } else { (num, den) };
    if d < 0 {
        n = -n;
        d = -d;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(num), Ok(den)) => Some(Rational(Repr::Small { num, den })),
        _ => None,
    }
}

fn from_big(r: BigRational) -> Rational {
    // BigRational::new already reduces and normalizes the sign.
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(num), Some(den)) => Rational(Repr::Small { num, den }),
        _ => Rational(Repr::Big(r)),
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small { num: n, den: 1 })
    }

    /// Builds `n/d` in canonical form.
    pub fn new(n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(small_from_i128(n as i128, d as i128).expect("i64 fraction always fits after reduction"))
    }

    pub fn from_bigints(n: BigInt, d: BigInt) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(from_big(BigRational::new(n, d)))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num > 0,
            Repr::Big(b) => b.is_positive(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// True when the value is held in the promoted big form.
    pub fn is_big(&self) -> bool {
        matches!(self.0, Repr::Big(_))
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        Rational::one().checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.div_nonzero(rhs))
    }

    fn div_nonzero(&self, rhs: &Rational) -> Self {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            if let Some(r) = small_from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128) {
                return r;
            }
        }
        from_big(self.to_big() / rhs.to_big())
    }

    /// Multiplies by an integer factor.
    pub fn mul_int(&self, k: i64) -> Self {
        if let Repr::Small { num, den } = self.0 {
            let g = if den == 1 { 1 } else { k.unsigned_abs().gcd(&(den as u64)) as i64 };
            if let Some(r) = small_from_i128(num as i128 * (k / g) as i128, (den / g) as i128) {
                return r;
            }
        }
        self * &Rational::from_integer(k)
    }

    /// Compares `a·ka` with `b·kb` for positive `ka`, `kb`.
    pub fn cmp_scaled(a: &Rational, ka: i64, b: &Rational, kb: i64) -> Ordering {
        debug_assert!(ka > 0 && kb > 0);
        if let (Repr::Small { num: an, den: ad }, Repr::Small { num: bn, den: bd }) = (&a.0, &b.0) {
            let l = *an as i128 * *bd as i128;
            let r = *bn as i128 * *ad as i128;
            if let (Some(l), Some(r)) = (l.checked_mul(ka as i128), r.checked_mul(kb as i128)) {
                return l.cmp(&r);
            }
        }
        a.mul_int(ka).cmp(&b.mul_int(kb))
    }

    /// Divides by a nonzero integer.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        self.div_nonzero(&Rational::from_integer(k))
    }

    /// Exact midpoint `(a + b) / 2`.
    pub fn midpoint(a: &Rational, b: &Rational) -> Self {
        (a + b).div_int(2)
    }

    /// Lossy conversion for display only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            let r = if b == d { small_from_i128(a + c, b) } else { small_from_i128(a * d + c * b, b * d) };
            if let Some(r) = r {
                return r;
            }
        }
        from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            let r = if b == d { small_from_i128(a - c, b) } else { small_from_i128(a * d - c * b, b * d) };
            if let Some(r) = r {
                return r;
            }
        }
        from_big(self.to_big() - rhs.to_big())
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            if let Some(r) = small_from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128) {
                return r;
            }
        }
        from_big(self.to_big() * rhs.to_big())
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    /// Panics on a zero divisor; use [`Rational::checked_div`] for a fallible division.
    fn div(self, rhs: &'a Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small { num, den } if num != i64::MIN => Rational(Repr::Small { num: -num, den }),
            _ => from_big(-self.to_big()),
        }
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
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

impl FromStr for Rational {
    type Err = Error;

    /// Accepts only the canonical textual form: `n` or `n/d` with `d > 1`
    /// and `gcd(|n|, d) = 1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Number(s.to_string());
        let parse_int = |t: &str| -> Result<BigInt> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            if digits.len() > 1 && digits.starts_with('0') {
                return Err(bad());
            }
            if t.starts_with('-') && digits == "0" {
                return Err(bad());
            }
            t.parse::<BigInt>().map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(from_big(BigRational::from_integer(parse_int(s)?))),
            Some((n, d)) => {
                if d.starts_with('-') {
                    return Err(bad());
                }
                let n = parse_int(n)?;
                let d = parse_int(d)?;
                if d <= BigInt::one() || !n.gcd(&d).is_one() {
                    return Err(bad());
                }
                Ok(from_big(BigRational::new_raw(n, d)))
            }
        }
    }
}

/// A rational or positive infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtendedRational {
    Finite(Rational),
    PositiveInfinity,
}

impl ExtendedRational {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedRational::PositiveInfinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            ExtendedRational::PositiveInfinity => None,
        }
    }

    pub fn add(&self, other: &ExtendedRational) -> ExtendedRational {
        match (self, other) {
            (ExtendedRational::Finite(a), ExtendedRational::Finite(b)) => ExtendedRational::Finite(a + b),
            _ => ExtendedRational::PositiveInfinity,
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(r: Rational) -> Self {
        ExtendedRational::Finite(r)
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), PositiveInfinity) => Ordering::Less,
            (PositiveInfinity, Finite(_)) => Ordering::Greater,
            (PositiveInfinity, PositiveInfinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::Finite(r) => write!(f, "{r}"),
            ExtendedRational::PositiveInfinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            Ok(ExtendedRational::PositiveInfinity)
        } else {
            Ok(ExtendedRational::Finite(s.parse()?))
        }
    }
}

/// Finite affine function `λ ↦ intercept + slope·λ`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Affine {
    pub intercept: Rational,
    pub slope: Rational,
}

impl Affine {
    pub fn new(intercept: Rational, slope: Rational) -> Self {
        Affine { intercept, slope }
    }

    pub fn constant(c: Rational) -> Self {
        Affine { intercept: c, slope: Rational::zero() }
    }

    /// The identity `λ ↦ λ`.
    pub fn identity() -> Self {
        Affine { intercept: Rational::zero(), slope: Rational::one() }
    }

    pub fn eval(&self, lambda: &Rational) -> Rational {
        &self.intercept + &(&self.slope * lambda)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Affine { intercept: self.intercept.mul_int(k), slope: self.slope.mul_int(k) }
    }

    pub fn div_int(&self, k: i64) -> Self {
        Affine { intercept: self.intercept.div_int(k), slope: self.slope.div_int(k) }
    }

    /// The unique crossing point, or `None` for parallel or identical lines.
    pub fn intersect(&self, other: &Affine) -> Option<Rational> {
        if self.slope == other.slope {
            return None;
        }
        let num = &other.intercept - &self.intercept;
        let den = &self.slope - &other.slope;
        Some(num / den)
    }
}

impl Add for &Affine {
    type Output = Affine;
    fn add(self, rhs: &Affine) -> Affine {
        Affine { intercept: &self.intercept + &rhs.intercept, slope: &self.slope + &rhs.slope }
    }
}

impl Sub for &Affine {
    type Output = Affine;
    fn sub(self, rhs: &Affine) -> Affine {
        Affine { intercept: &self.intercept - &rhs.intercept, slope: &self.slope - &rhs.slope }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·λ", self.intercept, self.slope)
    }
}

impl fmt::Debug for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Affine function of the potential, or the constant `+∞` used for
/// constraints on root-containing sets.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AffineFn {
    Finite(Affine),
    Infinite,
}

impl AffineFn {
    pub fn new(intercept: Rational, slope: Rational) -> Self {
        AffineFn::Finite(Affine::new(intercept, slope))
    }

    pub fn eval(&self, lambda: &Rational) -> ExtendedRational {
        match self {
            AffineFn::Finite(a) => ExtendedRational::Finite(a.eval(lambda)),
            AffineFn::Infinite => ExtendedRational::PositiveInfinity,
        }
    }

    pub fn intersect(&self, other: &AffineFn) -> Option<Rational> {
        match (self, other) {
            (AffineFn::Finite(f), AffineFn::Finite(g)) => f.intersect(g),
            _ => None,
        }
    }

    pub fn as_finite(&self) -> Option<&Affine> {
        match self {
            AffineFn::Finite(a) => Some(a),
            AffineFn::Infinite => None,
        }
    }
}

impl fmt::Display for AffineFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineFn::Finite(a) => write!(f, "{a}"),
            AffineFn::Infinite => f.write_str("inf"),
        }
    }
}

/// Scalar type the growth engine runs over: concrete rationals, or affine
/// functions of the potential for symbolic replay.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn constant(r: &Rational) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, k: i64) -> Self;
    fn divided(&self, k: i64) -> Self;
    /// Value at potential `lambda`.
    fn at(&self, lambda: &Rational) -> Rational;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn constant(r: &Rational) -> Self {
        r.clone()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, k: i64) -> Self {
        self.mul_int(k)
    }
    fn divided(&self, k: i64) -> Self {
        self.div_int(k)
    }
    fn at(&self, _lambda: &Rational) -> Rational {
        self.clone()
    }
}

impl Scalar for Affine {
    fn zero() -> Self {
        Affine::default()
    }
    fn constant(r: &Rational) -> Self {
        Affine::constant(r.clone())
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, k: i64) -> Self {
        self.mul_int(k)
    }
    fn divided(&self, k: i64) -> Self {
        self.div_int(k)
    }
    fn at(&self, lambda: &Rational) -> Rational {
        self.eval(lambda)
    }
}

/// `rational_normalize`: canonical `n/d`.
pub fn rational_normalize(n: i64, d: i64) -> Result<Rational> {
    Rational::new(n, d)
}

/// Evaluates `f` at `lambda`.
pub fn affine_eval(f: &AffineFn, lambda: &Rational) -> ExtendedRational {
    f.eval(lambda)
}

/// Crossing point of two affine functions, absent when parallel.
pub fn affine_intersect(f: &AffineFn, g: &AffineFn) -> Option<Rational> {
    f.intersect(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(rational_normalize(4, 8).unwrap(), r(1, 2));
        assert_eq!(rational_normalize(-3, -6).unwrap().to_string(), "1/2");
        assert_eq!(rational_normalize(0, 5).unwrap().to_string(), "0");
        assert!(matches!(rational_normalize(1, 0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn affine_examples() {
        let f = AffineFn::new(r(1, 1), r(1, 1));
        assert_eq!(affine_eval(&f, &r(1, 1)), ExtendedRational::Finite(r(2, 1)));
        assert_eq!(affine_eval(&f, &r(1, 2)), ExtendedRational::Finite(r(3, 2)));
        let c = AffineFn::new(r(2, 1), Rational::zero());
        assert_eq!(affine_eval(&c, &r(7, 3)), ExtendedRational::Finite(r(2, 1)));
        assert_eq!(affine_eval(&AffineFn::Infinite, &r(7, 3)), ExtendedRational::PositiveInfinity);

        assert_eq!(affine_intersect(&c, &f), Some(r(1, 1)));
        assert_eq!(affine_intersect(&c, &AffineFn::new(r(5, 1), Rational::zero())), None);
        let g = AffineFn::new(r(3, 1), r(2, 1));
        assert_eq!(affine_intersect(&g, &g.clone()), None);
    }

    #[test]
    fn textual_form() {
        for s in ["0", "7", "-7", "7/2", "-7/2", "123456789012345678901234567891/7"] {
            let x: Rational = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
        }
        for s in ["", "-", "1/0", "2/4", "1/1", "1/-2", "01", "-0", "1.5", "+3", "3/"] {
            assert!(s.parse::<Rational>().is_err(), "{s} should be rejected");
        }
        assert_eq!("inf".parse::<ExtendedRational>().unwrap(), ExtendedRational::PositiveInfinity);
        assert_eq!(ExtendedRational::PositiveInfinity.to_string(), "inf");
    }

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let big = Rational::from_integer(i64::MAX);
        let sq = &big * &big;
        assert!(sq.is_big());
        let back = &sq / &big;
        assert!(!back.is_big());
        assert_eq!(back, big);
        let tiny = r(1, i64::MAX);
        let t2 = &tiny * &tiny;
        assert!(t2.is_big());
        assert_eq!(&t2 * &Rational::from_integer(i64::MAX), tiny);
        assert_eq!(-Rational::from_integer(i64::MIN), &Rational::from_integer(i64::MAX) + &Rational::one());
    }

    #[test]
    fn infinity_ordering() {
        let inf = ExtendedRational::PositiveInfinity;
        let x = ExtendedRational::Finite(Rational::from_integer(i64::MAX));
        assert!(inf > x);
        assert_eq!(inf.add(&x), inf);
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| r(n, d)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| r(n, d)),
        ]
    }

    proptest! {
        #[test]
        fn add_sub_mul_div_roundtrip(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
        }

        #[test]
        fn matches_bigrational(a in arb_rational(), b in arb_rational()) {
            let (x, y) = (a.to_big(), b.to_big());
            prop_assert_eq!((&a + &b).to_big(), &x + &y);
            prop_assert_eq!((&a - &b).to_big(), &x - &y);
            prop_assert_eq!((&a * &b).to_big(), &x * &y);
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        }

        #[test]
        fn text_roundtrip(a in arb_rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }

        #[test]
        fn intersection_is_exact(a in arb_rational(), b in arb_rational(), c in arb_rational(), d in arb_rational()) {
            let f = AffineFn::new(a, b);
            let g = AffineFn::new(c, d);
            if let Some(x) = affine_intersect(&f, &g) {
                prop_assert_eq!(affine_eval(&f, &x), affine_eval(&g, &x));
            }
        }

        #[test]
        fn extended_order_is_total(a in arb_rational(), b in arb_rational(), c in arb_rational(), inf_mask in 0u8..8) {
            let pick = |x: Rational, bit: u8| if inf_mask & bit != 0 { ExtendedRational::PositiveInfinity } else { ExtendedRational::Finite(x) };
            let (x, y, z) = (pick(a, 1), pick(b, 2), pick(c, 4));
            if x <= y && y <= x { prop_assert_eq!(&x, &y); }
            if x <= y && y <= z { prop_assert!(x <= z); }
        }
    }
}
