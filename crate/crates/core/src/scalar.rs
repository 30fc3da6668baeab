//! Dual-mode scalars: exact Gaussian rationals `a + b·i` with `a, b ∈ ℚ`, and
//! complex doubles.
//!
//! Every numerical routine in the crate is generic over [`Field`], so the
//! same code path runs in exact and in floating-point mode. The mode is a
//! property of the type parameter and cannot change mid-computation. At I/O
//! boundaries, where the mode is only known at run time, the tagged
//! [`Scalar`] enum is used instead and mixing modes there is reported as
//! [`ScalarError::ModeMismatch`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number. Always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot mix exact and floating-point scalars")]
    ModeMismatch,
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("non-finite float {0} has no exact representation")]
    NonFinite(f64),
}

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

impl fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arithmetic::Exact => f.write_str("exact"),
            Arithmetic::Float => f.write_str("float"),
        }
    }
}

/// The scalar field every algorithm is written against.
///
/// Implemented by [`GaussianRational`] (exact) and [`Complex64`] (float).
/// Operators consume their operands; clone where a value is reused.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const ARITHMETIC: Arithmetic;

    fn zero() -> Self;
    fn one() -> Self;
    /// √−1.
    fn imag_unit() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_gaussian(g: &GaussianRational) -> Self;
    /// Embeds a complex double. In exact mode this is the exact dyadic value
    /// of the double, not a rounded decimal.
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;

    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn re(&self) -> Self;
    fn im(&self) -> Self;
    /// Multiplicative inverse.
    fn inv(&self) -> Result<Self, ScalarError>;
    /// Square root of a nonnegative real value, if it exists in the field.
    /// Exact mode only succeeds on squares of rationals.
    fn sqrt_real(&self) -> Option<Self>;
    /// Orders the real parts. Exact in exact mode.
    fn cmp_real(&self, other: &Self) -> Ordering;
    /// True when the imaginary part is exactly zero.
    fn is_real(&self) -> bool;
    /// The real part as text: `"1/4"` in exact mode, shortest decimal in
    /// float mode. Parses back with [`parse_gaussian`].
    fn real_string(&self) -> String;

    /// Scales a row so all entries become Gaussian integers and returns the
    /// scale factor. Floats are left untouched (factor 1).
    fn clear_denominators(_row: &mut [Self]) -> Self {
        Self::one()
    }

    /// `self / divisor` where the quotient is known to be integral, as in
    /// fraction-free elimination. Floats divide normally.
    fn div_exact(&self, divisor: &Self) -> Self {
        self.div(divisor).expect("nonzero divisor")
    }

    fn from_i64(k: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(k)))
    }

    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }

    fn norm_sqr(&self) -> Self {
        let re = self.re();
        let im = self.im();
        re.clone() * re + im.clone() * im
    }

    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self.clone() * rhs.inv()?)
    }
}

/// Multiplicative inverse of `z`.
pub fn invert<T: Field>(z: &T) -> Result<T, ScalarError> {
    z.inv()
}

/// `z^k` by repeated squaring; negative `k` inverts first.
pub fn int_power<T: Field>(z: &T, k: i64) -> Result<T, ScalarError> {
    let mut base = if k < 0 { z.inv()? } else { z.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * base;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Gaussian rationals
// ---------------------------------------------------------------------------

/// Exact element `re + im·i` of ℚ(√−1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    /// `(a/b) + (c/d)·i` from machine integers. Panics on a zero denominator.
    pub fn from_ratios(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussianRational::new(ratio(a, b), ratio(c, d))
    }

    pub fn from_int(a: i64) -> Self {
        GaussianRational::real(ratio(a, 1))
    }

    pub fn re_part(&self) -> &Rational {
        &self.re
    }

    pub fn im_part(&self) -> &Rational {
        &self.im
    }

    pub fn into_parts(self) -> (Rational, Rational) {
        (self.re, self.im)
    }

    /// Exact squared modulus `re² + im²`.
    pub fn norm_sqr_rational(&self) -> Rational {
        q_add(&q_mul(&self.re, &self.re), &q_mul(&self.im, &self.im))
    }
}

/// `a/b` as a reduced big rational. Panics when `b == 0`.
pub fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

// `Ratio` reduces every result by a binary gcd, which is slow on large
// integers even when the denominator is 1. Integer operands skip it.
fn q_add(a: &Rational, b: &Rational) -> Rational {
    if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn q_sub(a: &Rational, b: &Rational) -> Rational {
    if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() - b.numer())
    } else {
        a - b
    }
}

fn q_mul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        Rational::zero()
    } else if a.is_integer() && b.is_integer() {
        Rational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianRational::new(q_add(&self.re, &rhs.re), q_add(&self.im, &rhs.im))
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational::new(q_sub(&self.re, &rhs.re), q_sub(&self.im, &rhs.im))
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = q_sub(&q_mul(&self.re, &rhs.re), &q_mul(&self.im, &rhs.im));
        let im = q_add(&q_mul(&self.re, &rhs.im), &q_mul(&self.im, &rhs.re));
        GaussianRational::new(re, im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Field for GaussianRational {
    const ARITHMETIC: Arithmetic = Arithmetic::Exact;

    fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }

    fn one() -> Self {
        GaussianRational::new(Rational::one(), Rational::zero())
    }

    fn imag_unit() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    fn from_rational(r: &Rational) -> Self {
        GaussianRational::real(r.clone())
    }

    fn from_gaussian(g: &GaussianRational) -> Self {
        g.clone()
    }

    fn from_c64(z: Complex64) -> Self {
        // Non-finite doubles never reach here from validated inputs.
        let re = Rational::from_float(z.re).expect("finite real part");
        let im = Rational::from_float(z.im).expect("finite imaginary part");
        GaussianRational::new(re, im)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    fn re(&self) -> Self {
        GaussianRational::real(self.re.clone())
    }

    fn im(&self) -> Self {
        GaussianRational::real(self.im.clone())
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        let n = self.norm_sqr_rational();
        if n.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(GaussianRational::new(&self.re / &n, -&self.im / &n))
    }

    fn div_exact(&self, divisor: &Self) -> Self {
        let integral = |z: &GaussianRational| z.re.is_integer() && z.im.is_integer();
        if !integral(self) || !integral(divisor) {
            return self.div(divisor).expect("nonzero divisor");
        }
        let (a, b) = (self.re.numer(), self.im.numer());
        let (c, d) = (divisor.re.numer(), divisor.im.numer());
        let n = c * c + d * d;
        assert!(!n.is_zero(), "division by zero");
        let re = (a * c + b * d) / &n;
        let im = (b * c - a * d) / &n;
        GaussianRational::new(Rational::from_integer(re), Rational::from_integer(im))
    }

    fn sqrt_real(&self) -> Option<Self> {
        if !self.im.is_zero() || self.re.is_negative() {
            return None;
        }
        let num = exact_isqrt(self.re.numer())?;
        let den = exact_isqrt(self.re.denom())?;
        Some(GaussianRational::real(Rational::new(num, den)))
    }

    fn cmp_real(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re)
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn real_string(&self) -> String {
        self.re.to_string()
    }

    fn clear_denominators(row: &mut [Self]) -> Self {
        let mut l = BigInt::one();
        for z in row.iter() {
            l = l.lcm(z.re.denom());
            l = l.lcm(z.im.denom());
        }
        let scale = GaussianRational::real(Rational::from_integer(l));
        for z in row.iter_mut() {
            *z = z.clone() * scale.clone();
        }
        scale
    }

    fn norm_sqr(&self) -> Self {
        GaussianRational::real(self.norm_sqr_rational())
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl fmt::Display for GaussianRational {
    /// Canonical form `re±im i`, both parts in lowest terms, e.g.
    /// `3/25-4/25 i`; real values print as `re` alone.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{} i", self.re, sign, self.im.abs())
    }
}

impl FromStr for GaussianRational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gaussian(s)
    }
}

/// Parses a real rational literal: an integer, a fraction `a/b`, or a
/// decimal with optional exponent (`1.25`, `-3e-4`). Decimals are converted
/// exactly, so `0.1` becomes `1/10`.
pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let t = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_decimal(n.trim()).ok_or_else(err)?;
        let d = parse_decimal(d.trim()).ok_or_else(err)?;
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        return Ok(n / d);
    }
    parse_decimal(t).ok_or_else(err)
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all.parse::<BigInt>().ok()?);
    let shift = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num::pow(ten, shift as usize);
    } else {
        value /= num::pow(ten, (-shift) as usize);
    }
    Some(if neg { -value } else { value })
}

/// Parses `re`, `re±im i`, `re±im*i`, `im i`, `i`, `-i` (whitespace ignored).
pub fn parse_gaussian(s: &str) -> Result<GaussianRational, ScalarError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || ScalarError::Parse(s.to_string());
    if compact.is_empty() {
        return Err(err());
    }
    let Some(body) = compact.strip_suffix('i') else {
        return Ok(GaussianRational::real(parse_rational(&compact)?));
    };
    let body = body.strip_suffix('*').unwrap_or(body);
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for pos in (1..bytes.len()).rev() {
        let c = bytes[pos];
        if (c == b'+' || c == b'-') && !matches!(bytes[pos - 1], b'e' | b'E' | b'/') {
            split = Some(pos);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(pos) => (&body[..pos], &body[pos..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() {
        Rational::zero()
    } else {
        parse_rational(re_str)?
    };
    let im = match im_str {
        "" | "+" => Rational::one(),
        "-" => -Rational::one(),
        other => parse_rational(other).map_err(|_| err())?,
    };
    Ok(GaussianRational::new(re, im))
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = GaussianRational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an exact scalar string such as \"3/4\" or \"1/2-2 i\", or an integer")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Self::Value, E> {
                parse_gaussian(v).map_err(E::custom)
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(GaussianRational::from_int(v))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Self::Value, E> {
                Ok(GaussianRational::real(Rational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Self::Value, E> {
                // Shortest round-trip decimal, so 0.1 reads as 1/10.
                parse_gaussian(&format!("{v:e}")).map_err(E::custom)
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

// ---------------------------------------------------------------------------
// Complex doubles
// ---------------------------------------------------------------------------

impl Field for Complex64 {
    const ARITHMETIC: Arithmetic = Arithmetic::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn from_rational(r: &Rational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_gaussian(g: &GaussianRational) -> Self {
        g.to_c64()
    }

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn re(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }

    fn im(&self) -> Self {
        Complex64::new(self.im, 0.0)
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if Field::is_zero(self) {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Complex64::inv(self))
    }

    fn sqrt_real(&self) -> Option<Self> {
        (self.im == 0.0 && self.re >= 0.0).then(|| Complex64::new(self.re.sqrt(), 0.0))
    }

    fn cmp_real(&self, other: &Self) -> Ordering {
        self.re.partial_cmp(&other.re).unwrap_or(Ordering::Equal)
    }

    fn is_real(&self) -> bool {
        self.im == 0.0
    }

    fn real_string(&self) -> String {
        format!("{:?}", self.re)
    }

    fn norm_sqr(&self) -> Self {
        Complex64::new(Complex64::norm_sqr(self), 0.0)
    }
}

// ---------------------------------------------------------------------------
// Run-time tagged scalar
// ---------------------------------------------------------------------------

/// A scalar whose arithmetic mode is only known at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussianRational),
    Float(Complex64),
}

impl Scalar {
    pub fn arithmetic(&self) -> Arithmetic {
        match self {
            Scalar::Exact(_) => Arithmetic::Exact,
            Scalar::Float(_) => Arithmetic::Float,
        }
    }

    pub fn invert(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(z) => z.inv().map(Scalar::Exact),
            Scalar::Float(z) => Field::inv(z).map(Scalar::Float),
        }
    }

    pub fn int_power(&self, k: i64) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(z) => int_power(z, k).map(Scalar::Exact),
            Scalar::Float(z) => int_power(z, k).map(Scalar::Float),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => z.to_c64(),
            Scalar::Float(z) => *z,
        }
    }

    fn binary(
        &self,
        rhs: &Scalar,
        exact: impl FnOnce(GaussianRational, GaussianRational) -> Result<GaussianRational, ScalarError>,
        float: impl FnOnce(Complex64, Complex64) -> Result<Complex64, ScalarError>,
    ) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => exact(a.clone(), b.clone()).map(Scalar::Exact),
            (Scalar::Float(a), Scalar::Float(b)) => float(*a, *b).map(Scalar::Float),
            _ => Err(ScalarError::ModeMismatch),
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binary(rhs, |a, b| Ok(a + b), |a, b| Ok(a + b))
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binary(rhs, |a, b| Ok(a - b), |a, b| Ok(a - b))
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binary(rhs, |a, b| Ok(a * b), |a, b| Ok(a * b))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        self.binary(rhs, |a, b| a.div(&b), |a, b| Field::div(&a, &b))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => z.fmt(f),
            Scalar::Float(z) => write!(f, "[{}, {}]", z.re, z.im),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(z) => z.serialize(serializer),
            Scalar::Float(z) => z.serialize(serializer),
        }
    }
}
