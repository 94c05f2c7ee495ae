//! Exact rational scalars, numeral parsing, and the two evaluation modes
//! (exact rationals and hardware floats) used by the measure engine.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational. Always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Rational {
    frac(1, 2)
}

/// Parses `"p/q"`, integers, and finite decimals (`"-0.125"`, `"3."`, `"1e-3"`)
/// into an exact rational. Decimals are read as `p / 10^k`, never through a float.
pub fn parse_numeral(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Numeral(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = parse_int(n.trim()).ok_or_else(bad)?;
        let d: BigInt = parse_int(d.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, fraction) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !fraction.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{fraction}");
    let mut numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    if neg {
        numer = -numer;
    }
    let scale = exponent - fraction.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    // Large numerators and denominators overflow the naive conversion.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(900) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Exact rational with the same value as the float.
pub fn from_f64(v: f64) -> Rational {
    Rational::from_f64(v).unwrap_or_else(Rational::zero)
}

/// Best rational approximation of `v` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn approximate(v: &Rational, max_den: &BigInt) -> Rational {
    if v.denom() <= max_den {
        return v.clone();
    }
    let neg = v.is_negative();
    let x = v.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let (a, r) = n.div_rem(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            // Semiconvergent candidate.
            let t = (max_den - &q0) / &q1;
            let cand1 = Rational::new(&p0 + &t * &p1, &q0 + &t * &q1);
            let cand2 = Rational::new(p1.clone(), q1.clone());
            let best = if (&cand1 - &x).abs() < (&cand2 - &x).abs() { cand1 } else { cand2 };
            return if neg { -best } else { best };
        }
        let p2 = &p0 + &a * &p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if r.is_zero() {
            let best = Rational::new(p1, q1);
            return if neg { -best } else { best };
        }
        n = d;
        d = r;
    }
}

/// Square root of a rational when it is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Largest dyadic `m / 2^bits` not above `sqrt(r)`.
pub fn dyadic_sqrt_floor(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (r * Rational::from_integer(scale)).floor().to_integer();
    let m = if scaled.is_negative() { BigInt::zero() } else { scaled.sqrt() };
    Rational::new(m, BigInt::one() << bits as usize)
}

/// Ordered scalar field used by the geometric side of the path machinery.
/// Implemented by [`Rational`] (exact mode) and `f64` (float mode).
pub trait Field:
    Clone + Debug + PartialOrd + Signed + num_traits::Num + Send + Sync + 'static
{
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn min_of(&self, o: &Self) -> Self {
        if o < self { o.clone() } else { self.clone() }
    }
    fn max_of(&self, o: &Self) -> Self {
        if o > self { o.clone() } else { self.clone() }
    }
}

impl Field for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
}

impl Field for f64 {
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// The gate basis the measure function is written against:
/// constants, `+`, `-`, `×`, `max`, `min`, plus a sign step used for the
/// remainder coordinate. One implementation evaluates directly, another
/// records gates into a circuit for formula export.
pub trait Gates {
    type V: Clone;
    fn konst(&self, r: &Rational) -> Self::V;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn neg(&self, a: &Self::V) -> Self::V;
    fn max(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn min(&self, a: &Self::V, b: &Self::V) -> Self::V;
    /// 1 when `a >= 0`, else 0.
    fn step(&self, a: &Self::V) -> Self::V;
}

/// Direct evaluation over any [`Field`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Eval<T>(std::marker::PhantomData<T>);

impl<T> Eval<T> {
    pub fn new() -> Self {
        Eval(std::marker::PhantomData)
    }
}

impl<T: Field> Gates for Eval<T> {
    type V = T;
    fn konst(&self, r: &Rational) -> T {
        T::from_rational(r)
    }
    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }
    fn neg(&self, a: &T) -> T {
        -a.clone()
    }
    fn max(&self, a: &T, b: &T) -> T {
        a.max_of(b)
    }
    fn min(&self, a: &T, b: &T) -> T {
        a.min_of(b)
    }
    fn step(&self, a: &T) -> T {
        if a.is_negative() { T::zero() } else { T::one() }
    }
}

pub(crate) mod serde_rational {
    use super::{format_rational, parse_numeral, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Num {
        Text(String),
        Int(i64),
        Float(f64),
    }

    pub(crate) fn decode(v: Num) -> Result<Rational, String> {
        match v {
            Num::Text(s) => parse_numeral(&s).map_err(|e| e.to_string()),
            Num::Int(i) => Ok(super::int(i)),
            // serde_json prints the shortest round-trip form, read back exactly.
            Num::Float(f) => parse_numeral(&format!("{f}")).map_err(|e| e.to_string()),
        }
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        decode(Num::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<Num>::deserialize(d)?
                .into_iter()
                .map(|n| decode(n).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(r) => s.serialize_some(&format_rational(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            Option::<Num>::deserialize(d)?
                .map(|n| decode(n).map_err(D::Error::custom))
                .transpose()
        }
    }
}
