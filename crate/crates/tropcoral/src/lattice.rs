//! Integral vectors in N = Z², rational points in N_Q, and quotient classes
//! N_R / R·u represented by the scalar ⟨rot90(u), x⟩.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Exact rational number used for every position and constraint value.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => BigInt::from_str(s).map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod qstr {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Smallest integer ≥ x.
pub(crate) fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

pub(crate) fn to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticeVector {
    pub a: i64,
    pub b: i64,
}

impl From<[i64; 2]> for LatticeVector {
    fn from(v: [i64; 2]) -> Self {
        LatticeVector::new(v[0], v[1])
    }
}

impl From<LatticeVector> for [i64; 2] {
    fn from(v: LatticeVector) -> Self {
        [v.a, v.b]
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl LatticeVector {
    pub const fn new(a: i64, b: i64) -> Self {
        LatticeVector { a, b }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn neg(self) -> Self {
        LatticeVector::new(-self.a, -self.b)
    }

    pub fn add(self, o: Self) -> Self {
        LatticeVector::new(self.a + o.a, self.b + o.b)
    }

    pub fn scale(self, k: i64) -> Self {
        LatticeVector::new(self.a * k, self.b * k)
    }

    /// Rotation by a quarter turn: (a,b) ↦ (−b,a).
    pub fn rot90(self) -> Self {
        LatticeVector::new(-self.b, self.a)
    }

    pub fn gcd(self) -> i64 {
        self.a.gcd(&self.b)
    }

    pub fn is_primitive(self) -> bool {
        self.gcd() == 1
    }

    pub fn to_point(self) -> RationalPoint {
        RationalPoint::new(q(self.a), q(self.b))
    }
}

/// Splits v = g·p with p primitive and g > 0.
pub fn primitive(v: LatticeVector) -> Result<(LatticeVector, u64), Error> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = v.gcd();
    Ok((LatticeVector::new(v.a / g, v.b / g), g as u64))
}

pub fn det2(u: LatticeVector, v: LatticeVector) -> i64 {
    u.a * v.b - u.b * v.a
}

/// Primitive integral vector in the direction of a nonzero rational vector.
pub fn primitive_of_point(p: &RationalPoint) -> Result<LatticeVector, Error> {
    if p.x.is_zero() && p.h.is_zero() {
        return Err(Error::ZeroVector);
    }
    let l = p.x.denom().lcm(p.h.denom());
    let a = (&p.x * Q::from_integer(l.clone())).to_integer();
    let b = (&p.h * Q::from_integer(l)).to_integer();
    let g = a.gcd(&b);
    let a = (a / &g).to_i64().ok_or(Error::Overflow)?;
    let b = (b / &g).to_i64().ok_or(Error::Overflow)?;
    Ok(LatticeVector::new(a, b))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub x: Q,
    pub h: Q,
}

impl RationalPoint {
    pub fn new(x: Q, h: Q) -> Self {
        RationalPoint { x, h }
    }

    pub fn from_ints(x: i64, h: i64) -> Self {
        RationalPoint::new(q(x), q(h))
    }

    pub fn origin() -> Self {
        RationalPoint::new(Q::zero(), Q::zero())
    }

    pub fn add(&self, o: &RationalPoint) -> RationalPoint {
        RationalPoint::new(&self.x + &o.x, &self.h + &o.h)
    }

    pub fn sub(&self, o: &RationalPoint) -> RationalPoint {
        RationalPoint::new(&self.x - &o.x, &self.h - &o.h)
    }

    pub fn scale(&self, s: &Q) -> RationalPoint {
        RationalPoint::new(&self.x * s, &self.h * s)
    }

    /// self + t·u
    pub fn step(&self, t: &Q, u: LatticeVector) -> RationalPoint {
        RationalPoint::new(&self.x + t * q(u.a), &self.h + t * q(u.b))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.h.is_zero()
    }

    /// det(u, self) = ⟨rot90(u), self⟩.
    pub fn det_with(&self, u: LatticeVector) -> Q {
        &self.h * q(u.a) - &self.x * q(u.b)
    }

    /// If self = t·u with t > 0, returns t.
    pub fn positive_multiple_of(&self, u: LatticeVector) -> Option<Q> {
        if !self.det_with(u).is_zero() || self.is_zero() {
            return None;
        }
        let t = if u.a != 0 { &self.x / q(u.a) } else { &self.h / q(u.b) };
        t.is_positive().then_some(t)
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_q(&self.x), fmt_q(&self.h))
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [fmt_q(&self.x), fmt_q(&self.h)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, h] = <[String; 2]>::deserialize(d)?;
        let x = parse_q(&x).map_err(serde::de::Error::custom)?;
        let h = parse_q(&h).map_err(serde::de::Error::custom)?;
        Ok(RationalPoint::new(x, h))
    }
}

/// A class in N_R / R·direction, stored as ⟨rot90(direction), x⟩.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientClass {
    pub direction: LatticeVector,
    #[serde(with = "qstr")]
    pub value: Q,
}

impl QuotientClass {
    pub fn new(direction: LatticeVector, value: Q) -> Result<Self, Error> {
        if !direction.is_primitive() {
            return Err(Error::NotPrimitive(direction));
        }
        Ok(QuotientClass { direction, value })
    }
}

pub fn project_mod(u: LatticeVector, x: &RationalPoint) -> Result<QuotientClass, Error> {
    if !u.is_primitive() {
        return Err(Error::NotPrimitive(u));
    }
    Ok(QuotientClass { direction: u, value: x.det_with(u) })
}
