//! Exact scalars: rationals, the ring `Z[√3]`, the field `F_3`, and
//! rational-valued `p`-adic valuations with `+∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

/// Exponent of `p` in a nonzero integer; `None` for zero.
pub fn val_int(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// `p`-adic valuation of a rational.
pub fn val_p(x: &Rat, p: u64) -> Val {
    match val_int(x.numer(), p) {
        None => Val::Infinity,
        Some(vn) => {
            let vd = val_int(x.denom(), p).unwrap_or(0);
            Val::int(vn as i64 - vd as i64)
        }
    }
}

/// `p`-adic valuation of an integer as a [`Val`].
pub fn val_p_int(x: &BigInt, p: u64) -> Val {
    match val_int(x, p) {
        None => Val::Infinity,
        Some(v) => Val::int(v as i64),
    }
}

/// A valuation: an exact rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Val {
    Finite(Rat),
    Infinity,
}

impl Val {
    pub fn int(v: i64) -> Val {
        Val::Finite(rat_int(v))
    }

    pub fn ratio(n: i64, d: i64) -> Val {
        Val::Finite(rat(n, d))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinity)
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Val::Finite(r) => Some(r),
            Val::Infinity => None,
        }
    }

    pub fn min(self, other: Val) -> Val {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Infinity, Val::Infinity) => Ordering::Equal,
            (Val::Infinity, _) => Ordering::Greater,
            (_, Val::Infinity) => Ordering::Less,
            (Val::Finite(a), Val::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinity,
        }
    }
}

impl Add<&Rat> for Val {
    type Output = Val;
    fn add(self, rhs: &Rat) -> Val {
        match self {
            Val::Finite(a) => Val::Finite(a + rhs),
            Val::Infinity => Val::Infinity,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Infinity => write!(f, "inf"),
            Val::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Val::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Val {
    type Err = String;
    fn from_str(s: &str) -> Result<Val, String> {
        if s == "inf" {
            return Ok(Val::Infinity);
        }
        let parse = |t: &str| BigInt::from_str(t).map_err(|e| format!("bad valuation {s:?}: {e}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(format!("bad valuation {s:?}: zero denominator"));
                }
                Ok(Val::Finite(Rat::new(parse(n)?, d)))
            }
            None => Ok(Val::Finite(Rat::from_integer(parse(s)?))),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Val, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Renders a rational as `n` or `n/d`.
pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An element of the prime field `F_3`, stored as 0, 1 or 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F3(u8);

impl F3 {
    pub const ZERO: F3 = F3(0);
    pub const ONE: F3 = F3(1);
    pub const MINUS_ONE: F3 = F3(2);

    pub fn new(v: i64) -> F3 {
        F3(v.rem_euclid(3) as u8)
    }

    pub fn from_bigint(v: &BigInt) -> F3 {
        let r = v.mod_floor(&BigInt::from(3));
        F3(if r.is_zero() {
            0
        } else if r.is_one() {
            1
        } else {
            2
        })
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; `None` for zero. In `F_3` every unit is its own inverse.
    pub fn inv(self) -> Option<F3> {
        (self.0 != 0).then_some(self)
    }

    /// Symmetric representative in {-1, 0, 1}.
    pub fn signed(self) -> i8 {
        match self.0 {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }
}

impl Add for F3 {
    type Output = F3;
    fn add(self, o: F3) -> F3 {
        F3((self.0 + o.0) % 3)
    }
}

impl Sub for F3 {
    type Output = F3;
    fn sub(self, o: F3) -> F3 {
        F3((self.0 + 3 - o.0) % 3)
    }
}

impl Mul for F3 {
    type Output = F3;
    fn mul(self, o: F3) -> F3 {
        F3((self.0 * o.0) % 3)
    }
}

impl Neg for F3 {
    type Output = F3;
    fn neg(self) -> F3 {
        F3((3 - self.0) % 3)
    }
}

impl fmt::Display for F3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `a + b√3` with integer `a`, `b`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuadInt3 {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuadInt3 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        QuadInt3 { a: a.into(), b: b.into() }
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        QuadInt3 { a: a.into(), b: BigInt::zero() }
    }

    pub fn sqrt3() -> Self {
        QuadInt3::new(0, 1)
    }

    /// `(√3)^k` for `k ≥ 0`.
    pub fn sqrt3_pow(k: u32) -> Self {
        let base = BigInt::from(3).pow(k / 2);
        if k.is_multiple_of(2) {
            QuadInt3 { a: base, b: BigInt::zero() }
        } else {
            QuadInt3 { a: BigInt::zero(), b: base }
        }
    }

    pub fn conj(&self) -> Self {
        QuadInt3 { a: self.a.clone(), b: -&self.b }
    }

    /// `a² − 3b²`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - BigInt::from(3) * &self.b * &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        QuadInt3 { a: &self.a * k, b: &self.b * k }
    }

    /// Exact division by `(√3)^k`, if the quotient lies in `Z[√3]`.
    pub fn div_sqrt3_pow(&self, k: u32) -> Option<Self> {
        let mut x = self.clone();
        let three = BigInt::from(3);
        for _ in 0..k {
            // (a + b√3)/√3 = b + (a/3)√3
            let (q, r) = x.a.div_rem(&three);
            if !r.is_zero() {
                return None;
            }
            x = QuadInt3 { a: x.b, b: q };
        }
        Some(x)
    }
}

impl Add for &QuadInt3 {
    type Output = QuadInt3;
    fn add(self, o: &QuadInt3) -> QuadInt3 {
        QuadInt3 { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &QuadInt3 {
    type Output = QuadInt3;
    fn sub(self, o: &QuadInt3) -> QuadInt3 {
        QuadInt3 { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &QuadInt3 {
    type Output = QuadInt3;
    fn mul(self, o: &QuadInt3) -> QuadInt3 {
        QuadInt3 {
            a: &self.a * &o.a + BigInt::from(3) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Neg for &QuadInt3 {
    type Output = QuadInt3;
    fn neg(self) -> QuadInt3 {
        QuadInt3 { a: -&self.a, b: -&self.b }
    }
}

impl fmt::Display for QuadInt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√3", self.b),
            (false, false) if self.b.is_negative() => write!(f, "{} - {}√3", self.a, -&self.b),
            _ => write!(f, "{} + {}√3", self.a, self.b),
        }
    }
}

/// Valuation on `Z[√3]` normalised so that `v(3) = 1`.
pub fn val_quad3(x: &QuadInt3) -> Val {
    let va = val_p_int(&x.a, 3);
    let vb = val_p_int(&x.b, 3) + &rat(1, 2);
    va.min(vb)
}

/// Reduction `Z[√3] → Z[√3]/(√3) = F_3`.
pub fn reduce_mod_sqrt3(x: &QuadInt3) -> F3 {
    F3::from_bigint(&x.a)
}

/// Decimal-string (de)serialisation for big integers.
pub mod decimal {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }

    pub fn strings(xs: &[BigInt]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(val_p(&Rat::zero(), 3), Val::Infinity);
        assert_eq!(val_p(&rat(432000, 691), 13), Val::int(0));
        assert_eq!(val_p(&rat_int(BigInt::from(3).pow(2420)), 3), Val::int(2420));
        assert_eq!(val_p(&rat(5, 12), 2), Val::int(-2));
    }

    #[test]
    fn quad_valuation_examples() {
        assert_eq!(val_quad3(&QuadInt3::sqrt3()), Val::ratio(1, 2));
        assert_eq!(val_quad3(&QuadInt3::new(9, 3)), Val::ratio(3, 2));
        assert_eq!(val_quad3(&QuadInt3::default()), Val::Infinity);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_mod_sqrt3(&QuadInt3::new(1, 4)), F3::ONE);
        assert_eq!(reduce_mod_sqrt3(&QuadInt3::from_int(10)), F3::ONE);
        assert_eq!(reduce_mod_sqrt3(&QuadInt3::new(3, 1)), F3::ZERO);
    }

    #[test]
    fn val_order_and_text() {
        assert!(Val::int(1000) < Val::Infinity);
        assert!(Val::ratio(1, 2) < Val::int(1));
        for s in ["inf", "7", "-3/2"] {
            assert_eq!(s.parse::<Val>().unwrap().to_string(), s);
        }
        let json = serde_json::to_string(&vec![Val::ratio(3, 2), Val::Infinity]).unwrap();
        assert_eq!(json, r#"["3/2","inf"]"#);
    }

    #[test]
    fn sqrt3_division() {
        let x = QuadInt3::new(9, 3);
        assert_eq!(x.div_sqrt3_pow(2), Some(QuadInt3::new(3, 1)));
        assert_eq!(x.div_sqrt3_pow(3), Some(QuadInt3::new(1, 1)));
        assert_eq!(x.div_sqrt3_pow(4), None);
        assert_eq!(&QuadInt3::sqrt3_pow(3) * &QuadInt3::sqrt3(), QuadInt3::from_int(9));
    }

    fn q3() -> impl Strategy<Value = QuadInt3> {
        (-1000i64..1000, -1000i64..1000).prop_map(|(a, b)| QuadInt3::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn quad_ring_axioms(x in q3(), y in q3(), z in q3()) {
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &x.conj(), QuadInt3::from_int(x.norm()));
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
        }

        #[test]
        fn reduction_is_homomorphism(x in q3(), y in q3()) {
            prop_assert_eq!(reduce_mod_sqrt3(&(&x * &y)), reduce_mod_sqrt3(&x) * reduce_mod_sqrt3(&y));
            prop_assert_eq!(reduce_mod_sqrt3(&(&x + &y)), reduce_mod_sqrt3(&x) + reduce_mod_sqrt3(&y));
            prop_assert_eq!(reduce_mod_sqrt3(&QuadInt3::from_int(1)), F3::ONE);
        }

        #[test]
        fn quad_valuation_multiplicative(x in q3(), y in q3()) {
            prop_assert_eq!(val_quad3(&(&x * &y)), val_quad3(&x) + val_quad3(&y));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn valuation_is_ultrametric(
            an in -100_000i64..100_000, ad in 1i64..5000,
            bn in -100_000i64..100_000, bd in 1i64..5000,
            p in prop::sample::select(vec![2u64, 3, 5, 7, 13]),
        ) {
            let a = rat(an, ad);
            let b = rat(bn, bd);
            let (va, vb) = (val_p(&a, p), val_p(&b, p));
            let vs = val_p(&(&a + &b), p);
            prop_assert!(vs >= va.clone().min(vb.clone()));
            if va != vb {
                prop_assert_eq!(vs, va.clone().min(vb.clone()));
            }
            prop_assert_eq!(val_p(&(&a * &b), p), va + vb);
        }
    }
}
