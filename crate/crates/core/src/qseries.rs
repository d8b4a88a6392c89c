//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] is known modulo `q^precision`. Every operation computes the
//! precision its result is actually determined to, so coefficients are never
//! reported beyond what the inputs justify.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat_int, rat_to_string, Rat};
use crate::error::{Error, Result};
use crate::zs;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    lowest: i64,
    coeffs: Vec<Rat>,
    precision: i64,
}

impl QSeries {
    /// Series `Σ coeffs[i] q^{lowest+i} + O(q^precision)`; `coeffs` is padded
    /// with zeros or truncated to fit.
    pub fn new(lowest: i64, mut coeffs: Vec<Rat>, precision: i64) -> Self {
        let lowest = lowest.min(precision);
        coeffs.resize((precision - lowest) as usize, Rat::zero());
        QSeries { lowest, coeffs, precision }
    }

    pub fn from_ints(lowest: i64, coeffs: &[BigInt], precision: i64) -> Self {
        Self::new(lowest, coeffs.iter().cloned().map(Rat::from_integer).collect(), precision)
    }

    pub fn from_i64s(lowest: i64, coeffs: &[i64], precision: i64) -> Self {
        Self::new(lowest, coeffs.iter().map(|&c| rat_int(c)).collect(), precision)
    }

    pub fn zero(precision: i64) -> Self {
        Self::new(precision, Vec::new(), precision)
    }

    pub fn one(precision: i64) -> Self {
        Self::monomial(0, Rat::one(), precision)
    }

    /// `c·q^e + O(q^precision)`.
    pub fn monomial(e: i64, c: Rat, precision: i64) -> Self {
        if e >= precision {
            return Self::zero(precision);
        }
        Self::new(e, vec![c], precision)
    }

    /// `∏_s ∏_{n≥1} (1 − q^{sn})^{e_s} + O(q^precision)`.
    pub fn eta_quotient(pairs: &[(u64, i64)], precision: i64) -> Self {
        let n = precision.max(0) as usize;
        Self::from_ints(0, &zs::eta_product(pairs, n), precision)
    }

    pub fn lowest_exponent(&self) -> i64 {
        self.lowest
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Coefficients of `q^lowest, …, q^{precision−1}`.
    pub fn coefficients(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `q^e`, or `None` if `e` is beyond the precision.
    pub fn get(&self, e: i64) -> Option<Rat> {
        if e >= self.precision {
            None
        } else if e < self.lowest {
            Some(Rat::zero())
        } else {
            Some(self.coeffs[(e - self.lowest) as usize].clone())
        }
    }

    /// Coefficient of `q^e`.
    ///
    /// # Panics
    /// If `e ≥ precision`.
    pub fn coeff(&self, e: i64) -> Rat {
        self.get(e)
            .unwrap_or_else(|| panic!("coefficient q^{e} requested beyond precision {}", self.precision))
    }

    /// Exponent of the first nonzero coefficient; `None` if the series is zero
    /// to its precision.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| self.lowest + i as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    fn val_or_prec(&self) -> i64 {
        self.valuation().unwrap_or(self.precision)
    }

    pub fn truncate(&self, precision: i64) -> Self {
        let precision = precision.min(self.precision);
        Self::new(self.lowest, self.coeffs.clone(), precision)
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        QSeries { lowest: self.lowest + k, coeffs: self.coeffs.clone(), precision: self.precision + k }
    }

    pub fn scalar_mul(&self, c: &Rat) -> Self {
        QSeries {
            lowest: self.lowest,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            precision: self.precision,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients from `q^lowest` on, if all are integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    /// Equality of all coefficients below the smaller of the two precisions.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }

    /// First exponent below the shared precision where the series differ.
    pub fn first_difference(&self, other: &Self) -> Option<i64> {
        let p = self.precision.min(other.precision);
        let lo = self.lowest.min(other.lowest);
        (lo..p).find(|&e| self.coeff(e) != other.coeff(e))
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        let precision = self.precision.min(other.precision);
        let lowest = self.lowest.min(other.lowest).min(precision);
        let coeffs = (lowest..precision)
            .map(|e| {
                let a = self.coeff(e);
                let b = other.coeff(e);
                if sign {
                    a + b
                } else {
                    a - b
                }
            })
            .collect();
        QSeries { lowest, coeffs, precision }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let (vf, vg) = (self.val_or_prec(), other.val_or_prec());
        let precision = (self.precision + vg).min(other.precision + vf);
        let lowest = (vf + vg).min(precision);
        let n = (precision - lowest) as usize;
        if self.is_zero() || other.is_zero() {
            return Self::zero(precision);
        }
        let a = &self.coeffs[(vf - self.lowest) as usize..];
        let b = &other.coeffs[(vg - other.lowest) as usize..];
        let coeffs = if self.is_integral() && other.is_integral() {
            let ai: Vec<BigInt> = a.iter().take(n).map(|c| c.to_integer()).collect();
            let bi: Vec<BigInt> = b.iter().take(n).map(|c| c.to_integer()).collect();
            zs::mul(&ai, &bi, n).into_iter().map(Rat::from_integer).collect()
        } else {
            let mut out = vec![Rat::zero(); n];
            for (i, ai) in a.iter().enumerate().take(n) {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate().take(n - i) {
                    if !bj.is_zero() {
                        out[i + j] += ai * bj;
                    }
                }
            }
            out
        };
        QSeries { lowest, coeffs, precision }
    }

    /// Splits a nonzero series as `c·q^v·u` with `u = 1 + O(q)`; `u` is
    /// returned as its coefficient list of length `precision − v`.
    fn unit_part(&self) -> Result<(i64, Rat, Vec<Rat>)> {
        let v = self.valuation().ok_or(Error::ZeroSeries)?;
        let c = self.coeff(v);
        let inv = c.recip();
        let u = self.coeffs[(v - self.lowest) as usize..].iter().map(|x| x * &inv).collect();
        Ok((v, c, u))
    }

    /// `u^α` for `u = 1 + O(q)` by Miller's recurrence
    /// `g_m = (1/m) Σ_{i=1}^{m} ((α+1)i − m) u_i g_{m−i}`.
    fn unit_pow(u: &[Rat], alpha: &Rat) -> Vec<Rat> {
        let n = u.len();
        if n == 0 {
            return Vec::new();
        }
        if alpha.is_integer() && u.iter().all(|c| c.is_integer()) {
            if let Ok(e) = i64::try_from(alpha.to_integer()) {
                let ui: Vec<BigInt> = u.iter().map(|c| c.to_integer()).collect();
                return zs::pow_unit(&ui, e, n).into_iter().map(Rat::from_integer).collect();
            }
        }
        let a1 = alpha + Rat::one();
        let mut g = vec![Rat::zero(); n];
        g[0] = Rat::one();
        for m in 1..n {
            let mut s = Rat::zero();
            for i in 1..=m {
                if u[i].is_zero() {
                    continue;
                }
                let w = &a1 * rat_int(i as i64) - rat_int(m as i64);
                if !w.is_zero() {
                    s += w * &u[i] * &g[m - i];
                }
            }
            g[m] = s / rat_int(m as i64);
        }
        g
    }

    /// Multiplicative inverse; the result has precision `P − 2v`.
    pub fn inv(&self) -> Result<Self> {
        let (v, c, u) = self.unit_part()?;
        let g = Self::unit_pow(&u, &-Rat::one());
        let rel = g.len() as i64;
        Ok(Self::new(-v, g, -v + rel).scalar_mul(&c.recip()))
    }

    /// Integer power (negative exponents go through [`QSeries::inv`]).
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let (v, c, u) = self.unit_part()?;
        let g = Self::unit_pow(&u, &rat_int(k));
        let rel = g.len() as i64;
        let ck = Rat::new(c.numer().pow(k as u32), c.denom().pow(k as u32));
        Ok(Self::new(k * v, g, k * v + rel).scalar_mul(&ck))
    }

    /// The `n`-th root with principal rational leading coefficient.
    pub fn nth_root(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("root of order 0".into()));
        }
        let (v, c, u) = self.unit_part()?;
        if v.rem_euclid(n as i64) != 0 {
            return Err(Error::ExponentNotDivisible { lowest: v, n });
        }
        let root = |x: &BigInt| -> Option<BigInt> {
            if x.is_negative() && n.is_multiple_of(2) {
                return None;
            }
            let r = x.abs().nth_root(n as u32);
            (r.pow(n as u32) == x.abs()).then(|| if x.is_negative() { -r } else { r })
        };
        let (Some(rn), Some(rd)) = (root(c.numer()), root(c.denom())) else {
            return Err(Error::NotAPerfectPower(rat_to_string(&c)));
        };
        let g = Self::unit_pow(&u, &Rat::new(BigInt::one(), BigInt::from(n)));
        let lowest = v / n as i64;
        let rel = g.len() as i64;
        Ok(Self::new(lowest, g, lowest + rel).scalar_mul(&Rat::new(rn, rd)))
    }

    /// `f(q) ↦ f(q^p)`.
    pub fn v_substitute(&self, p: u64) -> Self {
        let p = p as i64;
        let mut coeffs = vec![Rat::zero(); ((self.precision - self.lowest) * p) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * p as usize] = c.clone();
        }
        QSeries { lowest: self.lowest * p, coeffs, precision: self.precision * p }
    }

    /// `Σ a_n q^n ↦ Σ a_{pn} q^n`, with precision `⌊P/p⌋`.
    pub fn u_extract(&self, p: u64) -> Result<Self> {
        let p = p as i64;
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.lowest + i as i64;
            if e >= 0 {
                break;
            }
            if !c.is_zero() && e.rem_euclid(p) != 0 {
                return Err(Error::LaurentNotDivisible(e));
            }
        }
        let precision = self.precision.div_euclid(p);
        let lowest = (self.lowest + p - 1).div_euclid(p).min(precision);
        let coeffs = (lowest..precision).map(|n| self.coeff(n * p)).collect();
        Ok(QSeries { lowest, coeffs, precision })
    }

    /// Evaluates `Σ c_i x^i` at this series by Horner's rule.
    pub fn eval_poly(coeffs: &[Rat], x: &Self) -> Self {
        let prec = x.precision.max(0) + x.val_or_prec().abs() * coeffs.len() as i64;
        let mut acc = Self::zero(prec);
        for c in coeffs.iter().rev() {
            acc = &(&acc * x) + &Self::monomial(0, c.clone(), prec);
        }
        acc
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, o: &QSeries) -> QSeries {
        self.add_impl(o, true)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, o: &QSeries) -> QSeries {
        self.add_impl(o, false)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, o: &QSeries) -> QSeries {
        self.mul_impl(o)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scalar_mul(&-Rat::one())
    }
}

#[derive(Serialize, Deserialize)]
struct QSeriesJson {
    lowest_exponent: i64,
    precision: i64,
    coefficients: Vec<String>,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesJson {
            lowest_exponent: self.lowest,
            precision: self.precision,
            coefficients: self.coeffs.iter().map(rat_to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = QSeriesJson::deserialize(d)?;
        let coeffs = j
            .coefficients
            .iter()
            .map(|s| s.parse::<Rat>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(QSeries::new(j.lowest_exponent, coeffs, j.precision))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn delta(prec: i64) -> QSeries {
        QSeries::eta_quotient(&[(1, 24)], prec - 1).shift(1)
    }

    /// Brute-force `∏_{n≥1}(1 − q^{sn})^e` for `e ≥ 0` by repeated multiplication.
    fn brute_eta(s: usize, e: usize, n: usize) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); n];
        acc[0] = BigInt::one();
        for k in 1.. {
            if s * k >= n {
                break;
            }
            for _ in 0..e {
                for i in (s * k..n).rev() {
                    let t = acc[i - s * k].clone();
                    acc[i] -= t;
                }
            }
        }
        acc
    }

    #[test]
    fn geometric_inverse() {
        let f = QSeries::from_i64s(0, &[1, -1], 20);
        let g = QSeries::from_i64s(0, &[1; 20], 20);
        assert_eq!(&f * &g, QSeries::one(20));
        let inv = QSeries::from_i64s(0, &[1, 1], 10).inv().unwrap();
        let alt: Vec<i64> = (0..10).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        assert_eq!(inv, QSeries::from_i64s(0, &alt, 10));
        assert_eq!(QSeries::one(5).inv().unwrap(), QSeries::one(5));
    }

    #[test]
    fn laurent_bookkeeping() {
        let qinv = QSeries::monomial(-1, Rat::one(), 10);
        let q = QSeries::monomial(1, Rat::one(), 10);
        let p = &qinv * &q;
        assert_eq!(p.valuation(), Some(0));
        assert_eq!(p.coeff(0), Rat::one());
        assert!((1..p.precision()).all(|e| p.coeff(e).is_zero()));
    }

    #[test]
    fn delta_inverse_roundtrip() {
        let d = delta(60);
        let prod = &d * &d.inv().unwrap();
        assert!(prod.precision() >= 50);
        assert!(prod.eq_to_precision(&QSeries::one(50)));
    }

    #[test]
    fn inverse_eta_integral() {
        let f = QSeries::eta_quotient(&[(1, 24)], 30);
        let inv = f.inv().unwrap();
        assert_eq!(inv.precision(), 30);
        assert!(inv.is_integral());
        // Independent oracle: (∏(1−q^n)^{-1})^{24} via partition numbers.
        let n = 30;
        let mut part = vec![BigInt::zero(); n];
        part[0] = BigInt::one();
        for k in 1..n {
            for i in k..n {
                let t = part[i - k].clone();
                part[i] += t;
            }
        }
        let mut acc = vec![BigInt::zero(); n];
        acc[0] = BigInt::one();
        for _ in 0..24 {
            acc = zs::mul(&acc, &part, n);
        }
        assert_eq!(inv.to_integers().unwrap(), acc);
    }

    #[test]
    fn roots() {
        let f = QSeries::from_i64s(0, &[1, 2, 1], 10);
        assert_eq!(f.nth_root(2).unwrap(), QSeries::from_i64s(0, &[1, 1], 10));
        let g = QSeries::from_i64s(2, &[1, 2, 1], 12);
        assert_eq!(g.nth_root(2).unwrap(), QSeries::from_i64s(1, &[1, 1], 11));
        assert!(matches!(
            QSeries::from_i64s(1, &[1], 5).nth_root(2),
            Err(Error::ExponentNotDivisible { .. })
        ));
        assert!(matches!(
            QSeries::from_i64s(0, &[2, 1], 5).nth_root(2),
            Err(Error::NotAPerfectPower(_))
        ));
        assert_eq!(
            QSeries::from_i64s(0, &[-8], 4).nth_root(3).unwrap().coeff(0),
            rat_int(-2)
        );
        assert!(QSeries::zero(5).nth_root(2).is_err());
    }

    #[test]
    fn root_of_delta_quotient() {
        let d = delta(45);
        let r = (&d.v_substitute(3) * &d.inv().unwrap()).nth_root(2).unwrap();
        assert!(r.precision() >= 40);
        assert_eq!(r.valuation(), Some(1));
        let n = (r.precision() - 1) as usize;
        let a = brute_eta(3, 12, n);
        // ∏(1−q^n)^{-12} by inverting the brute-force ∏(1−q^n)^{12}.
        let b = QSeries::from_ints(0, &brute_eta(1, 12, n), n as i64).inv().unwrap();
        let expect = QSeries::from_ints(0, &a, n as i64).mul_impl(&b).shift(1);
        assert!(r.is_integral());
        assert!(r.eq_to_precision(&expect));
    }

    #[test]
    fn substitution_and_extraction() {
        let q = QSeries::monomial(1, Rat::one(), 10);
        assert_eq!(q.v_substitute(3), QSeries::monomial(3, Rat::one(), 30));
        assert_eq!(QSeries::one(7).v_substitute(5), QSeries::one(35));
        let d3 = delta(20).v_substitute(3);
        assert_eq!(d3.valuation(), Some(3));
        assert_eq!(QSeries::monomial(2, Rat::one(), 10).u_extract(2).unwrap(), QSeries::monomial(1, Rat::one(), 5));
        let u = delta(20).u_extract(2).unwrap();
        assert_eq!(u.coeff(1), rat_int(-24));
        assert_eq!(u.coeff(2), rat_int(-1472));
        assert_eq!(u.precision(), 10);
        assert!(QSeries::monomial(-1, Rat::one(), 4).u_extract(2).is_err());
        assert!(QSeries::monomial(-2, Rat::one(), 4).u_extract(2).is_ok());
    }

    #[test]
    fn eta_examples() {
        assert_eq!(QSeries::eta_quotient(&[], 10), QSeries::one(10));
        let d = delta(8);
        let tau = [1, -24, 252, -1472, 4830, -6048, -16744];
        assert_eq!(d, QSeries::from_i64s(1, &tau, 8));
        let d2 = QSeries::eta_quotient(&[(2, 24), (1, -24)], 5).shift(1);
        assert_eq!(d2.coeff(1), rat_int(1));
        assert_eq!(d2.coeff(2), rat_int(24));
        assert_eq!(d2.coeff(3), rat_int(300));
    }

    #[test]
    fn hauptmodul_generators_integral() {
        for p in crate::SUPPORTED_PRIMES {
            let e = (24 / (p - 1)) as i64;
            let d = QSeries::eta_quotient(&[(p, e), (1, -e)], 199).shift(1);
            assert_eq!(d.precision(), 200);
            assert!(d.is_integral());
            assert_eq!(d.valuation(), Some(1));
            assert_eq!(d.coeff(1), Rat::one());
        }
    }

    #[test]
    fn rational_coefficients_and_json() {
        let f = QSeries::new(-1, vec![rat(1, 2), rat(-3, 4)], 3);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"lowest_exponent":-1,"precision":3,"coefficients":["1/2","-3/4","0","0"]}"#);
        let back: QSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    fn series() -> impl Strategy<Value = QSeries> {
        (prop::collection::vec(-20i64..20, 1..25), 1i64..30, -3i64..4).prop_map(|(c, den, lo)| {
            let coeffs = c.iter().map(|&x| rat(x, den)).collect();
            let len = c.len() as i64;
            QSeries::new(lo, coeffs, lo + len)
        })
    }

    proptest! {
        #[test]
        fn u_after_v_is_identity(f in series(), p in prop::sample::select(vec![2u64, 3, 5, 7, 13])) {
            let g = f.v_substitute(p).u_extract(p).unwrap();
            prop_assert_eq!(g.precision(), f.precision());
            prop_assert!(g.eq_to_precision(&f));
        }

        #[test]
        fn roots_invert_powers(
            c in prop::collection::vec(-9i64..9, 1..20),
            n in 1u64..6,
            lead in 1i64..4,
            v in 0i64..3,
        ) {
            let mut coeffs = vec![rat_int(lead.pow(n as u32))];
            coeffs.extend(c.iter().map(|&x| rat_int(x)));
            let len = coeffs.len() as i64;
            let f = QSeries::new(v * n as i64, coeffs, v * n as i64 + len);
            let r = f.nth_root(n).unwrap();
            let back = r.pow(n as i64).unwrap();
            prop_assert_eq!(back.precision(), f.precision());
            prop_assert!(back.eq_to_precision(&f));
        }

        #[test]
        fn inverse_roundtrip(f in series()) {
            prop_assume!(!f.is_zero());
            let prod = &f * &f.inv().unwrap();
            let v = f.valuation().unwrap();
            prop_assert_eq!(prod.precision(), f.precision() - v);
            prop_assert!(prod.eq_to_precision(&QSeries::one(prod.precision())));
        }
    }
}
