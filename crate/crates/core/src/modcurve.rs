//! Modular forms of level 1 and `Γ_0(p)` as `q`-expansions: `Δ`, `E_k`, `j`,
//! the hauptmodul `d_p`, the polynomial `H_p` with `d_p·j = H_p(d_p)`, and the
//! bivariate relation `I_p(d_p(q^p), 1/d_p(q)) = 0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, rat_int, rat_to_string, val_int, val_p, Rat, Val};
use crate::charseries::{newton_polygon, NewtonPolygon};
use crate::error::{Error, Result};
use crate::modp::{self, Crt, Modulus};
use crate::qseries::QSeries;
use crate::{check_prime, zs};

/// Bernoulli number `B_n` (with `B_1 = −1/2`).
pub fn bernoulli(n: usize) -> Rat {
    let mut b = vec![Rat::one()];
    for m in 1..=n {
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0
        let mut s = Rat::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            s += Rat::from_integer(binom.clone()) * bk;
            binom = binom * (m + 1 - k) / (k + 1);
        }
        b.push(-s / rat_int(m as i64 + 1));
    }
    b.pop().unwrap()
}

/// `σ_{k}(n)` for `0 ≤ n < len` (with `σ_k(0) = 0`).
fn divisor_sums(k: u32, len: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); len];
    for d in 1..len {
        let dk = BigInt::from(d).pow(k);
        for n in (d..len).step_by(d) {
            s[n] += &dk;
        }
    }
    s
}

/// Normalised Eisenstein series `E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) q^n`.
pub fn eisenstein(k: i64, precision: i64) -> Result<QSeries> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::BadEisensteinWeight(k));
    }
    let factor = -rat_int(2 * k) / bernoulli(k as usize);
    let sig = divisor_sums(k as u32 - 1, precision.max(0) as usize);
    let coeffs =
        sig.iter().enumerate().map(|(n, s)| if n == 0 { Rat::one() } else { &factor * Rat::from_integer(s.clone()) }).collect();
    Ok(QSeries::new(0, coeffs, precision))
}

/// `Δ = q ∏ (1 − q^n)^24`.
pub fn delta(precision: i64) -> QSeries {
    QSeries::eta_quotient(&[(1, 24)], precision - 1).shift(1)
}

/// `j = E_4³/Δ = q⁻¹ + 744 + …`.
pub fn j_invariant(precision: i64) -> QSeries {
    let e4 = eisenstein(4, precision + 2).expect("weight 4");
    let e43 = &(&e4 * &e4) * &e4;
    let dinv = delta(precision + 2).inv().expect("Δ is nonzero");
    (&e43 * &dinv).truncate(precision)
}

/// Exponent `24/(p − 1)` in the eta quotient for `d_p`.
pub fn eta_exponent(p: u64) -> i64 {
    24 / (p as i64 - 1)
}

/// The hauptmodul `d_p = q ∏ ((1 − q^{pn})/(1 − q^n))^{24/(p−1)}`.
pub fn hauptmodul(p: u64, precision: i64) -> Result<QSeries> {
    check_prime(p)?;
    let e = eta_exponent(p);
    Ok(QSeries::eta_quotient(&[(p, e), (1, -e)], precision - 1).shift(1))
}

/// Integer coefficients of `d_p` as a vector indexed by exponent, length `n`.
pub fn hauptmodul_ints(p: u64, n: usize) -> Vec<BigInt> {
    let e = eta_exponent(p);
    let mut d = vec![BigInt::zero()];
    d.extend(zs::eta_product(&[(p, e), (1, -e)], n.saturating_sub(1)));
    d.truncate(n);
    d
}

pub fn t_p(p: u64) -> i64 {
    match p {
        2 => 4,
        3 => 3,
        _ => 1,
    }
}

pub fn c_p(p: u64) -> Rat {
    match p {
        3 | 7 => rat_int(1728),
        13 => rat(432000, 691),
        _ => Rat::zero(),
    }
}

/// `e = 12/(p² − 1)`.
pub fn e_p(p: u64) -> Rat {
    rat(12, (p * p - 1) as i64)
}

/// `p^{12/(1−p)}`, which is rational for the supported primes.
pub fn atkin_lehner_constant(p: u64) -> Rat {
    let k = 12 / (p - 1) as u32;
    Rat::new(BigInt::one(), BigInt::from(p).pow(k))
}

/// Standard forms attached to a prime, computed once to a fixed precision.
#[derive(Clone, Debug)]
pub struct FormLibrary {
    pub p: u64,
    pub precision: i64,
    pub delta: QSeries,
    pub e4: QSeries,
    pub e6: QSeries,
    /// `E_{t_p(p−1)}`.
    pub e_tp: QSeries,
    pub j: QSeries,
    pub d: QSeries,
    pub t_p: i64,
    pub c_p: Rat,
    pub e: Rat,
}

impl FormLibrary {
    pub fn new(p: u64, precision: i64) -> Result<Self> {
        check_prime(p)?;
        let t = t_p(p);
        Ok(FormLibrary {
            p,
            precision,
            delta: delta(precision),
            e4: eisenstein(4, precision)?,
            e6: eisenstein(6, precision)?,
            e_tp: eisenstein(t * (p as i64 - 1), precision)?,
            j: j_invariant(precision),
            d: hauptmodul(p, precision)?,
            t_p: t,
            c_p: c_p(p),
            e: e_p(p),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub exponent: i64,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoweisWitness {
    pub p: u64,
    pub precision: i64,
    pub holds: bool,
    pub mismatch: Option<Mismatch>,
}

/// Checks `E_{t_p(p−1)}^{12/(t_p(p−1))} = (j − c_p)·Δ` to the given precision.
pub fn verify_poweis(p: u64, precision: i64) -> Result<PoweisWitness> {
    let lib = FormLibrary::new(p, precision + 2)?;
    let k = lib.t_p * (p as i64 - 1);
    let lhs = lib.e_tp.pow(12 / k)?.truncate(precision);
    let jc = &lib.j - &QSeries::monomial(0, lib.c_p.clone(), lib.j.precision());
    let rhs = (&jc * &lib.delta).truncate(precision);
    let mismatch = lhs.first_difference(&rhs).map(|e| Mismatch {
        exponent: e,
        lhs: rat_to_string(&lhs.coeff(e)),
        rhs: rat_to_string(&rhs.coeff(e)),
    });
    let precision = lhs.precision().min(rhs.precision());
    Ok(PoweisWitness { p, precision, holds: mismatch.is_none(), mismatch })
}

/// `H_p` with `d_p·j = H_p(d_p)`: degree `p + 1`, constant term 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPoly {
    pub p: u64,
    #[serde(with = "strings")]
    pub coeffs: Vec<BigInt>,
}

mod strings {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::arith::decimal::strings(xs).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
    }
}

impl HPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Solves `d_p·j = Σ h_i d_p^i` by triangular back-substitution and checks the
/// residual to the full precision.
pub fn solve_hauptmodul_poly(p: u64, precision: i64) -> Result<HPoly> {
    check_prime(p)?;
    let deg = p as usize + 1;
    if precision < 3 * (p as i64 + 2) {
        return Err(Error::InvalidArgument(format!("precision {precision} below 3(p+2)")));
    }
    let d = hauptmodul(p, precision + 1)?;
    let dj = (&d * &j_invariant(precision + 1)).truncate(precision);
    let mut rem = dj.clone();
    let mut dpow = QSeries::one(precision);
    let mut coeffs = Vec::with_capacity(deg + 1);
    for i in 0..=deg {
        let h = rem.coeff(i as i64);
        if !h.is_integer() {
            return Err(Error::NonIntegral { index: i.to_string(), value: rat_to_string(&h) });
        }
        rem = &rem - &dpow.scalar_mul(&h);
        coeffs.push(h.to_integer());
        dpow = (&dpow * &d).truncate(precision);
    }
    if let Some(e) = rem.valuation() {
        return Err(Error::NonzeroResidual(e));
    }
    Ok(HPoly { p, coeffs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewhookReport {
    pub p: u64,
    pub polygon: NewtonPolygon,
    pub single_side: bool,
    pub slope: Option<Val>,
    pub expected_slope: Val,
}

/// Newton polygon of `H_p(d) − c_p·d` as a polynomial in `d`; expected to be a
/// single side of slope `e·p`.
pub fn check_newhook(h: &HPoly) -> NewhookReport {
    let p = h.p;
    let pts: Vec<(u64, Val)> = h
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut c = Rat::from_integer(c.clone());
            if i == 1 {
                c -= c_p(p);
            }
            (i as u64, val_p(&c, p))
        })
        .collect();
    let polygon = newton_polygon(&pts);
    let single_side = polygon.sides.len() == 1 && polygon.sides[0].start == 0 && polygon.sides[0].end == p + 1;
    let slope = single_side.then(|| polygon.sides[0].slope.clone());
    NewhookReport { p, polygon, single_side, slope, expected_slope: Val::Finite(e_p(p) * rat_int(p as i64)) }
}

/// A finitely supported polynomial `Σ c_{ij} x^i y^j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BiPoly<T> {
    terms: BTreeMap<(u32, u32), T>,
}

impl<T: Clone + Zero> BiPoly<T> {
    pub fn new() -> Self {
        BiPoly { terms: BTreeMap::new() }
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((u32, u32), T)>) -> Self {
        let mut p = Self::new();
        for ((i, j), c) in it {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn coeff(&self, i: u32, j: u32) -> T {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(T::zero)
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: T) {
        let e = self.terms.entry((i, j)).or_insert_with(T::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// Nonzero terms in increasing `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &T)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> BiPoly<U> {
        BiPoly::from_terms(self.terms().map(|(i, j, c)| ((i, j), f(c))))
    }

    pub fn transpose(&self) -> Self {
        Self::from_terms(self.terms().map(|(i, j, c)| ((j, i), c.clone())))
    }
}

impl<T: Clone + Zero + Mul<Output = T>> BiPoly<T> {
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                out.add_term(i + k, j + l, a.clone() * b.clone());
            }
        }
        out
    }
}

impl<T: Clone + Zero> Add for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn add(self, o: &BiPoly<T>) -> BiPoly<T> {
        let mut out = self.clone();
        for (i, j, c) in o.terms() {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub i: u32,
    pub j: u32,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiPolyJson {
    pub terms: Vec<TermJson>,
}

impl<T: Clone + Zero + std::fmt::Display> BiPoly<T> {
    pub fn to_json(&self) -> BiPolyJson {
        BiPolyJson { terms: self.terms().map(|(i, j, c)| TermJson { i, j, coeff: c.to_string() }).collect() }
    }
}

/// `I_p` from `H_p` via the Atkin–Lehner involution `d ↦ c/d`, `c = p^{12/(1−p)}`.
///
/// With `X = d_p(q^p)` and `D = d_p(q)`, `j(q^p)` equals both `H_p(X)/X` and
/// `D·H_p(c/D)/c`, so `Φ = X·D^{p+1}·H_p(c/D) − c·D^p·H_p(X)` vanishes. `Φ`
/// is divisible by `XD − c`; the quotient, rewritten in `y = 1/D` and
/// normalised to constant term 1, is `I_p`.
pub fn modular_equation_ip(p: u64) -> Result<BiPoly<BigInt>> {
    check_prime(p)?;
    let h = solve_hauptmodul_poly(p, 4 * (p as i64 + 2))?;
    let c = atkin_lehner_constant(p);
    let n = p as u32;
    // Φ(X, D) keyed by (deg_X, deg_D).
    let mut phi: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
    let mut add = |k: (u32, u32), v: Rat| {
        let e = phi.entry(k).or_insert_with(Rat::zero);
        *e += v;
    };
    let mut ci = Rat::one();
    for (i, hi) in h.coeffs.iter().enumerate() {
        let hi = Rat::from_integer(hi.clone());
        add((1, n + 1 - i as u32), &hi * &ci);
        add((i as u32, n), -(&c * &hi));
        ci *= &c;
    }
    phi.retain(|_, v| !v.is_zero());
    // Exact division by XD − c, eliminating the lexicographically largest term.
    let mut quot: BTreeMap<(u32, u32), Rat> = BTreeMap::new();
    while let Some((&(a, b), v)) = phi.iter().next_back() {
        let v = v.clone();
        if a == 0 || b == 0 {
            return Err(Error::Reconstruction(format!("XD − c does not divide: leftover X^{a}D^{b}")));
        }
        phi.remove(&(a, b));
        let e = phi.entry((a - 1, b - 1)).or_insert_with(Rat::zero);
        *e += &v * &c;
        if e.is_zero() {
            phi.remove(&(a - 1, b - 1));
        }
        quot.insert((a - 1, b - 1), v);
    }
    let norm = quot
        .get(&(0, n))
        .cloned()
        .ok_or_else(|| Error::Reconstruction("no constant term".into()))?;
    let mut out = BiPoly::new();
    for ((a, b), v) in quot {
        if b > n {
            return Err(Error::Reconstruction(format!("D-degree {b} exceeds p")));
        }
        let v = v / &norm;
        if !v.is_integer() {
            return Err(Error::NonIntegral { index: format!("({a},{})", n - b), value: rat_to_string(&v) });
        }
        out.add_term(a, n - b, v.to_integer());
    }
    certify_ip(p, &out)?;
    Ok(out)
}

/// Working precision sufficient to certify a bidegree-`(p, p)` relation:
/// such a relation that is not a multiple of `I_p` is a function on
/// `X_0(p²)` with at most `2p²` poles, so its expansion cannot vanish past
/// `q^{2p² + p}` after clearing the `d_p^p` denominator.
pub fn ip_certificate_precision(p: u64) -> usize {
    (2 * p * p + 2 * p + 16) as usize
}

/// First exponent where `d_p^p · I(d_p(q^p), 1/d_p(q))` fails to vanish, or
/// `None` if it vanishes below `q^precision`.
pub fn ip_identity_residual(p: u64, ip: &BiPoly<BigInt>, precision: usize) -> Option<i64> {
    let n = p as usize;
    let d = hauptmodul_ints(p, precision);
    let mut dpow = vec![{
        let mut one = vec![BigInt::zero(); precision];
        one[0] = BigInt::one();
        one
    }];
    for k in 1..=n {
        dpow.push(zs::mul(&dpow[k - 1], &d, precision));
    }
    let xpow: Vec<Vec<BigInt>> = dpow.iter().map(|f| zs::spread(f, n, precision)).collect();
    let mut total = vec![BigInt::zero(); precision];
    for b in 0..=n {
        let mut a_b = vec![BigInt::zero(); precision];
        let mut any = false;
        for a in 0..=n {
            let c = ip.coeff(a as u32, b as u32);
            if c.is_zero() {
                continue;
            }
            any = true;
            for (t, x) in a_b.iter_mut().zip(&xpow[a]) {
                if !x.is_zero() {
                    *t += &c * x;
                }
            }
        }
        if any {
            for (t, x) in total.iter_mut().zip(zs::mul(&a_b, &dpow[n - b], precision)) {
                *t += x;
            }
        }
    }
    total.iter().position(|c| !c.is_zero()).map(|e| e as i64)
}

/// Certifies `I_p` via the vanishing of its `q`-expansion identity.
pub fn certify_ip(p: u64, ip: &BiPoly<BigInt>) -> Result<()> {
    match ip_identity_residual(p, ip, ip_certificate_precision(p)) {
        Some(e) => Err(Error::NonzeroResidual(e)),
        None => Ok(()),
    }
}

/// Finds `I_p` directly as the bidegree-`(p, p)` relation with constant term 1
/// between `d_p(q^p)` and `1/d_p(q)`, by solving the linear system on
/// `q`-expansion coefficients modulo several primes and lifting.
pub fn practical_ip_fit(p: u64) -> Result<BiPoly<BigInt>> {
    check_prime(p)?;
    let n = p as usize;
    let rows = ip_certificate_precision(p);
    let d = hauptmodul_ints(p, rows);
    let solve = |prime: u64| -> Result<Vec<u64>> {
        let m = Modulus::new(prime);
        let dm = modp::reduce_all(m, &d);
        let mulm = |a: &[u64], b: &[u64]| {
            let mut out = vec![0u64; rows];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate().take(rows - i) {
                    out[i + j] = m.add(out[i + j], m.mul(x, y));
                }
            }
            out
        };
        let mut dpow = vec![{
            let mut one = vec![0u64; rows];
            one[0] = 1;
            one
        }];
        for k in 1..=n {
            dpow.push(mulm(&dpow[k - 1], &dm));
        }
        let xpow: Vec<Vec<u64>> = dpow
            .iter()
            .map(|f| {
                let mut out = vec![0u64; rows];
                for (i, &c) in f.iter().enumerate().take(rows.div_ceil(n)) {
                    out[i * n] = c;
                }
                out
            })
            .collect();
        let cols = (n + 1) * (n + 1);
        let mut mat = vec![vec![0u64; cols]; rows];
        for a in 0..=n {
            for b in 0..=n {
                let col = mulm(&xpow[a], &dpow[n - b]);
                for (r, v) in col.into_iter().enumerate() {
                    mat[r][a * (n + 1) + b] = v;
                }
            }
        }
        let ker = modp::nullspace_mod(mat, cols, m);
        if ker.len() != 1 {
            return Err(Error::KernelDimension(ker.len()));
        }
        let v = &ker[0];
        if v[0] == 0 {
            return Err(Error::Reconstruction("constant term vanishes modulo a prime".into()));
        }
        let inv = m.inv(v[0]);
        Ok(v.iter().map(|&x| m.mul(x, inv)).collect())
    };
    let mut count = 2;
    while count <= 64 {
        let primes = modp::large_primes(count);
        let sols = primes.iter().map(|&q| solve(q)).collect::<Result<Vec<_>>>()?;
        let crt = Crt::new(primes);
        let mut ip = BiPoly::new();
        for a in 0..=n {
            for b in 0..=n {
                let idx = a * (n + 1) + b;
                let r: Vec<u64> = sols.iter().map(|s| s[idx]).collect();
                ip.add_term(a as u32, b as u32, crt.lift(&r));
            }
        }
        if certify_ip(p, &ip).is_ok() {
            return Ok(ip);
        }
        count *= 2;
    }
    Err(Error::Reconstruction("coefficients did not stabilise".into()))
}

/// Writes an integer as `m·p^k` with `p ∤ m`.
/// `c` written as `m·p^k` with `p ∤ m`.
pub fn factor_power(c: &BigInt, p: u64) -> String {
    let k = val_int(c, p).unwrap_or(0);
    let m = c / BigInt::from(p).pow(k as u32);
    match (m.is_one(), k) {
        (_, 0) => m.to_string(),
        (true, 1) => p.to_string(),
        (true, _) => format!("{p}^{k}"),
        (false, 1) => format!("{m}·{p}"),
        (false, _) => format!("{m}·{p}^{k}"),
    }
}

fn power(var: &str, k: u32) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    }
}

/// Renders `I_p` grouped by powers of `y`, with coefficients written as
/// `m·p^k`, e.g. `1 − (3^12x^3 + 4·3^8x^2 + 10·3^3x)y − … − xy^3`.
pub fn format_ip_text(p: u64, ip: &BiPoly<BigInt>) -> String {
    let mut out = String::new();
    for j in 0..=ip.degree_y() {
        let mut group: Vec<(u32, BigInt)> =
            ip.terms().filter(|t| t.1 == j).map(|(i, _, c)| (i, c.clone())).collect();
        if group.is_empty() {
            continue;
        }
        group.sort_by_key(|t| std::cmp::Reverse(t.0));
        let negate = group.iter().all(|(_, c)| c.is_negative());
        let body: Vec<String> = group
            .iter()
            .enumerate()
            .map(|(idx, (i, c))| {
                let c = if negate { -c } else { c.clone() };
                let mag = factor_power(&c.abs(), p);
                let mag = if mag == "1" && *i > 0 { String::new() } else { mag };
                let sign = match (idx, c.is_negative()) {
                    (0, true) => "−",
                    (0, false) => "",
                    (_, true) => " − ",
                    (_, false) => " + ",
                };
                format!("{sign}{mag}{}", power("x", *i))
            })
            .collect();
        let body = body.concat();
        let yp = power("y", j);
        let text = if group.len() > 1 && !yp.is_empty() { format!("({body}){yp}") } else { format!("{body}{yp}") };
        if out.is_empty() {
            let _ = write!(out, "{}{text}", if negate { "−" } else { "" });
        } else {
            let _ = write!(out, " {} {text}", if negate { "−" } else { "+" });
        }
    }
    format!("I_{p} = {out}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pw(b: i64, e: u32) -> BigInt {
        BigInt::from(b).pow(e)
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(6), rat(1, 42));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn eisenstein_values() {
        // Brute-force divisor sums.
        let sigma = |n: i64, k: u32| (1..=n).filter(|d| n % d == 0).map(|d| d.pow(k)).sum::<i64>();
        let e4 = eisenstein(4, 10).unwrap();
        for n in 1..10 {
            assert_eq!(e4.coeff(n), rat_int(240 * sigma(n, 3)));
        }
        assert_eq!(e4.coeff(2), rat_int(2160));
        assert_eq!(eisenstein(6, 3).unwrap().coeff(1), rat_int(-504));
        assert_eq!(eisenstein(12, 3).unwrap().coeff(1), rat(65520, 691));
        assert!(eisenstein(5, 3).is_err());
        assert!(eisenstein(2, 3).is_err());
    }

    #[test]
    fn j_values() {
        let j = j_invariant(20);
        assert_eq!(j.valuation(), Some(-1));
        assert_eq!(j.coeff(0), rat_int(744));
        assert_eq!(j.coeff(1), rat_int(196884));
        assert!(j.is_integral());
        let e4 = eisenstein(4, 20).unwrap();
        let jd = &j * &delta(21);
        assert!(jd.eq_to_precision(&(&(&e4 * &e4) * &e4)));
        assert_eq!(jd.precision(), 20);
    }

    #[test]
    fn hauptmodul_shape() {
        for p in crate::SUPPORTED_PRIMES {
            let d = hauptmodul(p, 300).unwrap();
            assert_eq!(d.precision(), 300);
            assert_eq!(d.valuation(), Some(1));
            assert_eq!(d.coeff(1), Rat::one());
            assert!(d.is_integral());
            assert_eq!(d.to_integers().unwrap()[..20], hauptmodul_ints(p, 21)[1..]);
        }
        assert!(hauptmodul(11, 10).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(e_p(13), rat(1, 14));
        assert_eq!(e_p(3), rat(3, 2));
        assert_eq!(atkin_lehner_constant(2), rat(1, 4096));
        assert_eq!(atkin_lehner_constant(13), rat(1, 13));
    }

    #[test]
    fn poweis_all_primes() {
        for p in crate::SUPPORTED_PRIMES {
            let w = verify_poweis(p, 40).unwrap();
            assert!(w.holds, "p = {p}: {:?}", w.mismatch);
            assert!(w.precision >= 38);
        }
    }

    #[test]
    fn hauptmodul_polynomials() {
        let expect: [(u64, &[i64]); 4] = [
            (2, &[1, 768, 196608, 16777216]),
            (3, &[1, 756, 196830, 19131876, 387420489]),
            (5, &[1, 750, 196875, 20312500, 615234375, 7324218750, 30517578125]),
            (7, &[1, 748, 196882, 20706224, 695893835, 10976181104, 90957030178, 387556041628, 678223072849]),
        ];
        for (p, h) in expect {
            assert_eq!(solve_hauptmodul_poly(p, 60).unwrap().coeffs, ints(h));
        }
        let h13 = solve_hauptmodul_poly(13, 60).unwrap();
        assert_eq!(h13.degree(), 14);
        assert_eq!(h13.coeffs[0], BigInt::one());
        assert_eq!(h13.coeffs[14], pw(13, 13));
        // H_2 = (1 + 2^8 d)^3
        assert_eq!(ints(&[1, 768, 196608, 16777216]), vec![pw(1, 0), 3 * pw(2, 8), 3 * pw(2, 16), pw(2, 24)]);
    }

    #[test]
    fn newhook_slopes() {
        for (p, slope) in [(2, rat_int(8)), (3, rat(9, 2)), (5, rat(5, 2)), (7, rat(7, 4)), (13, rat(13, 14))] {
            let r = check_newhook(&solve_hauptmodul_poly(p, 60).unwrap());
            assert!(r.single_side, "p = {p}: {:?}", r.polygon);
            assert_eq!(r.slope, Some(Val::Finite(slope.clone())));
            assert_eq!(r.expected_slope, Val::Finite(slope));
        }
    }

    fn i2() -> BiPoly<BigInt> {
        BiPoly::from_terms([
            ((0, 0), BigInt::one()),
            ((2, 1), -pw(2, 12)),
            ((1, 1), -(pw(2, 4) * 3i64)),
            ((1, 2), BigInt::from(-1)),
        ])
    }

    fn i3() -> BiPoly<BigInt> {
        BiPoly::from_terms([
            ((0, 0), BigInt::one()),
            ((3, 1), -pw(3, 12)),
            ((2, 1), -(pw(3, 8) * 4i64)),
            ((1, 1), -(pw(3, 3) * 10i64)),
            ((2, 2), -pw(3, 6)),
            ((1, 2), -(pw(3, 2) * 4i64)),
            ((1, 3), BigInt::from(-1)),
        ])
    }

    #[test]
    fn ip_small_primes_both_routes() {
        assert_eq!(modular_equation_ip(2).unwrap(), i2());
        assert_eq!(modular_equation_ip(3).unwrap(), i3());
        assert_eq!(practical_ip_fit(2).unwrap(), i2());
        assert_eq!(practical_ip_fit(3).unwrap(), i3());
    }

    #[test]
    fn ip_structure_and_routes_agree() {
        for p in [5u64, 7, 13] {
            let a = modular_equation_ip(p).unwrap();
            let b = practical_ip_fit(p).unwrap();
            assert_eq!(a, b, "p = {p}");
            let n = p as u32;
            assert_eq!(a.coeff(1, n), BigInt::from(-1));
            assert_eq!(a.coeff(n, 1), -pw(p as i64, 12));
            assert_eq!(a.coeff(0, 0), BigInt::one());
        }
        let i13 = modular_equation_ip(13).unwrap();
        assert_eq!(i13.coeff(1, 1), BigInt::from(-1165 * 13));
    }

    #[test]
    fn residual_detects_errors() {
        let mut bad = i3();
        bad.add_term(1, 1, BigInt::one());
        assert!(ip_identity_residual(3, &bad, 40).is_some());
        assert!(ip_identity_residual(3, &i3(), 200).is_none());
    }

    #[test]
    fn text_layout() {
        assert_eq!(format_ip_text(2, &i2()), "I_2 = 1 − (2^12x^2 + 3·2^4x)y − xy^2");
        assert_eq!(format_ip_text(3, &i3()), "I_3 = 1 − (3^12x^3 + 4·3^8x^2 + 10·3^3x)y − (3^6x^2 + 4·3^2x)y^2 − xy^3");
    }

    #[test]
    fn bipoly_ops() {
        let a: BiPoly<BigInt> = BiPoly::from_terms([((1, 0), BigInt::one()), ((0, 1), BigInt::one())]);
        let sq = a.mul(&a);
        assert_eq!(sq.coeff(1, 1), BigInt::from(2));
        assert_eq!(sq.len(), 3);
        let z = &sq + &sq.map(|c| -c);
        assert!(z.is_empty());
        assert_eq!(i3().transpose().coeff(3, 1), BigInt::from(-1));
    }
}
