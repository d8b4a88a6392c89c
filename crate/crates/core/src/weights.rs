//! Weight twists for `p = 3` via multiplication by `(S/V(S))^{k/3}`, Wan's
//! lower bound, and the congruence and slope statements they support.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, rat_int, val_int, val_p, val_p_int, Rat, Val};
use crate::charseries::{
    certify_pair, char_series_trunc, lower_bound_points, newton_polygon, nhat_prime0, serre_row_bound,
    truncation_error_bound, CertifiedValuation, CharSeries, NewtonPolygon,
};
use crate::error::{Error, Result};
use crate::modcurve::eisenstein;
use crate::par::ExecMode;
use crate::qseries::QSeries;
use crate::umatrix::{Basis, Provenance, UMatrix};
use crate::zs;

fn shifted(core: Vec<BigInt>, n: usize) -> Vec<BigInt> {
    let mut d = vec![BigInt::zero()];
    d.extend(core);
    d.truncate(n);
    d
}

/// `d_3 = q ∏ ((1 − q^{3n})/(1 − q^n))^{12}`, `n` coefficients from `q^0`.
pub fn d3_ints(n: usize) -> Vec<BigInt> {
    shifted(zs::eta_product(&[(3, 12), (1, -12)], n.saturating_sub(1)), n)
}

/// `d_9 = q ∏ ((1 − q^{9n})/(1 − q^n))^3`, `n` coefficients from `q^0`.
pub fn d9_ints(n: usize) -> Vec<BigInt> {
    shifted(zs::eta_product(&[(9, 3), (1, -3)], n.saturating_sub(1)), n)
}

/// First exponent below `n` where `d_3 ≠ d_9 + 9d_9² + 27d_9³`.
pub fn d3_d9_mismatch(n: usize) -> Option<usize> {
    let d9 = d9_ints(n);
    let d9_2 = zs::mul(&d9, &d9, n);
    let d9_3 = zs::mul(&d9_2, &d9, n);
    let d3 = d3_ints(n);
    (0..n).find(|&i| d3[i] != &d9[i] + &d9_2[i] * 9 + &d9_3[i] * 27)
}

/// Expands `f = Σ r_m d^m` for `d = q + O(q²)`; returns `r_0..r_{count−1}`.
pub fn expand_in_powers(f: &[BigInt], d: &[BigInt], count: usize) -> Vec<BigInt> {
    let n = f.len();
    let mut rem = f.to_vec();
    let mut pow = vec![BigInt::zero(); n];
    if n > 0 {
        pow[0] = BigInt::one();
    }
    let mut out = Vec::with_capacity(count);
    for m in 0..count.min(n) {
        let r = rem[m].clone();
        if !r.is_zero() {
            for (x, y) in rem.iter_mut().zip(&pow).skip(m) {
                *x -= &r * y;
            }
        }
        out.push(r);
        pow = zs::mul(&pow, d, n);
    }
    out
}

/// `S = (Δ³/V(Δ))^{1/8}` by an exact eighth root.
pub fn s_series(precision: i64) -> Result<QSeries> {
    let delta = crate::modcurve::delta(precision + 4);
    let d3 = &(&delta * &delta) * &delta;
    (&d3 * &delta.v_substitute(3).inv()?).nth_root(8).map(|s| s.truncate(precision))
}

/// `χ_{−3}(d)`.
pub fn chi_minus3(d: u64) -> i64 {
    match d % 3 {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// Weight-3 Eisenstein series with character `χ_{−3}`:
/// `1 − 9 Σ_n (Σ_{d|n} χ_{−3}(d) d²) q^n`.
pub fn s_eisenstein(precision: i64) -> QSeries {
    let n = precision.max(0) as usize;
    let mut c = vec![BigInt::zero(); n];
    for d in 1..n {
        let t = BigInt::from(chi_minus3(d as u64) * (d * d) as i64);
        for m in (d..n).step_by(d) {
            c[m] += &t;
        }
    }
    for x in c.iter_mut().skip(1) {
        *x *= -9;
    }
    if n > 0 {
        c[0] = BigInt::one();
    }
    QSeries::from_ints(0, &c, precision)
}

/// `S²` against the basis `E_6(q), E_6(q³), η(τ)^6η(3τ)^6` of weight-6 forms on
/// `Γ_0(3)`: first exponent where the fitted combination differs, if any.
pub fn s_squared_weight6_mismatch(precision: i64) -> Result<Option<i64>> {
    let s = s_series(precision)?;
    let s2 = &s * &s;
    let e6 = eisenstein(6, precision)?;
    let e6v = e6.v_substitute(3).truncate(precision);
    let cusp = QSeries::eta_quotient(&[(1, 6), (3, 6)], precision - 1).shift(1);
    // Solve a + b = 1 (q^0); −504a + c = s2_1 (q^1); the q^2 equation is checked below.
    let a_plus_b = s2.coeff(0);
    // q^3 coefficient distinguishes E_6(q³); use q^1..q^3 to determine a, b, c.
    let rows: Vec<[Rat; 4]> = (1..=3)
        .map(|e| [e6.coeff(e), e6v.coeff(e), cusp.coeff(e), s2.coeff(e)])
        .collect();
    // Unknowns a, b, c with a + b = s2_0.
    // Substitute b = s2_0 − a: (e6 − e6v)a + cusp·c = s2 − s2_0·e6v.
    let m: Vec<[Rat; 3]> = rows
        .iter()
        .map(|r| [&r[0] - &r[1], r[2].clone(), &r[3] - &a_plus_b * &r[1]])
        .collect();
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return Err(Error::Reconstruction("degenerate weight-6 fit".into()));
    }
    let a = (&m[0][2] * &m[1][1] - &m[0][1] * &m[1][2]) / &det;
    let c = (&m[0][0] * &m[1][2] - &m[0][2] * &m[1][0]) / &det;
    let b = &a_plus_b - &a;
    let fit = &(&e6.scalar_mul(&a) + &e6v.scalar_mul(&b)) + &cusp.scalar_mul(&c);
    Ok(s2.first_difference(&fit))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhsReport {
    pub q_precision: usize,
    pub d3_d9_identity: bool,
    pub identity_mismatch: Option<usize>,
    /// `S/V(S)` computed from `S` equals `d_9/d_3`.
    pub ratio_is_d9_over_d3: bool,
    pub s_is_eisenstein: bool,
    pub s_squared_weight6: bool,
    pub s_squared_constant_one: bool,
    pub d3_terms: usize,
    /// Leading `d_3`-coefficients of `S/V(S)`.
    pub leading: Vec<String>,
    /// `m` where `9 ∤ r_1` or `27 ∤ r_m` (m ≥ 2).
    pub divisibility_failures: Vec<usize>,
    pub holds: bool,
}

/// Coefficients `r_0..r_{count−1}` of `S/V(S) = d_9/d_3` in powers of `d_3`.
pub fn s_over_vs_in_d3(count: usize) -> Vec<BigInt> {
    let ratio = zs::eta_product(&[(1, 9), (3, -12), (9, 3)], count);
    expand_in_powers(&ratio, &d3_ints(count), count)
}

/// The identities around `S`, `d_3` and `d_9`.
pub fn check_whs(q_precision: usize, d3_terms: usize) -> Result<WhsReport> {
    let identity_mismatch = d3_d9_mismatch(q_precision);
    let prec = (d3_terms as i64).max(50);
    let s = s_series(prec + 1)?;
    let vs = s.v_substitute(3);
    let ratio = (&s * &vs.inv()?).truncate(prec);
    let d9_over_d3 = QSeries::from_ints(0, &zs::eta_product(&[(1, 9), (3, -12), (9, 3)], prec as usize), prec);
    let ratio_is_d9_over_d3 = ratio.eq_to_precision(&d9_over_d3) && ratio.precision() >= prec;
    let s_is_eisenstein = s.eq_to_precision(&s_eisenstein(50)) && s.precision() >= 50;
    let s_squared_weight6 = s_squared_weight6_mismatch(50)?.is_none();
    let s2 = &s * &s;
    let s_squared_constant_one = s2.coeff(0).is_one() && s2.is_integral();
    let r = s_over_vs_in_d3(d3_terms);
    let divisibility_failures: Vec<usize> = r
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(m, x)| {
            let need = if *m == 1 { 9 } else { 27 };
            !x.is_multiple_of(&BigInt::from(need))
        })
        .map(|(m, _)| m)
        .collect();
    let holds = identity_mismatch.is_none()
        && ratio_is_d9_over_d3
        && s_is_eisenstein
        && s_squared_weight6
        && s_squared_constant_one
        && r.first().is_some_and(|c| c.is_one())
        && divisibility_failures.is_empty();
    Ok(WhsReport {
        q_precision,
        d3_d9_identity: identity_mismatch.is_none(),
        identity_mismatch,
        ratio_is_d9_over_d3,
        s_is_eisenstein,
        s_squared_weight6,
        s_squared_constant_one,
        d3_terms,
        leading: r.iter().take(6).map(|x| x.to_string()).collect(),
        divisibility_failures,
        holds,
    })
}

/// `n = v_3(k/2) − 1` for `k = 2·3^{n+1}·l`, `3 ∤ l`; `None` for `k = 0`.
pub fn twist_n(k: i64) -> Option<i64> {
    (k != 0).then(|| val_int(&BigInt::from(k / 2), 3).unwrap() as i64 - 1)
}

/// Multiplication by `R = (S/V(S))^{k/3}` on `d_3, d_3², …`: the lower
/// triangular Toeplitz matrix `C_{j+m, j} = r_m` with `R = Σ r_m d_3^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistMatrix {
    pub k: i64,
    pub n: Option<i64>,
    pub size: usize,
    pub r: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistChecks {
    pub k: i64,
    pub n: Option<i64>,
    pub size: usize,
    pub unit_diagonal: bool,
    pub upper_zero: bool,
    /// `v(C′_{j+m,j}) ≥ n − v_3(m)` in the scaled basis.
    pub binomial_bound: bool,
    /// `v(C′_{j+m,j}) ≥ 1/2` for odd `m`.
    pub odd_half: bool,
    /// `v(C′) ≥ 0`, so row valuation bounds survive the twist.
    pub integral_scaled: bool,
    /// `v(r_m) ≥ ⌈3m/2⌉ + n − v_3(m)`.
    pub coefficient_bound: bool,
    pub holds: bool,
}

pub fn twist_matrix(k: i64, size: usize) -> Result<TwistMatrix> {
    if k < 0 || k % 6 != 0 {
        return Err(Error::InvalidArgument(format!("twist weight {k} must be a nonnegative multiple of 6")));
    }
    let base = s_over_vs_in_d3(size);
    let r = zs::pow_unit(&base, k / 3, size);
    Ok(TwistMatrix { k, n: twist_n(k), size, r })
}

impl TwistMatrix {
    /// `C_{ij}` (1-based) in the plain basis.
    pub fn plain(&self, i: usize, j: usize) -> BigInt {
        if i < j {
            BigInt::zero()
        } else {
            self.r[i - j].clone()
        }
    }

    /// `v_3(C′_{ij}) = v_3(C_{ij}) + (3/2)(j − i)`.
    pub fn scaled_valuation(&self, i: usize, j: usize) -> Val {
        val_p_int(&self.plain(i, j), 3) + &(rat(3, 2) * rat_int(j as i64 - i as i64))
    }

    pub fn checks(&self) -> TwistChecks {
        let mut c = TwistChecks {
            k: self.k,
            n: self.n,
            size: self.size,
            unit_diagonal: true,
            upper_zero: true,
            binomial_bound: true,
            odd_half: true,
            integral_scaled: true,
            coefficient_bound: true,
            holds: true,
        };
        for j in 1..=self.size {
            c.unit_diagonal &= self.plain(j, j).is_one();
            for i in 1..j {
                c.upper_zero &= self.plain(i, j).is_zero();
            }
            for i in j + 1..=self.size {
                let m = i - j;
                let v = self.scaled_valuation(i, j);
                let vm = val_int(&BigInt::from(m), 3).unwrap() as i64;
                if let Some(n) = self.n {
                    c.binomial_bound &= v >= Val::int(n - vm);
                }
                if m % 2 == 1 {
                    c.odd_half &= v >= Val::ratio(1, 2);
                }
                c.integral_scaled &= v >= Val::int(0);
            }
        }
        for m in 1..self.size {
            if let Some(n) = self.n {
                let vm = val_int(&BigInt::from(m), 3).unwrap() as i64;
                let need = (3 * m as i64 + 1) / 2 + n - vm;
                c.coefficient_bound &= val_p_int(&self.r[m], 3) >= Val::int(need);
            }
        }
        c.holds = c.unit_diagonal
            && c.upper_zero
            && c.binomial_bound
            && c.odd_half
            && c.integral_scaled
            && c.coefficient_bound;
        c
    }
}

/// The weight-`k` matrix `M·C` restricted to `rows × rows`. Exact because
/// column `t` of row `i` of `M` vanishes for `t > 3i`.
pub fn uk_matrix(base: &UMatrix, tw: &TwistMatrix, rows: usize) -> Result<UMatrix> {
    if base.p != 3 {
        return Err(Error::InvalidArgument("weight twists are implemented for p = 3".into()));
    }
    let inner = 3 * rows;
    if base.rows < rows || base.cols < inner || tw.size < inner {
        return Err(Error::InvalidArgument(format!("need base {rows}×{inner} and twist of size {inner}")));
    }
    let entries = (1..=rows)
        .map(|i| {
            (1..=rows)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for t in j..=inner.min(3 * i) {
                        let m = base.get(i, t);
                        if !m.is_zero() {
                            s += m * &tw.r[t - j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    Ok(UMatrix {
        p: 3,
        weight: tw.k,
        rows,
        cols: rows,
        entries,
        basis: Basis::Plain,
        provenance: if tw.k == 0 { base.provenance } else { Provenance::Twisted },
        sign_convention: base.sign_convention,
    })
}

/// Characteristic series of `Q_k` at two truncation sizes with certificates.
#[derive(Clone, Debug)]
pub struct WeightSeries {
    pub k: i64,
    pub small: CharSeries,
    pub large: CharSeries,
    pub vals: Vec<CertifiedValuation>,
}

impl WeightSeries {
    /// Newton polygon through rigorous lower bounds (below the true polygon).
    pub fn polygon(&self) -> NewtonPolygon {
        newton_polygon(&lower_bound_points(&self.vals))
    }

    pub fn certified_through(&self, m: usize) -> bool {
        self.vals.iter().take(m + 1).all(|c| c.certified) && self.vals.len() > m
    }
}

/// The weight-3 base matrix with enough columns for twists of `rows` rows.
pub fn twist_base(rows: usize) -> Result<UMatrix> {
    crate::umatrix::build_matrix_genfun(3, rows, 3 * rows)
}

/// `Q_k` at sizes `n` and `n + 10`, certified up to `m_max`.
pub fn weight_series(k: i64, n: usize, m_max: usize, base: &UMatrix, mode: ExecMode) -> Result<WeightSeries> {
    let big = n + 10;
    let tw = twist_matrix(k, 3 * big)?;
    let mk = uk_matrix(base, &tw, big)?;
    let small = char_series_trunc(&mk, n, mode);
    let large = char_series_trunc(&mk, big, mode);
    let vals = certify_pair(&small, &large, &|i| serre_row_bound(3, i), m_max);
    Ok(WeightSeries { k, small, large, vals })
}

/// `3·C(m, 2)`.
pub fn three_choose2(m: u64) -> Val {
    Val::int(3 * (m * m.saturating_sub(1) / 2) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinobPoint {
    pub s: u64,
    pub valuation: Val,
    pub certified: bool,
    pub polygon: Option<Val>,
    pub expected: Val,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinobReport {
    pub k: i64,
    pub n: u32,
    pub l: i64,
    pub points: Vec<BinobPoint>,
    pub holds: bool,
}

/// `k = 2·3^{n+1}·l`.
pub fn binob_weight(n: u32, l: i64) -> i64 {
    2 * 3i64.pow(n + 1) * l
}

/// At the parabola's contact points `s < 2·3^{n−1}`, the weight-`k` valuation
/// equals the weight-0 parabola value.
pub fn binob_check(n: u32, l: i64, ws: &WeightSeries) -> BinobReport {
    let limit = 2 * 3u64.pow(n.saturating_sub(1));
    let limit = if n == 0 { 0 } else { limit };
    let polygon = ws.polygon();
    let points: Vec<BinobPoint> = (0..)
        .map(crate::charseries::m_index)
        .take_while(|&s| s < limit)
        .map(|s| {
            let c = ws.vals.get(s as usize);
            let valuation = c.map_or(Val::Infinity, |c| c.valuation.clone());
            let certified = c.is_some_and(|c| c.certified);
            let expected = nhat_prime0(s);
            let poly = polygon.eval(s).map(Val::Finite);
            let holds = certified && valuation == expected && poly.as_ref() == Some(&expected);
            BinobPoint { s, valuation, certified, polygon: poly, expected, holds }
        })
        .collect();
    BinobReport { k: ws.k, n, l, holds: !points.is_empty() && points.iter().all(|p| p.holds), points }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeBucket {
    pub i: u32,
    pub range: (i64, i64),
    pub count: u64,
    pub expected_count: u64,
    pub average: Option<Val>,
    pub expected_average: Val,
    pub min: Option<Val>,
    pub max: Option<Val>,
    pub min_bound: Val,
    pub max_bound: Val,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub k: i64,
    pub n: u32,
    pub buckets: Vec<SlopeBucket>,
    pub holds: bool,
}

/// For `i < n − 1`: `3^i` slopes in `[m_{i+1} + 1, m_{i+2} − 2]`, averaging
/// `3^{i+1} − 1`, between `3m_i + 2` and `3m_{i+1} − 1`.
pub fn slope_distribution(n: u32, ws: &WeightSeries) -> SlopeReport {
    use crate::charseries::m_index;
    let slopes = ws.polygon().slope_list();
    let buckets: Vec<SlopeBucket> = (0..n.saturating_sub(1))
        .map(|i| {
            let lo = m_index(i + 1) as i64 + 1;
            let hi = m_index(i + 2) as i64 - 2;
            let inside: Vec<&Rat> = slopes.iter().filter(|s| **s >= rat_int(lo) && **s <= rat_int(hi)).collect();
            let count = inside.len() as u64;
            let average = (count > 0)
                .then(|| Val::Finite(inside.iter().fold(Rat::zero(), |a, s| a + *s) / rat_int(count as i64)));
            let min = inside.iter().min().map(|s| Val::Finite((*s).clone()));
            let max = inside.iter().max().map(|s| Val::Finite((*s).clone()));
            let expected_count = 3u64.pow(i);
            let expected_average = Val::int(3i64.pow(i + 1) - 1);
            let min_bound = Val::int(3 * m_index(i) as i64 + 2);
            let max_bound = Val::int(3 * m_index(i + 1) as i64 - 1);
            let holds = count == expected_count
                && average.as_ref() == Some(&expected_average)
                && min.as_ref().is_some_and(|m| *m >= min_bound)
                && max.as_ref().is_some_and(|m| *m <= max_bound);
            SlopeBucket {
                i,
                range: (lo, hi),
                count,
                expected_count,
                average,
                expected_average,
                min,
                max,
                min_bound,
                max_bound,
                holds,
            }
        })
        .collect();
    SlopeReport { k: ws.k, n, holds: !buckets.is_empty() && buckets.iter().all(|b| b.holds), buckets }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OldformReport {
    pub k: i64,
    pub n: u32,
    pub m_n: u64,
    pub polygon_at_m_n: Option<Val>,
    pub parabola_at_m_n: Val,
    pub entering_slope: Option<Val>,
    /// `k/4 − 1`.
    pub window_bound: Val,
    /// `3m_n − 1`, the parabola's step into `m_n`.
    pub parabola_step: Val,
    pub entering_at_most_step: bool,
    pub entering_strictly_below_step: bool,
    /// `k − 1 − s` for the slopes `s` up to `m_n`.
    pub mate_slopes: Vec<Val>,
    pub mates_above_three_quarters: bool,
    pub holds: bool,
}

/// Newton-polygon content of the oldform slope window for `k = 2·3^{n+1}`.
pub fn oldform_window_check(n: u32, ws: &WeightSeries) -> OldformReport {
    let k = ws.k;
    let m_n = crate::charseries::m_index(n);
    let polygon = ws.polygon();
    let at = polygon.eval(m_n).map(Val::Finite);
    let parabola_at_m_n = nhat_prime0(m_n);
    let entering = (m_n >= 1)
        .then(|| Some(Val::Finite(polygon.eval(m_n)? - polygon.eval(m_n - 1)?)))
        .flatten();
    let window_bound = Val::Finite(rat(k, 4) - Rat::one());
    let parabola_step = Val::int(3 * m_n as i64 - 1);
    let slopes: Vec<Rat> = polygon.slope_list().into_iter().take(m_n as usize).collect();
    let mate_slopes: Vec<Val> = slopes.iter().map(|s| Val::Finite(rat_int(k - 1) - s)).collect();
    let three_q = Val::Finite(rat(3 * k, 4));
    let mates_above_three_quarters = mate_slopes.iter().all(|s| *s > three_q);
    let entering_at_most_step = entering.as_ref().is_some_and(|s| *s <= parabola_step);
    let entering_strictly_below_step = entering.as_ref().is_some_and(|s| *s < parabola_step);
    let holds = at.as_ref() == Some(&parabola_at_m_n)
        && entering.as_ref().is_some_and(|s| *s < window_bound)
        && mates_above_three_quarters;
    OldformReport {
        k,
        n,
        m_n,
        polygon_at_m_n: at,
        parabola_at_m_n,
        entering_slope: entering,
        window_bound,
        parabola_step,
        entering_at_most_step,
        entering_strictly_below_step,
        mate_slopes,
        mates_above_three_quarters,
        holds,
    }
}

/// Dimension of level-1 modular forms of weight `k`.
pub fn dim_level1(k: i64) -> u64 {
    if k < 0 || k % 2 != 0 {
        return 0;
    }
    let base = (k / 12) as u64;
    if k % 12 == 2 {
        base
    } else {
        base + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WanVariant {
    /// `d_u = dim M_{k+u(p−1)}` (p ≥ 5).
    Verbatim,
    /// `d_u = dim M_{k+4u}` with the same `(p−1)/(p+1)` prefactor (p = 2, 3).
    WeightFourSteps,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WanBound {
    pub p: u64,
    pub k: i64,
    pub variant: WanVariant,
    pub prefactor: Val,
}

impl WanBound {
    pub fn new(p: u64, k: i64) -> Self {
        let variant = if p >= 5 { WanVariant::Verbatim } else { WanVariant::WeightFourSteps };
        WanBound { p, k, variant, prefactor: Val::Finite(rat(p as i64 - 1, p as i64 + 1)) }
    }

    fn step(&self) -> i64 {
        match self.variant {
            WanVariant::Verbatim => self.p as i64 - 1,
            WanVariant::WeightFourSteps => 4,
        }
    }

    /// `d_u`.
    pub fn dim(&self, u: u64) -> u64 {
        dim_level1(self.k + self.step() * u as i64)
    }

    /// `m_u = d_u − d_{u−1}` for `u > 0`.
    pub fn gap(&self, u: u64) -> u64 {
        self.dim(u) - self.dim(u - 1)
    }

    /// `((p−1)/(p+1))(Σ_{u≤v} u·m_u + (v+1)(m − d_v)) − m` for
    /// `d_v ≤ m < d_{v+1}`; `−m` below `d_0`.
    pub fn value(&self, m: i64) -> Val {
        if m < 0 {
            return Val::Infinity;
        }
        let pre = self.prefactor.finite().unwrap().clone();
        if (m as u64) < self.dim(0) {
            return Val::int(-m);
        }
        let mut v = 0;
        while self.dim(v + 1) <= m as u64 {
            v += 1;
        }
        let sum: u64 = (1..=v).map(|u| u * self.gap(u)).sum();
        let inner = rat_int(sum as i64) + rat_int((v as i64 + 1) * (m - self.dim(v) as i64));
        Val::Finite(pre * inner - rat_int(m))
    }
}

pub fn wan_bound(p: u64, k: i64, m: i64) -> Val {
    WanBound::new(p, k).value(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceRow {
    pub m: usize,
    /// `v_3(a_m(P_k) − a_m(P_{k′}))` as observed at the smaller truncation.
    pub valuation: Val,
    /// Truncation error of the difference.
    pub error_bound: Val,
    pub required: Val,
    pub holds: bool,
    pub margin: Option<Val>,
    /// Observed minus `N̂_k(m−2) + n + 1` (measured only).
    pub wan_margin: Option<Val>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub k: i64,
    pub k_prime: i64,
    pub n: u32,
    pub l: i64,
    pub wan_variant: WanVariant,
    pub rows: Vec<CongruenceRow>,
    pub holds: bool,
}

/// `n` and `l` with `k′ − k = l·2·3^n`, `3 ∤ l`.
pub fn congruence_exponent(k: i64, k_prime: i64) -> Option<(u32, i64)> {
    let diff = k_prime - k;
    if diff == 0 || diff % 2 != 0 {
        return None;
    }
    let n = val_int(&BigInt::from(diff / 2), 3)? as u32;
    Some((n, diff / 2 / 3i64.pow(n)))
}

/// Checks `v_3(a_m(P_k) − a_m(P_{k′})) ≥ n + 1` on `m = 1..=m_max`.
///
/// `P = (1 − t)Q`. The truncated coefficients differ from the true ones by
/// at least the truncation error, so the check is rigorous whenever the
/// error bound itself is at least `n + 1`.
pub fn congruence_check(a: &WeightSeries, b: &WeightSeries, m_max: usize) -> Result<CongruenceReport> {
    let (n, l) = congruence_exponent(a.k, b.k)
        .ok_or_else(|| Error::InvalidArgument(format!("weights {} and {} do not differ by 2·3^n·l", a.k, b.k)))?;
    let trunc = a.small.truncation.min(b.small.truncation);
    let pa = crate::charseries::p_from_q(&a.small);
    let pb = crate::charseries::p_from_q(&b.small);
    let wan = WanBound::new(3, a.k);
    let required = Val::int(n as i64 + 1);
    let rows: Vec<CongruenceRow> = (1..=m_max.min(trunc))
        .map(|m| {
            let diff = &pa.coeffs[m] - &pb.coeffs[m];
            let valuation = val_p(&Rat::from_integer(diff), 3);
            let error_bound = truncation_error_bound(&|i| serre_row_bound(3, i), m - 1, trunc)
                .min(truncation_error_bound(&|i| serre_row_bound(3, i), m, trunc));
            let error_bound = if m == 1 {
                truncation_error_bound(&|i| serre_row_bound(3, i), 1, trunc)
            } else {
                error_bound
            };
            let lower = valuation.clone().min(error_bound.clone());
            let holds = lower >= required;
            let exact = valuation < error_bound;
            let margin = match (&valuation, exact) {
                (Val::Finite(v), true) => Some(Val::Finite(v - required.finite().unwrap())),
                _ => None,
            };
            let wan_margin = match (&valuation, exact) {
                (Val::Finite(v), true) => {
                    let target = wan.value(m as i64 - 2) + &rat_int(n as i64 + 1);
                    target.finite().map(|t| Val::Finite(v - t))
                }
                _ => None,
            };
            CongruenceRow { m, valuation, error_bound, required: required.clone(), holds, margin, wan_margin }
        })
        .collect();
    Ok(CongruenceReport {
        k: a.k,
        k_prime: b.k,
        n,
        l,
        wan_variant: wan.variant,
        holds: rows.iter().all(|r| r.holds),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodintReport {
    pub p: u64,
    pub n: u32,
    pub terms: usize,
    pub required: Val,
    /// Smallest valuation among the `q`-coefficients of the quotient minus 1.
    pub min_q_valuation: Val,
    pub q_failures: Vec<i64>,
    /// Smallest valuation among its `d_p`-expansion coefficients.
    pub min_d_valuation: Val,
    pub d_failures: Vec<usize>,
    pub holds: bool,
}

/// `E_{p−1}^{p^n}(q)/E_{p−1}^{p^n}(q^p) − 1 ≡ 0 mod p^{n+1}` on `terms`
/// coefficients, in `q` and in powers of `d_p`.
pub fn goodint_check(p: u64, n: u32, terms: usize) -> Result<GoodintReport> {
    if p != 5 && p != 7 {
        return Err(Error::InvalidArgument("goodint is stated for p = 5, 7 here".into()));
    }
    let prec = terms as i64;
    let e = eisenstein(p as i64 - 1, prec)?;
    let a = e.pow(p.pow(n) as i64)?;
    let quotient = &a * &a.v_substitute(p).truncate(prec).inv()?;
    let minus_one = (&quotient - &QSeries::one(prec)).truncate(prec);
    let ints = minus_one
        .to_integers()
        .ok_or_else(|| Error::NonIntegral { index: "goodint".into(), value: "quotient".into() })?;
    let required = Val::int(n as i64 + 1);
    let mut full = vec![BigInt::zero(); terms];
    for (i, c) in ints.iter().enumerate() {
        let e = minus_one.lowest_exponent() + i as i64;
        if (0..prec).contains(&e) {
            full[e as usize] = c.clone();
        }
    }
    let qv: Vec<Val> = full.iter().map(|c| val_p_int(c, p)).collect();
    let q_failures: Vec<i64> = (0..terms).filter(|&i| qv[i] < required).map(|i| i as i64).collect();
    let min_q_valuation = qv.iter().cloned().min().unwrap_or(Val::Infinity);
    let dp = crate::modcurve::hauptmodul_ints(p, terms);
    let dv: Vec<Val> = expand_in_powers(&full, &dp, terms).iter().map(|c| val_p_int(c, p)).collect();
    let d_failures: Vec<usize> = (0..dv.len()).filter(|&i| dv[i] < required).collect();
    let min_d_valuation = dv.iter().cloned().min().unwrap_or(Val::Infinity);
    Ok(GoodintReport {
        p,
        n,
        terms,
        required,
        min_q_valuation,
        holds: q_failures.is_empty() && d_failures.is_empty(),
        q_failures,
        min_d_valuation,
        d_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d3_d9_identity() {
        assert_eq!(d3_d9_mismatch(200), None);
    }

    #[test]
    fn s_agrees_with_eta_and_eisenstein() {
        let s = s_series(60).unwrap();
        let eta = QSeries::eta_quotient(&[(1, 9), (3, -3)], 60);
        assert!(s.eq_to_precision(&eta));
        assert!(s.eq_to_precision(&s_eisenstein(60)));
        assert_eq!(s.coeff(1), rat_int(-9));
        assert_eq!(s_squared_weight6_mismatch(40).unwrap(), None);
    }

    #[test]
    fn s_over_vs_coefficients() {
        let r = s_over_vs_in_d3(12);
        let expect = [1i64, -9, 135, -2430, 48114, -1010394];
        for (x, e) in r.iter().zip(expect) {
            assert_eq!(x, &BigInt::from(e));
        }
        for (m, x) in r.iter().enumerate().skip(1) {
            assert!(val_p_int(x, 3) >= Val::Finite(rat(3 * m as i64, 2)), "m = {m}");
        }
        let rep = check_whs(200, 60).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn expansion_is_triangular_inverse() {
        let d = d3_ints(20);
        let f = zs::mul(&d, &d, 20);
        let r = expand_in_powers(&f, &d, 10);
        assert_eq!(r[2], BigInt::one());
        assert!(r.iter().enumerate().all(|(m, x)| m == 2 || x.is_zero()));
    }

    #[test]
    fn twist_invariants() {
        assert_eq!(twist_n(6), Some(0));
        assert_eq!(twist_n(18), Some(1));
        assert_eq!(twist_n(54), Some(2));
        assert_eq!(twist_n(108), Some(2));
        assert_eq!(twist_n(0), None);
        for k in [0, 6, 18, 54, 108, 162] {
            let t = twist_matrix(k, 40).unwrap();
            let c = t.checks();
            assert!(c.holds, "k = {k}: {c:?}");
        }
        let t = twist_matrix(18, 10).unwrap();
        assert!(t.scaled_valuation(2, 1) >= Val::int(1));
        let t = twist_matrix(54, 10).unwrap();
        assert!(t.scaled_valuation(4, 1) >= Val::int(1));
        assert!(twist_matrix(4, 5).is_err());
    }

    #[test]
    fn weight_zero_twist_is_identity() {
        let base = twist_base(8).unwrap();
        let tw = twist_matrix(0, 24).unwrap();
        let m0 = uk_matrix(&base, &tw, 8).unwrap();
        assert_eq!(m0.entries, base.truncated(8, 8).entries);
    }

    #[test]
    fn weight18_trace() {
        let base = twist_base(6).unwrap();
        let tw = twist_matrix(18, 18).unwrap();
        let m = uk_matrix(&base, &tw, 6).unwrap();
        let cs = char_series_trunc(&m, 6, ExecMode::Sequential);
        assert!(cs.valuation(1) >= Val::int(2));
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_level1(0), 1);
        assert_eq!(dim_level1(2), 0);
        assert_eq!(dim_level1(12), 2);
        assert_eq!(dim_level1(14), 1);
        assert_eq!(dim_level1(-4), 0);
        assert_eq!(dim_level1(7), 0);
        // Brute-force: monomials E4^a E6^b of weight k.
        for k in (0..80).step_by(2) {
            let count = (0..=k / 4).filter(|a| (k - 4 * a) % 6 == 0).count() as u64;
            assert_eq!(dim_level1(k), count, "k = {k}");
        }
    }

    #[test]
    fn wan_bound_values() {
        let w = WanBound::new(5, 0);
        assert_eq!(w.variant, WanVariant::Verbatim);
        // d_0 = 1, d_1 = dim M_4 = 1, d_2 = dim M_8 = 1, d_3 = dim M_12 = 2.
        assert_eq!(w.dim(0), 1);
        assert_eq!(w.dim(3), 2);
        // m = 1: v = 2 (d_2 = 1 ≤ 1 < d_3 = 2), sum = 0, (v+1)(m − d_v) = 0.
        assert_eq!(w.value(1), Val::int(-1));
        // m = 2 = d_3: v = 3, sum = 3·1 = 3 → (4/6)·3 − 2 = 0.
        assert_eq!(w.value(2), Val::int(0));
        for m in 0..40 {
            let a = w.value(m).finite().unwrap().clone();
            let b = w.value(m + 1).finite().unwrap().clone();
            assert!(b >= a - Rat::one());
        }
        assert_eq!(WanBound::new(3, 0).variant, WanVariant::WeightFourSteps);
    }

    #[test]
    fn congruence_exponents() {
        assert_eq!(congruence_exponent(0, 54), Some((3, 1)));
        assert_eq!(congruence_exponent(0, 6), Some((1, 1)));
        assert_eq!(congruence_exponent(6, 24), Some((2, 1)));
        assert_eq!(congruence_exponent(0, 0), None);
    }

    #[test]
    fn goodint_small() {
        for (p, n) in [(5, 0), (5, 1), (7, 0), (7, 1)] {
            let r = goodint_check(p, n, 30).unwrap();
            assert!(r.holds, "{r:?}");
        }
        assert!(goodint_check(3, 0, 10).is_err());
    }
}
