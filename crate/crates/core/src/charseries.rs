//! Characteristic series `det(1 − tM)` of truncated `U` matrices, truncation
//! certificates, Newton polygons and the `p = 3` parabola.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, rat_int, val_p_int, Rat, Val};
use crate::modp::{self, Crt, Modulus};
use crate::par::{self, ExecMode};
use crate::umatrix::UMatrix;

/// Coefficients `a_0 = 1, a_1, …, a_n` of `det(1 − tM)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSeries {
    pub p: u64,
    pub weight: i64,
    #[serde(with = "bigint_vec")]
    pub coeffs: Vec<BigInt>,
    /// `certified[m]` is set once `v_p(a_m)` is known to equal the valuation
    /// of the coefficient of the untruncated series.
    pub certified: Vec<bool>,
    pub truncation: usize,
}

mod bigint_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        crate::arith::decimal::strings(xs).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
    }
}

impl CharSeries {
    pub fn valuation(&self, m: usize) -> Val {
        self.coeffs.get(m).map_or(Val::Infinity, |c| val_p_int(c, self.p))
    }

    pub fn valuations(&self) -> Vec<Val> {
        (0..self.coeffs.len()).map(|m| self.valuation(m)).collect()
    }

    pub fn points(&self) -> Vec<(u64, Val)> {
        self.valuations().into_iter().enumerate().map(|(m, v)| (m as u64, v)).collect()
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        newton_polygon(&self.points())
    }
}

/// Coefficients `a_0..a_n` of `det(1 − tA)` for the leading `n × n` block of
/// an integer matrix, computed exactly by multimodular Hessenberg reduction.
///
/// The number of primes is fixed in advance from `|a_m| ≤ ∏(1 + ‖row_i‖₁)`,
/// so the reconstruction is exact, not probabilistic.
pub fn char_poly_coeffs(a: &[Vec<BigInt>], n: usize, mode: ExecMode) -> Vec<BigInt> {
    assert!(n <= a.len() && a.iter().take(n).all(|r| r.len() >= n), "truncation exceeds matrix");
    if n == 0 {
        return vec![BigInt::one()];
    }
    let mut bound_bits = 0f64;
    for row in a.iter().take(n) {
        let norm: BigInt = row[..n].iter().map(|x| x.abs()).sum::<BigInt>() + 1;
        bound_bits += log2_big(&norm);
    }
    let bits = bound_bits.ceil() as u64 + 2;
    let primes = modp::large_primes(modp::primes_for_bits(bits));
    let residues: Vec<Vec<u64>> = par::map_slice(mode, &primes, |&p| {
        let m = Modulus::new(p);
        let am: Vec<Vec<u64>> = a.iter().take(n).map(|r| modp::reduce_all(m, &r[..n])).collect();
        modp::charpoly_mod(am, m)
    });
    let crt = Crt::new(primes);
    // det(X − A) = Σ c_i X^i and a_m = c_{n−m}.
    (0..=n)
        .map(|m| {
            let r: Vec<u64> = residues.iter().map(|v| v[n - m]).collect();
            crt.lift(&r)
        })
        .collect()
}

fn log2_big(x: &BigInt) -> f64 {
    let b = x.bits();
    if b <= 52 {
        return (x.to_string().parse::<f64>().unwrap_or(1.0)).log2();
    }
    let shifted: BigInt = x >> (b - 52);
    shifted.to_string().parse::<f64>().unwrap().log2() + (b - 52) as f64
}

/// `det(1 − tM_{[n]})` for the upper-left `n × n` block of `m`.
pub fn char_series_trunc(m: &UMatrix, n: usize, mode: ExecMode) -> CharSeries {
    let coeffs = char_poly_coeffs(&m.entries, n, mode);
    CharSeries { p: m.p, weight: m.weight, certified: vec![false; coeffs.len()], coeffs, truncation: n }
}

/// Row valuation bound `i·e(p−1) − 1` (rows indexed from 1) of the `U`
/// matrix in the scaled basis `p^{e m} d_p^m`.
pub fn serre_row_bound(p: u64, i: usize) -> Val {
    let e = rat(12, (p * p - 1) as i64);
    Val::Finite(rat_int(i as i64) * e * rat_int(p as i64 - 1) - Rat::one())
}

/// Valuation `V` such that `a_m` computed from the `n`-truncation differs
/// from the true `a_m` by something of valuation `≥ V`: the sum of the `m − 1`
/// smallest row bounds plus the bound of the first omitted row.
pub fn truncation_error_bound(row_bound: &dyn Fn(usize) -> Val, m: usize, n: usize) -> Val {
    if m == 0 {
        return Val::Infinity;
    }
    let mut bounds: Vec<Val> = (1..=n).map(row_bound).collect();
    bounds.sort();
    let head: Val = bounds.into_iter().take(m - 1).fold(Val::int(0), |a, b| a + b);
    head + row_bound(n + 1)
}

/// Marks `a_m` as certified when its valuation is below the truncation error.
pub fn certify_truncation(cs: &mut CharSeries, row_bound: &dyn Fn(usize) -> Val) {
    for m in 0..cs.coeffs.len() {
        let v = cs.valuation(m);
        cs.certified[m] = m == 0 || (!v.is_infinite() && v < truncation_error_bound(row_bound, m, cs.truncation));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedValuation {
    pub m: usize,
    pub valuation: Val,
    /// Truncation error bound at the smaller size.
    pub bound: Val,
    pub certified: bool,
}

impl CertifiedValuation {
    /// A rigorous lower bound for the true valuation: the observed value when
    /// certified, otherwise the smaller of observation and truncation error.
    pub fn lower_bound(&self) -> Val {
        if self.certified {
            self.valuation.clone()
        } else {
            self.valuation.clone().min(self.bound.clone())
        }
    }
}

/// Points `(m, lower bound)` for a Newton polygon that lies below the true one.
pub fn lower_bound_points(vals: &[CertifiedValuation]) -> Vec<(u64, Val)> {
    vals.iter().map(|c| (c.m as u64, c.lower_bound())).collect()
}

/// Points `(m, v)` for the certified entries only.
pub fn certified_points(vals: &[CertifiedValuation]) -> Vec<(u64, Val)> {
    vals.iter().filter(|c| c.certified).map(|c| (c.m as u64, c.valuation.clone())).collect()
}

/// Combines the truncation certificate at size `n` with agreement of the
/// valuation at a larger size. Uncertified entries are lower bounds only.
pub fn certify_pair(
    small: &CharSeries,
    large: &CharSeries,
    row_bound: &dyn Fn(usize) -> Val,
    m_max: usize,
) -> Vec<CertifiedValuation> {
    (0..=m_max.min(small.truncation))
        .map(|m| {
            let v = small.valuation(m);
            let bound = truncation_error_bound(row_bound, m, small.truncation);
            let certified = m == 0 || (!v.is_infinite() && v < bound && large.valuation(m) == v);
            CertifiedValuation { m, valuation: v, bound, certified }
        })
        .collect()
}

/// Certified valuations `v_p(a_m)` of the weight-0 characteristic series for
/// `m ≤ m_max`, from truncations of sizes `m_max + 15` and `m_max + 25`.
pub fn stable_valuations(p: u64, m_max: usize, mode: ExecMode) -> crate::Result<Vec<CertifiedValuation>> {
    crate::check_prime(p)?;
    let n = m_max + 15;
    let big = crate::umatrix::build_matrix_genfun(p, n + 10, n + 10)?;
    let small = char_series_trunc(&big, n, mode);
    let large = char_series_trunc(&big, n + 10, mode);
    Ok(certify_pair(&small, &large, &|i| serre_row_bound(p, i), m_max))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub start: u64,
    pub end: u64,
    pub slope: Val,
    pub multiplicity: u64,
}

/// Lower convex hull of points `(m, v)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(u64, Val)>,
    pub sides: Vec<Side>,
}

impl NewtonPolygon {
    /// Value of the polygon at `m`, inside the span of its vertices.
    pub fn eval(&self, m: u64) -> Option<Rat> {
        let first = self.vertices.first()?;
        if m < first.0 || m > self.vertices.last()?.0 {
            return None;
        }
        if self.sides.is_empty() {
            return first.1.finite().cloned();
        }
        let side = self.sides.iter().find(|s| s.start <= m && m <= s.end)?;
        let y0 = self.vertices.iter().find(|v| v.0 == side.start)?.1.finite()?.clone();
        Some(y0 + side.slope.finite()? * rat_int((m - side.start) as i64))
    }

    /// Slopes listed with multiplicity, in increasing order.
    pub fn slope_list(&self) -> Vec<Rat> {
        self.sides
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.slope.finite().unwrap().clone(), s.multiplicity as usize))
            .collect()
    }
}

/// Lower convex hull; points with infinite valuation are ignored, collinear
/// interior points are dropped so each side is as long as possible.
pub fn newton_polygon(points: &[(u64, Val)]) -> NewtonPolygon {
    let mut pts: Vec<(u64, Rat)> =
        points.iter().filter_map(|(m, v)| v.finite().map(|r| (*m, r.clone()))).collect();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    pts.dedup_by(|b, a| a.0 == b.0);
    let mut hull: Vec<(u64, Rat)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let (o, a) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            // Drop `a` unless it lies strictly below segment o–pt.
            let cross = rat_int((a.0 - o.0) as i64) * (&pt.1 - &o.1) - (&a.1 - &o.1) * rat_int((pt.0 - o.0) as i64);
            if cross <= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let sides = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            Side {
                start: w[0].0,
                end: w[1].0,
                slope: Val::Finite((&w[1].1 - &w[0].1) / rat_int(len as i64)),
                multiplicity: len,
            }
        })
        .collect();
    NewtonPolygon { vertices: hull.into_iter().map(|(m, v)| (m, Val::Finite(v))).collect(), sides }
}

/// `(3/2)m(m−1) + 2m`.
pub fn nhat_prime0(m: u64) -> Val {
    let m = m as i64;
    Val::Finite(rat(3 * m * (m - 1), 2) + rat_int(2 * m))
}

/// `m_i = (3^i − 1)/2`.
pub fn m_index(i: u32) -> u64 {
    (3u64.pow(i) - 1) / 2
}

/// The `m` at which the observed valuation meets the parabola.
pub fn equality_set(points: &[(u64, Val)]) -> BTreeSet<u64> {
    points.iter().filter(|(m, v)| *v == nhat_prime0(*m)).map(|(m, _)| *m).collect()
}

/// The secant through the parabola at `m_i` and `m_{i+1}`, evaluated at `m`.
pub fn secant_upper(i: u32, m: u64) -> Rat {
    let (a, b) = (m_index(i), m_index(i + 1));
    let ya = nhat_prime0(a).finite().unwrap().clone();
    let yb = nhat_prime0(b).finite().unwrap().clone();
    let slope = (yb - &ya) / rat_int((b - a) as i64);
    ya + slope * rat_int(m as i64 - a as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecantCheck {
    pub i: u32,
    pub m: u64,
    pub lower: Val,
    pub polygon: Val,
    pub upper: Val,
    pub holds: bool,
}

/// Checks `N̂′₀(m) < N′₀(m) ≤ L(m)` for every `m_i < m < m_{i+1}` inside the
/// span of `polygon`.
pub fn secant_checks(polygon: &NewtonPolygon, m_max: u64) -> Vec<SecantCheck> {
    let mut out = Vec::new();
    for i in 0.. {
        let (a, b) = (m_index(i), m_index(i + 1));
        if a >= m_max {
            break;
        }
        for m in a + 1..b.min(m_max + 1) {
            let Some(n) = polygon.eval(m) else { continue };
            let lower = nhat_prime0(m);
            let upper = secant_upper(i, m);
            let nv = Val::Finite(n);
            let holds = lower < nv && nv <= Val::Finite(upper.clone());
            out.push(SecantCheck { i, m, lower, polygon: nv, upper: Val::Finite(upper), holds });
        }
    }
    out
}

/// `P = (1 − t)·Q`.
pub fn p_from_q(q: &CharSeries) -> CharSeries {
    let mut coeffs = q.coeffs.clone();
    coeffs.push(BigInt::zero());
    for m in (1..coeffs.len()).rev() {
        let prev = coeffs[m - 1].clone();
        coeffs[m] -= prev;
    }
    let mut certified = vec![false; coeffs.len()];
    certified[0] = true;
    for m in 1..coeffs.len() {
        certified[m] = q.certified.get(m).copied().unwrap_or(false) && q.certified[m - 1];
    }
    CharSeries { p: q.p, weight: q.weight, coeffs, certified, truncation: q.truncation }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn small_char_series() {
        let z = ints(&[&[0, 0], &[0, 0]]);
        assert_eq!(char_poly_coeffs(&z, 2, ExecMode::Sequential), vec![BigInt::one(), BigInt::zero(), BigInt::zero()]);
        let d = ints(&[&[3, 0], &[0, 9]]);
        let c = char_poly_coeffs(&d, 2, ExecMode::Parallel);
        assert_eq!(c, vec![BigInt::from(1), BigInt::from(-12), BigInt::from(27)]);
        assert_eq!(char_poly_coeffs(&d, 1, ExecMode::Sequential), vec![BigInt::from(1), BigInt::from(-3)]);
    }

    #[test]
    fn large_entries_reconstruct() {
        // Upper triangular: det(1 − tA) = ∏(1 − a_ii t).
        let big = BigInt::from(3).pow(500u32);
        let a = vec![
            vec![big.clone(), BigInt::from(5), -big.clone()],
            vec![BigInt::zero(), -&big + 1, big.clone()],
            vec![BigInt::zero(), BigInt::zero(), BigInt::from(7)],
        ];
        let c = char_poly_coeffs(&a, 3, ExecMode::Sequential);
        let (x, y, z) = (&a[0][0], &a[1][1], &a[2][2]);
        assert_eq!(c[1], -(x + y + z));
        assert_eq!(c[2], x * y + x * z + y * z);
        assert_eq!(c[3], -(x * y * z));
    }

    #[test]
    fn truncation_bound_examples() {
        let rb = |i: usize| serre_row_bound(3, i);
        assert_eq!(rb(1), Val::int(2));
        assert_eq!(truncation_error_bound(&rb, 2, 10), Val::int(34));
        for n in 1..20 {
            assert_eq!(truncation_error_bound(&rb, 1, n), Val::int(3 * n as i64 + 2));
        }
        assert_eq!(serre_row_bound(2, 3), Val::int(11));
    }

    #[test]
    fn polygon_examples() {
        let np = newton_polygon(&[(0, Val::int(0)), (1, Val::int(2)), (2, Val::int(7))]);
        let slopes: Vec<_> = np.sides.iter().map(|s| (s.slope.clone(), s.multiplicity)).collect();
        assert_eq!(slopes, vec![(Val::int(2), 1), (Val::int(5), 1)]);
        assert!(newton_polygon(&[(3, Val::int(1))]).sides.is_empty());
        let col = newton_polygon(&[(0, Val::int(0)), (1, Val::int(1)), (2, Val::int(2)), (3, Val::int(3))]);
        assert_eq!(col.sides.len(), 1);
        assert_eq!(col.sides[0].multiplicity, 3);
        assert_eq!(col.vertices.len(), 2);
        let inf = newton_polygon(&[(0, Val::int(0)), (1, Val::Infinity), (2, Val::int(2))]);
        assert_eq!(inf.sides[0].multiplicity, 2);
        assert_eq!(inf.eval(1), Some(rat_int(1)));
    }

    #[test]
    fn parabola_values() {
        assert_eq!(nhat_prime0(1), Val::int(2));
        assert_eq!(nhat_prime0(4), Val::int(26));
        assert_eq!(nhat_prime0(40), Val::int(2420));
        assert_eq!((0..5).map(m_index).collect::<Vec<_>>(), vec![0, 1, 4, 13, 40]);
        assert_eq!(secant_upper(1, 2), rat_int(10));
        assert_eq!(secant_upper(2, 5), rat_int(52));
        for i in 0..4 {
            assert_eq!(Val::Finite(secant_upper(i, m_index(i))), nhat_prime0(m_index(i)));
            assert_eq!(Val::Finite(secant_upper(i, m_index(i + 1))), nhat_prime0(m_index(i + 1)));
        }
    }

    #[test]
    fn p_from_q_examples() {
        let q = CharSeries { p: 3, weight: 0, coeffs: vec![BigInt::one()], certified: vec![true], truncation: 0 };
        assert_eq!(p_from_q(&q).coeffs, vec![BigInt::one(), BigInt::from(-1)]);
        let q = CharSeries {
            p: 3,
            weight: 0,
            coeffs: vec![BigInt::one(), BigInt::from(-9)],
            certified: vec![true, true],
            truncation: 1,
        };
        let p = p_from_q(&q);
        assert_eq!(p.coeffs[1], BigInt::from(-10));
        assert_eq!(p.valuation(1), Val::int(0));
    }

    proptest::proptest! {
        #[test]
        fn hull_is_convex_and_below(vals in proptest::collection::vec(0i64..60, 2..30)) {
            let pts: Vec<(u64, Val)> = vals.iter().enumerate().map(|(m, &v)| (m as u64, Val::int(v))).collect();
            let np = newton_polygon(&pts);
            for w in np.sides.windows(2) {
                proptest::prop_assert!(w[0].slope < w[1].slope);
            }
            for (m, v) in &pts {
                proptest::prop_assert!(Val::Finite(np.eval(*m).unwrap()) <= *v);
            }
            for (m, v) in &np.vertices {
                proptest::prop_assert!(pts.iter().any(|(pm, pv)| pm == m && pv == v));
            }
        }
    }
}
