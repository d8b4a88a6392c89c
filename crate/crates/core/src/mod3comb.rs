//! Bivariate Laurent series over `F_3` behind the `p = 3` equality set: the
//! generating function `Ḡ` of `K̄`, its factorizations, the functional
//! identities, and excellent permutations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::F3;
use crate::charseries::m_index;
use crate::error::{Error, Result};
use crate::umatrix::{det_f3, diagonal_major};

/// A Laurent series in `x, y` over `F_3`, exact in total degree `≤ reliable`
/// (`None` for an exact polynomial).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct F3BiSeries {
    terms: BTreeMap<(i32, i32), F3>,
    reliable: Option<i32>,
}

impl F3BiSeries {
    pub fn polynomial(terms: &[((i32, i32), i64)]) -> Self {
        let mut s = F3BiSeries::default();
        for &(e, c) in terms {
            s.add_term(e, F3::new(c));
        }
        s
    }

    pub fn one() -> Self {
        Self::polynomial(&[((0, 0), 1)])
    }

    pub fn reliable(&self) -> Option<i32> {
        self.reliable
    }

    /// Coefficient of `x^i y^j`; `None` outside the reliable window.
    pub fn get(&self, i: i32, j: i32) -> Option<F3> {
        if self.reliable.is_some_and(|d| i + j > d) {
            return None;
        }
        Some(self.terms.get(&(i, j)).copied().unwrap_or(F3::ZERO))
    }

    pub fn coeff(&self, i: i32, j: i32) -> F3 {
        self.get(i, j).unwrap_or_else(|| panic!("x^{i}y^{j} is beyond the reliable window"))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), F3)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    fn add_term(&mut self, e: (i32, i32), c: F3) {
        if self.reliable.is_some_and(|d| e.0 + e.1 > d) {
            return;
        }
        let v = self.terms.get(&e).copied().unwrap_or(F3::ZERO) + c;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    /// Smallest total degree in the support.
    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    pub fn truncate(&self, degree: i32) -> Self {
        let reliable = Some(self.reliable.map_or(degree, |d| d.min(degree)));
        let terms = self.terms.iter().filter(|(e, _)| e.0 + e.1 <= degree).map(|(&e, &c)| (e, c)).collect();
        F3BiSeries { terms, reliable }
    }

    pub fn scale(&self, c: F3) -> Self {
        let mut s = F3BiSeries { terms: BTreeMap::new(), reliable: self.reliable };
        for (&e, &v) in &self.terms {
            s.add_term(e, v * c);
        }
        s
    }

    pub fn add(&self, o: &Self) -> Self {
        let reliable = match (self.reliable, o.reliable) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut s = F3BiSeries { terms: BTreeMap::new(), reliable };
        for (&e, &c) in self.terms.iter().chain(&o.terms) {
            s.add_term(e, c);
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(F3::MINUS_ONE))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (ma, mb) = (self.min_degree(), o.min_degree());
        let reliable = match (self.reliable, o.reliable) {
            (None, None) => None,
            (Some(a), None) => Some(a + mb.unwrap_or(0)),
            (None, Some(b)) => Some(b + ma.unwrap_or(0)),
            (Some(a), Some(b)) => Some((a + mb.unwrap_or(b)).min(b + ma.unwrap_or(a))),
        };
        let mut s = F3BiSeries { terms: BTreeMap::new(), reliable };
        for (&(i, j), &c) in &self.terms {
            for (&(k, l), &d) in &o.terms {
                s.add_term((i + k, j + l), c * d);
            }
        }
        s
    }

    /// `f(x³, y³)`, which equals `f³` in characteristic 3.
    pub fn frobenius(&self) -> Self {
        F3BiSeries {
            terms: self.terms.iter().map(|(&(i, j), &c)| ((3 * i, 3 * j), c)).collect(),
            reliable: self.reliable.map(|d| 3 * d + 2),
        }
    }

    pub fn transpose(&self) -> Self {
        F3BiSeries { terms: self.terms.iter().map(|(&(i, j), &c)| ((j, i), c)).collect(), reliable: self.reliable }
    }

    /// `1/(1 − u)` to total degree `degree`, for `u` of positive minimal degree.
    pub fn geometric(u: &Self, degree: i32) -> Result<Self> {
        let md = u.min_degree().unwrap_or(i32::MAX);
        if md < 1 {
            return Err(Error::InvalidArgument("geometric series needs positive minimal degree".into()));
        }
        let u = u.truncate(degree);
        let mut sum = Self::one().truncate(degree);
        let mut pw = Self::one().truncate(degree);
        for _ in 0..=degree / md {
            pw = pw.mul(&u).truncate(degree);
            sum = sum.add(&pw);
        }
        sum.reliable = Some(degree.min(u.reliable.unwrap_or(degree)));
        Ok(sum)
    }

    /// First exponent, in order, where both series are reliable and differ.
    pub fn first_difference(&self, o: &Self) -> Option<(i32, i32)> {
        let d = self.sub(o);
        d.terms.keys().find(|e| self.get(e.0, e.1).is_some() && o.get(e.0, e.1).is_some()).copied()
    }

    pub fn to_json(&self) -> F3BiSeriesJson {
        F3BiSeriesJson {
            reliable: self.reliable,
            terms: self.terms.iter().map(|(&(i, j), &c)| (i, j, c.signed())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct F3BiSeriesJson {
    pub reliable: Option<i32>,
    /// `(i, j, c)` with `c ∈ {−1, 1}`.
    pub terms: Vec<(i32, i32, i8)>,
}

/// Which index `x` tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `x^i y^j` ↔ `K̄_{ij}`.
    Rows,
    /// `x^i y^j` ↔ `K̄_{ji}`.
    Columns,
}

/// `u = xy + x³y + x²y² + xy³`.
pub fn u_poly() -> F3BiSeries {
    F3BiSeries::polynomial(&[((1, 1), 1), ((3, 1), 1), ((2, 2), 1), ((1, 3), 1)])
}

/// `Ḡ` to total degree `degree`: the reduction of
/// `(10xy + 4√3xy(x+2y) + xy(x²+2xy+3y²)) / (1 − xy(10 + 4√3(x+y) + x²+xy+y²))`
/// modulo `√3`, i.e. `xy(1 + x² − xy)/(1 − u)`.
pub fn gbar(degree: i32, orientation: Orientation) -> Result<F3BiSeries> {
    let num = F3BiSeries::polynomial(&[((1, 1), 1), ((3, 1), 1), ((2, 2), -1)]);
    let g = num.mul(&F3BiSeries::geometric(&u_poly(), degree)?).truncate(degree);
    Ok(match orientation {
        Orientation::Rows => g,
        Orientation::Columns => g.transpose(),
    })
}

/// `Ḡ₀ = xy(1 − xy + y²)`.
pub fn gbar0() -> F3BiSeries {
    F3BiSeries::polynomial(&[((1, 1), 1), ((2, 2), -1), ((1, 3), 1)])
}

fn frob_iter(f: &F3BiSeries, i: u32, degree: i32) -> F3BiSeries {
    let mut g = f.truncate(degree);
    for _ in 0..i {
        g = g.frobenius().truncate(degree);
    }
    g
}

/// `R(i) = (1 + u + u²)^{3^i}`, truncated to `degree`.
pub fn r_factor(i: u32, degree: i32) -> F3BiSeries {
    let u = u_poly();
    let base = F3BiSeries::one().add(&u).add(&u.mul(&u));
    frob_iter(&base, i, degree)
}

/// `Ḡ_j = Ḡ₀ ∏_{i<j} R(i)`.
pub fn gbar_j(j: u32, degree: i32) -> F3BiSeries {
    (0..j).fold(gbar0().truncate(degree), |g, i| g.mul(&r_factor(i, degree)).truncate(degree))
}

/// `C̄_j = ∏_{i≥j} R(i)`; factors with `2·3^i > degree` are `1` on the window.
pub fn cbar_j(j: u32, degree: i32) -> F3BiSeries {
    let mut c = F3BiSeries::one().truncate(degree);
    let mut i = j;
    while 2 * 3i64.pow(i) <= degree as i64 {
        c = c.mul(&r_factor(i, degree)).truncate(degree);
        i += 1;
    }
    c
}

/// `L = x⁻¹y + 1 − xy⁻¹ + y⁻²`.
pub fn laurent_l() -> F3BiSeries {
    F3BiSeries::polynomial(&[((-1, 1), 1), ((0, 0), 1), ((1, -1), -1), ((0, -2), 1)])
}

/// `xy + x²y⁴ + x⁶y²`.
pub fn tail_poly() -> F3BiSeries {
    F3BiSeries::polynomial(&[((1, 1), 1), ((2, 4), 1), ((6, 2), 1)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub orientation: Option<Orientation>,
    /// Total degree on which both sides are exact.
    pub window: i32,
    pub holds: bool,
    /// First differing `(i, j)` with the two coefficients.
    pub mismatch: Option<(i32, i32, i8, i8)>,
}

fn compare(name: &str, orientation: Option<Orientation>, lhs: &F3BiSeries, rhs: &F3BiSeries) -> IdentityCheck {
    let window = lhs.reliable().unwrap_or(i32::MAX).min(rhs.reliable().unwrap_or(i32::MAX));
    let mismatch = lhs
        .first_difference(rhs)
        .map(|(i, j)| (i, j, lhs.coeff(i, j).signed(), rhs.coeff(i, j).signed()));
    IdentityCheck { name: name.into(), orientation, window, holds: mismatch.is_none(), mismatch }
}

/// `Ḡ = Ḡ_j C̄_j` on the window.
pub fn verify_factorization(j: u32, degree: i32, orientation: Orientation) -> Result<IdentityCheck> {
    let lhs = gbar(degree, orientation)?;
    let rhs = gbar_j(j, degree).mul(&cbar_j(j, degree)).truncate(degree);
    Ok(compare(&format!("G = G_{j} C_{j}"), Some(orientation), &lhs, &rhs))
}

/// `C̄_j³ = C̄_{j+1}` on the window.
pub fn verify_cbar_cube(j: u32, degree: i32) -> IdentityCheck {
    let c = cbar_j(j, degree);
    let lhs = c.mul(&c).mul(&c).truncate(degree);
    compare(&format!("C_{j}^3 = C_{}", j + 1), None, &lhs, &cbar_j(j + 1, degree))
}

/// `Ḡ₁ = L·Ḡ₀³ + xy + x²y⁴ + x⁶y²`, with `Ḡ₀, L` read in `orientation`
/// (`Columns` is the literal reading).
pub fn verify_recg(degree: i32, orientation: Orientation) -> IdentityCheck {
    let (g0, l) = match orientation {
        Orientation::Columns => (gbar0(), laurent_l()),
        Orientation::Rows => (gbar0().transpose(), laurent_l().transpose()),
    };
    let g1 = g0.mul(&r_factor(0, degree)).truncate(degree);
    let rhs = l.mul(&g0.frobenius()).add(&tail_poly()).truncate(degree);
    compare("recg", Some(orientation), &g1, &rhs)
}

/// `Ḡ = L·Ḡ³ + (xy + x²y⁴ + x⁶y²)·C̄₁`.
pub fn verify_gwrite(degree: i32, orientation: Orientation) -> Result<IdentityCheck> {
    // L has minimal degree −2, so Ḡ³ is needed two degrees beyond the window.
    let g = gbar(degree + 2, orientation)?;
    let c1 = match orientation {
        Orientation::Columns => cbar_j(1, degree),
        Orientation::Rows => cbar_j(1, degree).transpose(),
    };
    let rhs = laurent_l().mul(&g.frobenius()).add(&tail_poly().mul(&c1)).truncate(degree);
    Ok(compare("gwrite", Some(orientation), &g.truncate(degree), &rhs))
}

/// The polynomial `T` with `Ḡ = L·Ḡ³ + T·C̄₁` on the window, i.e.
/// `(Ḡ − L·Ḡ³)·C̄₁⁻¹` where `C̄₁⁻¹ = (1 − u)³ = 1 − u³`.
pub fn gwrite_tail(degree: i32, orientation: Orientation) -> Result<F3BiSeries> {
    let g = gbar(degree + 2, orientation)?;
    let res = g.sub(&laurent_l().mul(&g.frobenius())).truncate(degree);
    let cinv = F3BiSeries::one().sub(&u_poly().frobenius());
    let cinv = match orientation {
        Orientation::Columns => cinv,
        Orientation::Rows => cinv.transpose(),
    };
    Ok(res.mul(&cinv).truncate(degree))
}

/// Coefficients of `x^i y^{3j}` in `Ḡ` vanish when `3 ∤ i`.
pub fn vanishing_check(degree: i32, orientation: Orientation) -> Result<IdentityCheck> {
    let g = gbar(degree, orientation)?;
    let bad = g.terms().find(|&((i, j), _)| j % 3 == 0 && i % 3 != 0);
    Ok(IdentityCheck {
        name: "vanishing".into(),
        orientation: Some(orientation),
        window: degree,
        holds: bad.is_none(),
        mismatch: bad.map(|((i, j), c)| (i, j, c.signed(), 0)),
    })
}

/// `(fg)³ = f³g³` and `f·f·f = f(x³, y³)` on the window.
pub fn frobenius_check(f: &F3BiSeries, g: &F3BiSeries) -> bool {
    let fg = f.mul(g);
    let a = fg.frobenius().first_difference(&f.frobenius().mul(&g.frobenius())).is_none();
    let b = f.mul(f).mul(f).first_difference(&f.frobenius()).is_none();
    a && b
}

/// `K̄` (rows × cols, 0-based storage) read off `Ḡ`.
pub fn kbar_from_gbar(rows: usize, cols: usize) -> Result<Vec<Vec<F3>>> {
    let g = gbar((rows + cols) as i32, Orientation::Rows)?;
    Ok((1..=rows).map(|i| (1..=cols).map(|j| g.coeff(i as i32, j as i32)).collect()).collect())
}

/// First `(i, j)` (1-based) where `kbar` differs from `Ḡ`'s coefficients.
pub fn gbar_kbar_mismatch(kbar: &[Vec<F3>]) -> Result<Option<(usize, usize)>> {
    let rows = kbar.len();
    let cols = kbar.first().map_or(0, |r| r.len());
    let g = kbar_from_gbar(rows, cols)?;
    Ok((0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).find(|&(i, j)| g[i][j] != kbar[i][j]).map(|(i, j)| (i + 1, j + 1)))
}

/// `c_m(K̄)`, the upper `m × m` diagonal minor over `F_3`.
pub fn upper_minor_f3(kbar: &[Vec<F3>], m: usize) -> Result<F3> {
    if m == 0 {
        return Ok(F3::ONE);
    }
    let s: Vec<usize> = (1..=m).collect();
    Ok(det_f3(&diagonal_major(kbar, &s)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcellentReport {
    pub m: usize,
    pub count: u64,
    /// Permutations as 1-based images `π(1), …, π(m)`; at most a few are kept.
    pub witnesses: Vec<Vec<usize>>,
    /// `Σ sign(π) ∏ K̄_{i,π(i)}` over excellent `π`.
    pub signed_sum: i8,
    pub minor: i8,
}

fn perm_sign(pi: &[usize]) -> F3 {
    let mut seen = vec![false; pi.len()];
    let mut sign = F3::ONE;
    for s in 0..pi.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut c = s;
        while !seen[c] {
            seen[c] = true;
            c = pi[c] - 1;
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All degree-`m` permutations whose selection against `K̄` is nonzero,
/// found as perfect matchings on the nonzero support.
pub fn enumerate_excellent(kbar: &[Vec<F3>], m: usize) -> Result<ExcellentReport> {
    if kbar.len() < m || kbar.iter().take(m).any(|r| r.len() < m) {
        return Err(Error::InvalidArgument(format!("K̄ smaller than {m}")));
    }
    let support: Vec<Vec<usize>> =
        (0..m).map(|i| (0..m).filter(|&j| !kbar[i][j].is_zero()).collect()).collect();
    // For pruning: rows that can still reach column j.
    let col_rows: Vec<Vec<usize>> = (0..m).map(|j| (0..m).filter(|&i| !kbar[i][j].is_zero()).collect()).collect();
    struct St<'a> {
        kbar: &'a [Vec<F3>],
        support: &'a [Vec<usize>],
        col_rows: &'a [Vec<usize>],
        used: Vec<bool>,
        pi: Vec<usize>,
        count: u64,
        sum: F3,
        witnesses: Vec<Vec<usize>>,
    }
    fn dfs(st: &mut St<'_>, row: usize) {
        let m = st.support.len();
        if row == m {
            st.count += 1;
            let mut prod = perm_sign(&st.pi);
            for (i, &j) in st.pi.iter().enumerate() {
                prod = prod * st.kbar[i][j - 1];
            }
            st.sum = st.sum + prod;
            if st.witnesses.len() < 4 {
                st.witnesses.push(st.pi.clone());
            }
            return;
        }
        // Every free column needs a remaining row.
        for j in 0..m {
            if !st.used[j] && !st.col_rows[j].iter().any(|&i| i >= row) {
                return;
            }
        }
        for idx in 0..st.support[row].len() {
            let j = st.support[row][idx];
            if st.used[j] {
                continue;
            }
            st.used[j] = true;
            st.pi.push(j + 1);
            dfs(st, row + 1);
            st.pi.pop();
            st.used[j] = false;
        }
    }
    let mut st = St {
        kbar,
        support: &support,
        col_rows: &col_rows,
        used: vec![false; m],
        pi: Vec::with_capacity(m),
        count: 0,
        sum: F3::ZERO,
        witnesses: Vec::new(),
    };
    dfs(&mut st, 0);
    Ok(ExcellentReport {
        m,
        count: st.count,
        witnesses: st.witnesses,
        signed_sum: st.sum.signed(),
        minor: upper_minor_f3(kbar, m)?.signed(),
    })
}

/// Inverts the split `σ(i) = π(3i)/3`, `σ′(i) = (π(3i−1) − 1)/3`,
/// `σ″(i) = (π(3i+1) + 1)/3` with `π(1) = 1`.
pub fn join_pi(sigma: &[usize], sigma1: &[usize], sigma2: &[usize]) -> Result<Vec<usize>> {
    let k = sigma.len();
    if sigma1.len() != k || sigma2.len() != k {
        return Err(Error::InvalidArgument("split permutations must share a degree".into()));
    }
    let mut pi = vec![0; 3 * k + 1];
    pi[0] = 1;
    for i in 1..=k {
        pi[3 * i - 1] = 3 * sigma[i - 1];
        pi[3 * i - 2] = 3 * sigma1[i - 1] + 1;
        pi[3 * i] = 3 * sigma2[i - 1] - 1;
    }
    Ok(pi)
}

/// Splits a degree `3k + 1` permutation into `(σ, σ′, σ″)`.
pub fn split_pi(pi: &[usize]) -> Option<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    if pi.is_empty() || pi[0] != 1 || pi.len() % 3 != 1 {
        return None;
    }
    let k = pi.len() / 3;
    let mut s = Vec::with_capacity(k);
    let mut s1 = Vec::with_capacity(k);
    let mut s2 = Vec::with_capacity(k);
    for i in 1..=k {
        let (a, b, c) = (pi[3 * i - 1], pi[3 * i - 2], pi[3 * i]);
        if a % 3 != 0 || b % 3 != 1 || c % 3 != 2 {
            return None;
        }
        s.push(a / 3);
        s1.push((b - 1) / 3);
        s2.push((c + 1) / 3);
    }
    Some((s, s1, s2))
}

/// The permutations of degree `m_0, m_1, …, m_levels` built by joining three
/// copies of the previous one.
pub fn splitpi_chain(levels: u32) -> Result<Vec<Vec<usize>>> {
    let mut chain = vec![Vec::new()];
    for _ in 0..levels {
        let prev = chain.last().unwrap();
        chain.push(join_pi(prev, prev, prev)?);
    }
    Ok(chain)
}

pub fn is_excellent(kbar: &[Vec<F3>], pi: &[usize]) -> bool {
    pi.iter().enumerate().all(|(i, &j)| kbar.get(i).and_then(|r| r.get(j - 1)).is_some_and(|c| !c.is_zero()))
}

pub fn inverse_perm(pi: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; pi.len()];
    for (i, &j) in pi.iter().enumerate() {
        inv[j - 1] = i + 1;
    }
    inv
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitpiLevel {
    pub m: usize,
    pub excellent: bool,
    pub inverse_excellent: bool,
    pub minor: i8,
}

/// Builds the chain to `m_levels` and checks each member against `K̄`.
pub fn splitpi_report(kbar: &[Vec<F3>], levels: u32) -> Result<Vec<SplitpiLevel>> {
    splitpi_chain(levels)?
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(i, pi)| {
            debug_assert_eq!(pi.len() as u64, m_index(i as u32));
            Ok(SplitpiLevel {
                m: pi.len(),
                excellent: is_excellent(kbar, &pi),
                inverse_excellent: is_excellent(kbar, &inverse_perm(&pi)),
                minor: upper_minor_f3(kbar, pi.len())?.signed(),
            })
        })
        .collect()
}

/// `{m ≤ m_max : c_m(K̄) ≠ 0}`.
pub fn nonzero_minors(kbar: &[Vec<F3>], m_max: usize) -> Result<Vec<usize>> {
    (0..=m_max).filter_map(|m| upper_minor_f3(kbar, m).map(|c| (!c.is_zero()).then_some(m)).transpose()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::umatrix::{build_matrix_genfun, dk_factor, scaled_matrix_p3};

    #[test]
    fn gbar_leading_terms() {
        let g = gbar(20, Orientation::Rows).unwrap();
        assert_eq!(g.coeff(1, 1), F3::ONE);
        assert_eq!(g.coeff(2, 1), F3::ZERO);
        assert_eq!(g.coeff(3, 1), F3::ONE);
        assert_eq!(g.get(15, 6), None);
        let g0 = gbar0();
        assert_eq!(g0.coeff(2, 2), F3::MINUS_ONE);
        assert_eq!(g0.coeff(1, 3), F3::ONE);
        assert_eq!(r_factor(2, 30).coeff(0, 0), F3::ONE);
    }

    #[test]
    fn gbar_equals_kbar() {
        let m = build_matrix_genfun(3, 14, 14).unwrap();
        let f = dk_factor(&scaled_matrix_p3(&m).unwrap()).unwrap();
        assert_eq!(gbar_kbar_mismatch(&f.kbar).unwrap(), None);
    }

    #[test]
    fn factorization_in_column_orientation() {
        for j in 0..3 {
            assert!(verify_factorization(j, 30, Orientation::Columns).unwrap().holds);
        }
        assert!(!verify_factorization(0, 30, Orientation::Rows).unwrap().holds);
        for j in 0..3 {
            assert!(verify_cbar_cube(j, 30).holds);
        }
    }

    #[test]
    fn vanishing_in_row_orientation() {
        let c = vanishing_check(40, Orientation::Rows).unwrap();
        assert!(c.holds, "{c:?}");
        let g = gbar(20, Orientation::Rows).unwrap();
        assert_eq!(g.coeff(1, 3), F3::ZERO);
        assert_eq!(g.coeff(2, 6), F3::ZERO);
    }

    #[test]
    fn printed_identities_and_tail() {
        assert!(!verify_recg(30, Orientation::Columns).holds);
        assert!(!verify_gwrite(30, Orientation::Columns).unwrap().holds);
        let t = gwrite_tail(40, Orientation::Rows).unwrap();
        let expect = F3BiSeries::polynomial(&[
            ((1, 1), 1),
            ((3, 5), 1),
            ((3, 7), 1),
            ((4, 4), 1),
            ((4, 8), -1),
            ((6, 2), 1),
            ((9, 1), -1),
            ((10, 2), 1),
        ]);
        assert_eq!(t.first_difference(&expect), None);
    }

    #[test]
    fn laurent_reliability() {
        let g = gbar(10, Orientation::Rows).unwrap();
        let p = laurent_l().mul(&g);
        assert_eq!(p.reliable(), Some(8));
        assert_eq!(g.frobenius().reliable(), Some(32));
    }

    #[test]
    fn frobenius_property() {
        let g = gbar(12, Orientation::Rows).unwrap();
        assert!(frobenius_check(&g, &laurent_l()));
        assert!(frobenius_check(&gbar0(), &u_poly()));
    }

    #[test]
    fn split_and_join_roundtrip() {
        let chain = splitpi_chain(3).unwrap();
        assert_eq!(chain.iter().map(Vec::len).collect::<Vec<_>>(), vec![0, 1, 4, 13]);
        assert_eq!(chain[1], vec![1]);
        let (a, b, c) = split_pi(&chain[3]).unwrap();
        assert_eq!((a.clone(), b, c), (chain[2].clone(), chain[2].clone(), chain[2].clone()));
        let mut sorted = chain[3].clone();
        sorted.sort();
        assert_eq!(sorted, (1..=13).collect::<Vec<_>>());
    }

    #[test]
    fn excellent_and_minors() {
        let kbar = kbar_from_gbar(14, 14).unwrap();
        for m in 1..=13 {
            let r = enumerate_excellent(&kbar, m).unwrap();
            let expect = u64::from([1, 4, 13].contains(&m));
            assert_eq!(r.count, expect, "m = {m}");
            assert_eq!(r.signed_sum, r.minor, "m = {m}");
        }
        assert_eq!(nonzero_minors(&kbar, 14).unwrap(), vec![0, 1, 4, 13]);
    }

    #[test]
    fn brute_force_excellent_small() {
        let kbar = kbar_from_gbar(6, 6).unwrap();
        for m in 1..=6usize {
            let mut count = 0;
            let mut perm: Vec<usize> = (1..=m).collect();
            // Heap's algorithm.
            let mut c = vec![0; m];
            if is_excellent(&kbar, &perm) {
                count += 1;
            }
            let mut i = 0;
            while i < m {
                if c[i] < i {
                    if i % 2 == 0 { perm.swap(0, i) } else { perm.swap(c[i], i) }
                    if is_excellent(&kbar, &perm) {
                        count += 1;
                    }
                    c[i] += 1;
                    i = 0;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
            assert_eq!(count, enumerate_excellent(&kbar, m).unwrap().count, "m = {m}");
        }
    }
}
