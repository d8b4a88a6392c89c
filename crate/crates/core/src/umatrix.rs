//! The matrix `M` of `U` on the basis `d_p, d_p², …`, built from
//! `q`-expansions and from the generating function `log I_p`; the `p = 3`
//! scaled matrix over `Z[√3]` and its factorisation `M′ = D·K`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{decimal, rat_int, reduce_mod_sqrt3, val_p_int, val_quad3, QuadInt3, Val, F3};
use crate::error::{Error, Result};
use crate::modcurve::{self, e_p, hauptmodul_ints, BiPoly};
use crate::par::{self, ExecMode};
use crate::{check_prime, zs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `d_p^m`.
    Plain,
    /// `p^{e m} d_p^m`.
    Scaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Oracle,
    Genfun,
    Twisted,
}

/// How `Σ M_ij x^i y^j` relates to `(y/p)·∂_y log I_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// `Σ M_ij x^i y^j = (y/p)·∂_y log I_p`.
    Positive,
    /// `Σ M_ij x^i y^j = −(y/p)·∂_y log I_p`.
    Negative,
}

/// Truncation of the matrix of `U` (rows and columns indexed from 1 in the
/// mathematics, from 0 in `entries`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UMatrix {
    pub p: u64,
    pub weight: i64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<BigInt>>,
    pub basis: Basis,
    pub provenance: Provenance,
    pub sign_convention: Option<SignConvention>,
}

impl UMatrix {
    /// Entry `M_ij` with 1-based indices.
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i - 1][j - 1]
    }

    pub fn truncated(&self, rows: usize, cols: usize) -> UMatrix {
        let entries = self.entries.iter().take(rows).map(|r| r[..cols].to_vec()).collect();
        UMatrix { rows, cols, entries, ..self.clone() }
    }

    /// Valuation table `v_p(M_ij)`.
    pub fn valuations(&self) -> Vec<Vec<Val>> {
        self.entries.iter().map(|r| r.iter().map(|x| val_p_int(x, self.p)).collect()).collect()
    }

    pub fn to_json(&self) -> UMatrixJson {
        UMatrixJson {
            p: self.p,
            weight: self.weight,
            rows: self.rows,
            cols: self.cols,
            basis: self.basis,
            provenance: self.provenance,
            sign_convention: self.sign_convention,
            entries: self.entries.iter().map(|r| decimal::strings(r)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UMatrixJson {
    pub p: u64,
    pub weight: i64,
    pub rows: usize,
    pub cols: usize,
    pub basis: Basis,
    pub provenance: Provenance,
    pub sign_convention: Option<SignConvention>,
    pub entries: Vec<Vec<String>>,
}

/// Default `q`-precision for the oracle: `p·n + n + 16` with `n` rows,
/// enlarged if needed so that `d_p^cols` is still visible.
pub fn default_qprec(p: u64, rows: usize, cols: usize) -> usize {
    (p as usize * rows + rows + 16).max(cols + 1)
}

/// Builds `M` by expanding `U(d_p^j)` (coefficient extraction on
/// `q`-expansions) back into powers of `d_p`.
pub fn build_matrix_oracle(p: u64, rows: usize, cols: usize, mode: ExecMode) -> Result<UMatrix> {
    build_matrix_oracle_with_qprec(p, rows, cols, default_qprec(p, rows, cols), mode)
}

pub fn build_matrix_oracle_with_qprec(
    p: u64,
    rows: usize,
    cols: usize,
    qprec: usize,
    mode: ExecMode,
) -> Result<UMatrix> {
    check_prime(p)?;
    let pu = p as usize;
    if qprec <= cols || qprec / pu <= rows {
        return Err(Error::InvalidArgument(format!("q-precision {qprec} too small for {rows}×{cols}")));
    }
    // Precision of U(d^j): coefficients q^0..q^{uprec−1} are determined.
    let uprec = qprec / pu;
    let d = hauptmodul_ints(p, qprec);
    let mut powers = Vec::with_capacity(cols + 1);
    let mut acc = vec![BigInt::zero(); qprec];
    acc[0] = BigInt::one();
    powers.push(acc.clone());
    for _ in 1..=cols.max(uprec) {
        acc = zs::mul(&acc, &d, qprec);
        powers.push(acc.clone());
    }
    let columns: Vec<Result<Vec<BigInt>>> = par::map_range(mode, 1..cols + 1, |j| {
        let mut rem: Vec<BigInt> = (0..uprec).map(|n| powers[j][n * pu].clone()).collect();
        let mut col = vec![BigInt::zero(); rows];
        // d = q + O(q²), so the expansion in powers of d is a unit-triangular solve.
        for i in 1..uprec {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            if i > pu * j {
                return Err(Error::NonzeroResidual(i as i64));
            }
            for (r, x) in rem.iter_mut().zip(&powers[i]).skip(i) {
                *r -= &c * x;
            }
            if i <= rows {
                col[i - 1] = c;
            }
        }
        if !rem[0].is_zero() {
            return Err(Error::NonzeroResidual(0));
        }
        Ok(col)
    });
    let columns = columns.into_iter().collect::<Result<Vec<_>>>()?;
    let entries = (0..rows).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(UMatrix {
        p,
        weight: 0,
        rows,
        cols,
        entries,
        basis: Basis::Plain,
        provenance: Provenance::Oracle,
        sign_convention: None,
    })
}

/// The `y`-coefficients `c_1(x), …, c_p(x)` of `I_p = 1 + Σ c_k(x) y^k`.
pub fn ip_y_coefficients(ip: &BiPoly<BigInt>) -> Vec<Vec<BigInt>> {
    let dx = ip.degree_x() as usize;
    (0..=ip.degree_y())
        .map(|k| (0..=dx).map(|i| ip.coeff(i as u32, k)).collect())
        .collect()
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    zs::mul(a, b, a.len() + b.len() - 1)
}

fn poly_axpy(acc: &mut Vec<BigInt>, s: &BigInt, b: &[BigInt]) {
    if acc.len() < b.len() {
        acc.resize(b.len(), BigInt::zero());
    }
    for (a, x) in acc.iter_mut().zip(b) {
        *a += s * x;
    }
}

/// Columns `1..=cols` (as polynomials in `x`, index = row) of
/// `p·(y/p)·∂_y log I_p = Σ_j R_j(x) y^j`, from `I·R = y·∂_y I`.
fn log_derivative_columns(ip: &BiPoly<BigInt>, cols: usize) -> Vec<Vec<BigInt>> {
    let c = ip_y_coefficients(ip);
    let deg = c.len() - 1;
    let mut r: Vec<Vec<BigInt>> = vec![Vec::new()];
    for j in 1..=cols {
        let mut col = if j <= deg { c[j].iter().map(|x| x * j).collect() } else { Vec::new() };
        for k in 1..=deg.min(j - 1) {
            poly_axpy(&mut col, &BigInt::from(-1), &poly_mul(&c[k], &r[j - k]));
        }
        r.push(col);
    }
    r
}

/// The raw expansion `(y/p)·∂_y log I_p` as a `rows × cols` matrix.
pub fn genfun_raw(p: u64, ip: &BiPoly<BigInt>, rows: usize, cols: usize) -> Result<Vec<Vec<BigInt>>> {
    let r = log_derivative_columns(ip, cols);
    let pb = BigInt::from(p);
    let mut out = vec![vec![BigInt::zero(); cols]; rows];
    for (j, col) in r.iter().enumerate().skip(1) {
        for (i, x) in col.iter().enumerate() {
            let (q, rem) = x.div_rem(&pb);
            if !rem.is_zero() {
                return Err(Error::NonIntegral { index: format!("({i},{j})"), value: format!("{x}/{p}") });
            }
            if (1..=rows).contains(&i) {
                out[i - 1][j - 1] = q;
            } else if i == 0 && !q.is_zero() {
                return Err(Error::NonIntegral { index: format!("(0,{j})"), value: q.to_string() });
            }
        }
    }
    Ok(out)
}

/// Fixes the global sign of the generating-function expansion against a
/// small oracle matrix.
pub fn detect_sign(raw: &[Vec<BigInt>], oracle: &UMatrix) -> Result<SignConvention> {
    let (n, m) = (oracle.rows.min(raw.len()), oracle.cols.min(raw.first().map_or(0, |r| r.len())));
    let same = (0..n).all(|i| (0..m).all(|j| raw[i][j] == oracle.entries[i][j]));
    let neg = (0..n).all(|i| (0..m).all(|j| raw[i][j] == -&oracle.entries[i][j]));
    match (same, neg) {
        (true, _) => Ok(SignConvention::Positive),
        (false, true) => Ok(SignConvention::Negative),
        _ => {
            let (row, col) = (0..n)
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .find(|&(i, j)| raw[i][j] != oracle.entries[i][j] && raw[i][j] != -&oracle.entries[i][j])
                .unwrap_or((0, 0));
            Err(Error::MethodMismatch { row: row + 1, col: col + 1 })
        }
    }
}

/// Builds `M` from `I_p` (computed through `H_p`), with the global sign
/// fixed by comparison with a small oracle matrix.
pub fn build_matrix_genfun(p: u64, rows: usize, cols: usize) -> Result<UMatrix> {
    let ip = modcurve::modular_equation_ip(p)?;
    build_matrix_genfun_from(p, &ip, rows, cols)
}

pub fn build_matrix_genfun_from(p: u64, ip: &BiPoly<BigInt>, rows: usize, cols: usize) -> Result<UMatrix> {
    check_prime(p)?;
    let raw = genfun_raw(p, ip, rows.max(3), cols.max(3))?;
    let probe = build_matrix_oracle(p, 3, 3, ExecMode::Sequential)?;
    let sign = detect_sign(&raw, &probe)?;
    let entries = raw
        .into_iter()
        .take(rows)
        .map(|r| {
            r.into_iter()
                .take(cols)
                .map(|x| if sign == SignConvention::Negative { -x } else { x })
                .collect()
        })
        .collect();
    Ok(UMatrix {
        p,
        weight: 0,
        rows,
        cols,
        entries,
        basis: Basis::Plain,
        provenance: Provenance::Genfun,
        sign_convention: Some(sign),
    })
}

/// Extends columns with the recurrence `M_j = −Σ_{k=1}^{p} c_k(x)·M_{j−k}`
/// valid for `j > deg_y I_p`. `initial` holds columns `1..=deg_y I_p` as
/// polynomials in `x` (index = row, entry 0 unused). Returns columns
/// `1..=upto`.
pub fn column_recurrence(ip: &BiPoly<BigInt>, initial: &[Vec<BigInt>], upto: usize) -> Result<Vec<Vec<BigInt>>> {
    let c = ip_y_coefficients(ip);
    let deg = c.len() - 1;
    if initial.len() < deg {
        return Err(Error::InvalidArgument(format!("need {deg} initial columns, got {}", initial.len())));
    }
    let mut cols: Vec<Vec<BigInt>> = initial[..deg].to_vec();
    for j in deg + 1..=upto {
        let mut col = Vec::new();
        for k in 1..=deg {
            poly_axpy(&mut col, &BigInt::from(-1), &poly_mul(&c[k], &cols[j - k - 1]));
        }
        cols.push(col);
    }
    cols.truncate(upto);
    Ok(cols)
}

/// Full columns (all rows up to `p·j`) for `j = 1..=count`, from the
/// generating function with canonical sign.
pub fn full_columns(p: u64, ip: &BiPoly<BigInt>, count: usize) -> Result<Vec<Vec<BigInt>>> {
    let m = build_matrix_genfun_from(p, ip, 1, 1)?;
    let sign = if m.sign_convention == Some(SignConvention::Negative) { -1 } else { 1 };
    let pb = BigInt::from(p);
    Ok(log_derivative_columns(ip, count)
        .into_iter()
        .skip(1)
        .map(|col| col.into_iter().map(|x| x / &pb * sign).collect())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimparReport {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    /// `(i, j)` with `v_p(M_ij) < e(pi − j) − 1`.
    pub violations: Vec<(usize, usize)>,
    /// Smallest `v_p(M_ij) − (e(pi − j) − 1)` over nonzero entries.
    pub min_margin: Option<Val>,
    pub holds: bool,
}

/// Checks `v_p(M_ij) ≥ e(pi − j) − 1` for every entry.
pub fn simpar_check(m: &UMatrix) -> SimparReport {
    let e = e_p(m.p);
    let mut violations = Vec::new();
    let mut min_margin: Option<Val> = None;
    for i in 1..=m.rows {
        for j in 1..=m.cols {
            let v = val_p_int(m.get(i, j), m.p);
            let Val::Finite(v) = v else { continue };
            let bound = &e * rat_int(m.p as i64 * i as i64 - j as i64) - rat_int(1);
            let margin = Val::Finite(v - bound);
            if margin < Val::int(0) {
                violations.push((i, j));
            }
            if min_margin.as_ref().is_none_or(|mm| margin < *mm) {
                min_margin = Some(margin);
            }
        }
    }
    SimparReport { p: m.p, rows: m.rows, cols: m.cols, holds: violations.is_empty(), violations, min_margin }
}

/// `M′` over `Z[√3]` in the scaled basis `3^{3m/2} d_3^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledMatrix {
    pub rows: usize,
    pub cols: usize,
    pub weight: i64,
    pub entries: Vec<Vec<QuadInt3>>,
    pub basis: Basis,
}

impl ScaledMatrix {
    pub fn get(&self, i: usize, j: usize) -> &QuadInt3 {
        &self.entries[i - 1][j - 1]
    }
}

/// `M′_ij = 3^{(3/2)(j−i)}·M_ij`.
pub fn scaled_matrix_p3(m: &UMatrix) -> Result<ScaledMatrix> {
    if m.p != 3 {
        return Err(Error::InvalidArgument("scaled matrix over Z[√3] needs p = 3".into()));
    }
    let mut entries = vec![vec![QuadInt3::default(); m.cols]; m.rows];
    for i in 1..=m.rows {
        for j in 1..=m.cols {
            let x = QuadInt3::from_int(m.get(i, j).clone());
            entries[i - 1][j - 1] = if j >= i {
                &QuadInt3::sqrt3_pow(3 * (j - i) as u32) * &x
            } else {
                x.div_sqrt3_pow(3 * (i - j) as u32).ok_or_else(|| Error::BoundViolation {
                    row: i,
                    col: j,
                    detail: "scaled entry leaves Z[√3]".into(),
                })?
            };
        }
    }
    Ok(ScaledMatrix { rows: m.rows, cols: m.cols, weight: m.weight, entries, basis: Basis::Scaled })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowBoundInfo {
    pub row: usize,
    pub min_valuation: Val,
    /// `min ≥ 3i − 1`.
    pub holds_minus_one: bool,
    /// `min ≥ 3i`.
    pub holds_plain: bool,
    /// `min = 3i − 1`.
    pub tight_minus_one: bool,
}

/// Row minima of `v(M′_ij)` against the candidate bounds `3i − 1` and `3i`.
pub fn scaled_row_bounds(ms: &ScaledMatrix) -> Vec<RowBoundInfo> {
    (1..=ms.rows)
        .map(|i| {
            let min_valuation =
                (1..=ms.cols).map(|j| val_quad3(ms.get(i, j))).min().unwrap_or(Val::Infinity);
            let b = 3 * i as i64;
            RowBoundInfo {
                row: i,
                holds_minus_one: min_valuation >= Val::int(b - 1),
                holds_plain: min_valuation >= Val::int(b),
                tight_minus_one: min_valuation == Val::int(b - 1),
                min_valuation,
            }
        })
        .collect()
}

/// `M′ = D·K` with `D = diag(3^{3i−1})`, and `K̄ = K mod √3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DKFactor {
    pub d: Vec<BigInt>,
    pub k: Vec<Vec<QuadInt3>>,
    pub kbar: Vec<Vec<F3>>,
}

pub fn dk_factor(ms: &ScaledMatrix) -> Result<DKFactor> {
    let mut d = Vec::with_capacity(ms.rows);
    let mut k = Vec::with_capacity(ms.rows);
    for i in 1..=ms.rows {
        let e = 3 * i as u32 - 1;
        d.push(BigInt::from(3).pow(e));
        let row = (1..=ms.cols)
            .map(|j| {
                ms.get(i, j).div_sqrt3_pow(2 * e).ok_or_else(|| Error::BoundViolation {
                    row: i,
                    col: j,
                    detail: format!("entry not divisible by 3^{e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        k.push(row);
    }
    let kbar = k.iter().map(|r| r.iter().map(reduce_mod_sqrt3).collect()).collect();
    Ok(DKFactor { d, k, kbar })
}

fn check_indices(s: &[usize], size: usize) -> Result<()> {
    for (a, &x) in s.iter().enumerate() {
        if x == 0 || x > size {
            return Err(Error::InvalidArgument(format!("index {x} outside 1..={size}")));
        }
        if s[..a].contains(&x) {
            return Err(Error::InvalidArgument(format!("repeated index {x}")));
        }
    }
    Ok(())
}

/// `A_ij = M_{s_i, s_j}` (1-based `s`).
pub fn diagonal_major<T: Clone>(m: &[Vec<T>], s: &[usize]) -> Result<Vec<Vec<T>>> {
    check_indices(s, m.len().min(m.first().map_or(0, |r| r.len())))?;
    Ok(s.iter().map(|&a| s.iter().map(|&b| m[a - 1][b - 1].clone()).collect()).collect())
}

/// `(M_{s_1,s_{π(1)}}, …, M_{s_n,s_{π(n)}})`; `pi` is 1-based.
pub fn selection<T: Clone>(m: &[Vec<T>], s: &[usize], pi: &[usize]) -> Result<Vec<T>> {
    check_indices(s, m.len().min(m.first().map_or(0, |r| r.len())))?;
    check_indices(pi, s.len())?;
    if pi.len() != s.len() {
        return Err(Error::InvalidArgument("permutation degree differs from |s|".into()));
    }
    Ok(s.iter().zip(pi).map(|(&a, &k)| m[a - 1][s[k - 1] - 1].clone()).collect())
}

/// Fraction-free (Bareiss) determinant.
pub fn det_bareiss(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Determinant of the diagonal major.
pub fn diagonal_minor(m: &[Vec<BigInt>], s: &[usize]) -> Result<BigInt> {
    Ok(det_bareiss(&diagonal_major(m, s)?))
}

/// Determinant over `F_3` by Gaussian elimination.
pub fn det_f3(a: &[Vec<F3>]) -> F3 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = F3::ONE;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return F3::ZERO;
        };
        if r != k {
            m.swap(k, r);
            det = -det;
        }
        det = det * m[k][k];
        let inv = m[k][k].inv().unwrap();
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = m[i][k] * inv;
            for j in k..n {
                let t = m[k][j];
                m[i][j] = m[i][j] - f * t;
            }
        }
    }
    det
}

/// Signed valuation helper: whether `x` is a unit in `Z_p`.
pub fn is_unit(x: &BigInt, p: u64) -> bool {
    !x.is_zero() && !(x % BigInt::from(p)).is_zero()
}

/// Absolute value bound used for reporting.
pub fn max_abs(m: &UMatrix) -> BigInt {
    m.entries.iter().flatten().map(|x| x.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charseries::char_poly_coeffs;
    use crate::modcurve::modular_equation_ip;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn u_of_d2() {
        let m = build_matrix_oracle(2, 4, 3, ExecMode::Sequential).unwrap();
        assert_eq!(m.get(1, 1), &BigInt::from(24));
        assert_eq!(m.get(2, 1), &BigInt::from(2048));
        assert!(m.get(3, 1).is_zero() && m.get(4, 1).is_zero());
        // p·U(d) = 3·2^4 d + 2^12 d²
        assert_eq!(m.get(1, 1) * 2, BigInt::from(48));
        assert_eq!(m.get(2, 1) * 2, BigInt::from(4096));
        let empty = build_matrix_oracle(3, 0, 0, ExecMode::Sequential).unwrap();
        assert!(empty.entries.is_empty());
    }

    #[test]
    fn builders_agree() {
        for (p, n) in [(2u64, 12usize), (3, 10), (5, 8), (7, 8), (13, 5)] {
            let a = build_matrix_oracle(p, n, n, ExecMode::Parallel).unwrap();
            let b = build_matrix_genfun(p, n, n).unwrap();
            assert_eq!(a.entries, b.entries, "p = {p}");
            assert_eq!(b.sign_convention, Some(SignConvention::Negative));
        }
        let g = build_matrix_genfun(2, 1, 1).unwrap();
        assert_eq!(g.get(1, 1), &BigInt::from(24));
    }

    #[test]
    fn sign_detection_rejects_garbage() {
        let o = build_matrix_oracle(3, 3, 3, ExecMode::Sequential).unwrap();
        let mut raw: Vec<Vec<BigInt>> = o.entries.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        assert_eq!(detect_sign(&raw, &o).unwrap(), SignConvention::Negative);
        raw[1][2] += 1;
        assert!(matches!(detect_sign(&raw, &o), Err(Error::MethodMismatch { row: 2, col: 3 })));
    }

    #[test]
    fn recurrence_matches_oracle() {
        for (p, upto) in [(2u64, 6usize), (3, 12)] {
            let ip = modular_equation_ip(p).unwrap();
            let full = full_columns(p, &ip, p as usize).unwrap();
            let cols = column_recurrence(&ip, &full, upto).unwrap();
            let rows = p as usize * upto;
            let o = build_matrix_oracle(p, rows, upto, ExecMode::Sequential).unwrap();
            for j in 1..=upto {
                for i in 1..=rows {
                    let x = cols[j - 1].get(i).cloned().unwrap_or_default();
                    assert_eq!(&x, o.get(i, j), "p = {p}, ({i}, {j})");
                }
            }
            assert!(ip.degree_y() as u64 <= p);
        }
    }

    #[test]
    fn band_support() {
        let m = build_matrix_oracle(3, 30, 12, ExecMode::Sequential).unwrap();
        for j in 1..=12 {
            for i in 1..=30 {
                let inside = 3 * i >= j && i <= 3 * j;
                if !inside {
                    assert!(m.get(i, j).is_zero(), "({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn simpar_small() {
        for p in crate::SUPPORTED_PRIMES {
            let m = build_matrix_oracle(p, 8, 8, ExecMode::Sequential).unwrap();
            assert!(simpar_check(&m).holds, "p = {p}");
        }
        let m = build_matrix_oracle(3, 4, 4, ExecMode::Sequential).unwrap();
        assert!(val_p_int(m.get(1, 1), 3) >= Val::int(2));
    }

    #[test]
    fn scaled_and_factor() {
        let m = build_matrix_genfun(3, 14, 42).unwrap();
        let ms = scaled_matrix_p3(&m).unwrap();
        for info in scaled_row_bounds(&ms) {
            assert!(info.holds_minus_one);
            assert!(info.tight_minus_one, "row {}", info.row);
            assert!(!info.holds_plain);
        }
        for i in 1..=14 {
            for j in 1..=42 {
                if j > 3 * i || i > 3 * j {
                    assert!(ms.get(i, j).is_zero());
                }
            }
        }
        let dk = dk_factor(&ms).unwrap();
        assert_eq!(dk.d[0], BigInt::from(9));
        assert_eq!(dk.d[1], BigInt::from(243));
        assert!(!dk.kbar[0][0].is_zero());
        assert!(dk.kbar[0][1..].iter().all(|x| x.is_zero()));
        // M′ = D·K
        for i in 0..14 {
            for j in 0..42 {
                assert_eq!(dk.k[i][j].scale(&dk.d[i]), ms.entries[i][j]);
            }
        }
        // Similarity: same characteristic series.
        let sq = m.truncated(8, 8);
        let c = char_poly_coeffs(&sq.entries, 8, ExecMode::Sequential);
        assert_eq!(c[1], -(1..=8).map(|i| sq.get(i, i).clone()).sum::<BigInt>());
    }

    #[test]
    fn minors_and_selection() {
        let m = build_matrix_oracle(3, 5, 5, ExecMode::Sequential).unwrap();
        assert_eq!(&diagonal_minor(&m.entries, &[1]).unwrap(), m.get(1, 1));
        let id: Vec<Vec<BigInt>> =
            (0..4).map(|i| (0..4).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
        assert_eq!(diagonal_minor(&id, &[4, 2, 1]).unwrap(), BigInt::one());
        assert!(diagonal_major(&id, &[1, 1]).is_err());
        assert_eq!(selection(&id, &[2, 3], &[2, 1]).unwrap(), vec![BigInt::zero(), BigInt::zero()]);
        assert_eq!(selection(&m.entries, &[1, 2], &[1, 2]).unwrap(), vec![m.get(1, 1).clone(), m.get(2, 2).clone()]);
    }

    #[test]
    fn minors_sum_to_char_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a: Vec<Vec<BigInt>> =
                (0..4).map(|_| (0..4).map(|_| BigInt::from(rng.gen_range(-9..10))).collect()).collect();
            let c = char_poly_coeffs(&a, 4, ExecMode::Sequential);
            for m in 0..=4usize {
                let mut total = BigInt::zero();
                for mask in 0u32..16 {
                    if mask.count_ones() as usize != m {
                        continue;
                    }
                    let s: Vec<usize> = (1..=4).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                    total += diagonal_minor(&a, &s).unwrap();
                }
                let sign = if m % 2 == 0 { 1 } else { -1 };
                assert_eq!(total * sign, c[m]);
            }
        }
    }

    #[test]
    fn f3_determinant() {
        let a = vec![vec![F3::ONE, F3::ONE], vec![F3::ONE, F3::MINUS_ONE]];
        assert_eq!(det_f3(&a), F3::new(-2));
        assert_eq!(det_f3(&[]), F3::ONE);
    }
}
