//! Integer power-series kernels on coefficient vectors `[a_0, a_1, …]`.
//! Every function returns exactly `n` coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub(crate) fn mul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
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
}

/// `∏_{n≥1} (1 − q^n)` by Euler's pentagonal number theorem.
pub(crate) fn euler(n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    if n == 0 {
        return out;
    }
    out[0] = BigInt::one();
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let e1 = (k * (3 * k - 1) / 2) as usize;
        let e2 = (k * (3 * k + 1) / 2) as usize;
        if e1 >= n {
            break;
        }
        out[e1] += sign;
        if e2 < n {
            out[e2] += sign;
        }
        k += 1;
    }
    out
}

/// `f^e` for `f = 1 + O(q)` with integer coefficients and integer `e`,
/// by the J. C. P. Miller recurrence (exact divisions).
pub(crate) fn pow_unit(f: &[BigInt], e: i64, n: usize) -> Vec<BigInt> {
    debug_assert!(f.first().is_some_and(|c| c.is_one()));
    let mut g = vec![BigInt::zero(); n];
    if n == 0 {
        return g;
    }
    g[0] = BigInt::one();
    for m in 1..n {
        let mut s = BigInt::zero();
        for i in 1..=m.min(f.len() - 1) {
            if f[i].is_zero() {
                continue;
            }
            let w = (e + 1) * i as i64 - m as i64;
            if w != 0 {
                s += &f[i] * &g[m - i] * w;
            }
        }
        let (q, r) = s.div_rem(&BigInt::from(m));
        debug_assert!(r.is_zero());
        g[m] = q;
    }
    g
}

/// `f(q^s)` truncated to `n` terms.
pub(crate) fn spread(f: &[BigInt], s: usize, n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, c) in f.iter().enumerate() {
        if i * s >= n {
            break;
        }
        out[i * s] = c.clone();
    }
    out
}

/// `∏_s ∏_{n≥1} (1 − q^{sn})^{e_s}` to `n` terms.
pub(crate) fn eta_product(pairs: &[(u64, i64)], n: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); n];
    if n == 0 {
        return acc;
    }
    acc[0] = BigInt::one();
    let base = euler(n);
    for &(s, e) in pairs {
        let s = s as usize;
        let len = n.div_ceil(s);
        let f = pow_unit(&base[..len], e, len);
        acc = mul(&acc, &spread(&f, s, n), n);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn euler_brute_force() {
        let n = 40;
        let mut brute = ints(&[1]);
        brute.resize(n, BigInt::zero());
        for k in 1..n {
            let mut f = vec![BigInt::zero(); n];
            f[0] = BigInt::one();
            f[k] = BigInt::from(-1);
            brute = mul(&brute, &f, n);
        }
        assert_eq!(euler(n), brute);
    }

    #[test]
    fn pow_unit_matches_repeated_products() {
        let f = ints(&[1, 3, -2, 5, 0, 7]);
        let n = 12;
        let mut brute = ints(&[1]);
        for _ in 0..5 {
            brute = mul(&brute, &f, n);
        }
        assert_eq!(pow_unit(&f, 5, n), brute);
        let inv = pow_unit(&f, -1, n);
        let mut one = vec![BigInt::zero(); n];
        one[0] = BigInt::one();
        assert_eq!(mul(&inv, &f, n), one);
    }
}
