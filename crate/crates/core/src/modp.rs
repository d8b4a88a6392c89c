//! Word-size modular arithmetic for multimodular exact linear algebra:
//! 62-bit primes, Hessenberg characteristic polynomials mod `p`, linear
//! solves mod `p`, and Garner reconstruction with symmetric lift.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed};

/// Arithmetic modulo a prime `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    p: u64,
}

impl Modulus {
    pub fn new(p: u64) -> Self {
        assert!((2..(1 << 63)).contains(&p));
        Modulus { p }
    }

    pub fn value(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero residue.
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(self, a: i64) -> u64 {
        (a as i128).rem_euclid(self.p as i128) as u64
    }

    /// Reduces a big integer.
    pub fn reduce(self, x: &BigInt) -> u64 {
        let mut r: u128 = 0;
        let p = self.p as u128;
        for d in x.magnitude().iter_u64_digits().rev() {
            r = ((r << 64) | d as u128) % p;
        }
        let r = r as u64;
        if x.sign() == Sign::Minus {
            self.neg(r)
        } else {
            r
        }
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let m = Modulus { p: n };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = m.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = m.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below `2^62`, in decreasing order.
pub fn large_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime_u64(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Bits of a prime from [`large_primes`], rounded down.
pub const PRIME_BITS: u64 = 61;

/// Number of primes whose product exceeds `2^bits`.
pub fn primes_for_bits(bits: u64) -> usize {
    (bits / PRIME_BITS + 1) as usize
}

/// Coefficients `c_0, …, c_n` of `det(X·I − A)` modulo `m`, via reduction to
/// upper Hessenberg form and the standard determinant recurrence.
pub fn charpoly_mod(mut a: Vec<Vec<u64>>, m: Modulus) -> Vec<u64> {
    let n = a.len();
    // Similarity transform to upper Hessenberg form.
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| a[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            a.swap(piv, j + 1);
            for row in a.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = m.inv(a[j + 1][j]);
        for i in j + 2..n {
            if a[i][j] == 0 {
                continue;
            }
            let u = m.mul(a[i][j], inv);
            // row_i -= u·row_{j+1}
            let (top, bottom) = a.split_at_mut(i);
            let src = &top[j + 1];
            for (x, &s) in bottom[0].iter_mut().zip(src.iter()).skip(j) {
                *x = m.sub(*x, m.mul(u, s));
            }
            // col_{j+1} += u·col_i
            for row in a.iter_mut() {
                let t = m.mul(u, row[i]);
                row[j + 1] = m.add(row[j + 1], t);
            }
        }
    }
    // p_k = charpoly of leading k×k block.
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let mut next = vec![0u64; k + 2];
        let prev = &polys[k];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = m.add(next[i + 1], c);
            next[i] = m.sub(next[i], m.mul(a[k][k], c));
        }
        let mut t = 1u64;
        for i in (0..k).rev() {
            t = m.mul(t, a[i + 1][i]);
            if t == 0 {
                break;
            }
            let h = m.mul(t, a[i][k]);
            if h == 0 {
                continue;
            }
            for (idx, &c) in polys[i].iter().enumerate() {
                next[idx] = m.sub(next[idx], m.mul(h, c));
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Basis of the nullspace of an `r × c` matrix mod `m`.
pub fn nullspace_mod(mut a: Vec<Vec<u64>>, cols: usize, m: Modulus) -> Vec<Vec<u64>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = m.inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = m.mul(*x, inv);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &s) in row.iter_mut().zip(pivot_row.iter()) {
                *x = m.sub(*x, m.mul(f, s));
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = m.neg(a[i][f]);
            }
            v
        })
        .collect()
}

/// Garner reconstruction over a fixed list of distinct primes.
#[derive(Clone, Debug)]
pub struct Crt {
    primes: Vec<u64>,
    /// `(p_0 ⋯ p_{i-1})^{-1} mod p_i`.
    prefix_inv: Vec<u64>,
    product: BigInt,
    half: BigInt,
}

impl Crt {
    pub fn new(primes: Vec<u64>) -> Self {
        let mut prefix_inv = Vec::with_capacity(primes.len());
        for (i, &pi) in primes.iter().enumerate() {
            let m = Modulus::new(pi);
            let prod = primes[..i].iter().fold(1 % pi, |acc, &pj| m.mul(acc, pj % pi));
            prefix_inv.push(if i == 0 { 0 } else { m.inv(prod) });
        }
        let product: BigInt = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
        let half = &product >> 1;
        Crt { primes, prefix_inv, product, half }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn product(&self) -> &BigInt {
        &self.product
    }

    /// The unique integer in `(−P/2, P/2]` with the given residues.
    pub fn lift(&self, residues: &[u64]) -> BigInt {
        debug_assert_eq!(residues.len(), self.primes.len());
        let k = self.primes.len();
        let mut v = vec![0u64; k];
        for i in 0..k {
            let m = Modulus::new(self.primes[i]);
            // Evaluate v_0 + v_1 p_0 + … + v_{i-1} p_0⋯p_{i-2} mod p_i by Horner.
            let mut acc = 0u64;
            for j in (0..i).rev() {
                acc = m.add(m.mul(acc, self.primes[j] % m.value()), v[j] % m.value());
            }
            v[i] = if i == 0 {
                residues[0]
            } else {
                m.mul(m.sub(residues[i], acc), self.prefix_inv[i])
            };
        }
        let mut x = BigInt::from(v[k - 1]);
        for j in (0..k - 1).rev() {
            x = x * self.primes[j] + v[j];
        }
        if x > self.half {
            x -= &self.product;
        }
        x
    }
}

/// Bit length of `|x|`.
pub fn bits(x: &BigInt) -> u64 {
    x.abs().bits()
}

/// Checks that a big integer lies strictly inside the symmetric range of `crt`.
pub fn fits(crt: &Crt, bound: &BigInt) -> bool {
    let twice = bound * 2;
    !bound.is_negative() && &twice < crt.product()
}

/// Convenience: big-integer vector to residues.
pub fn reduce_all(m: Modulus, xs: &[BigInt]) -> Vec<u64> {
    xs.iter().map(|x| m.reduce(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use num_traits::Zero;

    fn naive_charpoly(a: &[Vec<i64>]) -> Vec<BigInt> {
        // Faddeev–LeVerrier over the rationals, scaled: exact for integer input.
        use num_rational::BigRational;
        let n = a.len();
        let am: Vec<Vec<BigRational>> = a
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        let mut mk = vec![vec![BigRational::zero(); n]; n];
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1} I
            let mut next = vec![vec![BigRational::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = BigRational::zero();
                    for l in 0..n {
                        s += &am[i][l] * &mk[l][j];
                    }
                    next[i][j] = s;
                }
                next[i][i] += &coeffs[n - k + 1];
            }
            mk = next;
            let mut tr = BigRational::zero();
            for i in 0..n {
                for l in 0..n {
                    tr += &am[i][l] * &mk[l][i];
                }
            }
            coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        }
        coeffs.into_iter().map(|c| c.to_integer()).collect()
    }

    #[test]
    fn primes_are_prime() {
        let ps = large_primes(5);
        assert!(ps.iter().all(|&p| is_prime_u64(p) && p < (1 << 62) && p > (1 << 61)));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3_215_031_751));
        assert!(!is_prime_u64(1));
    }

    #[test]
    fn reduce_negative_and_large() {
        let m = Modulus::new(1_000_000_007);
        let x: BigInt = BigInt::from(10).pow(40u32) + 12345;
        let expect: u64 = (&x % BigInt::from(1_000_000_007u64)).to_string().parse().unwrap();
        assert_eq!(m.reduce(&x), expect);
        assert_eq!(m.reduce(&-x.clone()), m.neg(expect));
    }

    #[test]
    fn crt_roundtrip() {
        let crt = Crt::new(large_primes(4));
        for x in [BigInt::from(-5), BigInt::from(10).pow(60) - 7, -(BigInt::from(3).pow(100))] {
            let r: Vec<u64> = crt.primes().iter().map(|&p| Modulus::new(p).reduce(&x)).collect();
            assert_eq!(crt.lift(&r), x);
        }
    }

    #[test]
    fn charpoly_matches_leverrier() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ps = large_primes(3);
        let crt = Crt::new(ps.clone());
        for n in 1..9 {
            let a: Vec<Vec<i64>> =
                (0..n).map(|_| (0..n).map(|_| rng.gen_range(-50..50)).collect()).collect();
            let expect = naive_charpoly(&a);
            let per: Vec<Vec<u64>> = ps
                .iter()
                .map(|&p| {
                    let m = Modulus::new(p);
                    let am = a.iter().map(|r| r.iter().map(|&x| m.from_i64(x)).collect()).collect();
                    charpoly_mod(am, m)
                })
                .collect();
            let got: Vec<BigInt> =
                (0..=n).map(|i| crt.lift(&per.iter().map(|v| v[i]).collect::<Vec<_>>())).collect();
            assert_eq!(got, expect, "n = {n}");
        }
    }

    #[test]
    fn nullspace_basic() {
        let m = Modulus::new(101);
        // x + y + z = 0, y - z = 0 → (−2, 1, 1)
        let ns = nullspace_mod(vec![vec![1, 1, 1], vec![0, 1, 100]], 3, m);
        assert_eq!(ns, vec![vec![99, 1, 1]]);
    }
}
