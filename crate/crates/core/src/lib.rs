//! Exact computation of Atkin's `U` operator on weight-0 overconvergent
//! `p`-adic modular forms of tame level 1, for the primes `p` where `X_0(p)`
//! has genus zero.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`] — rationals, the ring `Z[√3]`, `F_3` and rational valuations.
//! * [`qseries`] — truncated Laurent series in `q` with explicit precision.
//! * [`modcurve`] — `Δ`, `E_k`, `j`, the hauptmodul `d_p`, the polynomial
//!   `H_p` and the bivariate relation `I_p`.
//! * [`umatrix`] — the matrix of `U` on powers of `d_p`, built two ways.
//! * [`charseries`] — exact characteristic series, truncation certificates
//!   and Newton polygons.
//! * [`weights`] — weight twists for `p = 3`, Wan's bound and congruences.
//! * [`mod3comb`] — the characteristic-3 generating function `Ḡ` and the
//!   permutation combinatorics behind the `p = 3` parabola.
//! * [`verify`] — claim-by-claim verification suites with JSON reports.

pub mod arith;
pub mod charseries;
pub mod error;
pub mod mod3comb;
pub mod modcurve;
pub mod modp;
pub mod par;
pub mod qseries;
pub mod umatrix;
pub mod verify;
pub mod weights;

mod zs;

pub use error::{Error, Result};
pub use par::ExecMode;

/// Primes `p` for which `X_0(p)` has genus zero.
pub const SUPPORTED_PRIMES: [u64; 5] = [2, 3, 5, 7, 13];

/// Rejects primes outside [`SUPPORTED_PRIMES`].
pub fn check_prime(p: u64) -> Result<()> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(Error::UnsupportedPrime(p))
    }
}
