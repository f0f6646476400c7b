//! Exact elementary number theory used by the rest of the crate.
//!
//! Everything here is a pure function of its inputs. Quantities that grow
//! without bound (`lcm(1..n)`, primorials, CRT moduli) are returned as
//! big integers; residues and moduli that the residue engines enumerate are
//! plain `u64`.

mod cover;
mod crt;
mod jacobi;
mod primality;
mod sieve;

pub use cover::{nonresidue_cover, squarefree_decompose, NonResidueCover, SquarefreeDecomposition};
pub use crt::{crt, crt_pair};
pub use jacobi::{jacobi, legendre_by_euler};
pub use primality::{factorize, is_prime, is_prime_u128, mul_mod, pow_mod};
pub use sieve::{big_omega_table, primes_in_ap, sieve_primes};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumTheoryError {
    #[error("Jacobi symbol needs an odd positive modulus, got {0}")]
    BadJacobiModulus(i128),
    #[error("0 has no squarefree decomposition")]
    Zero,
    #[error("{0} is a perfect square")]
    PerfectSquare(i64),
    #[error("cover (m = {modulus}, r = {residue}) for d = {d} fails at prime {prime}")]
    VerificationFailure { d: i64, modulus: u64, residue: u64, prime: u64 },
    #[error("residue {residue} is not coprime to modulus {modulus}")]
    NotCoprime { residue: u64, modulus: u64 },
    #[error("found only {found} of {wanted} primes below {bound}")]
    BudgetExhausted { found: usize, wanted: usize, bound: u64 },
    #[error("lcm(1..{0}) does not fit in 64 bits")]
    Overflow(u64),
    #[error("congruences x = {} mod {} and x = {} mod {} are incompatible", .first.0, .first.1, .second.0, .second.1)]
    Incompatible { first: (BigInt, BigUint), second: (BigInt, BigUint) },
    #[error("moduli must be positive")]
    NonPositiveModulus,
    #[error("argument out of range: {0}")]
    OutOfRange(&'static str),
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// `lcm(a, b)`, or `None` on overflow.
pub fn checked_lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// `lcm(1, 2, ..., n)`.
pub fn modulus_sequence(n: u64) -> Result<BigUint, NumTheoryError> {
    if n == 0 {
        return Err(NumTheoryError::OutOfRange("modulus_sequence needs n >= 1"));
    }
    let mut acc = BigUint::one();
    for p in sieve_primes(n) {
        let mut pk = p;
        while let Some(next) = pk.checked_mul(p).filter(|&v| v <= n) {
            pk = next;
        }
        acc *= pk;
    }
    Ok(acc)
}

/// [`modulus_sequence`] narrowed to `u64`, reporting overflow.
pub fn modulus_sequence_u64(n: u64) -> Result<u64, NumTheoryError> {
    modulus_sequence(n)?.to_u64().ok_or(NumTheoryError::Overflow(n))
}

/// Product of the first `n` primes (`primorial(0) = 1`).
pub fn primorial(n: usize) -> BigUint {
    first_primes(n).into_iter().map(BigUint::from).product()
}

/// The first `n` primes in ascending order.
pub fn first_primes(n: usize) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut bound = 16u64.max((n as f64 * ((n as f64).ln() + (n as f64).ln().ln().max(1.0)) * 1.3) as u64);
    loop {
        let ps = sieve_primes(bound);
        if ps.len() >= n {
            return ps[..n].to_vec();
        }
        bound *= 2;
    }
}

/// Carmichael's function: the exponent of the unit group of `Z/mZ`.
pub fn carmichael_lambda(m: u64) -> u64 {
    if m <= 2 {
        return 1;
    }
    factorize(m).into_iter().fold(1u64, |acc, (p, e)| {
        let lam = if p == 2 {
            match e {
                1 => 1,
                2 => 2,
                _ => 1u64 << (e - 2),
            }
        } else {
            (p - 1) * p.pow(e - 1)
        };
        acc / gcd(acc, lam) * lam
    })
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Integer `k`-th root: the largest `r >= 0` with `r^k <= n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    num_integer::Roots::nth_root(&n, k)
}

pub fn is_perfect_square(n: i64) -> bool {
    n >= 0 && {
        let r = iroot(n as u64, 2);
        r * r == n as u64
    }
}

/// `x mod m` in `[0, m)` for signed `x`.
pub fn rem_euclid(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}
