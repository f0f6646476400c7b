use bitvec::prelude::*;

use super::{gcd, NumTheoryError};

/// All primes `<= bound`, ascending (odd-only sieve of Eratosthenes).
pub fn sieve_primes(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    // index i stands for 2i + 1
    let len = ((bound - 1) / 2 + 1) as usize;
    let mut composite = bitvec![0; len];
    composite.set(0, true);
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= bound as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j < len {
                composite.set(j, true);
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(len / 8 + 1);
    primes.push(2);
    primes.extend(composite.iter_zeros().map(|i| 2 * i as u64 + 1));
    primes
}

/// The first `count` primes `p = r (mod m)` with `p <= search_bound`.
pub fn primes_in_ap(r: u64, m: u64, count: usize, search_bound: u64) -> Result<Vec<u64>, NumTheoryError> {
    if m == 0 {
        return Err(NumTheoryError::NonPositiveModulus);
    }
    let r = r % m;
    if gcd(r, m) != 1 {
        return Err(NumTheoryError::NotCoprime { residue: r, modulus: m });
    }
    let found: Vec<u64> = sieve_primes(search_bound).into_iter().filter(|p| p % m == r).take(count).collect();
    if found.len() < count {
        return Err(NumTheoryError::BudgetExhausted { found: found.len(), wanted: count, bound: search_bound });
    }
    Ok(found)
}

const SEGMENT: usize = 1 << 16;

/// `Omega(n)` (prime factors with multiplicity) for every `n <= bound`.
///
/// Segmented: each block of the range keeps a running cofactor and is
/// divided down by the sieving primes `<= sqrt(bound)`. Entries 0 and 1 are 0.
pub fn big_omega_table(bound: u64) -> Vec<u8> {
    let n = bound as usize + 1;
    let mut omega = vec![0u8; n];
    let primes = sieve_primes(num_integer::Roots::sqrt(&bound));
    let mut rest = vec![0u64; SEGMENT];
    let mut lo = 0usize;
    while lo < n {
        let hi = (lo + SEGMENT).min(n);
        for (slot, v) in rest[..hi - lo].iter_mut().zip(lo as u64..) {
            *slot = v;
        }
        for &p in &primes {
            let p = p as usize;
            let mut j = lo.div_ceil(p) * p;
            while j < hi {
                let cell = &mut rest[j - lo];
                let mut e = 0u8;
                while (*cell).is_multiple_of(p as u64) && *cell > 0 {
                    *cell /= p as u64;
                    e += 1;
                }
                omega[j] += e;
                j += p;
            }
        }
        for j in lo.max(2)..hi {
            if rest[j - lo] > 1 {
                omega[j] += 1;
            }
        }
        lo = hi;
    }
    omega
}
