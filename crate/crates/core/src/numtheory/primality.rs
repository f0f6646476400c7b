use num_bigint::BigUint;
use num_traits::One;

// Deterministic for every n < 3.3 * 10^24, which covers all of u64 and
// the range `is_prime_u128` is used on in practice.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn small_prime_screen(n: u64) -> Option<bool> {
    if n < 2 {
        return Some(false);
    }
    for &p in &MR_BASES {
        if n == p {
            return Some(true);
        }
        if n.is_multiple_of(p) {
            return Some(false);
        }
    }
    None
}

/// Deterministic Miller-Rabin.
pub fn is_prime(n: u64) -> bool {
    if let Some(verdict) = small_prime_screen(n) {
        return verdict;
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin for values past `u64`; exact below 3.3 * 10^24.
pub fn is_prime_u128(n: u128) -> bool {
    if let Ok(small) = u64::try_from(n) {
        return is_prime(small);
    }
    if MR_BASES.iter().any(|&p| n.is_multiple_of(p as u128)) {
        return false;
    }
    let nn = BigUint::from(n);
    let n1 = &nn - BigUint::one();
    let s = (n - 1).trailing_zeros();
    let d = BigUint::from((n - 1) >> s);
    'bases: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, &nn);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &nn;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
///
/// Trial division, stopping as soon as the cofactor tests prime; `1` and `0`
/// factor as the empty list.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3, 5] {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    // wheel mod 30
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    let mut cofactor_prime = n > 1 && is_prime(n);
    while n > 1 {
        if cofactor_prime || p.checked_mul(p).is_none_or(|pp| pp > n) {
            out.push((n, 1));
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
            cofactor_prime = n > 1 && is_prime(n);
        }
        p += STEPS[i];
        i = (i + 1) % 8;
    }
    out
}
