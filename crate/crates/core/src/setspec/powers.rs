use super::hits::HitSet;
use super::Ambient;
use crate::numtheory::{carmichael_lambda, divisors, factorize, pow_mod};

/// Residues mod `m` of `{a^n : n >= 2}`.
///
/// For `n >= e` (the largest prime exponent of `m`) the image of `x -> x^n`
/// on each prime-power component depends only on `gcd(n, lambda(m))`, so
/// one exponent per divisor of `lambda(m)` suffices beyond the small ones.
pub fn perfect_power_residues(m: u64, ambient: Ambient) -> HitSet {
    // (-a)^n with n even is a^n, and odd n gives the negatives of odd powers,
    // which already occur since -r is itself a residue of some a.
    let _ = ambient;
    let mut set = HitSet::empty(m);
    if m == 1 {
        set.insert(0);
        return set;
    }
    let e_max = factorize(m).iter().map(|&(_, e)| e as u64).max().unwrap_or(1);
    let n0 = e_max.max(2);
    let lambda = carmichael_lambda(m);
    let mut exponents: Vec<u64> = (2..n0).collect();
    for g in divisors(lambda) {
        // smallest n >= n0 with n = g mod lambda
        let n = if g >= n0 { g } else { g + (n0 - g).div_ceil(lambda) * lambda };
        exponents.push(n);
    }
    exponents.sort_unstable();
    exponents.dedup();
    for n in exponents {
        for x in 0..m {
            set.insert(pow_mod(x, n, m));
        }
    }
    set
}
