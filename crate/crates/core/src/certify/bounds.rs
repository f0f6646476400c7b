use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::CertifyError;
use crate::numtheory::{first_primes, primorial};

/// Number of classes `c mod P_n` (`P_n` the n-th primorial) whose
/// `gcd(c, P_n)` has at most `k` prime factors: `sum_{|S| <= k} prod_{p not
/// in S} (p - 1)` over subsets `S` of the first `n` primes.
pub fn omega_primorial_count(k: u32, n: usize) -> BigUint {
    // by_size[j]: subsets of size j, weighted by prod over excluded primes
    let mut by_size: Vec<BigUint> = vec![BigUint::one()];
    for p in first_primes(n) {
        let mut next = vec![BigUint::zero(); by_size.len() + 1];
        for (j, w) in by_size.iter().enumerate() {
            next[j] += w * (p - 1);
            next[j + 1] += w;
        }
        by_size = next;
    }
    by_size.iter().take(k as usize + 1).sum()
}

/// `omega_primorial_count(k, n) / P_n`, an upper bound on
/// `r_{P_n}(X)/P_n` for `X = {x : Omega(x) <= k}`: any `x = c mod P_n` is
/// divisible by `gcd(c, P_n)`. Equal to 1 for `n <= k`, strictly
/// decreasing in `n` from `n = k` on.
pub fn omega_primorial_bound(k: u32, n: usize) -> BigRational {
    BigRational::new(BigInt::from(omega_primorial_count(k, n)), BigInt::from(primorial(n)))
}

/// Per-modulus bounds `(|x_{2n}|, 2n)` for a divisor chain: every term
/// from `x_{2n}` on is `0 mod x_{2n}`, and the earlier `2n - 1` terms give
/// at most `2n - 1` further classes.
pub fn chain_bound(prefix: &[i64]) -> Result<Vec<(u64, u64)>, CertifyError> {
    let mut terms = prefix.to_vec();
    terms.dedup();
    let violated = |m: String| Err(CertifyError::ChainInvariantViolated(m));
    if terms.first().is_none_or(|&x| x == 0) {
        return violated("chain must start with a non-zero element".into());
    }
    for (i, w) in terms.windows(2).enumerate() {
        if w[1] % w[0] != 0 {
            return violated(format!("x_{} = {} does not divide x_{} = {}", i + 1, w[0], i + 2, w[1]));
        }
        if w[1].unsigned_abs() < w[0].unsigned_abs() {
            return violated(format!("|x_{}| decreases", i + 2));
        }
        if terms[..=i].contains(&w[1]) {
            return violated(format!("x_{} = {} repeats an earlier term", i + 2, w[1]));
        }
    }
    Ok((1..=terms.len() / 2).map(|n| (terms[2 * n - 1].unsigned_abs(), 2 * n as u64)).collect())
}

/// Count behind [`digit_pattern_bound`].
///
/// Members with at least `n ell` digits end in `n` blocks of `ell` digits,
/// none equal to the pattern: `(b^ell - 1)^n` classes. A shorter member,
/// zero-padded, can expose the pattern only across the padding, which needs
/// a pattern starting with 0; those members add at most `1 + sum_{L=1}^{n
/// ell - 1} (b^ell - 1)^{floor(L/ell)} b^{L mod ell}` classes.
pub fn digit_pattern_count(base: u32, pattern: &[u32], n: u32) -> Result<BigUint, CertifyError> {
    if base < 2 || pattern.is_empty() || pattern.iter().any(|&d| d >= base) || n == 0 {
        return Err(CertifyError::Invalid("need base >= 2, n >= 1 and a non-empty pattern of digits < base".into()));
    }
    let ell = pattern.len() as u32;
    let b = BigUint::from(base);
    let block = b.pow(ell) - 1u32;
    let mut count = block.pow(n);
    if pattern[0] == 0 {
        count += 1u32;
        for len in 1..n * ell {
            count += block.pow(len / ell) * b.pow(len % ell);
        }
    }
    Ok(count.min(b.pow(n * ell)))
}

/// Upper bound on `r_{b^{n ell}}(X)/b^{n ell}` for the base-`b` avoiders of
/// a pattern of length `ell`.
pub fn digit_pattern_bound(base: u32, pattern: &[u32], n: u32) -> Result<BigRational, CertifyError> {
    let count = digit_pattern_count(base, pattern, n)?;
    let modulus = BigUint::from(base).pow(n * pattern.len() as u32);
    Ok(BigRational::new(count.into(), modulus.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setspec::{Ambient, HitOptions, Node, SetSpec};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_primorial_bound(0, 3), q(4, 15));
        assert_eq!(omega_primorial_bound(1, 2), q(5, 6));
        for k in 1..5 {
            assert_eq!(omega_primorial_bound(k, 1), q(1, 1));
        }
    }

    #[test]
    fn omega_monotonicity() {
        for k in 0..5u32 {
            for n in 1..12usize {
                if n >= k as usize {
                    assert!(omega_primorial_bound(k, n + 1) < omega_primorial_bound(k, n), "k={k} n={n}");
                }
                assert!(omega_primorial_bound(k + 1, n) >= omega_primorial_bound(k, n));
            }
        }
    }

    #[test]
    fn omega_matches_residue_counts() {
        // classes of c mod P_n by the size of gcd(c, P_n), counted directly
        for n in 1..=5usize {
            let primes = first_primes(n);
            let pn: u64 = primes.iter().product();
            for k in 0..=3u32 {
                let direct = (0..pn).filter(|c| primes.iter().filter(|&&p| c % p == 0).count() <= k as usize).count();
                assert_eq!(omega_primorial_count(k, n), BigUint::from(direct));
            }
        }
    }

    #[test]
    fn omega_bound_dominates_sieved_sets() {
        let opts = HitOptions { element_bound: 1_000_000 };
        for n in 1..=5usize {
            let pn = primorial(n);
            let pn: u64 = pn.try_into().unwrap();
            for k in 0..=3u32 {
                for node in [Node::OmegaExact { k }, Node::OmegaAtMost { k }] {
                    let spec = SetSpec::new(Ambient::NonNegative, node).unwrap();
                    let r = crate::setspec::hits_with(&spec, pn, opts).unwrap().count();
                    assert!(BigUint::from(r) <= omega_primorial_count(k, n), "k={k} n={n} r={r}");
                }
            }
        }
    }

    #[test]
    fn chain_examples() {
        let powers: Vec<i64> = (1..=10).map(|e| 1i64 << e).collect();
        let b = chain_bound(&powers).unwrap();
        assert_eq!(b, vec![(4, 2), (16, 4), (64, 6), (256, 8), (1024, 10)]);
        let factorials: Vec<i64> = (1..=8)
            .scan(1i64, |f, i| {
                *f *= i;
                Some(*f)
            })
            .collect();
        assert_eq!(chain_bound(&factorials).unwrap().last(), Some(&(40320, 8)));
        assert_eq!(chain_bound(&[3, 6, 12, 24]).unwrap(), vec![(6, 2), (24, 4)]);
        assert!(chain_bound(&[2, 3]).is_err());
        assert!(chain_bound(&[0, 2]).is_err());
        assert!(chain_bound(&[2, -2, 2]).is_err());
    }

    #[test]
    fn chain_bound_holds_for_residues() {
        let factorials: Vec<i64> = (1..=8)
            .scan(1i64, |f, i| {
                *f *= i;
                Some(*f)
            })
            .collect();
        for prefix in [factorials, (1..=10).map(|e| 1i64 << e).collect(), vec![3, 6, 12, 24]] {
            let spec = SetSpec::new(Ambient::NonNegative, Node::chain(&prefix)).unwrap();
            for (k, bound) in chain_bound(&prefix).unwrap() {
                assert!(spec.hits(k).unwrap().count() <= bound);
            }
        }
    }

    #[test]
    fn digit_examples() {
        assert_eq!(digit_pattern_bound(10, &[9], 2).unwrap(), q(81, 100));
        assert_eq!(digit_pattern_bound(2, &[1], 4).unwrap(), q(1, 16));
        assert_eq!(digit_pattern_bound(10, &[4, 2], 1).unwrap(), q(99, 100));
        assert_eq!(digit_pattern_bound(10, &[0], 2).unwrap(), q(91, 100));
    }

    #[test]
    fn digit_bound_dominates_exact_counts() {
        let patterns: Vec<(u32, Vec<u32>)> = vec![
            (10, vec![9]),
            (10, vec![0]),
            (10, vec![1, 2]),
            (10, vec![0, 7]),
            (2, vec![1]),
            (2, vec![0]),
            (2, vec![1, 0]),
            (2, vec![0, 0, 1]),
            (3, vec![0, 2]),
            (3, vec![2, 2, 1]),
            (5, vec![0, 0]),
        ];
        for (b, pattern) in patterns {
            let spec = SetSpec::new(Ambient::NonNegative, Node::digit_avoider(b, &pattern)).unwrap();
            for n in 1..=13u32 {
                let modulus = (b as u64).checked_pow(n * pattern.len() as u32).filter(|&m| m <= 10_000);
                let Some(m) = modulus else { break };
                let exact = spec.hits(m).unwrap().count();
                assert!(
                    BigUint::from(exact) <= digit_pattern_count(b, &pattern, n).unwrap(),
                    "b={b} {pattern:?} n={n}"
                );
            }
        }
    }
}
