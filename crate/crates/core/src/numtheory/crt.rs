use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::NumTheoryError;

/// Combine congruences `x = r_i (mod m_i)`; moduli need not be coprime.
///
/// Returns the residue in `[0, M)` and `M = lcm(m_i)`. On failure the error
/// names the first congruence that conflicts with the ones before it, paired
/// with the earliest congruence it conflicts with.
pub fn crt(congruences: &[(BigInt, BigUint)]) -> Result<(BigUint, BigUint), NumTheoryError> {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (i, (ri, mi)) in congruences.iter().enumerate() {
        if mi.is_zero() {
            return Err(NumTheoryError::NonPositiveModulus);
        }
        let mi = BigInt::from_biguint(Sign::Plus, mi.clone());
        let ri = ri.mod_floor(&mi);
        let eg = m.extended_gcd(&mi);
        let g = eg.gcd;
        let diff = &ri - &r;
        if !diff.is_multiple_of(&g) {
            let (rj, mj) = congruences[..i]
                .iter()
                .find(|(rj, mj)| {
                    let mj = BigInt::from_biguint(Sign::Plus, mj.clone());
                    !(&ri - rj).is_multiple_of(&mj.gcd(&mi))
                })
                .cloned()
                .expect("a pairwise conflict exists whenever the combination fails");
            return Err(NumTheoryError::Incompatible { first: (rj, mj), second: congruences[i].clone() });
        }
        let lcm = &m / &g * &mi;
        // r + m * t with t = (diff / g) * inv(m / g) mod (mi / g)
        let t = (&diff / &g * eg.x).mod_floor(&(&mi / &g));
        r = (&r + &m * t).mod_floor(&lcm);
        m = lcm;
    }
    Ok((r.to_biguint().expect("non-negative"), m.to_biguint().expect("positive")))
}

/// Two-congruence CRT on machine words; `None` when incompatible or when
/// the combined modulus overflows `u64`.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let (g, x, _) = ext_gcd(m1 as i128, m2 as i128);
    let diff = r2 as i128 - r1 as i128;
    if diff % g != 0 {
        return None;
    }
    let lcm = (m1 as i128 / g).checked_mul(m2 as i128)?;
    if lcm > u64::MAX as i128 {
        return None;
    }
    let step = m2 as i128 / g;
    let a = (diff / g).rem_euclid(step) as u128;
    let b = x.rem_euclid(step) as u128;
    let t = (a * b % step as u128) as i128;
    let r = (r1 as i128 + m1 as i128 * t).rem_euclid(lcm);
    Some((r as u64, lcm as u64))
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cong(list: &[(i64, u64)]) -> Vec<(BigInt, BigUint)> {
        list.iter().map(|&(r, m)| (BigInt::from(r), BigUint::from(m))).collect()
    }

    fn brute(list: &[(i64, u64)]) -> Option<(u64, u64)> {
        let m = list.iter().fold(1u64, |acc, &(_, m)| acc / acc.gcd(&m) * m);
        (0..m).find(|&x| list.iter().all(|&(r, mi)| (x as i64 - r).rem_euclid(mi as i64) == 0)).map(|x| (x, m))
    }

    #[test]
    fn examples() {
        assert_eq!(crt(&cong(&[(1, 3), (2, 5)])).unwrap(), (7u32.into(), 15u32.into()));
        assert_eq!(crt(&cong(&[(0, 1)])).unwrap(), (0u32.into(), 1u32.into()));
        let err = crt(&cong(&[(1, 2), (0, 4)])).unwrap_err();
        match err {
            NumTheoryError::Incompatible { first, second } => {
                assert_eq!(first, (BigInt::from(1), BigUint::from(2u32)));
                assert_eq!(second, (BigInt::from(0), BigUint::from(4u32)));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(crt(&[]).unwrap(), (0u32.into(), 1u32.into()));
    }

    #[test]
    fn matches_scan_on_small_systems() {
        for m1 in 1..=12u64 {
            for m2 in 1..=12u64 {
                for r1 in 0..m1 {
                    for r2 in 0..m2 {
                        let sys = [(r1 as i64, m1), (r2 as i64 - 7 * m2 as i64, m2)];
                        let expected = brute(&sys);
                        let got =
                            crt(&cong(&sys)).ok().map(|(r, m)| (u64::try_from(r).unwrap(), u64::try_from(m).unwrap()));
                        assert_eq!(got, expected, "{sys:?}");
                        assert_eq!(crt_pair(r1, m1, r2, m2), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn handles_huge_moduli() {
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(998_244_353u64);
        let big = &p * &q * &p;
        let shifted = BigInt::from(5) - BigInt::from(3u32) * BigInt::from(q.clone());
        let (r, m) =
            crt(&[(BigInt::from(5), big.clone()), (shifted, q.clone()), (BigInt::from(1), 2u32.into())]).unwrap();
        assert_eq!(m, big * 2u32);
        assert_eq!(r, BigUint::from(5u32));
    }
}
