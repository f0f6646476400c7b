use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::{crt, factorize, is_perfect_square, is_prime, jacobi, NumTheoryError};

/// `d = 2^two_exp * odd_square_root^2 * squarefree_part * sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarefreeDecomposition {
    pub d: i64,
    pub two_exp: u32,
    pub odd_square_root: u64,
    pub squarefree_part: u64,
    pub sign: i8,
}

impl SquarefreeDecomposition {
    pub fn recompose(&self) -> i128 {
        let t = self.odd_square_root as i128;
        (1i128 << self.two_exp) * t * t * self.squarefree_part as i128 * self.sign as i128
    }
}

pub fn squarefree_decompose(d: i64) -> Result<SquarefreeDecomposition, NumTheoryError> {
    if d == 0 {
        return Err(NumTheoryError::Zero);
    }
    let mut two_exp = 0;
    let mut t = 1u64;
    let mut u = 1u64;
    for (p, e) in factorize(d.unsigned_abs()) {
        if p == 2 {
            two_exp = e;
            continue;
        }
        t *= p.pow(e / 2);
        if e % 2 == 1 {
            u *= p;
        }
    }
    Ok(SquarefreeDecomposition { d, two_exp, odd_square_root: t, squarefree_part: u, sign: if d > 0 { 1 } else { -1 } })
}

/// Which branch of the construction produced a cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverCase {
    /// `u = 1`, odd power of two: primes `5 mod 8`.
    OddPowerOfTwo,
    /// `u = 1`, even power of two, negative: primes `3 mod 4`.
    NegativeEvenPowerOfTwo,
    /// `u >= 3`: a class mod `8u` pinned by CRT.
    SquarefreeOdd,
}

/// A progression `residue mod modulus` all of whose primes (not dividing
/// `d`) see `d` as a quadratic non-residue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonResidueCover {
    pub d: i64,
    pub modulus: u64,
    pub residue: u64,
    pub case: CoverCase,
    pub decomposition: SquarefreeDecomposition,
    /// Primes of the class that were checked, ascending.
    pub verified_primes: Vec<u64>,
}

impl NonResidueCover {
    /// Primes `p = residue (mod modulus)` in ascending order that do not divide `d`.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        progression_primes(self.residue, self.modulus).filter(move |p| self.d % *p as i64 != 0)
    }
}

pub(crate) fn progression_primes(r: u64, m: u64) -> impl Iterator<Item = u64> {
    (0u64..).map_while(move |j| j.checked_mul(m).and_then(|v| v.checked_add(r))).filter(|&p| is_prime(p))
}

/// Builds `(m, r)` following the three-case construction, then checks it on
/// the first `verification_budget` usable primes of the class.
pub fn nonresidue_cover(d: i64, verification_budget: usize) -> Result<NonResidueCover, NumTheoryError> {
    if is_perfect_square(d) || d == 0 {
        return Err(NumTheoryError::PerfectSquare(d));
    }
    let dec = squarefree_decompose(d)?;
    let (modulus, residue, case) = if dec.squarefree_part == 1 {
        if dec.two_exp % 2 == 1 {
            (8, 5, CoverCase::OddPowerOfTwo)
        } else {
            debug_assert_eq!(dec.sign, -1);
            (4, 3, CoverCase::NegativeEvenPowerOfTwo)
        }
    } else {
        let u = dec.squarefree_part;
        let qs: Vec<u64> = factorize(u).into_iter().map(|(q, _)| q).collect();
        let mut congruences = Vec::with_capacity(qs.len());
        for (i, &q) in qs.iter().enumerate() {
            let want = if i == 0 { -1 } else { 1 };
            let ri = (1..q)
                .find(|&r| jacobi(r as i64, q) == Ok(want))
                .expect("every odd prime has residues and non-residues");
            congruences.push((BigInt::from(ri), BigUint::from(q)));
        }
        let (r, _) = crt(&congruences)?;
        let r = u64::try_from(r).expect("r < u");
        // 8s + 1 = r (mod u)
        let inv8 = (1..u).find(|x| x * 8 % u == 1).unwrap_or(0);
        let s = (r + u - 1) % u * inv8 % u;
        let m = 8 * u;
        (m, (8 * s + 1) % m, CoverCase::SquarefreeOdd)
    };
    let mut cover = NonResidueCover { d, modulus, residue, case, decomposition: dec, verified_primes: Vec::new() };
    let checked: Vec<u64> = cover.primes().take(verification_budget).collect();
    if let Some(&bad) = checked.iter().find(|&&p| jacobi(d, p) != Ok(-1)) {
        return Err(NumTheoryError::VerificationFailure { d, modulus, residue, prime: bad });
    }
    cover.verified_primes = checked;
    Ok(cover)
}
