//! Certificates for the structured set families.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{chain_bound, digit_pattern_count, omega_primorial_count};
use super::{CertifyError, CountKind, Criterion, FiniteClass, ModulusRecord, SmallnessCertificate, Witness};
use crate::numtheory::{primorial, sieve_primes};
use crate::setspec::{hits, perfect_power_residues, Ambient, Node, Polynomial, SetSpec};

/// Primes up to this bound are cross-checked against the exact hit oracle.
pub const ORACLE_CONFIRM_LIMIT: u64 = 200;

fn oracle_disagrees(p: u64, what: &str) -> CertifyError {
    CertifyError::Invalid(format!("exact oracle contradicts the {what} bound at p = {p}"))
}

/// `{a^n : n >= 2}` over the moduli `p^2`, `p <= prime_bound`, each with
/// count `p^2 - p + 1`.
pub fn perfect_powers_certificate(
    ambient: Ambient,
    prime_bound: u64,
    epsilon: &BigRational,
) -> Result<SmallnessCertificate, CertifyError> {
    let spec = SetSpec::new(ambient, Node::PerfectPowers)?;
    let records = sieve_primes(prime_bound)
        .into_par_iter()
        .map(|p| {
            let count = p * p - p + 1;
            if p <= ORACLE_CONFIRM_LIMIT && perfect_power_residues(p * p, ambient).count() > count {
                return Err(oracle_disagrees(p, "perfect power"));
            }
            Ok(ModulusRecord { k: p * p, count, kind: CountKind::R, witness: Witness::PerfectPowerGap { p } })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if records.is_empty() {
        return Err(CertifyError::NoUsablePrimes(prime_bound));
    }
    SmallnessCertificate::assemble(&spec, Criterion::PerfectPowers, records).require(epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyImageReport {
    pub certificate: SmallnessCertificate,
    /// Primes where `F` mod `p` is not injective (the certificate moduli).
    pub kept_primes: Vec<u64>,
    /// Primes where `F` has at least two distinct roots mod `p`.
    pub root_primes: Vec<u64>,
    /// Share of primes up to the budget that were kept.
    pub kept_density: f64,
    pub root_density: f64,
}

struct PrimeScan {
    p: u64,
    collision: Option<(u64, u64)>,
    roots: Vec<u64>,
}

fn scan_prime(f: &Polynomial, p: u64) -> PrimeScan {
    let mut first: Vec<u64> = vec![u64::MAX; p as usize];
    let mut collision = None;
    let mut roots = Vec::new();
    for x in 0..p {
        let v = f.eval_mod(x, p);
        if v == 0 {
            roots.push(x);
        }
        if collision.is_none() {
            if first[v as usize] != u64::MAX {
                collision = Some((first[v as usize], x));
            } else {
                first[v as usize] = x;
            }
        }
    }
    PrimeScan { p, collision, roots }
}

/// Image of a polynomial of degree at least 2.
pub fn poly_image_certificate(
    coeffs: &[i64],
    ambient: Ambient,
    prime_budget: u64,
    epsilon: &BigRational,
) -> Result<PolyImageReport, CertifyError> {
    let f = Polynomial::new(coeffs);
    if f.degree() <= 1 {
        let density = (f.degree() == 1)
            .then(|| Box::new(BigRational::new(BigInt::from(1), BigInt::from(f.leading().unsigned_abs()))));
        return Err(CertifyError::DegreeTooLow { degree: f.degree(), density });
    }
    let spec = SetSpec::new(ambient, Node::PolyImage { coeffs: coeffs.to_vec() })?;
    let primes = sieve_primes(prime_budget);
    let scans: Vec<PrimeScan> = primes.par_iter().map(|&p| scan_prime(&f, p)).collect();
    let mut records = Vec::new();
    let mut kept_primes = Vec::new();
    for s in &scans {
        if let Some((x1, x2)) = s.collision {
            if s.p <= ORACLE_CONFIRM_LIMIT && hits(&spec, s.p)?.count() > s.p - 1 {
                return Err(oracle_disagrees(s.p, "polynomial collision"));
            }
            kept_primes.push(s.p);
            records.push(ModulusRecord {
                k: s.p,
                count: s.p - 1,
                kind: CountKind::R,
                witness: Witness::PolyCollision { p: s.p, x1, x2 },
            });
        }
    }
    let root_primes: Vec<u64> = scans.iter().filter(|s| s.roots.len() >= 2).map(|s| s.p).collect();
    if records.is_empty() {
        return Err(CertifyError::NoUsablePrimes(prime_budget));
    }
    let total = primes.len().max(1) as f64;
    Ok(PolyImageReport {
        certificate: SmallnessCertificate::assemble(&spec, Criterion::PolyImage, records).require(epsilon)?,
        kept_density: kept_primes.len() as f64 / total,
        root_density: root_primes.len() as f64 / total,
        kept_primes,
        root_primes,
    })
}

/// `{x in H : |F(x)| prime}`. At a prime `p` with roots `h` of `F` mod `p`,
/// members in the class of `h` satisfy `|F(x)| = p`: finitely many, found by
/// scanning the class within the radius beyond which `|F(x)| > p`.
pub fn poly_prime_preimage_certificate(
    coeffs: &[i64],
    ambient: Ambient,
    prime_budget: u64,
    epsilon: &BigRational,
) -> Result<SmallnessCertificate, CertifyError> {
    let f = Polynomial::new(coeffs);
    if f.degree() < 1 {
        return Err(CertifyError::NoUsablePrimes(prime_budget));
    }
    let spec = SetSpec::new(ambient, Node::PolyPrimePreimage { coeffs: coeffs.to_vec() })?;
    let records: Vec<ModulusRecord> = sieve_primes(prime_budget)
        .into_par_iter()
        .filter_map(|p| {
            let roots: Vec<u64> = (0..p).filter(|&x| f.eval_mod(x, p) == 0).collect();
            if roots.is_empty() {
                return None;
            }
            let radius = f.value_radius(p) as i64;
            let classes = roots
                .iter()
                .map(|&h| {
                    // smallest x >= -radius with x = h mod p
                    let start = -radius + (h as i64 + radius).rem_euclid(p as i64);
                    let solutions = (0..)
                        .map(|t| start + t * p as i64)
                        .take_while(|&x| x <= radius)
                        .filter(|&x| ambient.contains(x) && f.eval(x).is_some_and(|v| v.unsigned_abs() == p as u128))
                        .collect();
                    FiniteClass { residue: h, solutions }
                })
                .collect::<Vec<_>>();
            Some(ModulusRecord {
                k: p,
                count: p - classes.len() as u64,
                kind: CountKind::W,
                witness: Witness::FiniteClasses { p, classes },
            })
        })
        .collect();
    if records.is_empty() {
        return Err(CertifyError::NoUsablePrimes(prime_budget));
    }
    SmallnessCertificate::assemble(&spec, Criterion::PolyPrimePreimage, records).require(epsilon)
}

/// Single-modulus certificate for `Omega(x) = k` or `Omega(x) <= k` at the
/// `n`-th primorial.
pub fn omega_certificate(
    spec: &SetSpec,
    n: usize,
    epsilon: &BigRational,
) -> Result<SmallnessCertificate, CertifyError> {
    let k = match spec.node {
        Node::OmegaExact { k } | Node::OmegaAtMost { k } => k,
        _ => return Err(CertifyError::Invalid("omega certificate needs an Omega family".into())),
    };
    let modulus =
        primorial(n).to_u64().filter(|_| n >= 1).ok_or(CertifyError::Invalid(format!("primorial {n} out of range")))?;
    let count = omega_primorial_count(k, n).to_u64().expect("count <= primorial");
    let record = ModulusRecord { k: modulus, count, kind: CountKind::R, witness: Witness::OmegaPrimorial { k, n } };
    SmallnessCertificate::assemble(spec, Criterion::OmegaPrimorial, vec![record]).require(epsilon)
}

/// Single-modulus certificate at the chain entry with the smallest
/// `2n / |x_{2n}|`.
pub fn chain_certificate(spec: &SetSpec, epsilon: &BigRational) -> Result<SmallnessCertificate, CertifyError> {
    let Node::DivisibilityChain { prefix } = &spec.node else {
        return Err(CertifyError::Invalid("chain certificate needs a divisibility chain".into()));
    };
    let entries = chain_bound(prefix)?;
    let best = entries
        .iter()
        .min_by(|a, b| (a.1 as u128 * b.0 as u128).cmp(&(b.1 as u128 * a.0 as u128)))
        .ok_or(CertifyError::ChainInvariantViolated("prefix needs at least two distinct terms".into()))?;
    let record = ModulusRecord {
        k: best.0,
        count: best.1,
        kind: CountKind::R,
        witness: Witness::ChainPrefix { index: best.1 as usize },
    };
    SmallnessCertificate::assemble(spec, Criterion::Chain, vec![record]).require(epsilon)
}

/// Single-modulus certificate at `b^{n ell}` for a digit avoider.
pub fn digit_certificate(spec: &SetSpec, n: u32, epsilon: &BigRational) -> Result<SmallnessCertificate, CertifyError> {
    let Node::DigitAvoider { base, pattern } = &spec.node else {
        return Err(CertifyError::Invalid("digit certificate needs a digit avoider".into()));
    };
    let k = (*base as u64)
        .checked_pow(n * pattern.len() as u32)
        .ok_or(CertifyError::Invalid(format!("modulus {base}^{} out of range", n as usize * pattern.len())))?;
    let count = digit_pattern_count(*base, pattern, n)?.to_u64().expect("count <= modulus");
    let record = ModulusRecord { k, count, kind: CountKind::R, witness: Witness::DigitBlocks { n } };
    SmallnessCertificate::assemble(spec, Criterion::DigitBlocks, vec![record]).require(epsilon)
}
