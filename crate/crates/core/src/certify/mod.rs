//! Smallness certificates.
//!
//! A certificate lists pairwise coprime moduli `k_i` with counts `c_i`
//! bounding `r_{k_i}(X)` (kind `R`) or `w_{k_i}(X)` (kind `W`, the classes
//! on which `X` is not finite). Since these counts are submultiplicative
//! across coprime moduli, `prod c_i / k_i` bounds the upper Buck density.
//! Every record carries a witness that [`verify_certificate`] re-checks by
//! a route independent of the generator.

mod bounds;
mod families;
mod verify;

pub use bounds::{chain_bound, digit_pattern_bound, digit_pattern_count, omega_primorial_bound, omega_primorial_count};
pub use families::{
    chain_certificate, digit_certificate, omega_certificate, perfect_powers_certificate, poly_image_certificate,
    poly_prime_preimage_certificate, PolyImageReport,
};
pub use verify::{direct_residue_count, verify_certificate, VerifyReport};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numtheory::{factorize, gcd, NumTheoryError};
use crate::setspec::{ap_union_normalize, complement_hits, hits, APUnionNormalForm, SetSpec, SetSpecError};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("hits at modulus {0} come from a bounded search")]
    InexactOracle(u64),
    #[error("no independent recount exists for modulus {0}")]
    Unverifiable(u64),
    #[error("product bound {achieved} exceeds epsilon {epsilon}")]
    BoundNotReached { epsilon: Box<BigRational>, achieved: Box<BigRational> },
    #[error("certificate digest does not match the set spec")]
    DigestMismatch,
    #[error("partial sum {partial_sum:.6} of 1/k_n is below the threshold {threshold}")]
    InsufficientDivergence { partial_sum: f64, threshold: f64 },
    #[error("index {0} is neither justified small nor listed as bad")]
    Unjustified(usize),
    #[error("chain invariant violated: {0}")]
    ChainInvariantViolated(String),
    #[error("polynomial of degree {degree} is out of scope{}", density.as_ref().map(|d| format!(" (exact density {d})")).unwrap_or_default())]
    DegreeTooLow { degree: i32, density: Option<Box<BigRational>> },
    #[error("no usable primes below {0}")]
    NoUsablePrimes(u64),
    #[error("invalid certificate request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Set(#[from] SetSpecError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountKind {
    R,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Exact residue counts at coprime moduli.
    CoprimeProduct,
    /// Perfect powers miss the classes `p z mod p^2`, `p` not dividing `z`.
    PerfectPowers,
    /// Quadratic forms with a non-square discriminant `D` miss `p z mod
    /// p^2` for primes with `(D/p) = -1` beyond the coefficients.
    FormNonResidue,
    /// `r_p(F(H)) <= p - 1` at primes where `F` mod `p` is not injective.
    PolyImage,
    /// `|F(x)|` prime forces `|F(x)| = p` on root classes mod `p`.
    PolyPrimePreimage,
    /// `r_{|x_{2n}|} <= 2n` for a divisor chain.
    Chain,
    /// Block decomposition of the last `n ell` digits.
    DigitBlocks,
    /// `x = c mod P_n` is divisible by `gcd(c, P_n)`.
    OmegaPrimorial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteClass {
    #[serde(with = "crate::serde_util::decimal")]
    pub residue: u64,
    /// Every member of `X` in the class.
    pub solutions: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `count` is the exact `r_k`.
    Enumerated,
    PerfectPowerGap {
        p: u64,
    },
    NonResidueGap {
        p: u64,
        discriminant: i64,
        cover_modulus: u64,
        cover_residue: u64,
    },
    PolyCollision {
        p: u64,
        x1: u64,
        x2: u64,
    },
    FiniteClasses {
        p: u64,
        classes: Vec<FiniteClass>,
    },
    /// Modulus `|x_index|` of the deduplicated prefix, `index` even.
    ChainPrefix {
        index: usize,
    },
    OmegaPrimorial {
        k: u32,
        n: usize,
    },
    DigitBlocks {
        n: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusRecord {
    #[serde(with = "crate::serde_util::decimal")]
    pub k: u64,
    pub count: u64,
    pub kind: CountKind,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallnessCertificate {
    pub version: u32,
    pub spec_digest: String,
    pub criterion: Criterion,
    pub count_kind: CountKind,
    pub records: Vec<ModulusRecord>,
    /// `prod count_i / k_i`.
    #[serde(with = "crate::serde_util::rational")]
    pub product_bound: BigRational,
    /// `sum (1 - count_i / k_i)`.
    #[serde(with = "crate::serde_util::rational")]
    pub divergence_sum: BigRational,
}

pub(crate) fn ratio(count: u64, k: u64) -> BigRational {
    BigRational::new(BigInt::from(count), BigInt::from(k))
}

/// Sum of fractions, unreduced, by a balanced tree so that the operands of
/// each big multiplication have similar size.
fn fraction_sum(terms: &[(BigInt, BigInt)]) -> (BigInt, BigInt) {
    match terms {
        [] => (BigInt::zero(), BigInt::one()),
        [t] => t.clone(),
        _ => {
            let (l, r) = terms.split_at(terms.len() / 2);
            let ((a, b), (c, d)) = (fraction_sum(l), fraction_sum(r));
            (a * &d + c * &b, b * d)
        }
    }
}

fn big_product(terms: &[BigInt]) -> BigInt {
    match terms {
        [] => BigInt::one(),
        [t] => t.clone(),
        _ => {
            let (l, r) = terms.split_at(terms.len() / 2);
            big_product(l) * big_product(r)
        }
    }
}

pub(crate) fn product_and_divergence(records: &[ModulusRecord]) -> (BigRational, BigRational) {
    let counts: Vec<BigInt> = records.iter().map(|r| BigInt::from(r.count)).collect();
    let moduli: Vec<BigInt> = records.iter().map(|r| BigInt::from(r.k)).collect();
    let product = BigRational::new(big_product(&counts), big_product(&moduli));
    let gaps: Vec<(BigInt, BigInt)> =
        records.iter().map(|r| (BigInt::from(r.k) - BigInt::from(r.count), BigInt::from(r.k))).collect();
    let (num, den) = fraction_sum(&gaps);
    (product, BigRational::new(num, den))
}

impl SmallnessCertificate {
    pub fn assemble(spec: &SetSpec, criterion: Criterion, mut records: Vec<ModulusRecord>) -> Self {
        records.sort_by_key(|r| r.k);
        let (product_bound, divergence_sum) = product_and_divergence(&records);
        let count_kind = if records.iter().any(|r| r.kind == CountKind::W) { CountKind::W } else { CountKind::R };
        SmallnessCertificate {
            version: CERTIFICATE_VERSION,
            spec_digest: spec.digest(),
            criterion,
            count_kind,
            records,
            product_bound,
            divergence_sum,
        }
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.k).collect()
    }

    pub fn counts(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.count).collect()
    }

    pub fn product_f64(&self) -> f64 {
        crate::density::rational_to_f64(&self.product_bound)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, CertifyError> {
        serde_json::from_str(text).map_err(|e| CertifyError::Invalid(format!("cannot parse certificate: {e}")))
    }

    pub(crate) fn require(self, epsilon: &BigRational) -> Result<Self, CertifyError> {
        if &self.product_bound > epsilon {
            Err(CertifyError::BoundNotReached {
                epsilon: Box::new(epsilon.clone()),
                achieved: Box::new(self.product_bound),
            })
        } else {
            Ok(self)
        }
    }
}

pub(crate) fn check_pairwise_coprime(moduli: &[u64]) -> Result<(), CertifyError> {
    if moduli.len() <= 64 {
        for (i, &a) in moduli.iter().enumerate() {
            for &b in &moduli[i + 1..] {
                if gcd(a, b) != 1 {
                    return Err(CertifyError::NotCoprime(a, b));
                }
            }
        }
        return Ok(());
    }
    // long lists: no prime may divide two moduli
    let factors: Vec<Vec<(u64, u32)>> = moduli.par_iter().map(|&k| factorize(k)).collect();
    let mut owner = std::collections::HashMap::new();
    for (&k, f) in moduli.iter().zip(&factors) {
        for &(p, _) in f {
            if let Some(&first) = owner.get(&p) {
                return Err(CertifyError::NotCoprime(first, k));
            }
            owner.insert(p, k);
        }
    }
    Ok(())
}

/// Certificate from exact residue counts at pairwise coprime moduli.
pub fn smallness_certificate(
    spec: &SetSpec,
    moduli: &[u64],
    epsilon: &BigRational,
) -> Result<SmallnessCertificate, CertifyError> {
    if moduli.is_empty() {
        return Err(CertifyError::Invalid("at least one modulus is required".into()));
    }
    check_pairwise_coprime(moduli)?;
    let records = moduli
        .par_iter()
        .map(|&k| {
            let h = hits(spec, k)?;
            if !h.exactness().is_exact() {
                return Err(CertifyError::InexactOracle(k));
            }
            if !verify::recount_feasible(spec, k) {
                return Err(CertifyError::Unverifiable(k));
            }
            Ok(ModulusRecord { k, count: h.count(), kind: CountKind::R, witness: Witness::Enumerated })
        })
        .collect::<Result<Vec<_>, CertifyError>>()?;
    SmallnessCertificate::assemble(spec, Criterion::CoprimeProduct, records).require(epsilon)
}

/// `prod (1 - r_{k_i}(H \ X) / k_i)`, a lower bound on the conjugate lower
/// density of an AP-union.
pub fn lower_bound_ap_union(nf: &APUnionNormalForm, moduli: &[u64]) -> Result<BigRational, CertifyError> {
    check_pairwise_coprime(moduli)?;
    let mut bound = BigRational::one();
    for &k in moduli {
        if k == 0 {
            return Err(CertifyError::Invalid("moduli must be >= 1".into()));
        }
        bound *= BigRational::one() - ratio(complement_hits(nf, k).count(), k);
    }
    Ok(bound)
}

pub fn lower_bound_ap_union_spec(spec: &SetSpec, moduli: &[u64]) -> Result<BigRational, CertifyError> {
    let nf = ap_union_normalize(spec)?;
    lower_bound_ap_union(&nf, moduli)
}

/// Why `X_n = {x in X : k_n | x}` is small.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Justification {
    /// `X_n` is the listed finite set.
    Finite { elements: Vec<i64> },
    /// `X_n` is empty for the stated reason.
    Empty { reason: String },
    /// `X_n = k_n * Y` with `Y` the set of `x` with `Omega(x) = k - 1`
    /// (or `<= k - 1`), small by induction on `k`.
    OmegaInduction { k: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisibilityVerdict {
    pub small: bool,
    /// `sum 1/k_n` over good indices; divergence is not finitely checkable,
    /// so this partial sum stands in for it.
    pub partial_sum: f64,
    pub threshold: f64,
    pub bad_set: Vec<usize>,
    pub justifications: Vec<(u64, Justification)>,
}

pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1.0;

/// Divisibility criterion: `X` is small when, for pairwise coprime `k_n`
/// with `sum 1/k_n` divergent, all but finitely many `X_n` are small.
/// `justify(n, k_n)` supplies the reason for each good index.
pub fn divisibility_criterion_with(
    moduli: &[u64],
    bad_set: &[usize],
    threshold: f64,
    justify: impl Fn(usize, u64) -> Option<Justification> + Sync,
) -> Result<DivisibilityVerdict, CertifyError> {
    let good: Vec<(usize, u64)> = moduli.iter().copied().enumerate().filter(|(i, _)| !bad_set.contains(i)).collect();
    let partial_sum: f64 = good.iter().map(|&(_, k)| 1.0 / k as f64).sum();
    if partial_sum < threshold {
        return Err(CertifyError::InsufficientDivergence { partial_sum, threshold });
    }
    check_pairwise_coprime(moduli)?;
    let justifications = good
        .par_iter()
        .map(|&(i, k)| justify(i, k).map(|j| (k, j)).ok_or(CertifyError::Unjustified(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DivisibilityVerdict { small: true, partial_sum, threshold, bad_set: bad_set.to_vec(), justifications })
}

/// [`divisibility_criterion_with`] using justifications read off the set spec:
/// finite sets, and Omega families whose `X_n` is finite or a dilate of a
/// lower Omega family.
pub fn divisibility_criterion(
    spec: &SetSpec,
    moduli: &[u64],
    bad_set: &[usize],
    threshold: f64,
) -> Result<DivisibilityVerdict, CertifyError> {
    use crate::numtheory::is_prime;
    use crate::setspec::Node;
    divisibility_criterion_with(moduli, bad_set, threshold, |_, k| match &spec.node {
        Node::Finite { values } => Some(Justification::Finite {
            elements: values.iter().copied().filter(|v| v.rem_euclid(k as i64) == 0).collect(),
        }),
        Node::OmegaExact { k: w } | Node::OmegaAtMost { k: w } if is_prime(k) => Some(match w {
            0 => Justification::Empty { reason: format!("units are not divisible by {k}") },
            1 if matches!(spec.node, Node::OmegaExact { .. }) => {
                let mut elements = vec![k as i64];
                if spec.ambient == crate::setspec::Ambient::AllIntegers {
                    elements.insert(0, -(k as i64));
                }
                Justification::Finite { elements }
            }
            _ => Justification::OmegaInduction { k: *w },
        }),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::sieve_primes;
    use crate::setspec::{Ambient, Node};

    fn n(node: Node) -> SetSpec {
        SetSpec::new(Ambient::NonNegative, node).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn squares_over_prime_squares() {
        let moduli: Vec<u64> = sieve_primes(100).into_iter().map(|p| p * p).collect();
        let cert = smallness_certificate(&n(Node::poly(&[0, 0, 1])), &moduli, &q(1, 1)).unwrap();
        let structural =
            sieve_primes(100).into_iter().fold(BigRational::one(), |acc, p| acc * ratio(p * p - p + 1, p * p));
        assert!(cert.product_bound <= structural);
        assert!(verify_certificate(&cert, &n(Node::poly(&[0, 0, 1]))).unwrap().valid);
    }

    #[test]
    fn odd_numbers_are_not_small() {
        let err = smallness_certificate(&n(Node::ap(2, 1)), &[2, 3, 5, 7], &q(1, 3)).unwrap_err();
        assert!(matches!(err, CertifyError::BoundNotReached { .. }));
        assert!(matches!(
            smallness_certificate(&n(Node::ap(2, 1)), &[2, 4], &q(1, 1)),
            Err(CertifyError::NotCoprime(2, 4))
        ));
        let mut long: Vec<u64> = sieve_primes(1000);
        assert!(check_pairwise_coprime(&long).is_ok());
        long.push(3 * 997);
        assert!(matches!(check_pairwise_coprime(&long), Err(CertifyError::NotCoprime(3, 2991))));
        assert!(matches!(
            smallness_certificate(&n(Node::OmegaExact { k: 1 }), &[2, 3], &q(1, 1)),
            Err(CertifyError::InexactOracle(_))
        ));
    }

    #[test]
    fn conjugate_lower_bounds() {
        assert_eq!(lower_bound_ap_union_spec(&n(Node::ap(2, 1)), &[2]).unwrap(), q(1, 2));
        assert_eq!(lower_bound_ap_union_spec(&n(Node::ap(4, 1)), &[4]).unwrap(), q(1, 4));
        let u = n(Node::union(vec![Node::ap(3, 0), Node::ap(3, 1)]));
        assert_eq!(lower_bound_ap_union_spec(&u, &[3]).unwrap(), q(2, 3));
        assert!(lower_bound_ap_union_spec(&n(Node::PerfectPowers), &[3]).is_err());
        // a lower bound never exceeds the density
        let nf = ap_union_normalize(&u).unwrap();
        assert!(lower_bound_ap_union(&nf, &[2, 5, 7]).unwrap() <= nf.density());
    }

    #[test]
    fn divisibility_examples() {
        let primes: Vec<u64> = sieve_primes(1000);
        let own = n(Node::finite(&primes.iter().map(|&p| p as i64).collect::<Vec<_>>()));
        let v = divisibility_criterion(&own, &primes, &[], DEFAULT_DIVERGENCE_THRESHOLD).unwrap();
        assert!(v.small && v.partial_sum > 2.0);
        let prime_set = n(Node::OmegaExact { k: 1 });
        let v = divisibility_criterion(&prime_set, &primes, &[0], DEFAULT_DIVERGENCE_THRESHOLD).unwrap();
        assert_eq!(v.justifications[0], (3, Justification::Finite { elements: vec![3] }));
        let powers: Vec<u64> = (1..20).map(|e| 1u64 << e).collect();
        assert!(matches!(
            divisibility_criterion(&own, &powers, &[], DEFAULT_DIVERGENCE_THRESHOLD),
            Err(CertifyError::InsufficientDivergence { .. })
        ));
        assert!(matches!(
            divisibility_criterion(&n(Node::PerfectPowers), &primes, &[], 1.0),
            Err(CertifyError::Unjustified(0))
        ));
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = smallness_certificate(&n(Node::poly(&[0, 0, 1])), &[9, 25, 49], &q(1, 1)).unwrap();
        let back = SmallnessCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        let v: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        assert_eq!(v["records"][0]["k"], "9");
        assert_eq!(v["records"][0]["kind"], "R");
        assert_eq!(v["records"][0]["witness"]["type"], "enumerated");
    }
}
