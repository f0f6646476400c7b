//! Binary quadratic forms `a x^2 + b xy + c y^2`: classification of the
//! value set by its discriminant, smallness certificates from non-residue
//! covers, and positive-density witnesses.

mod experiments;

pub use experiments::{closing_demos, mixed_case_experiment, ClosingReport, MixedCaseReport, ResidueCheck};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{CertifyError, CountKind, Criterion, ModulusRecord, SmallnessCertificate, Witness};
use crate::numtheory::{iroot, is_perfect_square, nonresidue_cover, sieve_primes, NumTheoryError};
use crate::setspec::{self, Ambient, HitSet, Node, SetSpec, SetSpecError};

#[derive(Debug, Error)]
pub enum FormError {
    #[error("the zero form has the single value 0")]
    Degenerate,
    #[error("coefficients must be non-negative over N")]
    OutsideAmbient,
    #[error("coefficients too large: {0}")]
    Overflow(String),
    #[error("the discriminant {0} is a perfect square")]
    SquareDiscriminant(i64),
    #[error("no prime of the cover class below {0}")]
    BudgetExhausted(u64),
    #[error("form is outside the mixed-density regime: {0}")]
    WrongRegime(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Set(#[from] SetSpecError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormCase {
    /// `D` not a perfect square.
    SmallNonSquareD,
    /// `D = 0`: `4aX` lies in the squares (or their negatives).
    SmallZeroD,
    /// `D = q^2 > 0`, `ac = 0`: `X` contains `|b| H + a + c`.
    PositiveAC0,
    /// `D = q^2 > 0`, `ac != 0`, over Z: `X` contains an explicit AP.
    PositiveZ,
    /// `D = q^2 > 0`, `ac != 0`, over N: asymptotic density zero, Buck
    /// density positive.
    MixedN,
}

impl FormCase {
    pub fn is_small(self) -> bool {
        matches!(self, FormCase::SmallNonSquareD | FormCase::SmallZeroD)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Upper bound on the Buck density, from exact residue counts.
    BuckUpper,
    /// Lower bound on the Buck density.
    BuckLower,
}

/// `X` contains `{offset + step * t : t in H}`, attained at
/// `(x, y) = (x0 + x1 t, y0 + y1 t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApWitness {
    pub step: i64,
    pub offset: i64,
    pub x: (i64, i64),
    pub y: (i64, i64),
}

impl ApWitness {
    pub fn element(&self, t: i64) -> i64 {
        self.offset + self.step * t
    }

    pub fn pair(&self, t: i64) -> (i64, i64) {
        (self.x.0 + self.x.1 * t, self.y.0 + self.y.1 * t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormClassification {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub ambient: Ambient,
    pub discriminant: i64,
    /// `sqrt(D)` when `D` is a perfect square.
    pub q: Option<i64>,
    pub case: FormCase,
    #[serde(serialize_with = "crate::serde_util::rational::serialize")]
    pub bound: BigRational,
    pub bound_kind: BoundKind,
    pub witness: Option<ApWitness>,
}

/// Primes whose squares enter the upper bound reported for small forms.
const CLASSIFY_PRIME_BOUND: u64 = 50;

pub fn discriminant(a: i64, b: i64, c: i64) -> Result<i64, FormError> {
    b.checked_mul(b)
        .and_then(|bb| a.checked_mul(c).and_then(|ac| ac.checked_mul(4)).and_then(|ac4| bb.checked_sub(ac4)))
        .ok_or_else(|| FormError::Overflow(format!("({a}, {b}, {c})")))
}

fn q_of(d: i64) -> Option<i64> {
    (d >= 0 && is_perfect_square(d)).then(|| iroot(d as u64, 2) as i64)
}

fn check_form(a: i64, b: i64, c: i64, ambient: Ambient) -> Result<i64, FormError> {
    if a == 0 && b == 0 && c == 0 {
        return Err(FormError::Degenerate);
    }
    if ambient == Ambient::NonNegative && (a < 0 || b < 0 || c < 0) {
        return Err(FormError::OutsideAmbient);
    }
    if [a, b, c].iter().any(|v| v.unsigned_abs() > 1 << 20) {
        return Err(FormError::Overflow(format!("({a}, {b}, {c})")));
    }
    discriminant(a, b, c)
}

fn exact_square_product(a: i64, b: i64, c: i64, ambient: Ambient) -> Result<BigRational, FormError> {
    let factors = sieve_primes(CLASSIFY_PRIME_BOUND)
        .into_par_iter()
        .map(|p| Ok(BigRational::new(setspec::form_residues(a, b, c, p * p, ambient)?.count().into(), (p * p).into())))
        .collect::<Result<Vec<_>, SetSpecError>>()?;
    Ok(factors.into_iter().fold(BigRational::one(), |acc, f| acc * f))
}

fn unit(n: i64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n))
}

pub fn classify_form(a: i64, b: i64, c: i64, ambient: Ambient) -> Result<FormClassification, FormError> {
    let d = check_form(a, b, c, ambient)?;
    let q = q_of(d);
    let mut out = FormClassification {
        a,
        b,
        c,
        ambient,
        discriminant: d,
        q,
        case: FormCase::SmallNonSquareD,
        bound: BigRational::one(),
        bound_kind: BoundKind::BuckLower,
        witness: None,
    };
    match q {
        None | Some(0) => {
            out.case = if q.is_none() { FormCase::SmallNonSquareD } else { FormCase::SmallZeroD };
            out.bound = exact_square_product(a, b, c, ambient)?;
            out.bound_kind = BoundKind::BuckUpper;
        }
        Some(_) if a == 0 || c == 0 => {
            // b != 0 here; the free variable runs over sign(b) * H
            let s = b.signum();
            out.case = FormCase::PositiveAC0;
            out.bound = unit(b.abs());
            out.witness = Some(if c == 0 {
                ApWitness { step: b.abs(), offset: a, x: (1, 0), y: (0, s) }
            } else {
                ApWitness { step: b.abs(), offset: c, x: (0, s), y: (1, 0) }
            });
        }
        Some(q) if ambient == Ambient::AllIntegers => {
            // (x, y) = (-(b - q) z, 2a(z + 1)) gives a(b^2 - q^2) + 2aq(b - q) z
            let step = 2 * a * q * (b - q);
            out.case = FormCase::PositiveZ;
            out.bound = unit(step.abs());
            out.witness = Some(ApWitness { step, offset: a * (b * b - q * q), x: (0, -(b - q)), y: (2 * a, 2 * a) });
        }
        Some(q) => {
            out.case = FormCase::MixedN;
            out.bound = unit(2 * a * q * (b - q));
        }
    }
    Ok(out)
}

/// Exact `{Q(x, y) mod m}`; the residues do not depend on the ambient.
pub fn form_residues(a: i64, b: i64, c: i64, m: u64) -> Result<HitSet, FormError> {
    Ok(setspec::form_residues(a, b, c, m, Ambient::NonNegative)?)
}

/// Cover primes up to this bound are re-checked against exact residues.
pub const FORM_CONFIRM_LIMIT: u64 = 200;
/// Largest auxiliary prime-power modulus.
pub const AUX_MODULUS_LIMIT: u64 = 4096;
const COVER_VERIFY_BUDGET: usize = 100;

/// Certificate for a form of non-square discriminant: every prime `p` of
/// the non-residue cover class with `p >= 2 + max |coefficient|` misses the
/// classes `p z`, `p` not dividing `z`, mod `p^2`. Prime powers of the
/// remaining small primes join with exact counts when those are below the
/// modulus.
pub fn form_smallness_certificate(
    a: i64,
    b: i64,
    c: i64,
    ambient: Ambient,
    prime_budget: u64,
    epsilon: &BigRational,
) -> Result<SmallnessCertificate, FormError> {
    let d = check_form(a, b, c, ambient)?;
    if q_of(d).is_some() {
        return Err(FormError::SquareDiscriminant(d));
    }
    let spec = SetSpec::new(ambient, Node::quadform(a, b, c))?;
    let cover = nonresidue_cover(d, COVER_VERIFY_BUDGET)?;
    let threshold = 2 + a.unsigned_abs().max(b.unsigned_abs()).max(c.unsigned_abs());
    let primes: Vec<u64> = sieve_primes(prime_budget)
        .into_iter()
        .filter(|&p| p % cover.modulus == cover.residue && p >= threshold)
        .collect();
    if primes.is_empty() {
        return Err(FormError::BudgetExhausted(prime_budget));
    }
    let mut records = primes
        .par_iter()
        .map(|&p| {
            let count = p * p - p + 1;
            if p <= FORM_CONFIRM_LIMIT && form_residues(a, b, c, p * p)?.count() > count {
                return Err(FormError::Certify(CertifyError::Invalid(format!(
                    "exact residues exceed {count} mod {p}^2"
                ))));
            }
            let witness = Witness::NonResidueGap {
                p,
                discriminant: d,
                cover_modulus: cover.modulus,
                cover_residue: cover.residue,
            };
            Ok(ModulusRecord { k: p * p, count, kind: CountKind::R, witness })
        })
        .collect::<Result<Vec<_>, FormError>>()?;
    for r in sieve_primes(iroot(AUX_MODULUS_LIMIT, 2)) {
        if primes.binary_search(&r).is_ok() {
            continue;
        }
        let k = (1..).map(|e| r.pow(e)).take_while(|&k| k <= AUX_MODULUS_LIMIT).last().expect("r^2 <= limit");
        let count = form_residues(a, b, c, k)?.count();
        if count < k {
            records.push(ModulusRecord { k, count, kind: CountKind::R, witness: Witness::Enumerated });
        }
    }
    Ok(SmallnessCertificate::assemble(&spec, Criterion::FormNonResidue, records).require(epsilon)?)
}
