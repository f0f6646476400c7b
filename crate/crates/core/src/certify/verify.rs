//! Independent re-checking of certificates.
//!
//! Nothing here goes through the hit oracle, CRT joins or closed-form
//! residue counts: exact counts are recomputed by direct enumeration of
//! residues, and structural witnesses are re-derived from first
//! principles.

use serde::Serialize;

use super::{
    check_pairwise_coprime, product_and_divergence, CertifyError, CountKind, Criterion, FiniteClass, ModulusRecord,
    SmallnessCertificate, Witness, CERTIFICATE_VERSION,
};
use crate::setspec::{chain_terms, Ambient, Node, Polynomial, SetSpec};

const DIRECT_LINEAR_LIMIT: u64 = 100_000_000;
const DIRECT_POLY_LIMIT: u64 = 20_000_000;
const DIRECT_QUADRATIC_LIMIT: u64 = 4096;
const DIRECT_SCAN_LIMIT: u64 = 20_000_000;
const OMEGA_BRUTE_LIMIT: u64 = 10_000_000;
/// Structural witnesses at primes up to this bound also get a direct check
/// of the classes they claim to exclude.
const DEEP_CHECK_PRIME_LIMIT: u64 = 200;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub checked_records: usize,
    /// The first failed check, naming the modulus where there is one.
    pub first_failure: Option<String>,
}

fn prime_by_trial(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn md(x: i128, k: u64) -> usize {
    x.rem_euclid(k as i128) as usize
}

fn naive_poly(coeffs: &[i64], x: u64, k: u64) -> u64 {
    let mut total: u128 = 0;
    for (i, &c) in coeffs.iter().enumerate() {
        let mut power: u128 = 1;
        for _ in 0..i {
            power = power * x as u128 % k as u128;
        }
        total = (total + power * md(c as i128, k) as u128) % k as u128;
    }
    total as u64
}

fn naive_avoids(mut x: u64, base: u32, pattern: &[u32]) -> bool {
    let mut digits = Vec::new();
    loop {
        digits.push((x % base as u64) as u32);
        x /= base as u64;
        if x == 0 {
            break;
        }
    }
    digits.reverse();
    !digits.windows(pattern.len()).any(|w| w == pattern)
}

fn power_of(base: u64, k: u64) -> Option<u32> {
    let (mut v, mut j) = (1u64, 0u32);
    while v < k {
        v = v.checked_mul(base)?;
        j += 1;
    }
    (v == k).then_some(j)
}

fn feasible(node: &Node, k: u64) -> bool {
    match node {
        Node::Finite { .. } | Node::Ap { .. } | Node::FactorialShift => k <= DIRECT_LINEAR_LIMIT,
        Node::DivisibilityChain { .. } => k <= DIRECT_POLY_LIMIT,
        Node::PolyImage { .. } => k <= DIRECT_POLY_LIMIT,
        Node::QuadFormValues { .. } | Node::PerfectPowers => k <= DIRECT_QUADRATIC_LIMIT,
        Node::DigitAvoider { base, pattern } => power_of(*base as u64, k).is_some_and(|j| {
            (*base as u64).checked_pow(j + pattern.len() as u32 + 2).is_some_and(|b| b <= DIRECT_SCAN_LIMIT)
        }),
        Node::UnionOf { of } => of.iter().all(|n| feasible(n, k)),
        Node::AffineImage { inner, .. } => feasible(inner, k),
        Node::IntersectAp { inner, k: step, .. } => {
            crate::numtheory::checked_lcm(k, *step).is_some_and(|l| l <= DIRECT_POLY_LIMIT && feasible(inner, l))
        }
        Node::PolyPrimePreimage { .. } | Node::OmegaExact { .. } | Node::OmegaAtMost { .. } => false,
    }
}

fn direct_residues(node: &Node, ambient: Ambient, k: u64) -> Vec<bool> {
    let mut hit = vec![false; k as usize];
    match node {
        Node::Finite { values } => values.iter().for_each(|&v| hit[md(v as i128, k)] = true),
        Node::Ap { a, h } => (0..k).for_each(|j| hit[md(*h as i128 + *a as i128 * j as i128, k)] = true),
        Node::UnionOf { of } => {
            for n in of {
                for (i, b) in direct_residues(n, ambient, k).into_iter().enumerate() {
                    hit[i] |= b;
                }
            }
        }
        Node::AffineImage { a, h, inner } => {
            for (r, b) in direct_residues(inner, ambient, k).into_iter().enumerate() {
                if b {
                    hit[md(*a as i128 * r as i128 + *h as i128, k)] = true;
                }
            }
        }
        Node::IntersectAp { inner, k: step, h } => {
            let l = crate::numtheory::checked_lcm(k, *step).expect("checked by feasible");
            for (r, b) in direct_residues(inner, ambient, l).into_iter().enumerate() {
                if b && md(r as i128 - *h as i128, *step) == 0 {
                    hit[r % k as usize] = true;
                }
            }
        }
        Node::PolyImage { coeffs } => (0..k).for_each(|x| hit[naive_poly(coeffs, x, k) as usize] = true),
        Node::QuadFormValues { a, b, c } => {
            for x in 0..k as i128 {
                for y in 0..k as i128 {
                    hit[md(*a as i128 * x * x + *b as i128 * x * y + *c as i128 * y * y, k)] = true;
                }
            }
        }
        Node::PerfectPowers => {
            // an exponent window longer than any cycle of a -> a^n mod k
            let window = k + 64;
            for a in 0..k {
                let mut v = a * a % k;
                for _ in 2..window {
                    hit[v as usize] = true;
                    v = v * a % k;
                }
            }
        }
        Node::DigitAvoider { base, pattern } => {
            let j = power_of(*base as u64, k).expect("checked by feasible");
            let limit = (*base as u64).pow(j + pattern.len() as u32 + 2);
            for x in 0..limit {
                if naive_avoids(x, *base, pattern) {
                    hit[(x % k) as usize] = true;
                    if ambient == Ambient::AllIntegers {
                        hit[md(-(x as i128), k)] = true;
                    }
                }
            }
        }
        Node::DivisibilityChain { prefix } => {
            let (terms, ratio) = chain_terms(prefix).expect("validated spec");
            terms.iter().for_each(|&t| hit[md(t as i128, k)] = true);
            let last = *terms.last().expect("non-empty");
            if let Some(rho) = ratio {
                let mut v = md(last as i128, k) as i128;
                for _ in 0..=k {
                    v = md(v * rho as i128, k) as i128;
                    hit[v as usize] = true;
                }
            }
        }
        Node::FactorialShift => {
            let mut f: u128 = 1;
            for h in 0..2 * k {
                if h >= 1 {
                    f = f * h as u128 % k as u128;
                }
                hit[((f + h as u128) % k as u128) as usize] = true;
            }
        }
        Node::PolyPrimePreimage { .. } | Node::OmegaExact { .. } | Node::OmegaAtMost { .. } => {
            unreachable!("checked by feasible")
        }
    }
    hit
}

/// `r_k(X)` by direct enumeration of residues, when that is affordable.
pub fn direct_residue_count(spec: &SetSpec, k: u64) -> Option<u64> {
    (k >= 1 && feasible(&spec.node, k))
        .then(|| direct_residues(&spec.node, spec.ambient, k).into_iter().filter(|&b| b).count() as u64)
}

pub(crate) fn recount_feasible(spec: &SetSpec, k: u64) -> bool {
    k >= 1 && feasible(&spec.node, k)
}

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Re-checks every claim in `cert` against `spec`. A certificate for a
/// different spec is an error; any other failure is reported in the
/// returned [`VerifyReport`].
pub fn verify_certificate(cert: &SmallnessCertificate, spec: &SetSpec) -> Result<VerifyReport, CertifyError> {
    if cert.spec_digest != spec.digest() {
        return Err(CertifyError::DigestMismatch);
    }
    let mut checked = 0;
    let outcome = (|| -> Check {
        ensure(cert.version == CERTIFICATE_VERSION, || format!("unsupported certificate version {}", cert.version))?;
        ensure(!cert.records.is_empty(), || "certificate has no records".into())?;
        let moduli = cert.moduli();
        ensure(moduli.windows(2).all(|w| w[0] < w[1]), || "moduli are not strictly increasing".into())?;
        check_pairwise_coprime(&moduli).map_err(|e| e.to_string())?;
        let any_w = cert.records.iter().any(|r| r.kind == CountKind::W);
        ensure((cert.count_kind == CountKind::W) == any_w, || "count kind disagrees with the records".into())?;
        let (product, divergence) = product_and_divergence(&cert.records);
        ensure(product == cert.product_bound, || "product bound does not match the records".into())?;
        ensure(divergence == cert.divergence_sum, || "divergence sum does not match the records".into())?;
        for r in &cert.records {
            check_record(cert.criterion, r, spec).map_err(|e| format!("modulus {}: {e}", r.k))?;
            checked += 1;
        }
        Ok(())
    })();
    Ok(VerifyReport { valid: outcome.is_ok(), checked_records: checked, first_failure: outcome.err() })
}

fn check_record(criterion: Criterion, r: &ModulusRecord, spec: &SetSpec) -> Check {
    ensure(r.k >= 1 && r.count <= r.k, || "count exceeds the modulus".into())?;
    // exact enumerated counts may back any criterion
    let expect_criterion = match &r.witness {
        Witness::Enumerated => criterion,
        Witness::PerfectPowerGap { .. } => Criterion::PerfectPowers,
        Witness::NonResidueGap { .. } => Criterion::FormNonResidue,
        Witness::PolyCollision { .. } => Criterion::PolyImage,
        Witness::FiniteClasses { .. } => Criterion::PolyPrimePreimage,
        Witness::ChainPrefix { .. } => Criterion::Chain,
        Witness::OmegaPrimorial { .. } => Criterion::OmegaPrimorial,
        Witness::DigitBlocks { .. } => Criterion::DigitBlocks,
    };
    ensure(criterion == expect_criterion, || format!("witness does not belong to criterion {criterion:?}"))?;
    let expect_kind = if matches!(r.witness, Witness::FiniteClasses { .. }) { CountKind::W } else { CountKind::R };
    ensure(r.kind == expect_kind, || "wrong count kind for the witness".into())?;
    let wrong_node = || "witness does not match the set description".to_string();
    match (&r.witness, &spec.node) {
        (Witness::Enumerated, _) => {
            let direct = direct_residue_count(spec, r.k).ok_or_else(|| "direct recount is not feasible".to_string())?;
            ensure(direct == r.count, || format!("claimed {} classes, direct recount gives {direct}", r.count))
        }
        (Witness::PerfectPowerGap { p }, Node::PerfectPowers) => {
            let p = *p;
            ensure(prime_by_trial(p) && p.checked_mul(p) == Some(r.k), || {
                format!("{} is not the square of a prime", r.k)
            })?;
            ensure(r.count == p * p - p + 1, || format!("count should be {}", p * p - p + 1))?;
            // a = 0 mod p gives a^n = 0 mod p^2 and a != 0 mod p a unit, so
            // the classes p z, z != 0 mod p, are missed
            if p <= DEEP_CHECK_PRIME_LIMIT && r.k <= DIRECT_QUADRATIC_LIMIT {
                let direct = direct_residue_count(spec, r.k).expect("small modulus");
                ensure(direct <= r.count, || format!("direct recount gives {direct} classes"))?;
            }
            Ok(())
        }
        (
            Witness::NonResidueGap { p, discriminant, cover_modulus, cover_residue },
            Node::QuadFormValues { a, b, c },
        ) => {
            let (p, (a, b, c)) = (*p, (*a, *b, *c));
            ensure(*discriminant == b * b - 4 * a * c, || "wrong discriminant".into())?;
            ensure(prime_by_trial(p) && p.checked_mul(p) == Some(r.k), || {
                format!("{} is not the square of a prime", r.k)
            })?;
            let max_coef = a.unsigned_abs().max(b.unsigned_abs()).max(c.unsigned_abs());
            ensure(p > 2 && p >= max_coef + 2, || format!("prime {p} too small for the coefficients"))?;
            ensure(*cover_modulus >= 1 && p % cover_modulus == *cover_residue, || {
                "prime outside the cover class".into()
            })?;
            ensure(euler_criterion(*discriminant, p) == p - 1, || format!("discriminant is a residue mod {p}"))?;
            ensure(r.count == p * p - p + 1, || format!("count should be {}", p * p - p + 1))?;
            if p <= DEEP_CHECK_PRIME_LIMIT {
                ensure(missed_multiples_of_p(a, b, c, p), || format!("a class p z is represented mod {}", p * p))?;
            }
            Ok(())
        }
        (Witness::PolyCollision { p, x1, x2 }, Node::PolyImage { coeffs }) => {
            let p = *p;
            ensure(prime_by_trial(p) && p == r.k, || format!("{} is not prime", r.k))?;
            ensure(x1 != x2 && *x1 < p && *x2 < p, || "collision points must be distinct residues".into())?;
            ensure(naive_poly(coeffs, *x1, p) == naive_poly(coeffs, *x2, p), || "no collision at the witness".into())?;
            ensure(r.count == p - 1, || format!("count should be {}", p - 1))
        }
        (Witness::FiniteClasses { p, classes }, Node::PolyPrimePreimage { coeffs }) => {
            let p = *p;
            ensure(prime_by_trial(p) && p == r.k, || format!("{} is not prime", r.k))?;
            check_finite_classes(coeffs, spec.ambient, p, classes)?;
            ensure(r.count == p - classes.len() as u64, || format!("count should be {}", p - classes.len() as u64))
        }
        (Witness::ChainPrefix { index }, Node::DivisibilityChain { prefix }) => {
            let (terms, _) = chain_terms(prefix).map_err(|e| e.to_string())?;
            let i = *index;
            ensure(i >= 2 && i % 2 == 0 && i <= terms.len(), || format!("bad chain index {i}"))?;
            ensure(r.k == terms[i - 1].unsigned_abs(), || format!("modulus should be |x_{i}|"))?;
            ensure(r.count == i as u64, || format!("count should be {i}"))?;
            let distinct = terms.iter().enumerate().all(|(j, t)| !terms[..j].contains(t));
            let doubling =
                terms.windows(2).all(|w| w[0] != 0 && w[1] % w[0] == 0 && w[1].unsigned_abs() >= w[0].unsigned_abs());
            ensure(distinct && doubling, || "prefix is not a strict divisor chain".into())
        }
        (Witness::OmegaPrimorial { k, n }, Node::OmegaExact { k: w } | Node::OmegaAtMost { k: w }) => {
            ensure(k == w, || "omega parameter mismatch".into())?;
            let primes: Vec<u64> = (2..).filter(|&q| prime_by_trial(q)).take(*n).collect();
            let pn = primes.iter().try_fold(1u64, |acc, &q| acc.checked_mul(q));
            ensure(*n >= 1 && pn == Some(r.k), || format!("modulus is not the primorial of {n}"))?;
            let count = omega_count_by_subsets(&primes, *k);
            ensure(count == Some(r.count), || format!("count should be {count:?}"))?;
            if r.k <= OMEGA_BRUTE_LIMIT {
                let brute = (0..r.k).filter(|c| primes.iter().filter(|&&q| c % q == 0).count() <= *k as usize).count();
                ensure(brute as u64 == r.count, || format!("brute-force count is {brute}"))?;
            }
            Ok(())
        }
        (Witness::DigitBlocks { n }, Node::DigitAvoider { base, pattern }) => {
            let ell = pattern.len() as u32;
            let k = (*base as u64).checked_pow(n * ell);
            ensure(*n >= 1 && k == Some(r.k), || format!("modulus should be {base}^{}", n * ell))?;
            let count = block_count(*base as u128, ell, *n, pattern[0] == 0);
            ensure(count == Some(r.count as u128), || format!("count should be {count:?}"))?;
            if r.k <= 10_000 {
                if let Some(direct) = direct_residue_count(spec, r.k) {
                    ensure(direct <= r.count, || format!("direct recount gives {direct} classes"))?;
                }
            }
            Ok(())
        }
        _ => Err(wrong_node()),
    }
}

fn euler_criterion(d: i64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (md(d as i128, p) as u128, (p - 1) / 2, 1u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// Every pair `(x, y)` with `Q(x, y) = 0 mod p` has `Q(x, y) = 0 mod p^2`
/// or `Q(x, y) != 0 mod p`: so no class `p z`, `z != 0 mod p`, is hit.
fn missed_multiples_of_p(a: i64, b: i64, c: i64, p: u64) -> bool {
    let q = |x: i128, y: i128| a as i128 * x * x + b as i128 * x * y + c as i128 * y * y;
    let p2 = (p * p) as i128;
    for x in 0..p as i128 {
        for y in 0..p as i128 {
            if q(x, y).rem_euclid(p as i128) != 0 {
                continue;
            }
            for s in 0..p as i128 {
                for t in 0..p as i128 {
                    if q(x + p as i128 * s, y + p as i128 * t).rem_euclid(p2) != 0 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn check_finite_classes(coeffs: &[i64], ambient: Ambient, p: u64, classes: &[FiniteClass]) -> Check {
    let mut residues: Vec<u64> = classes.iter().map(|c| c.residue).collect();
    residues.sort_unstable();
    residues.dedup();
    ensure(residues.len() == classes.len() && residues.iter().all(|&h| h < p), || {
        "class residues must be distinct and reduced".into()
    })?;
    for class in classes {
        ensure(naive_poly(coeffs, class.residue, p) == 0, || {
            format!("F does not vanish at {} mod {p}", class.residue)
        })?;
        // members of the class satisfy F(x) = p or F(x) = -p
        let mut expected = Vec::new();
        for target in [p as i64, -(p as i64)] {
            let mut shifted = coeffs.to_vec();
            shifted[0] = shifted[0].checked_sub(target).ok_or_else(|| "coefficient overflow".to_string())?;
            expected.extend(
                Polynomial::new(&shifted)
                    .integer_roots()
                    .into_iter()
                    .filter(|&x| ambient.contains(x) && md(x as i128, p) as u64 == class.residue),
            );
        }
        expected.sort_unstable();
        expected.dedup();
        let mut claimed = class.solutions.clone();
        claimed.sort_unstable();
        ensure(claimed == expected, || format!("class {} mod {p} has members {expected:?}", class.residue))?;
    }
    Ok(())
}

fn omega_count_by_subsets(primes: &[u64], k: u32) -> Option<u64> {
    if primes.len() > 24 {
        return None;
    }
    let mut total: u64 = 0;
    for mask in 0u32..(1 << primes.len()) {
        if mask.count_ones() <= k {
            let mut excluded = primes.iter().enumerate().filter(|(i, _)| mask & (1 << i) == 0);
            total = total.checked_add(excluded.try_fold(1u64, |acc, (_, &q)| acc.checked_mul(q - 1))?)?;
        }
    }
    Some(total)
}

fn block_count(b: u128, ell: u32, n: u32, leading_zero: bool) -> Option<u128> {
    let block = b.checked_pow(ell)? - 1;
    let mut count = block.checked_pow(n)?;
    if leading_zero {
        count += 1;
        for len in 1..n * ell {
            count += block.checked_pow(len / ell)? * b.checked_pow(len % ell)?;
        }
    }
    Some(count.min(b.checked_pow(n * ell)?))
}
