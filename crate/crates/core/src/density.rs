//! Residue profiles and the Buck-density engine.
//!
//! The upper Buck density of `X` is `inf_k r_k(X)/k`, and the infimum is
//! the limit along any modulus sequence in which every `m` eventually
//! divides a term, such as `k_n = lcm(1..n)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::numtheory::modulus_sequence_u64;
use crate::setspec::{
    ap_union_normalize, hits_with, Exactness, HitOptions, Node, SetSpec, SetSpecError, MAX_HIT_MODULUS,
};

pub const DEFAULT_DEPTH: u64 = 8;

fn as_string<S: Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileEntry {
    #[serde(serialize_with = "as_string")]
    pub modulus: u64,
    pub count: u64,
    pub exactness: Exactness,
}

impl ProfileEntry {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.count), BigInt::from(self.modulus))
    }
}

/// `r_k` at strictly increasing moduli.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueProfile {
    pub entries: Vec<ProfileEntry>,
}

impl ResidueProfile {
    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.exactness.is_exact())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuckBound {
    #[serde(serialize_with = "as_string")]
    pub upper: BigRational,
    #[serde(serialize_with = "as_string")]
    pub achieved_at: u64,
    pub depth: u64,
    /// The bound equals the Buck density.
    pub exact: bool,
    /// Some entry came from a bounded search, so `upper` is not a proof.
    pub heuristic: bool,
}

impl BuckBound {
    pub fn upper_f64(&self) -> f64 {
        rational_to_f64(&self.upper)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuckOptions {
    pub depth: u64,
    /// Moduli added to the `lcm(1..n)` ladder.
    pub extra_moduli: Vec<u64>,
    pub hits: HitOptions,
}

impl Default for BuckOptions {
    fn default() -> Self {
        BuckOptions { depth: DEFAULT_DEPTH, extra_moduli: Vec::new(), hits: HitOptions::default() }
    }
}

impl BuckOptions {
    pub fn depth(depth: u64) -> Self {
        BuckOptions { depth, ..Self::default() }
    }
}

pub fn residue_count(spec: &SetSpec, k: u64) -> Result<(u64, Exactness), SetSpecError> {
    let h = hits_with(spec, k, HitOptions::default())?;
    Ok((h.count(), h.exactness()))
}

/// Moduli `lcm(1..n)` for `n = 1..depth`, deduplicated, merged with `extra`.
pub fn profile_moduli(depth: u64, extra: &[u64]) -> Result<Vec<u64>, SetSpecError> {
    if depth == 0 {
        return Err(SetSpecError::Invalid("depth must be >= 1".into()));
    }
    let mut moduli = Vec::new();
    for n in 1..=depth {
        let k = modulus_sequence_u64(n)
            .ok()
            .filter(|&k| k <= MAX_HIT_MODULUS)
            .ok_or(SetSpecError::ModulusTooLarge(u128::MAX))?;
        moduli.push(k);
    }
    if let Some(&bad) = extra.iter().find(|&&m| m == 0) {
        return Err(SetSpecError::Invalid(format!("modulus {bad} must be >= 1")));
    }
    moduli.extend_from_slice(extra);
    moduli.sort_unstable();
    moduli.dedup();
    Ok(moduli)
}

pub fn residue_profile(spec: &SetSpec, opts: &BuckOptions) -> Result<ResidueProfile, SetSpecError> {
    let moduli = profile_moduli(opts.depth, &opts.extra_moduli)?;
    let entries = moduli
        .par_iter()
        .map(|&k| {
            let h = hits_with(spec, k, opts.hits)?;
            Ok(ProfileEntry { modulus: k, count: h.count(), exactness: h.exactness() })
        })
        .collect::<Result<Vec<_>, SetSpecError>>()?;
    Ok(ResidueProfile { entries })
}

pub fn buck_upper(spec: &SetSpec, depth: u64) -> Result<BuckBound, SetSpecError> {
    buck_upper_with(spec, &BuckOptions::depth(depth))
}

pub fn buck_upper_with(spec: &SetSpec, opts: &BuckOptions) -> Result<BuckBound, SetSpecError> {
    let profile = residue_profile(spec, opts)?;
    Ok(bound_from_profile(spec, &profile, opts.depth))
}

pub fn bound_from_profile(spec: &SetSpec, profile: &ResidueProfile, depth: u64) -> BuckBound {
    let mut upper = BigRational::one();
    let mut achieved_at = 1;
    for e in &profile.entries {
        let r = e.ratio();
        if r < upper {
            upper = r;
            achieved_at = e.modulus;
        }
    }
    let heuristic = !profile.is_exact();
    let attained = upper.is_zero()
        || matches!(spec.node, Node::FactorialShift)
        || ap_union_normalize(spec).is_ok_and(|nf| nf.density() == upper);
    BuckBound { upper, achieved_at, depth, exact: !heuristic && attained, heuristic }
}

pub fn ap_union_density(nf: &crate::setspec::APUnionNormalForm) -> BigRational {
    nf.density()
}
