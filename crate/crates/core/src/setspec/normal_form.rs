use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::hits::HitSet;
use super::{Node, SetSpec, SetSpecError};
use crate::numtheory::{checked_lcm, gcd, rem_euclid};

/// Largest common modulus produced by [`ap_union_normalize`].
pub const MAX_NORMAL_FORM_MODULUS: u64 = 1 << 26;

/// `X = kZ + H'` (intersected with the ambient), `H'` sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct APUnionNormalForm {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl APUnionNormalForm {
    pub fn density(&self) -> BigRational {
        BigRational::new(BigInt::from(self.residues.len()), BigInt::from(self.modulus))
    }

    pub fn complement(&self) -> APUnionNormalForm {
        let mut keep = vec![true; self.modulus as usize];
        for &r in &self.residues {
            keep[r as usize] = false;
        }
        APUnionNormalForm { modulus: self.modulus, residues: (0..self.modulus).filter(|&r| keep[r as usize]).collect() }
    }

    /// Classes mod `m` met by `X`: `s + kZ` meets `t mod m` iff `s = t` mod `gcd(k, m)`.
    pub fn hits(&self, m: u64) -> HitSet {
        let g = gcd(self.modulus, m);
        let mut base = vec![false; g as usize];
        for &r in &self.residues {
            base[(r % g) as usize] = true;
        }
        HitSet::from_residues(m, (0..m).filter(|t| base[(t % g) as usize]))
    }

    pub fn contains(&self, x: i64) -> bool {
        self.residues.binary_search(&rem_euclid(x as i128, self.modulus)).is_ok()
    }

    fn lift(&self, l: u64) -> Vec<u64> {
        let k = self.modulus;
        let mut out: Vec<u64> = self.residues.iter().flat_map(|&r| (0..l / k).map(move |j| r + j * k)).collect();
        out.sort_unstable();
        out
    }
}

pub(crate) fn progression_hits(a: u64, h: u64, m: u64) -> HitSet {
    APUnionNormalForm { modulus: a, residues: vec![h % a] }.hits(m)
}

/// Normal form of a set built from progressions by union, affine image and
/// progression intersection. Over `N` this describes the set up to finitely
/// many elements (a progression `aN + h` misses `h - a, h - 2a, ...`), which
/// leaves density and hits unchanged.
pub fn ap_union_normalize(spec: &SetSpec) -> Result<APUnionNormalForm, SetSpecError> {
    normalize(&spec.node)
}

fn normalize(node: &Node) -> Result<APUnionNormalForm, SetSpecError> {
    let too_large = |a: u64, b: u64| SetSpecError::ModulusTooLarge(a as u128 * b as u128);
    match node {
        Node::Ap { a, h } => Ok(APUnionNormalForm { modulus: *a, residues: vec![h % a] }),
        Node::UnionOf { of } => {
            let parts = of.iter().map(normalize).collect::<Result<Vec<_>, _>>()?;
            let l = parts.iter().try_fold(1u64, |l, p| {
                checked_lcm(l, p.modulus).filter(|&v| v <= MAX_NORMAL_FORM_MODULUS).ok_or(too_large(l, p.modulus))
            })?;
            let mut residues: Vec<u64> = parts.iter().flat_map(|p| p.lift(l)).collect();
            residues.sort_unstable();
            residues.dedup();
            Ok(APUnionNormalForm { modulus: l, residues })
        }
        Node::AffineImage { a, h, inner } => {
            let inner = normalize(inner)?;
            let k = inner
                .modulus
                .checked_mul(a.unsigned_abs())
                .filter(|&v| v <= MAX_NORMAL_FORM_MODULUS)
                .ok_or(too_large(inner.modulus, a.unsigned_abs()))?;
            let mut residues: Vec<u64> =
                inner.residues.iter().map(|&s| rem_euclid(*a as i128 * s as i128 + *h as i128, k)).collect();
            residues.sort_unstable();
            residues.dedup();
            Ok(APUnionNormalForm { modulus: k, residues })
        }
        Node::IntersectAp { inner, k, h } => {
            let inner = normalize(inner)?;
            let l = checked_lcm(inner.modulus, *k)
                .filter(|&v| v <= MAX_NORMAL_FORM_MODULUS)
                .ok_or(too_large(inner.modulus, *k))?;
            let residues = inner.lift(l).into_iter().filter(|r| r % k == h % k).collect();
            Ok(APUnionNormalForm { modulus: l, residues })
        }
        Node::Finite { .. } => Err(SetSpecError::NotAPUnion("finite sets are not progression unions")),
        _ => Err(SetSpecError::NotAPUnion("node is not built from progressions")),
    }
}

/// Classes mod `m` met by the complement of an AP-union.
pub fn complement_hits(nf: &APUnionNormalForm, m: u64) -> HitSet {
    nf.complement().hits(m)
}
