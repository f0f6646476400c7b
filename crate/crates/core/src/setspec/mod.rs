//! An algebra of subsets of `H` (`N` or `Z`).
//!
//! Every node supports a membership test, exact bounded enumeration, and a
//! residue-hit oracle `hits(m)`: the classes `h mod m` that the set meets.
//! Hit sets are flagged [`Exactness::Exact`] when computed by a closed form
//! or a complete finite search, and [`Exactness::SearchBounded`] when they
//! come from scanning members up to an element bound (such sets never
//! contain false positives, but may miss classes).

mod digits;
mod enumerate;
mod hits;
mod normal_form;
mod poly;
mod powers;
mod quadvalues;

pub use hits::{form_residues, hits, hits_with, Exactness, HitOptions, HitSet, MAX_HIT_MODULUS};
pub use normal_form::{ap_union_normalize, complement_hits, APUnionNormalForm};
pub use poly::Polynomial;
pub use powers::perfect_power_residues;
pub use quadvalues::represents;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetSpecError {
    #[error("invalid set spec: {0}")]
    Invalid(String),
    #[error("cannot parse set spec: {0}")]
    Parse(String),
    #[error("modulus {0} exceeds the enumerable range")]
    ModulusTooLarge(u128),
    #[error("not a finite union of arithmetic progressions: {0}")]
    NotAPUnion(&'static str),
    #[error("exact search for {0} would exceed the search budget")]
    SearchTooLarge(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Ambient {
    /// The non-negative integers.
    #[default]
    #[serde(rename = "N")]
    NonNegative,
    /// All integers.
    #[serde(rename = "Z")]
    AllIntegers,
}

impl Ambient {
    pub fn contains(self, x: i64) -> bool {
        matches!(self, Ambient::AllIntegers) || x >= 0
    }
}

impl std::fmt::Display for Ambient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ambient::NonNegative => "N",
            Ambient::AllIntegers => "Z",
        })
    }
}

/// One node of a set description. Polynomial coefficients are listed from
/// the constant term upwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Node {
    Finite {
        values: Vec<i64>,
    },
    /// `a*H + h`.
    Ap {
        a: u64,
        h: u64,
    },
    #[serde(rename = "union")]
    UnionOf {
        of: Vec<Node>,
    },
    /// `a*X + h`.
    #[serde(rename = "affine")]
    AffineImage {
        a: i64,
        h: i64,
        inner: Box<Node>,
    },
    /// Members of `inner` congruent to `h` mod `k`.
    IntersectAp {
        inner: Box<Node>,
        k: u64,
        h: u64,
    },
    /// `{F(x) : x in H}`.
    #[serde(rename = "poly")]
    PolyImage {
        coeffs: Vec<i64>,
    },
    /// `{x in H : |F(x)| is prime}`.
    PolyPrimePreimage {
        coeffs: Vec<i64>,
    },
    /// `{a x^2 + b xy + c y^2 : x, y in H}`.
    #[serde(rename = "quadform")]
    QuadFormValues {
        a: i64,
        b: i64,
        c: i64,
    },
    /// `{a^n : a in H, n >= 2}`.
    PerfectPowers,
    /// Members whose base-`base` digit string (of `|x|`) avoids `pattern`.
    DigitAvoider {
        base: u32,
        pattern: Vec<u32>,
    },
    /// `Omega(|x|) = k`, `x != 0`.
    OmegaExact {
        k: u32,
    },
    /// `Omega(|x|) <= k`, `x != 0`.
    OmegaAtMost {
        k: u32,
    },
    /// A divisor chain given by a prefix and continued geometrically with
    /// the prefix's last ratio.
    #[serde(rename = "chain")]
    DivisibilityChain {
        prefix: Vec<i64>,
    },
    /// `{h! + h : h in N}`.
    FactorialShift,
}

/// A validated set description over a fixed ambient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    #[serde(default)]
    pub ambient: Ambient,
    pub node: Node,
}

impl SetSpec {
    pub fn new(ambient: Ambient, node: Node) -> Result<Self, SetSpecError> {
        validate(&node, ambient)?;
        Ok(SetSpec { ambient, node })
    }

    /// Parses and validates the JSON form. A missing `ambient` defaults to `N`.
    pub fn from_json(text: &str) -> Result<Self, SetSpecError> {
        Self::from_json_with_default(text, Ambient::NonNegative)
    }

    /// Like [`SetSpec::from_json`], with a caller-chosen default ambient.
    pub fn from_json_with_default(text: &str, default: Ambient) -> Result<Self, SetSpecError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SetSpecError::Parse(e.to_string()))?;
        if let Some(obj) = value.as_object_mut() {
            obj.entry("ambient").or_insert_with(|| serde_json::to_value(default).expect("ambient serializes"));
        }
        let spec: SetSpec = serde_json::from_value(value).map_err(|e| SetSpecError::Parse(e.to_string()))?;
        Self::new(spec.ambient, spec.node)
    }

    /// Canonical serialization, used as the certificate digest.
    pub fn digest(&self) -> String {
        serde_json::to_string(self).expect("set specs serialize")
    }

    pub fn with_ambient(&self, ambient: Ambient) -> Result<Self, SetSpecError> {
        Self::new(ambient, self.node.clone())
    }

    pub fn member(&self, x: i64) -> Result<bool, SetSpecError> {
        if !self.ambient.contains(x) {
            return Ok(false);
        }
        enumerate::member(&self.node, self.ambient, x)
    }

    /// All members with `|x| <= bound`, ascending.
    pub fn enumerate(&self, bound: u64) -> Result<Vec<i64>, SetSpecError> {
        if bound > MAX_ENUMERATION_BOUND {
            return Err(SetSpecError::SearchTooLarge(format!("enumeration bound {bound}")));
        }
        let mut out = enumerate::enumerate(&self.node, self.ambient, bound)?;
        out.retain(|&x| self.ambient.contains(x) && x.unsigned_abs() <= bound);
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn hits(&self, m: u64) -> Result<HitSet, SetSpecError> {
        hits(self, m)
    }
}

pub const MAX_ENUMERATION_BOUND: u64 = 1 << 40;

// convenience constructors used across the crate and in tests
impl Node {
    pub fn ap(a: u64, h: u64) -> Node {
        Node::Ap { a, h }
    }
    pub fn union(of: Vec<Node>) -> Node {
        Node::UnionOf { of }
    }
    pub fn affine(a: i64, h: i64, inner: Node) -> Node {
        Node::AffineImage { a, h, inner: Box::new(inner) }
    }
    pub fn intersect_ap(inner: Node, k: u64, h: u64) -> Node {
        Node::IntersectAp { inner: Box::new(inner), k, h }
    }
    pub fn poly(coeffs: &[i64]) -> Node {
        Node::PolyImage { coeffs: coeffs.to_vec() }
    }
    pub fn quadform(a: i64, b: i64, c: i64) -> Node {
        Node::QuadFormValues { a, b, c }
    }
    pub fn finite(values: &[i64]) -> Node {
        Node::Finite { values: values.to_vec() }
    }
    pub fn digit_avoider(base: u32, pattern: &[u32]) -> Node {
        Node::DigitAvoider { base, pattern: pattern.to_vec() }
    }
    pub fn chain(prefix: &[i64]) -> Node {
        Node::DivisibilityChain { prefix: prefix.to_vec() }
    }

    pub fn over(self, ambient: Ambient) -> Result<SetSpec, SetSpecError> {
        SetSpec::new(ambient, self)
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, SetSpecError> {
    Err(SetSpecError::Invalid(msg.into()))
}

fn validate(node: &Node, ambient: Ambient) -> Result<(), SetSpecError> {
    let natural = ambient == Ambient::NonNegative;
    match node {
        Node::Finite { values } => {
            if natural && values.iter().any(|&v| v < 0) {
                return invalid("finite set over N has a negative element");
            }
        }
        Node::Ap { a, .. } => {
            if *a == 0 {
                return invalid("progression step must be >= 1");
            }
        }
        Node::UnionOf { of } => of.iter().try_for_each(|n| validate(n, ambient))?,
        Node::AffineImage { a, h, inner } => {
            if *a == 0 {
                return invalid("affine scale must be non-zero");
            }
            if natural && (*a < 0 || *h < 0) {
                return invalid("affine image over N needs a >= 1 and h >= 0");
            }
            validate(inner, ambient)?;
        }
        Node::IntersectAp { inner, k, .. } => {
            if *k == 0 {
                return invalid("intersected progression step must be >= 1");
            }
            validate(inner, ambient)?;
        }
        Node::PolyImage { coeffs } => {
            if natural && coeffs.iter().any(|&c| c < 0) {
                return invalid("polynomial image over N needs coefficients in N");
            }
        }
        Node::PolyPrimePreimage { coeffs } => {
            if Polynomial::new(coeffs).degree() < 1 {
                return invalid("prime preimage needs a non-constant polynomial");
            }
        }
        Node::QuadFormValues { a, b, c } => {
            if natural && (*a < 0 || *b < 0 || *c < 0) {
                return invalid("quadratic form over N needs coefficients in N");
            }
        }
        Node::DigitAvoider { base, pattern } => {
            if !(2..=1 << 16).contains(base) {
                return invalid("digit base must be in [2, 65536]");
            }
            if pattern.is_empty() {
                return invalid("digit pattern must be non-empty");
            }
            if pattern.iter().any(|d| d >= base) {
                return invalid("pattern digit out of range for the base");
            }
        }
        Node::DivisibilityChain { prefix } => {
            chain_terms(prefix)?;
            if natural && prefix.iter().any(|&v| v < 0) {
                return invalid("chain over N has a negative element");
            }
        }
        Node::PerfectPowers | Node::OmegaExact { .. } | Node::OmegaAtMost { .. } | Node::FactorialShift => {}
    }
    Ok(())
}

/// Deduplicated chain prefix and its continuation ratio (`None` when the
/// chain does not continue past the prefix).
pub(crate) fn chain_terms(prefix: &[i64]) -> Result<(Vec<i64>, Option<i64>), SetSpecError> {
    let mut terms: Vec<i64> = prefix.to_vec();
    terms.dedup();
    if terms.is_empty() {
        return invalid("chain prefix must be non-empty");
    }
    if terms[0] == 0 {
        return invalid("chain must start with a non-zero element");
    }
    for w in terms.windows(2) {
        if w[0] == 0 || w[1] % w[0] != 0 {
            return invalid(format!("chain breaks divisibility: {} does not divide {}", w[0], w[1]));
        }
    }
    let ratio = match terms.as_slice() {
        [.., prev, last] if *last != 0 => Some(last / prev),
        _ => None,
    };
    Ok((terms, ratio.filter(|r| r.abs() >= 2 || *r == -1)))
}
