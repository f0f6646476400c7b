use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chain_terms, digits, normal_form, powers, Ambient, Node, Polynomial, SetSpec, SetSpecError};
use crate::numtheory::{big_omega_table, checked_lcm, crt_pair, factorize, is_prime_u128, rem_euclid};

/// Largest modulus accepted by the hit oracle (the hit set is a bitmap).
pub const MAX_HIT_MODULUS: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    /// Found by scanning members with `|x| <= element_bound`.
    SearchBounded {
        element_bound: u64,
    },
}

impl Exactness {
    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }

    pub fn and(self, other: Exactness) -> Exactness {
        match (self, other) {
            (Exactness::Exact, e) | (e, Exactness::Exact) => e,
            (Exactness::SearchBounded { element_bound: a }, Exactness::SearchBounded { element_bound: b }) => {
                Exactness::SearchBounded { element_bound: a.min(b) }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HitOptions {
    /// Element bound for nodes whose hits are found by scanning members.
    pub element_bound: u64,
}

impl Default for HitOptions {
    fn default() -> Self {
        HitOptions { element_bound: 1_000_000 }
    }
}

/// The residues mod `modulus` met by a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitSet {
    modulus: u64,
    residues: BitVec,
    exactness: Exactness,
}

impl HitSet {
    pub fn empty(modulus: u64) -> Self {
        HitSet { modulus, residues: bitvec![0; modulus as usize], exactness: Exactness::Exact }
    }

    pub fn full(modulus: u64) -> Self {
        HitSet { modulus, residues: bitvec![1; modulus as usize], exactness: Exactness::Exact }
    }

    pub fn from_residues(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Self {
        let mut set = Self::empty(modulus);
        for r in residues {
            set.insert(r % modulus);
        }
        set
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn count(&self) -> u64 {
        self.residues.count_ones() as u64
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn contains(&self, r: u64) -> bool {
        self.residues[(r % self.modulus) as usize]
    }

    pub fn insert(&mut self, r: u64) {
        self.residues.set(r as usize, true);
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.residues.iter_ones().map(|i| i as u64)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &HitSet) {
        assert_eq!(self.modulus, other.modulus);
        self.residues |= &other.residues;
        self.exactness = self.exactness.and(other.exactness);
    }

    pub fn with_exactness(mut self, exactness: Exactness) -> Self {
        self.exactness = exactness;
        self
    }

    pub fn is_full(&self) -> bool {
        self.residues.all()
    }

    /// Residues `r mod m'` met by this set, for `m'` dividing the modulus.
    pub fn project(&self, m: u64) -> HitSet {
        assert_eq!(self.modulus % m, 0);
        let mut out = HitSet::from_residues(m, self.iter());
        out.exactness = self.exactness;
        out
    }
}

pub fn hits(spec: &SetSpec, m: u64) -> Result<HitSet, SetSpecError> {
    hits_with(spec, m, HitOptions::default())
}

pub fn hits_with(spec: &SetSpec, m: u64, opts: HitOptions) -> Result<HitSet, SetSpecError> {
    if m == 0 {
        return Err(SetSpecError::Invalid("modulus must be >= 1".into()));
    }
    if m > MAX_HIT_MODULUS {
        return Err(SetSpecError::ModulusTooLarge(m as u128));
    }
    node_hits(&spec.node, spec.ambient, m, opts)
}

fn node_hits(node: &Node, ambient: Ambient, m: u64, opts: HitOptions) -> Result<HitSet, SetSpecError> {
    let z = ambient == Ambient::AllIntegers;
    Ok(match node {
        Node::Finite { values } => HitSet::from_residues(m, values.iter().map(|&v| rem_euclid(v as i128, m))),
        Node::Ap { a, h } => normal_form::progression_hits(*a, *h, m),
        Node::UnionOf { of } => {
            let mut acc = HitSet::empty(m);
            for n in of {
                acc.union_with(&node_hits(n, ambient, m, opts)?);
            }
            acc
        }
        Node::AffineImage { a, h, inner } => {
            let inner = node_hits(inner, ambient, m, opts)?;
            let (a, h) = (rem_euclid(*a as i128, m) as u128, rem_euclid(*h as i128, m) as u128);
            HitSet::from_residues(m, inner.iter().map(|r| ((a * r as u128 + h) % m as u128) as u64))
                .with_exactness(inner.exactness())
        }
        Node::IntersectAp { inner, k, h } => {
            let l = checked_lcm(m, *k)
                .filter(|&l| l <= MAX_HIT_MODULUS)
                .ok_or(SetSpecError::ModulusTooLarge(m as u128 * *k as u128))?;
            let lifted = node_hits(inner, ambient, l, opts)?;
            let h = h % k;
            HitSet::from_residues(m, lifted.iter().filter(|r| r % k == h)).with_exactness(lifted.exactness())
        }
        Node::PolyImage { coeffs } => {
            let f = Polynomial::new(coeffs);
            HitSet::from_residues(m, (0..m).map(|x| f.eval_mod(x, m)))
        }
        Node::PolyPrimePreimage { coeffs } => {
            let f = Polynomial::new(coeffs);
            let b = opts.element_bound as i64;
            let lo = if z { -b } else { 0 };
            let mut set = HitSet::from_residues(
                m,
                (lo..=b)
                    .filter(|&x| f.eval(x).is_some_and(|v| is_prime_u128(v.unsigned_abs())))
                    .map(|x| rem_euclid(x as i128, m)),
            );
            set.exactness = Exactness::SearchBounded { element_bound: opts.element_bound };
            set
        }
        Node::QuadFormValues { a, b, c } => form_residues(*a, *b, *c, m, ambient)?,
        Node::PerfectPowers => powers::perfect_power_residues(m, ambient),
        Node::DigitAvoider { base, pattern } => digits::avoider_residues(*base, pattern, m, ambient),
        Node::OmegaExact { k } => omega_hits(m, z, opts, |w| w == *k),
        Node::OmegaAtMost { k } => omega_hits(m, z, opts, |w| w <= *k),
        Node::DivisibilityChain { prefix } => {
            let (terms, ratio) = chain_terms(prefix)?;
            let mut set = HitSet::from_residues(m, terms.iter().map(|&v| rem_euclid(v as i128, m)));
            if let Some(rho) = ratio {
                let rho = rem_euclid(rho as i128, m) as u128;
                let mut v = rem_euclid(*terms.last().expect("non-empty") as i128, m);
                let mut seen = bitvec![0; m as usize];
                loop {
                    v = ((v as u128 * rho) % m as u128) as u64;
                    if seen[v as usize] {
                        break;
                    }
                    seen.set(v as usize, true);
                    set.insert(v);
                }
            }
            set
        }
        Node::FactorialShift => HitSet::full(m),
    })
}

fn omega_hits(m: u64, z: bool, opts: HitOptions, keep: impl Fn(u32) -> bool) -> HitSet {
    let table = big_omega_table(opts.element_bound);
    let mut set = HitSet::empty(m);
    for (x, &w) in table.iter().enumerate().skip(1) {
        if keep(w as u32) {
            set.insert(x as u64 % m);
            if z {
                set.insert(rem_euclid(-(x as i128), m));
            }
        }
    }
    set.with_exactness(Exactness::SearchBounded { element_bound: opts.element_bound })
}

/// Residues mod `m` taken by `a x^2 + b xy + c y^2` with `x, y` ranging over
/// the ambient. The count is multiplicative across coprime prime powers, so
/// each prime-power component is computed directly and recombined by CRT.
pub fn form_residues(a: i64, b: i64, c: i64, m: u64, ambient: Ambient) -> Result<HitSet, SetSpecError> {
    if m > MAX_HIT_MODULUS {
        return Err(SetSpecError::ModulusTooLarge(m as u128));
    }
    // Residues of N and Z agree at every modulus, and so do form values.
    let _ = ambient;
    let mut acc: (u64, Vec<u64>) = (1, vec![0]);
    for (p, e) in factorize(m) {
        let q = p.pow(e);
        let component = prime_power_form_residues(a, b, c, p, e);
        if acc.0 == 1 {
            acc = (q, component);
            continue;
        }
        let mut joined = Vec::with_capacity(acc.1.len() * component.len());
        for &r1 in &acc.1 {
            for &r2 in &component {
                joined.push(crt_pair(r1, acc.0, r2, q).expect("coprime components").0);
            }
        }
        acc = (acc.0 * q, joined);
    }
    Ok(HitSet::from_residues(m, acc.1))
}

fn prime_power_form_residues(a: i64, b: i64, c: i64, p: u64, e: u32) -> Vec<u64> {
    let q = p.pow(e);
    let (ar, br, cr) = (rem_euclid(a as i128, q), rem_euclid(b as i128, q), rem_euclid(c as i128, q));
    if e == 1 {
        let mut seen = bitvec![0; q as usize];
        let qq = q as u128;
        for x in 0..q {
            let ax2 = (ar as u128 * x as u128 % qq * x as u128 % qq) as u64;
            let bx = (br as u128 * x as u128 % qq) as u64;
            // v(y) = a x^2 + b x y + c y^2, with v(y+1) - v(y) = b x + c (2y + 1)
            let mut v = ax2;
            let mut step = (bx + cr) % q;
            let c2 = (2 * cr as u128 % qq) as u64;
            for _ in 0..q {
                seen.set(v as usize, true);
                v = add_mod(v, step, q);
                step = add_mod(step, c2, q);
            }
        }
        return seen.iter_ones().map(|i| i as u64).collect();
    }
    // Lift from pairs mod q' = p^(e-1): Q(x + q's, y + q't) = Q(x, y) +
    // q' (g1 s + g2 t) mod q, with (g1, g2) the gradient at (x, y). A
    // gradient that is non-zero mod p sweeps the whole class Q(x, y) mod q'.
    let qp = q / p;
    let qq = q as u128;
    let md = |v: i64, m: u64| rem_euclid(v as i128, m);
    let mut single = bitvec![0; q as usize];
    let mut full = bitvec![0; qp as usize];
    for x in 0..qp {
        // step through y, updating Q and the gradient mod p by differences
        let mut v = (ar as u128 * x as u128 % qq * x as u128 % qq) as u64;
        let mut step = ((br as u128 * x as u128 + cr as u128) % qq) as u64;
        let c2 = (2 * cr as u128 % qq) as u64;
        let mut g1 = (md(2 * a, p) as u128 * x as u128 % p as u128) as u64;
        let mut g2 = (md(b, p) as u128 * x as u128 % p as u128) as u64;
        let (dg1, dg2) = (md(b, p), md(2 * c, p));
        for _ in 0..qp {
            if g1 != 0 || g2 != 0 {
                full.set((v % qp) as usize, true);
            } else {
                single.set(v as usize, true);
            }
            v = add_mod(v, step, q);
            step = add_mod(step, c2, q);
            g1 = add_mod(g1, dg1, p);
            g2 = add_mod(g2, dg2, p);
        }
    }
    (0..q).filter(|&r| full[(r % qp) as usize] || single[r as usize]).collect()
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (if s >= m as u128 { s - m as u128 } else { s }) as u64
}
