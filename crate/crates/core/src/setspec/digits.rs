use bitvec::prelude::*;

use super::hits::HitSet;
use super::Ambient;
use crate::numtheory::rem_euclid;

/// Pattern-matching automaton over digit strings. State `s` means the last
/// `s` digits read match the first `s` pattern digits; state `len` is dead.
pub(crate) struct Automaton {
    base: u32,
    len: usize,
    delta: Vec<u32>,
}

impl Automaton {
    pub(crate) fn new(base: u32, pattern: &[u32]) -> Self {
        let len = pattern.len();
        let mut fail = vec![0usize; len + 1];
        for i in 1..len {
            let mut k = fail[i];
            while k > 0 && pattern[i] != pattern[k] {
                k = fail[k];
            }
            fail[i + 1] = if pattern[i] == pattern[k] { k + 1 } else { 0 };
        }
        let b = base as usize;
        let mut delta = vec![0u32; len * b];
        for s in 0..len {
            for d in 0..base {
                let next = if pattern[s] == d {
                    s + 1
                } else if s == 0 {
                    0
                } else {
                    delta[fail[s] * b + d as usize] as usize
                };
                delta[s * b + d as usize] = next as u32;
            }
        }
        Automaton { base, len, delta }
    }

    pub(crate) fn step(&self, state: usize, digit: u32) -> usize {
        self.delta[state * self.base as usize + digit as usize] as usize
    }

    pub(crate) fn dead(&self) -> usize {
        self.len
    }
}

/// Base-`base` digits of `n`, most significant first (`0` is `[0]`).
pub(crate) fn digits_of(mut n: u64, base: u32) -> Vec<u32> {
    let mut out = Vec::new();
    loop {
        out.push((n % base as u64) as u32);
        n /= base as u64;
        if n == 0 {
            break;
        }
    }
    out.reverse();
    out
}

pub(crate) fn avoids(n: u64, base: u32, pattern: &[u32]) -> bool {
    let digits = digits_of(n, base);
    !digits.windows(pattern.len()).any(|w| w == pattern)
}

/// Exact residues of the pattern avoiders. A pair (automaton state, value
/// mod m) is reachable iff some avoider with a leading non-zero digit
/// reaches it, so the residues are those of reachable pairs (plus 0 itself
/// when its one-digit string avoids the pattern).
pub(crate) fn avoider_residues(base: u32, pattern: &[u32], m: u64, ambient: Ambient) -> HitSet {
    let auto = Automaton::new(base, pattern);
    let live = auto.dead();
    let mut seen = bitvec![0; live * m as usize];
    let mut queue: Vec<(usize, u64)> = Vec::new();
    let visit = |s: usize, v: u64, seen: &mut BitVec, queue: &mut Vec<(usize, u64)>| {
        if s == live {
            return;
        }
        let idx = s * m as usize + v as usize;
        if !seen[idx] {
            seen.set(idx, true);
            queue.push((s, v));
        }
    };
    for d in 1..base {
        visit(auto.step(0, d), d as u64 % m, &mut seen, &mut queue);
    }
    let bm = base as u128 % m as u128;
    while let Some((s, v)) = queue.pop() {
        let shifted = (v as u128 * bm % m as u128) as u64;
        for d in 0..base {
            let nv = ((shifted as u128 + d as u128) % m as u128) as u64;
            visit(auto.step(s, d), nv, &mut seen, &mut queue);
        }
    }
    let mut set = HitSet::empty(m);
    for s in 0..live {
        for v in 0..m {
            if seen[s * m as usize + v as usize] {
                set.insert(v);
            }
        }
    }
    if avoids(0, base, pattern) {
        set.insert(0);
    }
    if ambient == Ambient::AllIntegers {
        for v in set.to_vec() {
            set.insert(rem_euclid(-(v as i128), m));
        }
    }
    set
}
