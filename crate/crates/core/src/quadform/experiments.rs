//! The over-N mixed-density experiment and the product/sum demos.

use bitvec::prelude::*;
use num_rational::BigRational;
use serde::Serialize;

use super::{check_form, form_smallness_certificate, q_of, FormError};
use crate::certify::{divisibility_criterion_with, DivisibilityVerdict, Justification, DEFAULT_DIVERGENCE_THRESHOLD};
use crate::density::buck_upper;
use crate::numtheory::{factorize, gcd, sieve_primes};
use crate::setspec::{Ambient, Node, SetSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueCheck {
    pub k: u64,
    /// Exact `r_k(A)`.
    pub r_k: u64,
    /// Classes met by the sub-family `2a(b-q)(ku+1)^2 + 4aq((k-1)u+1)`.
    pub witness_classes: u64,
    pub floor_bound: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedCaseReport {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub q: i64,
    pub residue_checks: Vec<ResidueCheck>,
    /// `1/(4aq)`, implied for `A` by the residue counts.
    #[serde(serialize_with = "crate::serde_util::rational::serialize")]
    pub buck_lower_a: BigRational,
    /// `2/(b-q)` times the bound for `A`.
    #[serde(serialize_with = "crate::serde_util::rational::serialize")]
    pub buck_lower_x: BigRational,
    /// `(n, |B ∩ [1, n]| / n)` for `B = {xy : x <= y <= (2q+1)x}`.
    pub b_ratios: Vec<(u64, f64)>,
    /// `(n, |X ∩ [0, n]| / (n + 1))`.
    pub x_ratios: Vec<(u64, f64)>,
    pub declining: bool,
}

pub const MIXED_RESIDUE_GRID: [u64; 3] = [10, 100, 840];

fn b_count(q: i64, n: u64) -> u64 {
    let mut seen = bitvec![0; n as usize + 1];
    let spread = 2 * q as u64 + 1;
    for x in (1..).take_while(|x| x * x <= n) {
        for y in x..=(spread * x).min(n / x) {
            seen.set((x * y) as usize, true);
        }
    }
    seen.count_ones() as u64
}

/// Over N with `ac != 0` and `D = q^2 > 0`: `r_k(A)` against
/// `floor(k/(4aq))`, and the decline of `|B ∩ [1, n]|/n` on a decade grid
/// up to `window`.
pub fn mixed_case_experiment(a: i64, b: i64, c: i64, window: u64) -> Result<MixedCaseReport, FormError> {
    let d = check_form(a, b, c, Ambient::NonNegative).map_err(|e| FormError::WrongRegime(e.to_string()))?;
    let q = match q_of(d) {
        Some(q) if q >= 1 && a * c != 0 => q,
        _ => {
            return Err(FormError::WrongRegime(format!("need ac != 0 and a positive square discriminant, got D = {d}")))
        }
    };
    let (lead, step) = ((2 * a * (b - q)) as u64, (4 * a * q) as u64);
    let residue_checks = MIXED_RESIDUE_GRID
        .iter()
        .map(|&k| {
            let mut exact = bitvec![0; k as usize];
            for s in 0..k {
                for v in 0..k {
                    exact.set(((lead * s % k * s + step * v) % k) as usize, true);
                }
            }
            let witness_classes = k / gcd(step % k, k);
            let r_k = exact.count_ones() as u64;
            let floor_bound = k / step;
            ResidueCheck {
                k,
                r_k,
                witness_classes,
                floor_bound,
                holds: r_k >= witness_classes && witness_classes >= floor_bound,
            }
        })
        .collect();
    let grid: Vec<u64> = (4..).map(|e| 10u64.pow(e)).take_while(|&n| n <= window.max(10_000)).collect();
    let b_ratios: Vec<(u64, f64)> = grid.iter().map(|&n| (n, b_count(q, n) as f64 / n as f64)).collect();
    let spec = SetSpec::new(Ambient::NonNegative, Node::quadform(a, b, c))?;
    let x_ratios = grid
        .iter()
        .map(|&n| Ok((n, spec.enumerate(n)?.len() as f64 / (n + 1) as f64)))
        .collect::<Result<Vec<_>, FormError>>()?;
    let declining = b_ratios.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(MixedCaseReport {
        a,
        b,
        c,
        q,
        residue_checks,
        buck_lower_a: BigRational::new(1.into(), (4 * a * q).into()),
        buck_lower_x: BigRational::new(1.into(), (2 * a * q * (b - q)).into()),
        b_ratios,
        x_ratios,
        declining,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosingReport {
    pub product_window: u64,
    /// Products `xy <= window`, `x` in `A`, `y` in `B`, that are even.
    pub even_products: Vec<u64>,
    pub products_checked: u64,
    /// Moduli `k <= 30` at which the products miss a class of `2H + 1`.
    pub uncovered_moduli: Vec<u64>,
    #[serde(serialize_with = "crate::serde_util::rational::serialize")]
    pub odd_buck_upper: BigRational,
    pub sum_window: u64,
    /// Integers in `[0, sum_window]` that are not a sum of two elements of
    /// `{x^2 + y^2}`.
    pub sum_exceptions: Vec<u64>,
    /// Sieved members of `A` divisible by a prime `3 mod 4`, and of `B` by a
    /// prime `1 mod 4` (both should be empty).
    pub emptiness_violations: Vec<u64>,
    pub a_verdict: DivisibilityVerdict,
    pub b_verdict: DivisibilityVerdict,
    /// Certificate bound for the sums of two squares at a small budget.
    pub two_squares_bound: f64,
}

pub const PRODUCT_WINDOW: u64 = 100_000;
pub const SUM_WINDOW: u64 = 10_000;
pub const DIVISIBILITY_PRIME_BOUND: u64 = 1_000_000;

/// `A` (resp. `B`): positive integers whose prime divisors are all `1`
/// (resp. `3`) mod 4. Both are small, `AB` is the odd numbers; the sums of
/// two squares are small, and their pairwise sums cover N.
pub fn closing_demos() -> Result<ClosingReport, FormError> {
    let n = PRODUCT_WINDOW;
    let mut in_a = bitvec![0; n as usize + 1];
    let mut in_b = bitvec![0; n as usize + 1];
    for x in 1..=n {
        let f = factorize(x);
        in_a.set(x as usize, f.iter().all(|&(p, _)| p % 4 == 1));
        in_b.set(x as usize, f.iter().all(|&(p, _)| p % 4 == 3));
    }
    let a: Vec<u64> = in_a.iter_ones().map(|x| x as u64).collect();
    let b: Vec<u64> = in_b.iter_ones().map(|x| x as u64).collect();
    let mut products = bitvec![0; n as usize + 1];
    let mut checked = 0;
    for &x in &a {
        for &y in b.iter().take_while(|&&y| x * y <= n) {
            products.set((x * y) as usize, true);
            checked += 1;
        }
    }
    let even_products: Vec<u64> = products.iter_ones().map(|v| v as u64).filter(|v| v % 2 == 0).collect();
    let odd = SetSpec::new(Ambient::NonNegative, Node::ap(2, 1))?;
    let mut uncovered_moduli = Vec::new();
    for k in 1..=30u64 {
        let target = odd.hits(k)?;
        let mut got = bitvec![0; k as usize];
        products.iter_ones().for_each(|v| got.set(v % k as usize, true));
        if (0..k).any(|h| target.contains(h) != got[h as usize]) {
            uncovered_moduli.push(k);
        }
    }

    let m = SUM_WINDOW as usize;
    let mut sq = bitvec![0; m + 1];
    for x in (0..).take_while(|x| x * x <= m) {
        for y in (x..).take_while(|y| x * x + y * y <= m) {
            sq.set(x * x + y * y, true);
        }
    }
    let members: Vec<usize> = sq.iter_ones().collect();
    let mut sums = bitvec![0; m + 1];
    for (i, &u) in members.iter().enumerate() {
        for &v in members[i..].iter().take_while(|&&v| u + v <= m) {
            sums.set(u + v, true);
        }
    }

    let primes = sieve_primes(DIVISIBILITY_PRIME_BOUND);
    let three: Vec<u64> = primes.iter().copied().filter(|p| p % 4 == 3).collect();
    let one: Vec<u64> = primes.iter().copied().filter(|p| p % 4 == 1).collect();
    let mut emptiness_violations: Vec<u64> =
        a.iter().copied().filter(|&x| three.iter().take_while(|&&p| p <= x).any(|&p| x % p == 0)).collect();
    emptiness_violations
        .extend(b.iter().copied().filter(|&y| one.iter().take_while(|&&p| p <= y).any(|&p| y % p == 0)));
    let empty = |what: &'static str, residue: u64| {
        move |_: usize, p: u64| {
            Some(Justification::Empty {
                reason: format!("a member of {what} has no prime divisor {residue} mod 4, so none is divisible by {p}"),
            })
        }
    };
    let a_verdict = divisibility_criterion_with(&three, &[], DEFAULT_DIVERGENCE_THRESHOLD, empty("A", 3))?;
    let b_verdict = divisibility_criterion_with(&one, &[], DEFAULT_DIVERGENCE_THRESHOLD, empty("B", 1))?;
    let two_squares_bound =
        form_smallness_certificate(1, 0, 1, Ambient::NonNegative, 1000, &BigRational::from_integer(1.into()))?
            .product_f64();

    Ok(ClosingReport {
        product_window: n,
        even_products,
        products_checked: checked,
        uncovered_moduli,
        odd_buck_upper: buck_upper(&odd, 4)?.upper,
        sum_window: SUM_WINDOW,
        sum_exceptions: sums.iter_zeros().map(|v| v as u64).collect(),
        emptiness_violations,
        a_verdict,
        b_verdict,
        two_squares_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_regime_checks() {
        let report = mixed_case_experiment(1, 3, 2, 1_000_000).unwrap();
        assert_eq!(report.q, 1);
        assert!(report.residue_checks.iter().all(|c| c.holds));
        assert_eq!(report.residue_checks[0].floor_bound, 2);
        assert!(report.declining);
        let ratios = &report.b_ratios;
        assert!(ratios.last().unwrap().1 < ratios[0].1);
        assert!(matches!(mixed_case_experiment(1, 0, 1, 10_000), Err(FormError::WrongRegime(_))));
        assert!(matches!(mixed_case_experiment(0, 1, 0, 10_000), Err(FormError::WrongRegime(_))));
    }

    #[test]
    fn sub_family_lies_in_a() {
        // 2a(b-q)(ku+1)^2 + 4aq((k-1)u+1) is A at (u, (k-1)u+1)
        let (a, b, q) = (2i64, 7, 5);
        for k in [3i64, 10, 84] {
            for u in 0..20 {
                let v = (k - 1) * u + 1;
                let lhs = 2 * a * (b - q) * (k * u + 1).pow(2) + 4 * a * q * v;
                assert_eq!(lhs, 2 * a * (b - q) * (u + v).pow(2) + 4 * a * q * v);
            }
        }
    }

    #[test]
    fn closing_demo_claims() {
        let r = closing_demos().unwrap();
        assert!(r.even_products.is_empty() && r.uncovered_moduli.is_empty() && r.sum_exceptions.is_empty());
        assert!(r.emptiness_violations.is_empty());
        assert!(r.a_verdict.small && r.b_verdict.small);
        assert_eq!(r.odd_buck_upper, BigRational::new(1.into(), 2.into()));
        assert!(r.two_squares_bound < 1.0);
    }

    #[test]
    fn b_count_by_brute_force() {
        for q in 1..3 {
            let n = 2000u64;
            let mut set = std::collections::BTreeSet::new();
            for x in 1..=n {
                for y in x..=(2 * q as u64 + 1) * x {
                    if x * y <= n {
                        set.insert(x * y);
                    }
                }
            }
            assert_eq!(b_count(q, n), set.len() as u64);
        }
    }
}
