//! Acceptance criteria, one line per criterion. Each check runs under its
//! own time limit; the target fails if any criterion fails.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rayon::prelude::*;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use densitylab::certify::{perfect_powers_certificate, verify_certificate};
use densitylab::density::{ap_union_density, buck_upper, residue_count};
use densitylab::estimators::{all_estimates, banach_upper, Windows};
use densitylab::numtheory::{
    is_perfect_square, is_prime, legendre_by_euler, nonresidue_cover, rem_euclid, sieve_primes,
};
use densitylab::quadform::{classify_form, closing_demos, form_smallness_certificate, FormCase};
use densitylab::setspec::{ap_union_normalize, hits, Ambient, HitSet, Node, SetSpec};

/// Digests of the reduced products, from an independent exact script.
const PERFECT_POWERS_1E4: (f64, &str) =
    (0.11833410971558214, "4d226e8d5655889859d61ad653231e9e5a148c68e8e1bfdcb03529ec214c1177");
const TWO_SQUARES_1E4: (f64, &str) =
    (0.1741929328246805, "8a7ac10e19c0aec47fdb6697e6552c2707bce2abfce93d593db5106706e65432");

const DEEP_WINDOW: u64 = 10_000_000_000;

type Outcome = Result<String, String>;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn over(ambient: Ambient, node: Node) -> SetSpec {
    SetSpec::new(ambient, node).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sha256(r: &BigRational) -> String {
    hex::encode(Sha256::digest(r.to_string().as_bytes()))
}

fn ap_exactness() -> Outcome {
    let mut checked = 0;
    for ambient in [Ambient::NonNegative, Ambient::AllIntegers] {
        for a in 1..=8u64 {
            for h in 0..a {
                let b = buck_upper(&over(ambient, Node::ap(a, h)), 8).map_err(|e| e.to_string())?;
                ensure(b.upper == q(1, a as i64), || format!("AP({a},{h}) over {ambient}: {}", b.upper))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} progressions equal 1/a"))
}

fn factorial_shift() -> Outcome {
    let spec = over(Ambient::NonNegative, Node::FactorialShift);
    for k in 1..=840u64 {
        let (count, _) = residue_count(&spec, k).map_err(|e| e.to_string())?;
        ensure(count == k, || format!("r_{k} = {count}"))?;
    }
    let buck = buck_upper(&spec, 8).map_err(|e| e.to_string())?;
    ensure(buck.upper == q(1, 1), || format!("buck_upper = {}", buck.upper))?;
    let banach = banach_upper(&spec, 100, 1_000_000).map_err(|e| e.to_string())?;
    ensure(banach.value <= 0.05, || format!("banach {}", banach.value))?;
    Ok(format!("r_k = k for k <= 840, buck 1, banach {:.4}", banach.value))
}

fn perfect_powers() -> Outcome {
    let cert = perfect_powers_certificate(Ambient::NonNegative, 10_000, &q(1, 5)).map_err(|e| e.to_string())?;
    let formula = sieve_primes(10_000)
        .into_iter()
        .fold(q(1, 1), |acc, p| acc * BigRational::new(BigInt::from(p * p - p + 1), BigInt::from(p * p)));
    ensure(cert.product_bound == formula, || "product differs from prod (1 - (p-1)/p^2)".into())?;
    ensure(sha256(&cert.product_bound) == PERFECT_POWERS_1E4.1, || "product differs from the pinned value".into())?;
    ensure((cert.product_f64() - PERFECT_POWERS_1E4.0).abs() < 1e-12, || format!("{}", cert.product_f64()))?;
    ensure(cert.product_bound < q(1, 5), || "bound not below 0.2".into())?;
    let report =
        verify_certificate(&cert, &over(Ambient::NonNegative, Node::PerfectPowers)).map_err(|e| e.to_string())?;
    ensure(report.valid, || format!("verification: {:?}", report.first_failure))?;
    Ok(format!("{} moduli, product {:.6} (pinned), verified", cert.records.len(), cert.product_f64()))
}

fn two_squares() -> Outcome {
    let cert =
        form_smallness_certificate(1, 0, 1, Ambient::NonNegative, 10_000, &q(3, 10)).map_err(|e| e.to_string())?;
    let report =
        verify_certificate(&cert, &over(Ambient::NonNegative, Node::quadform(1, 0, 1))).map_err(|e| e.to_string())?;
    ensure(report.valid, || format!("verification: {:?}", report.first_failure))?;
    ensure(cert.product_bound < q(3, 10), || "bound not below 0.3".into())?;
    ensure(sha256(&cert.product_bound) == TWO_SQUARES_1E4.1, || "product differs from the pinned value".into())?;
    ensure((cert.product_f64() - TWO_SQUARES_1E4.0).abs() < 1e-12, || format!("{}", cert.product_f64()))?;
    Ok(format!("{} moduli, product {:.6} (pinned), verified", cert.records.len(), cert.product_f64()))
}

fn nonresidue_covers() -> Outcome {
    let ds: Vec<i64> = (-200..=200).filter(|&d| !is_perfect_square(d)).collect();
    let failures: Vec<String> = ds
        .par_iter()
        .filter_map(|&d| {
            let cover = match nonresidue_cover(d, 100) {
                Ok(c) => c,
                Err(e) => return Some(format!("d={d}: {e}")),
            };
            // the first 100 class primes not dividing d, enumerated afresh
            let mut found = Vec::new();
            let mut p = cover.residue;
            while found.len() < 100 {
                if is_prime(p) && d.rem_euclid(p as i64) != 0 {
                    if legendre_by_euler(d, p) != -1 {
                        return Some(format!("d={d}: residue mod {p}"));
                    }
                    found.push(p);
                }
                p += cover.modulus;
            }
            (cover.verified_primes != found).then(|| format!("d={d}: reported primes differ"))
        })
        .collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} discriminants, 100 class primes each", ds.len()))
}

#[derive(Deserialize)]
struct CorpusEntry {
    a: i64,
    b: i64,
    c: i64,
    ambient: String,
    expected_case: FormCase,
}

fn classifier_corpus() -> Outcome {
    let corpus: Vec<CorpusEntry> =
        serde_json::from_str(include_str!("fixtures/form_corpus.json")).map_err(|e| e.to_string())?;
    let mut cases = std::collections::BTreeSet::new();
    for e in &corpus {
        let ambient = if e.ambient == "N" { Ambient::NonNegative } else { Ambient::AllIntegers };
        let f = classify_form(e.a, e.b, e.c, ambient).map_err(|err| err.to_string())?;
        ensure(f.case == e.expected_case, || format!("({}, {}, {}) over {}: {:?}", e.a, e.b, e.c, e.ambient, f.case))?;
        cases.insert(format!("{:?}", f.case));
    }
    ensure(corpus.len() == 50 && cases.len() == 5, || format!("{} forms, {} cases", corpus.len(), cases.len()))?;
    Ok(format!("{} forms over {} cases match", corpus.len(), cases.len()))
}

fn oracle_equivalence() -> Outcome {
    let families = [
        Node::finite(&[0, 5, 17, 1000, 99_999]),
        Node::ap(6, 5),
        Node::union(vec![Node::ap(10, 3), Node::ap(15, 1)]),
        Node::affine(4, 3, Node::poly(&[0, 0, 1])),
        Node::intersect_ap(Node::quadform(1, 0, 1), 3, 2),
        Node::poly(&[0, 0, 1]),
        Node::poly(&[1, 0, 1]),
        Node::poly(&[0, 1, 0, 1]),
        Node::quadform(1, 0, 1),
        Node::quadform(1, 1, 1),
        Node::quadform(2, 1, 3),
        Node::quadform(1, 0, -2),
        Node::PerfectPowers,
        Node::digit_avoider(10, &[9]),
        Node::digit_avoider(10, &[0]),
        Node::digit_avoider(3, &[1, 2]),
        Node::chain(&[1, 2, 6, 12]),
        Node::FactorialShift,
    ];
    // classes missing from the window are re-sought among members below
    // DEEP_WINDOW (only sparse families get here, and a refused deep
    // enumeration leaves the case flagged)
    let (mut compared, mut flagged, mut deep_resolved, mut families_used) = (0, 0, 0, 0);
    let mut unresolved = std::collections::BTreeMap::<String, usize>::new();
    for ambient in [Ambient::NonNegative, Ambient::AllIntegers] {
        for node in &families {
            let Ok(spec) = SetSpec::new(ambient, node.clone()) else { continue };
            let members = spec.enumerate(100_000).map_err(|e| e.to_string())?;
            let mut deep: Option<Vec<i64>> = None;
            let mut exact = true;
            for m in 1..=50u64 {
                let oracle = hits(&spec, m).map_err(|e| e.to_string())?;
                if !oracle.exactness().is_exact() {
                    exact = false;
                    break;
                }
                let classes = |xs: &[i64]| HitSet::from_residues(m, xs.iter().map(|&x| rem_euclid(x as i128, m)));
                let seen = classes(&members);
                ensure(seen.iter().all(|r| oracle.contains(r)), || {
                    format!("{node:?} over {ambient}, m={m}: class missing")
                })?;
                compared += 1;
                if seen.count() == oracle.count() {
                    continue;
                }
                flagged += 1;
                let deep = deep.get_or_insert_with(|| spec.enumerate(DEEP_WINDOW).unwrap_or_default());
                let far = classes(deep);
                ensure(far.iter().all(|r| oracle.contains(r)), || {
                    format!("{node:?} over {ambient}, m={m}: class missing")
                })?;
                if far.count() == oracle.count() {
                    deep_resolved += 1;
                } else {
                    *unresolved.entry(format!("{node:?}")).or_default() += 1;
                }
            }
            families_used += exact as usize;
        }
    }
    let unresolved_total: usize = unresolved.values().sum();
    let names: Vec<String> = unresolved.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    Ok(format!(
        "{families_used} exact families, {compared} moduli, 0 violations; {flagged} subset cases flagged \
         ({deep_resolved} equal below 10^10, {unresolved_total} witnessed only beyond: {})",
        names.join(", ")
    ))
}

fn ap_union() -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((1u64..=24, 0u64..24).prop_map(|(a, h)| (a, h % a)), 1..4)
}

/// Share of classes mod the lcm of the steps that meet some part.
fn direct_density(parts: &[(u64, u64)]) -> BigRational {
    let l = parts.iter().fold(1u64, |acc, &(a, _)| acc.lcm(&a));
    let covered = (0..l).filter(|&r| parts.iter().any(|&(a, h)| r % a == h)).count();
    q(covered as i64, l as i64)
}

fn union_node(parts: &[(u64, u64)]) -> Node {
    Node::union(parts.iter().map(|&(a, h)| Node::ap(a, h)).collect())
}

fn density(node: Node) -> Result<BigRational, TestCaseError> {
    let nf = ap_union_normalize(&over(Ambient::NonNegative, node)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    Ok(ap_union_density(&nf))
}

fn axiom_suite() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    let strategy = (ap_union(), ap_union(), 1i64..=24, 0i64..48);
    runner
        .run(&strategy, |(xs, ys, k, h)| {
            let (x, y) = (union_node(&xs), union_node(&ys));
            let dx = density(x.clone())?;
            prop_assert_eq!(&dx, &direct_density(&xs), "normal form");
            prop_assert_eq!(density(Node::ap(1, 0))?, q(1, 1));
            let dy = density(y.clone())?;
            let dxy = density(Node::union(vec![x.clone(), y]))?;
            prop_assert!(dxy >= dx.clone().max(dy.clone()), "monotonicity");
            prop_assert!(dxy <= &dx + &dy, "subadditivity");
            prop_assert_eq!(density(Node::affine(k, 0, x.clone()))?, &dx / q(k, 1), "dilation");
            prop_assert_eq!(density(Node::affine(1, h, x))?, dx, "shift");
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("F1-F5 exact on 200 random AP-unions".into())
}

fn closing() -> Outcome {
    let r = closing_demos().map_err(|e| e.to_string())?;
    ensure(r.products_checked > 0 && r.even_products.is_empty(), || format!("even products {:?}", r.even_products))?;
    ensure(r.sum_exceptions.is_empty(), || format!("uncovered sums {:?}", r.sum_exceptions))?;
    Ok(format!("{} products below {} all odd; sums cover [0, {}]", r.products_checked, r.product_window, r.sum_window))
}

fn estimator_sanity() -> Outcome {
    let cases: Vec<(u64, u64)> = (1..=12u64).flat_map(|k| (0..k).map(move |h| (k, h))).collect();
    let worst = cases
        .par_iter()
        .map(|&(k, h)| {
            let est = all_estimates(&over(Ambient::NonNegative, Node::ap(k, h)), &Windows::default())
                .map_err(|e| e.to_string())?;
            Ok(est.iter().map(|e| (e.value - 1.0 / k as f64).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst <= 0.02, || format!("largest deviation {worst:.4}"))?;
    Ok(format!("{} progressions, 5 estimators, largest deviation {worst:.4}", cases.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Outcome,
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "AP exactness", limit: secs(1), check: ap_exactness },
    Criterion { id: 2, name: "factorial shift: Buck-full, Banach-sparse", limit: secs(10), check: factorial_shift },
    Criterion { id: 3, name: "perfect powers over p^2, p <= 10^4", limit: secs(30), check: perfect_powers },
    Criterion { id: 4, name: "two squares certificate", limit: secs(60), check: two_squares },
    Criterion { id: 5, name: "non-residue covers, |d| <= 200", limit: secs(30), check: nonresidue_covers },
    Criterion { id: 6, name: "form classifier corpus", limit: None, check: classifier_corpus },
    Criterion { id: 7, name: "oracle equivalence, m <= 50", limit: None, check: oracle_equivalence },
    Criterion { id: 8, name: "axioms on AP-unions", limit: None, check: axiom_suite },
    Criterion { id: 9, name: "product and sum demos", limit: secs(20), check: closing },
    Criterion { id: 10, name: "estimator sanity", limit: secs(30), check: estimator_sanity },
];

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    let _ = writeln!(std::io::stderr());
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        // written to the raw handle so the lines survive libtest's capture
        let _ = writeln!(std::io::stderr(), "[{tag}] {:>2} {} ({elapsed:.2?}): {detail}", c.id, c.name);
        if outcome.is_err() {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
