//! Named reproductions. Each returns a JSON report whose `holds` field
//! says whether the stated claim was confirmed at the chosen windows.

use std::sync::OnceLock;

use anyhow::{Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use densitylab::certify::{self, SmallnessCertificate};
use densitylab::density::{buck_upper, rational_to_f64, residue_count};
use densitylab::estimators::banach_upper;
use densitylab::numtheory::sieve_primes;
use densitylab::quadform::{closing_demos, form_smallness_certificate, mixed_case_experiment, ClosingReport};
use densitylab::setspec::{Ambient, Node, SetSpec, MAX_HIT_MODULUS};

pub struct Demo {
    pub name: &'static str,
    pub claim: &'static str,
    pub run: fn() -> Result<Value>,
}

pub const DEMOS: &[Demo] = &[
    Demo {
        name: "squares",
        claim: "the squares have upper Buck density below 1 and a verified certificate over p^2, p <= 100",
        run: squares,
    },
    Demo {
        name: "perfect-powers",
        claim: "perfect powers miss p - 1 classes mod p^2; the product over p <= 10^4 is below 0.12",
        run: perfect_powers,
    },
    Demo {
        name: "digit-avoider",
        claim: "integers avoiding the digit 9 meet (9/10)^n of the classes mod 10^n",
        run: digit_avoider,
    },
    Demo {
        name: "omega",
        claim: "the primes are small: primorial bounds decrease and the divisibility criterion holds with prime moduli",
        run: omega,
    },
    Demo {
        name: "chain",
        claim: "a chain with growing ratios (the factorials) meets 2n classes mod its 2n-th term",
        run: chain,
    },
    Demo {
        name: "factorial-shift",
        claim: "{h! + h} meets every class mod k, so its Buck density is 1, while its Banach density is near 0",
        run: factorial_shift,
    },
    Demo { name: "poly-image", claim: "the values of x^2 + 1 miss a class mod every odd prime", run: poly_image },
    Demo {
        name: "poly-prime-preimage",
        claim: "the x with |F(x)| prime avoid the roots of F mod p up to finitely many exceptions",
        run: poly_prime_preimage,
    },
    Demo {
        name: "two-squares",
        claim: "sums of two squares are small: a verified certificate below 0.3 at primes up to 10^4",
        run: two_squares,
    },
    Demo {
        name: "mixed-form",
        claim: "x^2 + 3xy + 2y^2 over N has positive Buck density yet its counting ratio declines",
        run: mixed_form,
    },
    Demo {
        name: "product-of-small",
        claim: "two small sets whose product set is the odd numbers, which are not small",
        run: product_of_small,
    },
    Demo {
        name: "sum-of-small",
        claim: "the sums of two squares are small while their pairwise sums are all of N",
        run: sum_of_small,
    },
];

pub fn find(name: &str) -> Option<&'static Demo> {
    DEMOS.iter().find(|d| d.name == name)
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn over_n(node: Node) -> Result<SetSpec> {
    Ok(SetSpec::new(Ambient::NonNegative, node)?)
}

/// Summary of a certificate together with its independent verification.
fn checked(cert: &SmallnessCertificate, spec: &SetSpec) -> Result<(Value, bool)> {
    let report = certify::verify_certificate(cert, spec)?;
    let summary = json!({
        "criterion": cert.criterion,
        "records": cert.records.len(),
        "largest_modulus": cert.records.last().map(|r| r.k),
        "product_bound": cert.product_bound.to_string(),
        "product_bound_f64": cert.product_f64(),
        "verified": report.valid,
        "first_failure": report.first_failure,
    });
    Ok((summary, report.valid))
}

fn squares() -> Result<Value> {
    let spec = over_n(Node::poly(&[0, 0, 1]))?;
    let buck = buck_upper(&spec, 8)?;
    let moduli: Vec<u64> = sieve_primes(100).into_iter().map(|p| p * p).collect();
    let cert = certify::smallness_certificate(&spec, &moduli, &q(1, 1))?;
    let (summary, ok) = checked(&cert, &spec)?;
    Ok(json!({
        "buck_upper": buck.upper.to_string(),
        "achieved_at": buck.achieved_at,
        "certificate": summary,
        "holds": ok && buck.upper < q(1, 1),
    }))
}

fn perfect_powers() -> Result<Value> {
    let cert = certify::perfect_powers_certificate(Ambient::NonNegative, 10_000, &q(3, 25))?;
    let (summary, ok) = checked(&cert, &over_n(Node::PerfectPowers)?)?;
    Ok(json!({ "certificate": summary, "holds": ok }))
}

fn digit_avoider() -> Result<Value> {
    let spec = over_n(Node::digit_avoider(10, &[9]))?;
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=4u32 {
        let bound = certify::digit_pattern_bound(10, &[9], n)?;
        let k = 10u64.pow(n);
        let (count, _) = residue_count(&spec, k)?;
        ok &= bound == q(9i64.pow(n), k as i64) && count == 9u64.pow(n);
        rows.push(json!({ "n": n, "modulus": k, "bound": bound.to_string(), "exact_r_k": count }));
    }
    let cert = certify::digit_certificate(&spec, 4, &q(1, 1))?;
    let (summary, verified) = checked(&cert, &spec)?;
    Ok(json!({ "bounds": rows, "certificate": summary, "holds": ok && verified }))
}

fn omega() -> Result<Value> {
    let spec = over_n(Node::OmegaExact { k: 1 })?;
    let bounds: Vec<BigRational> = (1..=12).map(|n| certify::omega_primorial_bound(1, n)).collect();
    let decreasing = bounds.windows(2).all(|w| w[1] < w[0]);
    let cert = certify::omega_certificate(&spec, 12, &q(1, 1))?;
    let (summary, verified) = checked(&cert, &spec)?;
    let moduli = sieve_primes(10_000);
    let verdict = certify::divisibility_criterion(&spec, &moduli, &[], certify::DEFAULT_DIVERGENCE_THRESHOLD)?;
    Ok(json!({
        "primorial_bounds": bounds.iter().enumerate().map(|(i, b)| json!({ "n": i + 1, "bound": b.to_string(), "f64": rational_to_f64(b) })).collect::<Vec<_>>(),
        "certificate": summary,
        "divisibility": { "moduli": moduli.len(), "partial_sum": verdict.partial_sum, "small": verdict.small },
        "holds": decreasing && verified && verdict.small,
    }))
}

fn chain() -> Result<Value> {
    let prefix: Vec<i64> = (1..=20i64)
        .scan(1i64, |f, n| {
            *f *= n;
            Some(*f)
        })
        .collect();
    let spec = over_n(Node::chain(&prefix))?;
    let entries = certify::chain_bound(&prefix)?;
    let mut ok = true;
    let mut rows = Vec::new();
    for &(k, count) in &entries {
        let exact = if k <= MAX_HIT_MODULUS { Some(residue_count(&spec, k)?.0) } else { None };
        ok &= exact.is_none_or(|e| e <= count);
        rows.push(json!({ "modulus": k, "bound": count, "exact_r_k": exact }));
    }
    let cert = certify::chain_certificate(&spec, &q(1, 1))?;
    let (summary, verified) = checked(&cert, &spec)?;
    Ok(json!({ "entries": rows, "certificate": summary, "holds": ok && verified }))
}

fn factorial_shift() -> Result<Value> {
    let spec = over_n(Node::FactorialShift)?;
    let full = (1..=840u64).map(|k| residue_count(&spec, k).map(|(c, _)| c == k)).collect::<Result<Vec<_>, _>>()?;
    let all_classes = full.iter().all(|&b| b);
    let buck = buck_upper(&spec, 8)?;
    let banach = banach_upper(&spec, 100, 1_000_000)?;
    Ok(json!({
        "every_class_hit_up_to": 840,
        "all_classes": all_classes,
        "buck_upper": buck.upper.to_string(),
        "banach_estimate": banach.value,
        "caveat": banach.caveat,
        "holds": all_classes && buck.upper == q(1, 1) && banach.value <= 0.05,
    }))
}

fn poly_image() -> Result<Value> {
    let spec = over_n(Node::poly(&[1, 0, 1]))?;
    let report = certify::poly_image_certificate(&[1, 0, 1], Ambient::NonNegative, 10_000, &q(1, 1))?;
    let (summary, verified) = checked(&report.certificate, &spec)?;
    let odd = sieve_primes(10_000).len() - 1;
    Ok(json!({
        "kept_primes": report.kept_primes.len(),
        "odd_primes": odd,
        "root_primes": report.root_primes.len(),
        "root_density": report.root_density,
        "certificate": summary,
        "holds": verified && report.kept_primes.len() == odd,
    }))
}

fn poly_prime_preimage() -> Result<Value> {
    let mut out = Vec::new();
    let mut ok = true;
    for coeffs in [vec![0i64, 1], vec![1, 0, 1]] {
        let spec = over_n(Node::PolyPrimePreimage { coeffs: coeffs.clone() })?;
        let cert = certify::poly_prime_preimage_certificate(&coeffs, Ambient::NonNegative, 1000, &q(1, 1))?;
        let (summary, verified) = checked(&cert, &spec)?;
        ok &= verified;
        out.push(json!({ "coeffs": coeffs, "certificate": summary }));
    }
    Ok(json!({ "polynomials": out, "holds": ok }))
}

fn two_squares() -> Result<Value> {
    let cert = form_smallness_certificate(1, 0, 1, Ambient::NonNegative, 10_000, &q(3, 10))?;
    let (summary, ok) = checked(&cert, &over_n(Node::quadform(1, 0, 1))?)?;
    Ok(json!({ "certificate": summary, "holds": ok }))
}

fn mixed_form() -> Result<Value> {
    let report = mixed_case_experiment(1, 3, 2, 1_000_000)?;
    let ok = report.declining && report.residue_checks.iter().all(|c| c.holds);
    let mut value = serde_json::to_value(&report)?;
    value["holds"] = json!(ok);
    Ok(value)
}

/// Both closing demos share one (comparatively slow) computation.
fn closing() -> Result<&'static ClosingReport> {
    static REPORT: OnceLock<ClosingReport> = OnceLock::new();
    if let Some(r) = REPORT.get() {
        return Ok(r);
    }
    let report = closing_demos().context("closing demos")?;
    Ok(REPORT.get_or_init(|| report))
}

fn product_of_small() -> Result<Value> {
    let r = closing()?;
    Ok(json!({
        "window": r.product_window,
        "products_checked": r.products_checked,
        "even_products": r.even_products,
        "uncovered_moduli": r.uncovered_moduli,
        "odd_buck_upper": r.odd_buck_upper.to_string(),
        "a_small": r.a_verdict.small,
        "b_small": r.b_verdict.small,
        "holds": r.even_products.is_empty() && r.uncovered_moduli.is_empty() && r.a_verdict.small && r.b_verdict.small,
    }))
}

fn sum_of_small() -> Result<Value> {
    let r = closing()?;
    Ok(json!({
        "window": r.sum_window,
        "exceptions": r.sum_exceptions,
        "emptiness_violations": r.emptiness_violations,
        "two_squares_bound": r.two_squares_bound,
        "holds": r.sum_exceptions.is_empty() && r.emptiness_violations.is_empty() && r.two_squares_bound < 1.0,
    }))
}
