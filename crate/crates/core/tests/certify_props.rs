use densitylab::certify::*;
use densitylab::numtheory::{big_omega_table, first_primes, sieve_primes};
use densitylab::setspec::{Ambient, Node, SetSpec};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

fn n(node: Node) -> SetSpec {
    SetSpec::new(Ambient::NonNegative, node).unwrap()
}

fn one() -> BigRational {
    BigRational::one()
}

/// Certificates whose moduli multiply to something the hit oracle can
/// handle exactly.
fn small_certificates() -> Vec<(SetSpec, SmallnessCertificate)> {
    let squares = n(Node::poly(&[0, 0, 1]));
    let cubes = n(Node::poly(&[1, 0, 0, 1]));
    let omega = n(Node::OmegaAtMost { k: 1 });
    let chain = n(Node::chain(&[3, 6, 12, 24, 48]));
    let digits = n(Node::digit_avoider(10, &[7]));
    let powers = n(Node::PerfectPowers);
    vec![
        (squares.clone(), smallness_certificate(&squares, &[9, 25, 49], &one()).unwrap()),
        (squares.clone(), smallness_certificate(&squares, &[16, 27, 11, 13], &one()).unwrap()),
        (cubes.clone(), smallness_certificate(&cubes, &[7, 9, 13, 19], &one()).unwrap()),
        (powers.clone(), perfect_powers_certificate(Ambient::NonNegative, 7, &one()).unwrap()),
        (omega.clone(), omega_certificate(&omega, 4, &one()).unwrap()),
        (chain.clone(), chain_certificate(&chain, &one()).unwrap()),
        (digits.clone(), digit_certificate(&digits, 2, &one()).unwrap()),
        (squares.clone(), poly_image_certificate(&[0, 0, 1], Ambient::NonNegative, 13, &one()).unwrap().certificate),
    ]
}

#[test]
fn verified_certificates_bound_the_buck_density() {
    for (spec, cert) in small_certificates() {
        assert!(verify_certificate(&cert, &spec).unwrap().valid, "{:?}", cert.criterion);
        assert_eq!(cert.count_kind, CountKind::R);
        let product: u64 = cert.moduli().iter().product();
        let r = spec.hits(product).unwrap();
        let ratio = BigRational::new(r.count().into(), product.into());
        assert!(ratio <= cert.product_bound, "{:?}: r/k = {ratio} > {}", spec.node, cert.product_bound);
    }
}

#[test]
fn non_coprime_moduli_fail_verification() {
    let spec = n(Node::poly(&[0, 0, 1]));
    let mut records = smallness_certificate(&spec, &[4], &one()).unwrap().records;
    records.extend(smallness_certificate(&spec, &[6], &one()).unwrap().records);
    let cert = SmallnessCertificate::assemble(&spec, Criterion::CoprimeProduct, records);
    let report = verify_certificate(&cert, &spec).unwrap();
    assert!(!report.valid);
    assert!(report.first_failure.unwrap().contains("not coprime"));
}

#[test]
fn omega_bound_dominates_sieved_residues() {
    let omega = big_omega_table(1_000_000);
    for count in 1..=5usize {
        let primes = first_primes(count);
        let pn: u64 = primes.iter().product();
        assert!(pn <= 2310);
        for k in 0..=4u32 {
            let mut exact = vec![false; pn as usize];
            let mut at_most = vec![false; pn as usize];
            for (x, &w) in omega.iter().enumerate().skip(1) {
                if u32::from(w) == k {
                    exact[x % pn as usize] = true;
                }
                if u32::from(w) <= k {
                    at_most[x % pn as usize] = true;
                }
            }
            let bound = omega_primorial_count(k, count);
            for hit in [exact, at_most] {
                let r = hit.iter().filter(|&&b| b).count();
                assert!(BigUint::from(r) <= bound, "k={k} n={count}");
            }
            if count >= k as usize && count < 5 {
                assert!(omega_primorial_bound(k, count + 1) < omega_primorial_bound(k, count));
            }
            assert!(omega_primorial_bound(k + 1, count) >= omega_primorial_bound(k, count));
        }
    }
}

fn coprime_moduli() -> impl Strategy<Value = Vec<u64>> {
    // distinct primes raised to small powers keep the moduli coprime
    proptest::sample::subsequence(sieve_primes(40), 1..5).prop_flat_map(|primes| {
        let len = primes.len();
        proptest::collection::vec(1u32..=2, len)
            .prop_map(move |exps| primes.iter().zip(&exps).map(|(&p, &e)| p.pow(e)).filter(|&k| k <= 1600).collect())
    })
}

fn family() -> impl Strategy<Value = Node> {
    prop_oneof![
        Just(Node::poly(&[0, 0, 1])),
        Just(Node::poly(&[1, 1, 1])),
        Just(Node::poly(&[0, 0, 0, 1])),
        Just(Node::PerfectPowers),
        Just(Node::quadform(1, 0, 1)),
        Just(Node::quadform(1, 1, 2)),
        Just(Node::union(vec![Node::ap(6, 1), Node::poly(&[0, 0, 1])])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_respects_the_exponential_bound(node in family(), moduli in coprime_moduli()) {
        prop_assume!(!moduli.is_empty());
        let spec = n(node);
        let cert = smallness_certificate(&spec, &moduli, &one()).unwrap();
        prop_assert!(cert.records.iter().all(|r| r.count >= 1));
        let sum: f64 = cert.records.iter().map(|r| 1.0 - r.count as f64 / r.k as f64).sum();
        prop_assert!(cert.product_f64() <= (-sum).exp() * (1.0 + 1e-12));
        prop_assert!((cert.divergence_sum.to_f64().unwrap() - sum).abs() < 1e-9);
    }

    #[test]
    fn tampering_breaks_verification(which in 0usize..8, index in 0usize..16, bump in prop_oneof![Just(-1i64), Just(1i64)], modulus in any::<bool>(), reprice in any::<bool>()) {
        let (spec, cert) = small_certificates().swap_remove(which);
        prop_assume!(!cert.records.is_empty());
        let mut bad = cert.clone();
        let i = index % bad.records.len();
        let r = &mut bad.records[i];
        if modulus {
            r.k = (r.k as i64 + bump) as u64;
        } else {
            prop_assume!(r.count as i64 + bump >= 0);
            r.count = (r.count as i64 + bump) as u64;
        }
        prop_assume!(bad.records[i].k >= 1);
        if reprice {
            // also recompute the summary so only the record itself is wrong
            let fresh = SmallnessCertificate::assemble(&spec, cert.criterion, bad.records.clone());
            bad.product_bound = fresh.product_bound;
            bad.divergence_sum = fresh.divergence_sum;
            bad.records = fresh.records;
        }
        prop_assert!(!verify_certificate(&bad, &spec).unwrap().valid);
    }
}
