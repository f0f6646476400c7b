use densitylab::numtheory::{crt_pair, rem_euclid};
use densitylab::setspec::{
    ap_union_normalize, complement_hits, hits_with, Ambient, HitOptions, HitSet, Node, Polynomial, SetSpec,
};
use proptest::prelude::*;

fn n(node: Node) -> SetSpec {
    SetSpec::new(Ambient::NonNegative, node).unwrap()
}

fn families() -> Vec<Node> {
    vec![
        Node::finite(&[0, 5, 17, 1000, 99_999]),
        Node::ap(6, 5),
        Node::union(vec![Node::ap(10, 3), Node::ap(15, 1)]),
        Node::affine(4, 3, Node::poly(&[0, 0, 1])),
        Node::intersect_ap(Node::quadform(1, 0, 1), 3, 2),
        Node::poly(&[1, 0, 1]),
        Node::poly(&[0, 1, 0, 1]),
        Node::quadform(1, 0, 1),
        Node::quadform(1, 1, 1),
        Node::quadform(2, 1, 3),
        Node::PerfectPowers,
        Node::digit_avoider(10, &[9]),
        Node::digit_avoider(10, &[0]),
        Node::digit_avoider(3, &[1, 2]),
        Node::OmegaExact { k: 2 },
        Node::OmegaAtMost { k: 1 },
        Node::PolyPrimePreimage { coeffs: vec![1, 0, 1] },
        Node::chain(&[1, 2, 6, 12]),
        Node::FactorialShift,
    ]
}

fn residues(members: &[i64], m: u64) -> HitSet {
    HitSet::from_residues(m, members.iter().map(|&x| rem_euclid(x as i128, m)))
}

#[test]
fn oracle_soundness_up_to_200() {
    let opts = HitOptions { element_bound: 100_000 };
    for node in families() {
        let spec = n(node);
        let members = spec.enumerate(100_000).unwrap();
        let equality = matches!(
            spec.node,
            Node::Finite { .. } | Node::Ap { .. } | Node::PolyImage { .. } | Node::QuadFormValues { .. }
        );
        for m in 1..=200u64 {
            let oracle = hits_with(&spec, m, opts).unwrap();
            let seen = residues(&members, m);
            assert!(seen.iter().all(|r| oracle.contains(r)), "{:?} m={m}: member class missing", spec.node);
            // every class has a witness in [0, m)^k, which must lie below the bound
            let witnesses_suffice = match &spec.node {
                Node::PolyImage { coeffs } => Polynomial::new(coeffs).eval(m as i64 - 1).is_some_and(|v| v <= 100_000),
                _ => true,
            };
            if equality && witnesses_suffice && m <= 50 {
                assert_eq!(seen.to_vec(), oracle.to_vec(), "{:?} m={m}", spec.node);
            }
            if !oracle.exactness().is_exact() {
                // search-bounded oracles at the same bound are exactly what was scanned
                assert_eq!(seen.to_vec(), oracle.to_vec(), "{:?} m={m}", spec.node);
            }
        }
    }
}

#[test]
fn crt_completeness() {
    for node in [Node::poly(&[1, 0, 1]), Node::poly(&[3, 1, 0, 2]), Node::quadform(1, 0, 1), Node::quadform(3, 2, 5)] {
        let spec = n(node);
        for m in 1..=100u64 {
            for k in (1..=100u64).step_by(7) {
                if densitylab::numtheory::gcd(m, k) != 1 || m * k > 2000 {
                    continue;
                }
                let (hm, hk) = (spec.hits(m).unwrap(), spec.hits(k).unwrap());
                let joined = HitSet::from_residues(
                    m * k,
                    hm.iter().flat_map(|a| hk.iter().map(move |b| crt_pair(a, m, b, k).unwrap().0)),
                );
                assert_eq!(spec.hits(m * k).unwrap().to_vec(), joined.to_vec(), "{:?} {m}x{k}", spec.node);
            }
        }
    }
}

#[test]
fn ambient_does_not_change_hits() {
    for node in families() {
        let Ok(z) = SetSpec::new(Ambient::AllIntegers, node.clone()) else { continue };
        let nat = n(node);
        if !nat.hits(7).unwrap().exactness().is_exact() {
            continue;
        }
        for m in [1u64, 2, 7, 12, 16, 60, 97, 840] {
            let (a, b) = (nat.hits(m).unwrap(), z.hits(m).unwrap());
            // the Z-variants of these add negatives, so only inclusion holds
            if matches!(nat.node, Node::DigitAvoider { .. } | Node::DivisibilityChain { .. } | Node::Finite { .. }) {
                assert!(a.iter().all(|r| b.contains(r)));
            } else {
                assert_eq!(a.to_vec(), b.to_vec(), "{:?} m={m}", nat.node);
            }
        }
    }
}

#[test]
fn zero_pattern_has_ninety_classes_mod_100() {
    let spec = n(Node::digit_avoider(10, &[0]));
    assert_eq!(spec.hits(100).unwrap().count(), 90);
    let brute = residues(&spec.enumerate(10_000).unwrap(), 100);
    assert_eq!(brute.count(), 90);
}

#[test]
fn digit_avoider_exact_at_powers_of_base() {
    for (base, pattern) in [(10u32, vec![9u32]), (10, vec![0]), (10, vec![4, 2]), (2, vec![1, 1]), (3, vec![2, 0])] {
        let spec = n(Node::digit_avoider(base, &pattern));
        let ell = pattern.len() as u32;
        let mut m = base as u64;
        while m <= 10_000 {
            let j = m.ilog(base as u64);
            let witness_bound = (base as u64).pow(j + ell + 2).min(3_000_000);
            let brute = residues(&spec.enumerate(witness_bound).unwrap(), m);
            let oracle = spec.hits(m).unwrap();
            assert!(oracle.exactness().is_exact());
            assert_eq!(oracle.to_vec(), brute.to_vec(), "base={base} pattern={pattern:?} m={m}");
            m *= base as u64;
        }
    }
}

#[test]
fn documented_examples() {
    assert_eq!(n(Node::poly(&[0, 0, 1])).hits(16).unwrap().to_vec(), vec![0, 1, 4, 9]);
    let fs = n(Node::FactorialShift).hits(7).unwrap();
    assert!(fs.is_full() && fs.exactness().is_exact());
    assert!(n(Node::PerfectPowers).member(27).unwrap());
    assert!(!n(Node::digit_avoider(10, &[9])).member(94).unwrap());
    assert!(n(Node::OmegaExact { k: 2 }).member(6).unwrap());
    assert_eq!(n(Node::finite(&[3, 1, 2])).enumerate(2).unwrap(), vec![1, 2]);
    assert_eq!(n(Node::poly(&[1, 0, 1])).enumerate(10).unwrap(), vec![1, 2, 5, 10]);
    assert_eq!(n(Node::quadform(1, 0, 1)).enumerate(5).unwrap(), vec![0, 1, 2, 4, 5]);

    let odd = ap_union_normalize(&n(Node::ap(2, 1))).unwrap();
    assert_eq!((odd.modulus, odd.residues.clone()), (2, vec![1]));
    assert_eq!(complement_hits(&odd, 2).to_vec(), vec![0]);
    let threes = ap_union_normalize(&n(Node::ap(3, 0))).unwrap();
    assert_eq!(complement_hits(&threes, 6).to_vec(), vec![1, 2, 4, 5]);
    let all = ap_union_normalize(&n(Node::union(vec![Node::ap(2, 0), Node::ap(2, 1)]))).unwrap();
    assert_eq!(complement_hits(&all, 2).count(), 0);
}

proptest! {
    #[test]
    fn monotone_under_inclusion(c in 0i64..4, k in 1u64..8, h in 0u64..8, m in 1u64..120) {
        // X ∩ (kH + h) ⊆ X, and X ⊆ X ∪ AP
        let base = Node::quadform(1, c, 1);
        let sub = n(Node::intersect_ap(base.clone(), k, h));
        let sup = n(Node::union(vec![base.clone(), Node::ap(k + 1, h)]));
        let mid = n(base);
        let (a, b, c2) = (sub.hits(m).unwrap(), mid.hits(m).unwrap(), sup.hits(m).unwrap());
        prop_assert!(a.iter().all(|r| b.contains(r)));
        prop_assert!(b.iter().all(|r| c2.contains(r)));
    }
}
