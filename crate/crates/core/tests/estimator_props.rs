use densitylab::density::buck_upper;
use densitylab::estimators::{all_estimates, Windows};
use densitylab::setspec::{Ambient, Node, SetSpec};
use rayon::prelude::*;

fn n(node: Node) -> SetSpec {
    SetSpec::new(Ambient::NonNegative, node).unwrap()
}

#[test]
fn sandwich_on_progressions() {
    let cases: Vec<(u64, u64)> = (1..=12u64).flat_map(|k| (0..k).map(move |h| (k, h))).collect();
    let failures: Vec<String> = cases
        .par_iter()
        .flat_map_iter(|&(k, h)| {
            let est = all_estimates(&n(Node::ap(k, h)), &Windows::default()).unwrap();
            est.into_iter()
                .filter(move |e| (e.value - 1.0 / k as f64).abs() > 0.02)
                .map(move |e| format!("AP({k},{h}) {} {} = {}", e.method, e.window_string(), e.value))
        })
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn sandwich_on_unions() {
    for node in [
        Node::union(vec![Node::ap(4, 0), Node::ap(4, 1)]),
        Node::union(vec![Node::ap(6, 1), Node::ap(6, 5)]),
        Node::affine(3, 1, Node::ap(2, 0)),
    ] {
        let spec = n(node);
        let target = densitylab::setspec::ap_union_normalize(&spec).unwrap();
        let d = target.residues.len() as f64 / target.modulus as f64;
        for e in all_estimates(&spec, &Windows::default()).unwrap() {
            assert!((e.value - d).abs() <= 0.02, "{:?} {} = {}, want {d}", spec.node, e.method, e.value);
        }
    }
}

#[test]
fn estimates_are_dominated_by_buck_bounds() {
    for node in [
        Node::poly(&[0, 0, 1]),
        Node::quadform(1, 0, 1),
        Node::PerfectPowers,
        Node::digit_avoider(10, &[9]),
        Node::chain(&[1, 2, 4]),
        Node::FactorialShift,
        Node::finite(&[1, 2, 3]),
    ] {
        let spec = n(node);
        let buck = buck_upper(&spec, 8).unwrap().upper_f64();
        for e in all_estimates(&spec, &Windows::default()).unwrap() {
            assert!(e.value <= buck + 0.02, "{:?} {} = {} > {buck}", spec.node, e.method, e.value);
            assert!(e.value >= 0.0);
        }
    }
}
