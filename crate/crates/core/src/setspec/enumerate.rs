use super::digits::avoids;
use super::quadvalues;
use super::{chain_terms, Ambient, Node, Polynomial, SetSpecError};
use crate::numtheory::{factorize, iroot, is_prime_u128};

fn range(ambient: Ambient, bound: u64) -> std::ops::RangeInclusive<i64> {
    let b = bound as i64;
    match ambient {
        Ambient::NonNegative => 0..=b,
        Ambient::AllIntegers => -b..=b,
    }
}

fn big_omega(n: u64) -> u32 {
    factorize(n).iter().map(|&(_, e)| e).sum()
}

pub(super) fn member(node: &Node, ambient: Ambient, x: i64) -> Result<bool, SetSpecError> {
    Ok(match node {
        Node::Finite { values } => values.contains(&x),
        Node::Ap { a, h } => {
            let d = x as i128 - *h as i128;
            d.rem_euclid(*a as i128) == 0 && (ambient == Ambient::AllIntegers || d >= 0)
        }
        Node::UnionOf { of } => {
            for n in of {
                if member(n, ambient, x)? {
                    return Ok(true);
                }
            }
            false
        }
        Node::AffineImage { a, h, inner } => {
            let d = x as i128 - *h as i128;
            let a = *a as i128;
            d % a == 0 && {
                let y = d / a;
                i64::try_from(y).is_ok_and(|y| ambient.contains(y)) && member(inner, ambient, (d / a) as i64)?
            }
        }
        Node::IntersectAp { inner, k, h } => {
            (x as i128 - *h as i128).rem_euclid(*k as i128) == 0 && member(inner, ambient, x)?
        }
        Node::PolyImage { coeffs } => {
            let f = Polynomial::new(coeffs);
            if f.degree() < 1 {
                return Ok(f.eval(0) == Some(x as i128));
            }
            f.shifted(x).integer_roots().into_iter().any(|r| ambient.contains(r))
        }
        Node::PolyPrimePreimage { coeffs } => {
            Polynomial::new(coeffs).eval(x).is_some_and(|v| is_prime_u128(v.unsigned_abs()))
        }
        Node::QuadFormValues { a, b, c } => quadvalues::represents(*a, *b, *c, x, ambient)?,
        Node::PerfectPowers => is_perfect_power(x, ambient),
        Node::DigitAvoider { base, pattern } => avoids(x.unsigned_abs(), *base, pattern),
        Node::OmegaExact { k } => x != 0 && big_omega(x.unsigned_abs()) == *k,
        Node::OmegaAtMost { k } => x != 0 && big_omega(x.unsigned_abs()) <= *k,
        Node::DivisibilityChain { prefix } => {
            let (terms, ratio) = chain_terms(prefix)?;
            if terms.contains(&x) {
                return Ok(true);
            }
            let last = *terms.last().expect("non-empty");
            match ratio {
                Some(-1) => x == -last,
                Some(rho) => {
                    if x == 0 || x % last != 0 {
                        return Ok(false);
                    }
                    let mut q = x / last;
                    let mut steps = 0;
                    while q % rho == 0 && q != 1 {
                        q /= rho;
                        steps += 1;
                    }
                    q == 1 && steps >= 1
                }
                None => false,
            }
        }
        Node::FactorialShift => {
            if x < 0 {
                return Ok(false);
            }
            let mut f: i128 = 1;
            for h in 0i128.. {
                if h >= 1 {
                    f *= h;
                }
                let v = f + h;
                if v == x as i128 {
                    return Ok(true);
                }
                if v > x as i128 {
                    break;
                }
            }
            false
        }
    })
}

fn is_perfect_power(x: i64, ambient: Ambient) -> bool {
    let n = x.unsigned_abs();
    if x >= 0 && n <= 1 {
        return true;
    }
    if x == -1 {
        return ambient == Ambient::AllIntegers;
    }
    for e in 2..=64u32 {
        if x < 0 && (e % 2 == 0 || ambient == Ambient::NonNegative) {
            continue;
        }
        let r = iroot(n, e);
        if r >= 2 && (r as u128).checked_pow(e) == Some(n as u128) {
            return true;
        }
        if r < 2 {
            break;
        }
    }
    false
}

pub(super) fn enumerate(node: &Node, ambient: Ambient, bound: u64) -> Result<Vec<i64>, SetSpecError> {
    let b = bound as i64;
    Ok(match node {
        Node::Finite { values } => values.iter().copied().filter(|v| v.unsigned_abs() <= bound).collect(),
        Node::Ap { a, h } => {
            let (a, h) = (*a as i64, *h as i64);
            let first = match ambient {
                Ambient::NonNegative => h,
                Ambient::AllIntegers => -b + (h + b).rem_euclid(a),
            };
            (0..).map(|j| first + j * a).take_while(|&v| v <= b).collect()
        }
        Node::UnionOf { of } => {
            let mut out = Vec::new();
            for n in of {
                out.extend(enumerate(n, ambient, bound)?);
            }
            out
        }
        Node::AffineImage { a, h, inner } => {
            // |a y + h| <= B forces |y| <= (B + |h|) / |a|
            let inner_bound = (bound as u128 + h.unsigned_abs() as u128) / a.unsigned_abs() as u128;
            let inner_bound =
                u64::try_from(inner_bound).map_err(|_| SetSpecError::SearchTooLarge("affine preimage".into()))?;
            enumerate(inner, ambient, inner_bound.min(super::MAX_ENUMERATION_BOUND))?
                .into_iter()
                .filter_map(|y| (*a as i128 * y as i128 + *h as i128).try_into().ok())
                .filter(|v: &i64| v.unsigned_abs() <= bound)
                .collect()
        }
        Node::IntersectAp { inner, k, h } => enumerate(inner, ambient, bound)?
            .into_iter()
            .filter(|&x| (x as i128 - *h as i128).rem_euclid(*k as i128) == 0)
            .collect(),
        Node::PolyImage { coeffs } => {
            let f = Polynomial::new(coeffs);
            if f.degree() < 1 {
                return Ok(vec![f.eval(0).expect("constant") as i64]);
            }
            let r = f.value_radius(bound).min(i64::MAX as u64 / 2) as i64;
            let lo = if ambient == Ambient::AllIntegers { -r } else { 0 };
            guard(r as u64, "polynomial image")?;
            (lo..=r).filter_map(|x| f.eval(x)).filter(|v| v.unsigned_abs() <= bound as u128).map(|v| v as i64).collect()
        }
        Node::PolyPrimePreimage { coeffs } => {
            let f = Polynomial::new(coeffs);
            guard(bound, "prime preimage")?;
            range(ambient, bound).filter(|&x| f.eval(x).is_some_and(|v| is_prime_u128(v.unsigned_abs()))).collect()
        }
        Node::QuadFormValues { a, b, c } => quadvalues::enumerate(*a, *b, *c, bound, ambient)?,
        Node::PerfectPowers => {
            let mut out = vec![0, 1];
            for e in 2..=63u32 {
                let top = iroot(bound, e);
                if top < 2 {
                    break;
                }
                for r in 2..=top as i64 {
                    let v = r.pow(e);
                    out.push(v);
                    if ambient == Ambient::AllIntegers && e % 2 == 1 {
                        out.push(-v);
                    }
                }
            }
            if ambient == Ambient::AllIntegers {
                out.push(-1);
            }
            out
        }
        Node::DigitAvoider { base, pattern } => {
            guard(bound, "digit avoider")?;
            range(ambient, bound).filter(|x| avoids(x.unsigned_abs(), *base, pattern)).collect()
        }
        Node::OmegaExact { k } => omega_scan(ambient, bound, |w| w == *k)?,
        Node::OmegaAtMost { k } => omega_scan(ambient, bound, |w| w <= *k)?,
        Node::DivisibilityChain { prefix } => {
            let (mut out, ratio) = chain_terms(prefix)?;
            let last = *out.last().expect("non-empty");
            match ratio {
                Some(-1) => out.push(-last),
                Some(rho) => {
                    let mut v = last as i128;
                    loop {
                        v *= rho as i128;
                        if v.unsigned_abs() > bound as u128 {
                            break;
                        }
                        out.push(v as i64);
                    }
                }
                None => {}
            }
            out
        }
        Node::FactorialShift => {
            let mut out = Vec::new();
            let mut f: i128 = 1;
            for h in 0i128.. {
                if h >= 1 {
                    f *= h;
                }
                if f + h > bound as i128 {
                    break;
                }
                out.push((f + h) as i64);
            }
            out
        }
    })
}

/// Scans above this many candidates are refused.
const SCAN_LIMIT: u64 = 200_000_000;

fn guard(count: u64, what: &str) -> Result<(), SetSpecError> {
    if count > SCAN_LIMIT {
        Err(SetSpecError::SearchTooLarge(what.to_string()))
    } else {
        Ok(())
    }
}

fn omega_scan(ambient: Ambient, bound: u64, keep: impl Fn(u32) -> bool) -> Result<Vec<i64>, SetSpecError> {
    guard(bound, "omega scan")?;
    let table = crate::numtheory::big_omega_table(bound);
    let mut out = Vec::new();
    for (x, &w) in table.iter().enumerate().skip(1) {
        if keep(w as u32) {
            out.push(x as i64);
            if ambient == Ambient::AllIntegers {
                out.push(-(x as i64));
            }
        }
    }
    Ok(out)
}
