//! Values of binary quadratic forms `Q(x, y) = a x^2 + b xy + c y^2`.
//!
//! Over `Z` with `a != 0` we work with `X = 2ax + by`, for which
//! `4a Q = X^2 - D y^2`, `D = b^2 - 4ac`. Definite forms give a bounded box,
//! `D = 0` a square, square `D` a factorisation `(X - qy)(X + qy)`, and
//! non-square `D > 0` a Pell-type search whose range comes from a unit of
//! norm 1 that preserves `(X, y) mod 2a`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use super::{Ambient, SetSpecError};
use crate::numtheory::{divisors, gcd};

/// Largest `y` range the Pell-type search will scan.
const PELL_Y_LIMIT: u64 = 50_000_000;

fn isqrt_u128(n: u128) -> u128 {
    n.sqrt()
}

fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt_u128(n as u128) as i128;
    (r * r == n).then_some(r)
}

/// Integer roots of `a x^2 + b x + c` with `a != 0`.
fn quadratic_roots(a: i128, b: i128, c: i128) -> Vec<i128> {
    let Some(s) = exact_sqrt(b * b - 4 * a * c) else { return Vec::new() };
    let mut out = Vec::new();
    for num in [-b + s, -b - s] {
        if num % (2 * a) == 0 {
            out.push(num / (2 * a));
        }
    }
    out
}

pub fn represents(a: i64, b: i64, c: i64, n: i64, ambient: Ambient) -> Result<bool, SetSpecError> {
    match ambient {
        Ambient::NonNegative => Ok(represents_natural(a as i128, b as i128, c as i128, n as i128)),
        Ambient::AllIntegers => represents_integer(a as i128, b as i128, c as i128, n as i128),
    }
}

fn represents_natural(a: i128, b: i128, c: i128, n: i128) -> bool {
    if n < 0 {
        return false;
    }
    if n == 0 {
        return true;
    }
    let (a, c) = if c == 0 {
        (a, c)
    } else if a == 0 {
        (c, a)
    } else {
        (a, c)
    };
    if c == 0 {
        // Q = x (a x + b y)
        return divisors(n as u64).into_iter().any(|x| {
            let t = n / x as i128 - a * x as i128;
            t >= 0 && if b == 0 { t == 0 } else { t % b == 0 }
        });
    }
    let ymax = isqrt_u128((n / c) as u128) as i128;
    (0..=ymax).any(|y| quadratic_roots(a, b * y, c * y * y - n).into_iter().any(|x| x >= 0))
}

fn represents_integer(a: i128, b: i128, c: i128, n: i128) -> Result<bool, SetSpecError> {
    let (a, c) = if a == 0 { (c, a) } else { (a, c) };
    if a == 0 {
        return Ok(if b == 0 { n == 0 } else { n % b == 0 });
    }
    if n == 0 {
        return Ok(true);
    }
    let d = b * b - 4 * a * c;
    let big_n = 4 * a * n;
    if d < 0 {
        let ymax = isqrt_u128((big_n.unsigned_abs()) / d.unsigned_abs()) as i128;
        return Ok((-ymax..=ymax).any(|y| !quadratic_roots(a, b * y, c * y * y - n).is_empty()));
    }
    if d == 0 {
        let g = gcd((2 * a).unsigned_abs() as u64, b.unsigned_abs() as u64) as i128;
        return Ok(exact_sqrt(big_n).is_some_and(|w| w % g == 0));
    }
    let two_a = 2 * a;
    if let Some(q) = exact_sqrt(d) {
        let abs_n =
            u64::try_from(big_n.unsigned_abs()).map_err(|_| SetSpecError::SearchTooLarge("factorisation".into()))?;
        for u in divisors(abs_n) {
            for u in [u as i128, -(u as i128)] {
                let v = big_n / u;
                if (v - u) % (2 * q) != 0 {
                    continue;
                }
                let y = (v - u) / (2 * q);
                let x2a = (u + v) / 2 - b * y;
                if x2a % two_a == 0 {
                    return Ok(true);
                }
            }
        }
        return Ok(false);
    }
    let ymax = pell_y_range(d, a, big_n.unsigned_abs())?;
    for y in 0..=ymax as i128 {
        if let Some(x_abs) = exact_sqrt(big_n + d * y * y) {
            for (xx, yy) in [(x_abs, y), (-x_abs, y)] {
                if (xx - b * yy) % two_a == 0 {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Fundamental solution of `t^2 - D u^2 = 1` for non-square `D > 0`.
pub(crate) fn pell_fundamental(d: i128) -> (BigInt, BigInt) {
    let d_big = BigInt::from(d);
    let a0 = BigInt::from(isqrt_u128(d as u128));
    let (mut m, mut den, mut an) = (BigInt::zero(), BigInt::one(), a0.clone());
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        if &p * &p - &d_big * &q * &q == BigInt::one() {
            return (p, q);
        }
        m = &den * &an - &m;
        den = (&d_big - &m * &m) / &den;
        an = (&a0 + &m) / &den;
        let p_next = &an * &p + &p_prev;
        let q_next = &an * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
}

/// Bound on `|y|` such that every solution class of `X^2 - D y^2 = N`
/// with `|N| <= n_abs`, under the units that fix `(X, y) mod 2a`, has a
/// member in range.
fn pell_y_range(d: i128, a: i128, n_abs: u128) -> Result<u64, SetSpecError> {
    let (t, u) = pell_fundamental(d);
    let modulus = BigInt::from(2 * a.abs());
    let (mut tj, mut uj) = (t.clone(), u.clone());
    let d_big = BigInt::from(d);
    let mut steps = 0u64;
    while !((&tj - 1u32).mod_floor(&modulus).is_zero() && uj.mod_floor(&modulus).is_zero()) {
        let next_t = &tj * &t + &d_big * &uj * &u;
        let next_u = &tj * &u + &uj * &t;
        tj = next_t;
        uj = next_u;
        steps += 1;
        if steps > 100_000 {
            return Err(SetSpecError::SearchTooLarge(format!("unit search for D = {d}")));
        }
    }
    let y2 = BigInt::from(n_abs) * &uj * &uj / (BigInt::from(2) * (&tj - 1u32));
    let y = y2.sqrt();
    y.to_u64()
        .filter(|&v| v <= PELL_Y_LIMIT)
        .ok_or_else(|| SetSpecError::SearchTooLarge(format!("Pell search for D = {d}")))
}

pub(super) fn enumerate(a: i64, b: i64, c: i64, bound: u64, ambient: Ambient) -> Result<Vec<i64>, SetSpecError> {
    let (a, b, c) = (a as i128, b as i128, c as i128);
    let bnd = bound as i128;
    let mut out: Vec<i64> = Vec::new();
    if ambient == Ambient::NonNegative {
        let y_lim = if c > 0 {
            isqrt_u128((bnd / c) as u128) as i128
        } else if b > 0 {
            bnd / b
        } else {
            0
        };
        for y in 0..=y_lim {
            for x in 0i128.. {
                let v = a * x * x + b * x * y + c * y * y;
                if v > bnd {
                    break;
                }
                out.push(v as i64);
                if a == 0 && b * y == 0 {
                    break;
                }
            }
        }
        return Ok(out);
    }
    let (a, c) = if a == 0 { (c, a) } else { (a, c) };
    out.push(0);
    if a == 0 {
        if b != 0 {
            let k = bnd / b.abs();
            out.extend((-k..=k).map(|j| (j * b) as i64));
        }
        return Ok(out);
    }
    let d = b * b - 4 * a * c;
    let big_m = 4 * a.abs() * bnd;
    let two_a = 2 * a;
    let emit = |x_big: i128, y: i128, out: &mut Vec<i64>| {
        if (x_big - b * y) % two_a == 0 {
            let v = (x_big * x_big - d * y * y) / (4 * a);
            if v.abs() <= bnd {
                out.push(v as i64);
            }
        }
    };
    if d < 0 {
        let ymax = isqrt_u128(big_m as u128 / d.unsigned_abs()) as i128;
        for y in -ymax..=ymax {
            let r = isqrt_u128((big_m + d * y * y) as u128) as i128;
            for xb in -r..=r {
                emit(xb, y, &mut out);
            }
        }
    } else if d == 0 {
        let g = gcd(two_a.unsigned_abs() as u64, b.unsigned_abs() as u64) as i128;
        let wmax = isqrt_u128(big_m as u128) as i128;
        let mut w = 0;
        while w <= wmax {
            let v = w * w / (4 * a);
            if v.abs() <= bnd {
                out.push(v as i64);
            }
            w += g;
        }
    } else if let Some(q) = exact_sqrt(d) {
        for u in 1..=big_m {
            for u in [u, -u] {
                let vmax = big_m / u.abs();
                // V = U mod 2q, |V| <= vmax, V != 0
                let step = 2 * q;
                let mut v = -vmax + (u + vmax).rem_euclid(step);
                while v <= vmax {
                    if v != 0 {
                        let y = (v - u) / step;
                        emit((u + v) / 2, y, &mut out);
                    }
                    v += step;
                }
            }
        }
    } else {
        let ymax = pell_y_range(d, a, big_m as u128)? as i128;
        for y in 0..=ymax {
            let dy2 = d * y * y;
            let lo = if dy2 > big_m {
                let r = isqrt_u128((dy2 - big_m) as u128) as i128;
                if r * r == dy2 - big_m {
                    r
                } else {
                    r + 1
                }
            } else {
                0
            };
            let hi = isqrt_u128((dy2 + big_m) as u128) as i128;
            for xb in lo..=hi {
                emit(xb, y, &mut out);
                emit(-xb, y, &mut out);
            }
        }
    }
    Ok(out)
}
