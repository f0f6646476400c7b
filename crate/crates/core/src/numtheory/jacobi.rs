use super::{pow_mod, NumTheoryError};

/// Jacobi symbol `(a/n)` for odd positive `n`, by reciprocity reduction.
pub fn jacobi(a: i64, n: u64) -> Result<i8, NumTheoryError> {
    if n.is_multiple_of(2) {
        return Err(NumTheoryError::BadJacobiModulus(n as i128));
    }
    let mut a = (a as i128).rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        // (2/n) = -1 iff n = 3, 5 mod 8
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Legendre symbol via Euler's criterion, `a^((p-1)/2) mod p`.
///
/// Shares no code with [`jacobi`]; the certificate verifier uses it as an
/// independent route.
pub fn legendre_by_euler(a: i64, p: u64) -> i8 {
    let a = (a as i128).rem_euclid(p as i128) as u64;
    if a == 0 {
        return 0;
    }
    match pow_mod(a, (p - 1) / 2, p) {
        1 => 1,
        x if x == p - 1 => -1,
        _ => 0,
    }
}
