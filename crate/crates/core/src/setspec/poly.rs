use serde::{Deserialize, Serialize};

/// Integer polynomial, coefficients from the constant term upwards, with
/// trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<i64>,
}

impl Polynomial {
    pub fn new(coeffs: &[i64]) -> Self {
        let mut coeffs = coeffs.to_vec();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.coeffs.len() as i32 - 1
    }

    pub fn leading(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Exact value, `None` on `i128` overflow.
    pub fn eval(&self, x: i64) -> Option<i128> {
        let x = x as i128;
        self.coeffs.iter().rev().try_fold(0i128, |acc, &c| acc.checked_mul(x)?.checked_add(c as i128))
    }

    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let m128 = m as u128;
        let x = x as u128 % m128;
        self.coeffs.iter().rev().fold(0u128, |acc, &c| (acc * x + (c as i128).rem_euclid(m as i128) as u128) % m128)
            as u64
    }

    /// `self - k`.
    pub fn shifted(&self, k: i64) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        coeffs[0] -= k;
        Polynomial::new(&coeffs)
    }

    /// `R` such that every integer root lies in `[-R, R]`; also every `x`
    /// with `|x| > R` has `|F(x)| > bound`.
    pub fn value_radius(&self, bound: u64) -> u64 {
        let lead = self.leading().unsigned_abs().max(1) as u128;
        let rest: u128 =
            self.coeffs[..self.coeffs.len().saturating_sub(1)].iter().map(|c| c.unsigned_abs() as u128).sum();
        ((rest + bound as u128) / lead + 1).min(u64::MAX as u128 / 4) as u64
    }

    /// Integer roots, ascending: candidates are divisors of the lowest
    /// non-zero coefficient (rational root test), plus 0.
    pub fn integer_roots(&self) -> Vec<i64> {
        if self.degree() < 1 {
            return Vec::new();
        }
        let low = self.coeffs.iter().position(|&c| c != 0).expect("non-zero polynomial");
        let mut roots = Vec::new();
        if low > 0 {
            roots.push(0);
        }
        let c = self.coeffs[low].unsigned_abs();
        for d in crate::numtheory::divisors(c) {
            for r in [d as i64, -(d as i64)] {
                if self.eval(r) == Some(0) {
                    roots.push(r);
                }
            }
        }
        roots.sort_unstable();
        roots.dedup();
        roots
    }
}
