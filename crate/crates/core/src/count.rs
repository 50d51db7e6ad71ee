//! Exact and log-space path counts.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::LN_2;

/// Largest total step count for which exact integers are produced.
pub const EXACT_STEP_LIMIT: u64 = 2000;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// A path count held as an exact integer (for step counts up to
/// [`EXACT_STEP_LIMIT`]) together with its natural logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct BigCount {
    exact: Option<BigUint>,
    log_value: f64,
}

impl BigCount {
    pub fn from_exact(exact: BigUint) -> Self {
        let log_value = ln_big(&exact);
        Self {
            exact: Some(exact),
            log_value,
        }
    }

    pub fn from_log(log_value: f64) -> Self {
        Self { exact: None, log_value }
    }

    pub fn exact(&self) -> Option<&BigUint> {
        self.exact.as_ref()
    }

    /// Natural logarithm of the count; `-inf` only for a zero count.
    pub fn log_value(&self) -> f64 {
        self.log_value
    }

    /// The count as a float; saturates to `inf` past `f64::MAX`.
    pub fn to_f64(&self) -> f64 {
        match &self.exact {
            Some(n) => n.to_f64().unwrap_or(f64::INFINITY),
            None => self.log_value.exp(),
        }
    }
}

/// Natural log of an arbitrary-precision integer, accurate to a few ulps.
pub fn ln_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * LN_2
}

/// `ln(n!)`.
///
/// Small arguments use a direct product; larger ones the Stirling series for
/// `ln Gamma(n + 1)` carried to the `x^-11` term, which is below one ulp for
/// `x >= 21`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 21 {
        let mut product = 1.0f64;
        for i in 2..=n {
            product *= i as f64;
        }
        return product.ln();
    }
    let x = (n + 1) as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2
                        * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * (691.0 / 360_360.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + series
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Multinomial coefficient `(sum parts)! / prod(parts!)`.
///
/// Exact when the total is at most [`EXACT_STEP_LIMIT`], log-only above.
pub fn multinomial(parts: &[u64]) -> BigCount {
    let total: u64 = parts.iter().sum();
    if total <= EXACT_STEP_LIMIT {
        let mut remaining = total;
        let mut acc = BigUint::one();
        for &p in parts {
            acc *= binomial(remaining, p);
            remaining -= p;
        }
        BigCount::from_exact(acc)
    } else {
        let log = ln_factorial(total) - parts.iter().map(|&p| ln_factorial(p)).sum::<f64>();
        BigCount::from_log(log)
    }
}
