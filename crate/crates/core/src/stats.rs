//! Path-class probabilities and distance moments.
//!
//! The main distribution weights each class by `1/W` and normalizes over all
//! classes. The normalizer is an infinite sum; it is truncated with an
//! explicit bound on the omitted mass. An alternative binomial-style weight
//! is provided along with a probe showing its partial sums are unbounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};

use crate::combinatorics::{multiplicity_1d, multiplicity_2d_rotated};
use crate::count::{ln_factorial, BigCount};
use crate::error::{require_positive, Error, Result};
use crate::params::{PathClass1D, PathClassND};
use crate::series::{sum_positive_series, CompensatedSum, Truncation};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityEntry {
    pub j: u64,
    /// Transverse flips; `None` for 1D tables.
    pub k: Option<u64>,
    pub multiplicity: BigCount,
    /// `1 / W` as a float.
    pub weight: f64,
    pub probability: f64,
}

impl ProbabilityEntry {
    /// `1 / W` as an exact rational, available while `W` is held exactly.
    pub fn exact_weight(&self) -> Option<BigRational> {
        self.multiplicity
            .exact()
            .map(|w| BigRational::new(BigInt::from(1), BigInt::from(w.clone())))
    }
}

/// A normalized `1/W` distribution over path classes.
///
/// `normalization` is the sum of the listed weights. The true normalizer lies
/// in `[normalization, normalization * (1 + tail_bound)]`, so `tail_bound`
/// bounds the probability mass of the classes that were not listed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub m: u64,
    pub entries: Vec<ProbabilityEntry>,
    pub normalization: f64,
    /// Largest flip index (1D) or total flip count `j + k` (2D) listed.
    pub truncated_at: u64,
    pub tail_bound: f64,
}

impl ProbabilityTable {
    pub fn get(&self, j: u64, k: Option<u64>) -> Option<&ProbabilityEntry> {
        self.entries.iter().find(|e| e.j == j && e.k == k)
    }

    pub fn total_probability(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.probability)
            .collect::<CompensatedSum>()
            .value()
    }
}

fn check_trunc(trunc: &Truncation) -> Result<()> {
    require_positive("tol", trunc.tol)?;
    Ok(())
}

/// Upper bound on `W(j)/W(j+1)` for every class with at least `steps`
/// total steps: `(m+j+1)(j+1) <= (N+2)^2/4`, hence the ratio is at most
/// `1/4 + 1/(4(N+1))`.
fn flip_ratio_bound(steps: u64) -> f64 {
    0.25 + 0.25 / (steps + 1) as f64
}

/// `P(j, m) = (1/W(j, m)) / sum_j' 1/W(j', m)`, listed for `j = 0..=J` where
/// `J` is at least `j_max` and large enough that the omitted tail is below
/// `tol` relative to the normalizer.
pub fn probability_1d(m: u64, j_max: u64, trunc: &Truncation) -> Result<ProbabilityTable> {
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    check_trunc(trunc)?;
    let log_w = |j: u64| multiplicity_1d(&PathClass1D::new(m, j).expect("m >= 1")).log_value();
    let series = sum_positive_series(|j| -log_w(j), |j, _, _| flip_ratio_bound(m + 2 * (j + 1)), trunc);
    if series.capped {
        return Err(Error::TermLimit {
            max_terms: trunc.max_terms,
        });
    }
    let last = j_max.max(series.terms as u64 - 1);

    let mut entries = Vec::with_capacity(last as usize + 1);
    let mut z = CompensatedSum::new();
    for j in 0..=last {
        let multiplicity = multiplicity_1d(&PathClass1D::new(m, j)?);
        let weight = (-multiplicity.log_value()).exp();
        z.add(weight);
        entries.push(ProbabilityEntry {
            j,
            k: None,
            multiplicity,
            weight,
            probability: 0.0,
        });
    }
    let normalization = z.value();
    let next = (-log_w(last + 1)).exp();
    let tail = next / (1.0 - flip_ratio_bound(m + 2 * (last + 1)));
    for e in &mut entries {
        e.probability = e.weight / normalization;
    }
    Ok(ProbabilityTable {
        m,
        entries,
        normalization,
        truncated_at: last,
        tail_bound: tail / normalization,
    })
}

/// Ratio bound between successive diagonals `D_n = sum_{j+k=n} 1/W`. Every
/// class on diagonal `n+1` has a parent on diagonal `n`: `(j-1, k)` at ratio
/// at most `1/4 + 1/(4(N+1))`, or `(0, k-1)` at ratio at most `1/4`.
fn diagonal_ratio_bound(m1: u64, n: u64) -> f64 {
    0.5 + 0.25 / (m1 + 2 * n + 1) as f64
}

fn diagonal(m1: u64, n: u64) -> Result<Vec<(u64, u64, BigCount)>> {
    (0..=n)
        .map(|j| {
            let k = n - j;
            Ok((j, k, multiplicity_2d_rotated(&PathClassND::planar(m1, j, k)?)?))
        })
        .collect()
}

fn log_diagonal_sum(m1: u64, n: u64) -> f64 {
    let logs: Vec<f64> = (0..=n)
        .map(|j| {
            let k = n - j;
            ln_factorial(m1 + j) + ln_factorial(j) + 2.0 * ln_factorial(k) - ln_factorial(m1 + 2 * n)
        })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + logs
        .iter()
        .map(|l| (l - top).exp())
        .collect::<CompensatedSum>()
        .value()
        .ln()
}

/// Rotated-frame 2D probabilities over `(j, k)`, enumerated by diagonals
/// `j + k = n` for `n = 0..=N` with `N >= max_index`.
pub fn probability_2d(m1: u64, max_index: u64, trunc: &Truncation) -> Result<ProbabilityTable> {
    if m1 == 0 {
        return Err(Error::invalid("m1", "must be at least 1"));
    }
    check_trunc(trunc)?;
    let series = sum_positive_series(
        |n| log_diagonal_sum(m1, n),
        |n, _, _| diagonal_ratio_bound(m1, n + 1),
        trunc,
    );
    if series.capped {
        return Err(Error::TermLimit {
            max_terms: trunc.max_terms,
        });
    }
    let last = max_index.max(series.terms as u64 - 1);

    let mut entries = Vec::new();
    let mut z = CompensatedSum::new();
    for n in 0..=last {
        for (j, k, multiplicity) in diagonal(m1, n)? {
            let weight = (-multiplicity.log_value()).exp();
            z.add(weight);
            entries.push(ProbabilityEntry {
                j,
                k: Some(k),
                multiplicity,
                weight,
                probability: 0.0,
            });
        }
    }
    let normalization = z.value();
    let next = log_diagonal_sum(m1, last + 1).exp();
    let tail = next / (1.0 - diagonal_ratio_bound(m1, last + 1));
    for e in &mut entries {
        e.probability = e.weight / normalization;
    }
    Ok(ProbabilityTable {
        m: m1,
        entries,
        normalization,
        truncated_at: last,
        tail_bound: tail / normalization,
    })
}

/// Binomial-style weight `W p^(m+j) q^j` with `p = (m+j)/N`, `q = j/N`.
/// Exactly 1 for `j = 0`.
pub fn probability_1d_alt(m: u64, j: u64) -> Result<f64> {
    let cls = PathClass1D::new(m, j)?;
    if j == 0 {
        return Ok(1.0);
    }
    let n = cls.steps() as f64;
    let up = cls.forward() as f64;
    let down = cls.backward() as f64;
    let log = multiplicity_1d(&cls).log_value() + up * (up / n).ln() + down * (down / n).ln();
    Ok(log.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltDivergence {
    pub crossed: bool,
    /// Index of the term that pushed the partial sum past the target, or the
    /// last index summed when the target was not reached.
    pub at_j: u64,
    pub partial_sum: f64,
}

/// Accumulates [`probability_1d_alt`] terms until the partial sum exceeds
/// `target` or `j_cap` is reached. Any `target >= 1` is crossed eventually
/// because the terms decay only like `N^(-1/2)`.
pub fn alt_divergence_probe(m: u64, target: f64, j_cap: u64) -> Result<AltDivergence> {
    if !(target.is_finite() && target >= 1.0) {
        return Err(Error::invalid("target", format!("must be at least 1, got {target}")));
    }
    let mut acc = CompensatedSum::new();
    for j in 0..=j_cap {
        acc.add(probability_1d_alt(m, j)?);
        if acc.value() > target {
            return Ok(AltDivergence {
                crossed: true,
                at_j: j,
                partial_sum: acc.value(),
            });
        }
    }
    Ok(AltDivergence {
        crossed: false,
        at_j: j_cap,
        partial_sum: acc.value(),
    })
}

/// Mean displacement, mean squared path length and spread of a path class.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments<T> {
    pub mean: T,
    pub mean_square: T,
    pub variance: T,
}

/// Distance moments in any numeric type: `<x> = m dx`, `<x^2> = N^2 dx^2`,
/// `Var = 4j(m+j)/m^2 <x>^2`.
pub fn moments_1d_in<T>(cls: &PathClass1D, dx: T) -> Moments<T>
where
    T: Num + Clone + FromPrimitive,
{
    let lift = |v: u64| T::from_u64(v).expect("integer fits the numeric type");
    let (m, j) = (cls.m(), cls.j());
    let mean = lift(m) * dx.clone();
    let steps = lift(cls.steps());
    let mean_square = steps.clone() * steps * dx.clone() * dx;
    let coefficient = lift(4 * j * (m + j)) / lift(m * m);
    let variance = coefficient * mean.clone() * mean.clone();
    Moments {
        mean,
        mean_square,
        variance,
    }
}

pub fn moments_1d(cls: &PathClass1D, dx: f64) -> Result<Moments<f64>> {
    Ok(moments_1d_in(cls, require_positive("dx", dx)?))
}

/// Exact rational moments.
pub fn moments_1d_exact(cls: &PathClass1D, dx: &BigRational) -> Moments<BigRational> {
    moments_1d_in(cls, dx.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive, Zero};
    use proptest::prelude::*;

    fn tight() -> Truncation {
        Truncation::new(1e-14)
    }

    /// Exact rational partial sum of `1/W` for the first `terms` classes.
    fn rational_normalizer(m: u64, terms: u64) -> BigRational {
        (0..terms).fold(BigRational::zero(), |acc, j| {
            let w = crate::count::binomial(m + 2 * j, j);
            acc + BigRational::new(BigInt::one(), BigInt::from(w))
        })
    }

    #[test]
    fn probability_1d_m2() {
        let table = probability_1d(2, 5, &tight()).unwrap();
        let z = rational_normalizer(2, 40).to_f64().unwrap();
        // Oracle: 1 + 1/4 + 1/15 + 1/56 + ... = 1.3409996467967877.
        assert!((z - 1.340_999_646_796_787_7).abs() < 1e-15);
        assert!(table.normalization <= z && z <= table.normalization * (1.0 + table.tail_bound) + 1e-15);
        let p1 = table.get(1, None).unwrap().probability;
        assert!((p1 - 0.25 / z).abs() <= p1 * table.tail_bound + 1e-15);
        assert!((p1 - 0.186_428_087_879_94).abs() < 1e-12);
        assert_eq!(
            table.get(1, None).unwrap().exact_weight().unwrap(),
            BigRational::new(1.into(), 4.into())
        );
    }

    #[test]
    fn probability_1d_normalizes() {
        for m in [1, 2, 3, 7, 40, 100] {
            let table = probability_1d(m, 0, &Truncation::new(1e-12)).unwrap();
            assert!((table.total_probability() - 1.0).abs() <= 1e-12);
            assert!(table.tail_bound < 1e-12);
            // The bound really covers the omitted mass.
            let long = rational_normalizer(m, table.truncated_at + 60).to_f64().unwrap();
            assert!(long >= table.normalization * (1.0 - 1e-15));
            assert!(long <= table.normalization * (1.0 + table.tail_bound) + 1e-15);
            let probs: Vec<f64> = table.entries.iter().map(|e| e.probability).collect();
            assert!(probs.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn probability_1d_honours_j_max() {
        let table = probability_1d(2, 60, &tight()).unwrap();
        assert_eq!(table.truncated_at, 60);
        assert_eq!(table.entries.len(), 61);
    }

    #[test]
    fn classical_path_dominates_for_large_m() {
        let at = |m| probability_1d(m, 0, &tight()).unwrap().entries[0].probability;
        assert!(at(100) >= 0.989);
        let seq: Vec<f64> = [1, 2, 5, 10, 50, 100, 500].iter().map(|&m| at(m)).collect();
        assert!(seq.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn probability_2d_values() {
        let table = probability_2d(1, 2, &Truncation::new(1e-13)).unwrap();
        assert!((table.total_probability() - 1.0).abs() < 1e-13);
        let e = table.get(1, Some(1)).unwrap();
        assert_eq!(e.exact_weight().unwrap(), BigRational::new(1.into(), 60.into()));
        // Oracle: direct double sum over j, k <= 50.
        let mut z = 0.0;
        for j in 0..=50u64 {
            for k in 0..=50u64 {
                let w = multiplicity_2d_rotated(&PathClassND::planar(1, j, k).unwrap()).unwrap();
                z += (-w.log_value()).exp();
            }
        }
        assert!((table.normalization - z).abs() <= 1e-13 * z);
        assert!((e.probability - (1.0 / 60.0) / z).abs() < 1e-15);
        // Diagonal order.
        let order: Vec<(u64, u64)> = table.entries.iter().take(6).map(|e| (e.j, e.k.unwrap())).collect();
        assert_eq!(order, [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]);
    }

    #[test]
    fn probability_2d_classical_limit() {
        let at = |m1| probability_2d(m1, 0, &tight()).unwrap().entries[0].probability;
        let seq: Vec<f64> = [1, 4, 16, 64, 256].iter().map(|&m| at(m)).collect();
        assert!(seq.windows(2).all(|w| w[1] > w[0]));
        assert!(seq[4] > 0.99);
    }

    #[test]
    fn probability_2d_k0_slice_mirrors_1d() {
        let m1 = 3;
        let t2 = probability_2d(m1, 10, &tight()).unwrap();
        let t1 = probability_1d(m1, 10, &tight()).unwrap();
        let k0: Vec<&ProbabilityEntry> = t2.entries.iter().filter(|e| e.k == Some(0)).collect();
        let scale = k0[0].probability / t1.entries[0].probability;
        for e in k0 {
            let one_d = t1.get(e.j, None).unwrap();
            assert_eq!(e.multiplicity, one_d.multiplicity);
            assert!((e.probability - scale * one_d.probability).abs() <= 1e-15);
        }
    }

    #[test]
    fn alt_probability_values() {
        assert_eq!(probability_1d_alt(4, 0).unwrap(), 1.0);
        let a = probability_1d_alt(2, 1).unwrap();
        assert!((a - 4.0 * 0.75f64.powi(3) * 0.25).abs() < 1e-15);
        assert!((a - 0.4219).abs() < 1e-4);
        let b = probability_1d_alt(2, 2).unwrap();
        assert!((b - 15.0 * (4.0f64 / 6.0).powi(4) * (2.0f64 / 6.0).powi(2)).abs() < 1e-15);
        assert!((b - 0.3292).abs() < 1e-4);
    }

    #[test]
    fn alt_probability_matches_large_n_asymptote() {
        // For large j the term approaches sqrt(2 / (pi N)).
        let j = 200_000;
        let n = (2 + 2 * j) as f64;
        let got = probability_1d_alt(2, j).unwrap();
        let asym = (2.0 / (std::f64::consts::PI * n)).sqrt();
        assert!((got / asym - 1.0).abs() < 1e-4);
    }

    #[test]
    fn alt_divergence_probes() {
        let a = alt_divergence_probe(2, 1.5, 10_000).unwrap();
        assert!(a.crossed && a.at_j == 2);
        let b = alt_divergence_probe(2, 1.0, 10).unwrap();
        assert!(b.crossed && b.at_j == 1);
        let c = alt_divergence_probe(1, 2.0, 100_000).unwrap();
        assert!(c.crossed && c.at_j == 3);
        let big = alt_divergence_probe(3, 30.0, 100_000).unwrap();
        assert!(big.crossed);
        let stuck = alt_divergence_probe(2, 100.0, 50).unwrap();
        assert!(!stuck.crossed && stuck.at_j == 50);
        assert!(alt_divergence_probe(2, 1.0 - 1e-9, 5).is_err());
    }

    #[test]
    fn moments_examples() {
        let m = |mm, j, dx| moments_1d(&PathClass1D::new(mm, j).unwrap(), dx).unwrap();
        assert_eq!(
            m(3, 0, 1.0),
            Moments {
                mean: 3.0,
                mean_square: 9.0,
                variance: 0.0
            }
        );
        assert_eq!(
            m(2, 1, 1.0),
            Moments {
                mean: 2.0,
                mean_square: 16.0,
                variance: 12.0
            }
        );
        assert_eq!(
            m(2, 1, 0.5),
            Moments {
                mean: 1.0,
                mean_square: 4.0,
                variance: 3.0
            }
        );
        assert!(moments_1d(&PathClass1D::new(1, 0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn exact_moment_identity() {
        let dx = BigRational::new(3.into(), 7.into());
        for m in 1..=20u64 {
            for j in 0..=20u64 {
                let mo = moments_1d_exact(&PathClass1D::new(m, j).unwrap(), &dx);
                assert_eq!(mo.variance, mo.mean_square.clone() - mo.mean.clone() * mo.mean.clone());
            }
        }
    }

    proptest! {
        #[test]
        fn float_moment_identity(m in 1u64..500, j in 0u64..500, dx in 1e-3f64..1e3) {
            let mo = moments_1d(&PathClass1D::new(m, j).unwrap(), dx).unwrap();
            let direct = mo.mean_square - mo.mean * mo.mean;
            prop_assert!((mo.variance - direct).abs() <= 1e-12 * mo.mean_square);
        }

        #[test]
        fn alt_partial_sums_increase(m in 1u64..6, j in 0u64..2000) {
            prop_assert!(probability_1d_alt(m, j).unwrap() > 0.0);
        }
    }
}
