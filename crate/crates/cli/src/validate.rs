//! Oracle-versus-formula suites behind `pathsum validate`.
//!
//! Every check records the measured error next to its tolerance so a
//! failing run says by how much it failed.

// Negated comparisons below are deliberate: a NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use num_bigint::BigInt;
use num_rational::BigRational;
use pathsum_core::combinatorics::{
    entropy_rate, multiplicity_1d, multiplicity_2d_full, multiplicity_2d_rotated, multiplicity_3d, tally_flip_classes,
};
use pathsum_core::ensemble::SpinEnsemble1D;
use pathsum_core::kernel::{heat_residual, kernel_sum_1d, kernel_sum_2d, propagator_mass, threshold_scan_on};
use pathsum_core::series::CompensatedSum;
use pathsum_core::stats::{alt_divergence_probe, moments_1d_exact, probability_1d};
use pathsum_core::{BigCount, PathClass1D, PathClassND, PhysicalParams, Truncation};

use crate::commands::stirling_gap;
use crate::output::{Document, Table};
use crate::{Outcome, RunConfig, Scope};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub scope: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    fn at_most(scope: &'static str, name: &'static str, measured: f64, tolerance: f64) -> Self {
        Self {
            scope,
            name,
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }

    /// Pass/fail check with no natural error measure; `measured` counts
    /// violations.
    fn count(scope: &'static str, name: &'static str, violations: usize) -> Self {
        Self::at_most(scope, name, violations as f64, 0.0)
    }

    pub fn id(&self) -> String {
        format!("{}.{}", self.scope, self.name)
    }
}

fn exact_u64(w: &BigCount) -> Option<u64> {
    w.exact().and_then(|e| u64::try_from(e.clone()).ok())
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

pub fn combinatorics() -> Vec<Check> {
    const S: &str = "combinatorics";
    let mut out = Vec::new();
    let reference = [
        (exact_u64(&multiplicity_1d(&PathClass1D::new(2, 1).unwrap())), 4),
        (multiplicity_2d_full(2, 2, 0, 0).ok().and_then(|w| exact_u64(&w)), 6),
        (
            multiplicity_2d_rotated(&PathClassND::planar(2, 0, 1).unwrap())
                .ok()
                .and_then(|w| exact_u64(&w)),
            12,
        ),
    ];
    out.push(Check::count(
        S,
        "reference_counts",
        reference.iter().filter(|(w, want)| *w != Some(*want)).count(),
    ));

    let mut bad = 0;
    for m in 1..=6u64 {
        for j in 0..=4u64 {
            let tally = tally_flip_classes(1, &[m as i64], m + 2 * j).unwrap();
            let w = exact_u64(&multiplicity_1d(&PathClass1D::new(m, j).unwrap()));
            if tally.get(&vec![j]).copied() != w {
                bad += 1;
            }
        }
    }
    out.push(Check::count(S, "enumeration_1d", bad));

    let mut bad = 0;
    for m1 in 1..=3u64 {
        for m2 in 0..=2u64 {
            for flips in 0..=2u64 {
                let tally = tally_flip_classes(2, &[m1 as i64, m2 as i64], m1 + m2 + 2 * flips).unwrap();
                for j in 0..=flips {
                    let k = flips - j;
                    let w = multiplicity_2d_full(m1, m2, j, k).ok().and_then(|w| exact_u64(&w));
                    if tally.get(&vec![j, k]).copied() != w {
                        bad += 1;
                    }
                }
            }
        }
    }
    out.push(Check::count(S, "enumeration_2d", bad));

    let mut bad = 0;
    for m1 in 1..=2u64 {
        for flips in 0..=2u64 {
            let tally = tally_flip_classes(3, &[m1 as i64, 0, 0], m1 + 2 * flips).unwrap();
            for j in 0..=flips {
                for k in 0..=flips - j {
                    let l = flips - j - k;
                    let cls = PathClassND::spatial(m1, j, k, l).unwrap();
                    let w = multiplicity_3d(&cls).ok().and_then(|w| exact_u64(&w));
                    if tally.get(&vec![j, k, l]).copied() != w {
                        bad += 1;
                    }
                }
            }
        }
    }
    out.push(Check::count(S, "enumeration_3d", bad));

    let rate = entropy_rate(&PathClass1D::new(2, 1_000_000).unwrap(), 1.0);
    out.push(Check::at_most(S, "entropy_rate_limit", (rate - 2f64.ln()).abs(), 1e-4));
    out
}

/// `sum_{j,k} exp(-b (m1 + 2j + 2k)^2)` summed directly over a square.
fn double_sum_2d(b: f64, m1: u64, side: u64) -> f64 {
    let mut acc = CompensatedSum::new();
    for j in 0..side {
        for k in 0..side {
            let n = (m1 + 2 * j + 2 * k) as f64;
            acc.add((-b * n * n).exp());
        }
    }
    acc.value()
}

pub fn kernel(cfg: &RunConfig) -> Vec<Check> {
    const S: &str = "kernel";
    let mut out = Vec::new();
    let tight = Truncation::new(1e-15).with_max_terms(cfg.trunc.max_terms);

    let mut worst = 0.0f64;
    for &b in &[0.3, 0.5, 1.0, 2.0] {
        for m1 in 1..=4u64 {
            let reindexed = kernel_sum_2d(b, m1, &tight).map(|s| s.value).unwrap_or(f64::NAN);
            worst = worst.max(rel(double_sum_2d(b, m1, 60), reindexed));
        }
    }
    out.push(Check::at_most(S, "reindexing_2d", worst, 1e-12));

    let mut below = 0;
    for &b in &[0.05, 0.2, 1.0] {
        for m in 1..=5u64 {
            let s = kernel_sum_1d(b, m, &cfg.trunc).map(|s| s.value).unwrap_or(f64::NAN);
            if !(s >= (-b * (m * m) as f64).exp()) {
                below += 1;
            }
        }
    }
    out.push(Check::count(S, "leading_term_bound", below));

    let ms = [1u64, 2, 3];
    let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.01).collect();
    let rows = threshold_scan_on(&ms, &grid, &cfg.trunc).unwrap_or_default();
    let rising = rows
        .windows(2)
        .filter(|w| w[0].m == w[1].m && w[1].ratio > w[0].ratio)
        .count();
    out.push(Check::count(
        S,
        "ratio_monotone",
        rising + if rows.is_empty() { 1 } else { 0 },
    ));
    let at = |bm: f64| {
        ms.iter()
            .map(|&m| {
                kernel_sum_1d(bm / m as f64, m, &tight)
                    .map(|s| s.value * (bm * m as f64).exp())
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0f64, f64::max)
    };
    out.push(Check::at_most(S, "ratio_at_bm_0.5", at(0.5), 1.08));
    out.push(Check::at_most(S, "ratio_at_bm_0.6", at(0.6), 1.05));

    let natural = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let r_h = heat_residual(&natural, 0.5, 1.0, 1e-3).unwrap_or(f64::NAN);
    let r_half = heat_residual(&natural, 0.5, 1.0, 5e-4).unwrap_or(f64::NAN);
    out.push(Check::at_most(S, "heat_residual", r_h, 1e-6));
    out.push(Check::at_most(
        S,
        "heat_convergence_order",
        ((r_h / r_half).log2() - 2.0).abs(),
        0.5,
    ));
    let mass = propagator_mass(&natural, 1.0, 12.0, 4000).unwrap_or(f64::NAN);
    out.push(Check::at_most(S, "propagator_normalization", (mass - 1.0).abs(), 1e-9));
    out
}

pub fn stats(cfg: &RunConfig) -> Vec<Check> {
    const S: &str = "stats";
    let mut out = Vec::new();
    let dx = BigRational::new(BigInt::from(3), BigInt::from(7));
    let mut bad = 0;
    for m in 1..=20u64 {
        for j in 0..=20u64 {
            let mo = moments_1d_exact(&PathClass1D::new(m, j).unwrap(), &dx);
            if mo.variance != mo.mean_square.clone() - mo.mean.clone() * mo.mean.clone() {
                bad += 1;
            }
        }
    }
    out.push(Check::count(S, "variance_identity", bad));

    let ms = [2u64, 5, 10, 50, 100];
    let mut worst = 0.0f64;
    let mut p0 = Vec::new();
    for &m in &ms {
        match probability_1d(m, 0, &cfg.trunc) {
            Ok(t) => {
                worst = worst.max((t.total_probability() - 1.0).abs());
                p0.push(t.entries[0].probability);
            }
            Err(_) => {
                worst = f64::INFINITY;
                p0.push(f64::NAN);
            }
        }
    }
    out.push(Check::at_most(S, "normalization", worst, 1e-10));
    let not_increasing = p0.windows(2).filter(|w| !(w[1] > w[0])).count();
    out.push(Check::count(S, "classical_dominance_increasing", not_increasing));
    let shortfall = if p0[4] >= 0.989 { 0.0 } else { 0.989 - p0[4] };
    out.push(Check::at_most(S, "classical_dominance_m100", shortfall, 0.0));

    let probe = alt_divergence_probe(2, 1.5, 10_000);
    out.push(Check::count(
        S,
        "alternative_diverges",
        usize::from(!probe.map(|p| p.crossed).unwrap_or(false)),
    ));
    out
}

pub fn ensemble() -> Vec<Check> {
    const S: &str = "ensemble";
    let mut out = Vec::new();
    let (mut tanh_err, mut cosh_err) = (0.0f64, 0.0f64);
    for m in 1..=20u64 {
        for j in 1..=20u64 {
            let ens = SpinEnsemble1D::from_path(PathClass1D::new(m, j).unwrap(), 1.0).unwrap();
            let x = ens.reduced_energy();
            let n = (m + 2 * j) as f64;
            tanh_err = tanh_err.max(rel(x.tanh(), m as f64 / n));
            cosh_err = cosh_err.max(rel(x.cosh(), n / (2.0 * ((j * (m + j)) as f64).sqrt())));
        }
    }
    out.push(Check::at_most(S, "tanh_identity", tanh_err, 1e-12));
    out.push(Check::at_most(S, "cosh_identity", cosh_err, 1e-12));

    let gaps: Vec<f64> = [2500u64, 5000, 10_000, 20_000]
        .iter()
        .map(|&s| stirling_gap(2 * s, s).unwrap_or(f64::INFINITY))
        .collect();
    out.push(Check::at_most(S, "stirling_large_n", gaps[0], 0.01));
    out.push(Check::count(
        S,
        "stirling_gap_decreasing",
        gaps.windows(2).filter(|w| !(w[1] < w[0])).count(),
    ));
    out
}

pub fn checks(scope: Scope, cfg: &RunConfig) -> Vec<Check> {
    match scope {
        Scope::Combinatorics => combinatorics(),
        Scope::Kernel => kernel(cfg),
        Scope::Stats => stats(cfg),
        Scope::Ensemble => ensemble(),
        Scope::All => {
            let mut all = combinatorics();
            all.extend(kernel(cfg));
            all.extend(stats(cfg));
            all.extend(ensemble());
            all
        }
    }
}

pub fn run(scope: Scope, cfg: &RunConfig) -> Outcome {
    let checks = checks(scope, cfg);
    let mut t = Table::new(&["check", "passed", "measured", "tolerance"]);
    let failures: Vec<String> = checks.iter().filter(|c| !c.passed).map(Check::id).collect();
    t.meta.push(("checks".into(), (checks.len() as u64).into()));
    t.meta.push(("failed".into(), (failures.len() as u64).into()));
    t.rows = checks
        .iter()
        .map(|c| vec![c.id().into(), c.passed.into(), c.measured.into(), c.tolerance.into()])
        .collect();
    Outcome {
        document: Document::Table(t),
        failures,
    }
}
