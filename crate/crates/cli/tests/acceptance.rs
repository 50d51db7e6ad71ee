//! Acceptance criteria, one PASS/FAIL line each. Every quantitative check is
//! compared against an oracle computed independently of the library path it
//! exercises: brute-force enumeration, log-gamma from `statrs`, frozen
//! high-precision sums, or direct double summation.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use pathsum_core::combinatorics::{
    entropy_rate, multiplicity_1d, multiplicity_2d_full, multiplicity_2d_rotated, tally_flip_classes,
};
use pathsum_core::ensemble::{closed_form_entropy, SpinEnsemble1D};
use pathsum_core::kernel::{
    b_grid, heat_residual, kernel_sum_1d, kernel_sum_2d, propagator_closed, propagator_mass, threshold_scan_on,
};
use pathsum_core::series::CompensatedSum;
use pathsum_core::stats::{alt_divergence_probe, moments_1d_exact, probability_1d};
use pathsum_core::{BigCount, PathClass1D, PathClassND, PhysicalParams, Truncation};
use statrs::function::gamma::ln_gamma;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn exact_u64(w: &BigCount) -> Option<u64> {
    w.exact().and_then(|e| u64::try_from(e.clone()).ok())
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ground_truth() -> Outcome {
    let w1 = exact_u64(&multiplicity_1d(&PathClass1D::new(2, 1).unwrap()));
    let w4 = exact_u64(&multiplicity_2d_full(2, 2, 0, 0).unwrap());
    let w5 = exact_u64(&multiplicity_2d_rotated(&PathClassND::planar(2, 0, 1).unwrap()).unwrap());
    outcome(
        (w1, w4, w5) == (Some(4), Some(6), Some(12)),
        format!("W1d(1,2)={w1:?} W2d(2,2,0,0)={w4:?} W2d_rot(2,0,1)={w5:?}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for m in 1..=6u64 {
        for j in 0..=4u64 {
            let tally = tally_flip_classes(1, &[m as i64], m + 2 * j).unwrap();
            let w = exact_u64(&multiplicity_1d(&PathClass1D::new(m, j).unwrap()));
            checked += 1;
            if tally.get(&vec![j]).copied() != w {
                mismatches.push(format!("1d({m},{j})"));
            }
        }
    }
    for m1 in 1..=4u64 {
        for m2 in 0..=3u64 {
            for flips in 0..=4u64 {
                let tally = tally_flip_classes(2, &[m1 as i64, m2 as i64], m1 + m2 + 2 * flips).unwrap();
                for j in flips.saturating_sub(2)..=flips.min(2) {
                    let k = flips - j;
                    let w = exact_u64(&multiplicity_2d_full(m1, m2, j, k).unwrap());
                    checked += 1;
                    if tally.get(&vec![j, k]).copied() != w {
                        mismatches.push(format!("2d({m1},{m2},{j},{k})"));
                    }
                }
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{checked} classes enumerated, mismatches: {mismatches:?}"),
    )
}

/// Ratios `sum_j exp(-b((m+2j)^2 - m^2))` to 25 digits.
const RATIO_ORACLE: [(u64, f64, f64); 9] = [
    (1, 0.5, 1.018_321_783_138_839),
    (2, 0.25, 1.050_122_836_935_838_9),
    (3, 0.5 / 3.0, 1.070_762_237_058_450_4),
    (1, 0.6, 1.008_230_304_439_7),
    (2, 0.3, 1.027_391_466_414_073_8),
    (3, 0.2, 1.041_098_224_183_634_4),
    (1, 0.01, 4.475_668_270_640_233_5),
    (2, 1.0, 1.000_006_144_212_366),
    (3, 2.0, 1.000_000_000_000_012_7),
];

fn fig2() -> Outcome {
    let trunc = Truncation::new(1e-15);
    let ms = [1u64, 2, 3];
    let rows = threshold_scan_on(&ms, &b_grid(0.01, 2.0, 400).unwrap(), &trunc).unwrap();
    let rising = rows
        .windows(2)
        .filter(|w| w[0].m == w[1].m && w[1].ratio > w[0].ratio)
        .count();
    let mut worst_oracle = 0.0f64;
    for &(m, b, want) in &RATIO_ORACLE {
        let got = threshold_scan_on(&[m], &[b], &trunc).unwrap()[0].ratio;
        worst_oracle = worst_oracle.max((got - want).abs());
    }
    let at = |bm: f64| {
        ms.iter()
            .map(|&m| threshold_scan_on(&[m], &[bm / m as f64], &trunc).unwrap()[0].ratio)
            .fold(0.0f64, f64::max)
    };
    let (r05, r06) = (at(0.5), at(0.6));
    outcome(
        rising == 0 && r05 <= 1.08 && r06 <= 1.05 && worst_oracle <= 1e-9,
        format!(
            "{} rows, {rising} increases; max ratio {r05:.6} at bm=0.5, {r06:.6} at bm=0.6; oracle error {worst_oracle:.1e}",
            rows.len()
        ),
    )
}

fn entropy_rate_limit() -> Outcome {
    let cls = PathClass1D::new(2, 1_000_000).unwrap();
    let rate = entropy_rate(&cls, 1.0);
    let oracle = ln_choose(cls.steps(), cls.backward()) / cls.steps() as f64;
    let err = (rate - 2f64.ln()).abs();
    outcome(
        err <= 1e-4 && rel(rate, oracle) <= 1e-12,
        format!(
            "|s/N - ln 2| = {err:.3e}, log-gamma oracle rel err {:.1e}",
            rel(rate, oracle)
        ),
    )
}

fn classical_limit() -> Outcome {
    let trunc = Truncation::new(1e-14);
    let ms = [2u64, 5, 10, 50, 100];
    let mut p0 = Vec::new();
    let mut worst_norm = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut tails_ok = true;
    for &m in &ms {
        let table = probability_1d(m, 0, &trunc).unwrap();
        worst_norm = worst_norm.max((table.total_probability() - 1.0).abs());
        tails_ok &= table.tail_bound.is_finite() && table.tail_bound <= 1e-10;
        // Direct sum of 1/C(m+2j, j); terms fall by at least 4x per step.
        let z: f64 = (0..200u64)
            .map(|j| (-ln_choose(m + 2 * j, j)).exp())
            .collect::<CompensatedSum>()
            .value();
        let p = table.entries[0].probability;
        worst_oracle = worst_oracle.max(rel(p, 1.0 / z));
        p0.push(p);
    }
    let increasing = p0.windows(2).all(|w| w[1] > w[0]);
    outcome(
        p0[4] >= 0.989 && increasing && worst_norm <= 1e-10 && tails_ok && worst_oracle <= 1e-10,
        format!(
            "P(0,100) = {:.5}, increasing {increasing}, |sum-1| {worst_norm:.1e}, oracle rel err {worst_oracle:.1e}",
            p0[4]
        ),
    )
}

fn moment_identity() -> Outcome {
    let dx = BigRational::new(BigInt::from(5), BigInt::from(3));
    let mut bad = 0;
    for m in 1..=20u64 {
        for j in 0..=20u64 {
            let mo = moments_1d_exact(&PathClass1D::new(m, j).unwrap(), &dx);
            let identity = mo.variance == mo.mean_square.clone() - mo.mean.clone() * mo.mean.clone();
            let coefficient = BigRational::new(BigInt::from(4 * j * (m + j)), BigInt::from(m * m));
            let matches = mo.variance.clone() / (mo.mean.clone() * mo.mean.clone()) == coefficient;
            if !(identity && matches) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("441 classes, {bad} violations"))
}

fn alternative_divergence() -> Outcome {
    let probe = alt_divergence_probe(2, 1.5, 10_000).unwrap();
    // Independent partial sums: C(N, j) p^(m+j) q^j.
    let mut sum = 0.0;
    let mut oracle_j = None;
    for j in 0..=10_000u64 {
        let n = (2 + 2 * j) as f64;
        let (up, down) = ((2 + j) as f64, j as f64);
        let log = ln_choose(2 + 2 * j, j) + up * (up / n).ln() + if j == 0 { 0.0 } else { down * (down / n).ln() };
        sum += log.exp();
        if sum > 1.5 {
            oracle_j = Some(j);
            break;
        }
    }
    outcome(
        probe.crossed && oracle_j == Some(probe.at_j),
        format!(
            "partial sum {:.4} > 1.5 at j = {} (oracle j = {oracle_j:?})",
            probe.partial_sum, probe.at_j
        ),
    )
}

fn ensemble_identities() -> Outcome {
    let (mut tanh_err, mut cosh_err) = (0.0f64, 0.0f64);
    for m in 1..=30u64 {
        for j in 1..=30u64 {
            let ens = SpinEnsemble1D::from_path(PathClass1D::new(m, j).unwrap(), 0.7).unwrap();
            let x = ens.reduced_energy();
            let n = (m + 2 * j) as f64;
            tanh_err = tanh_err.max(rel(x.tanh(), m as f64 / n));
            cosh_err = cosh_err.max(rel(x.cosh(), n / (2.0 * ((j * (m + j)) as f64).sqrt())));
        }
    }
    let gaps: Vec<f64> = [2500u64, 5000, 10_000, 50_000, 250_000]
        .iter()
        .map(|&s| {
            let (m, j) = (2 * s, s);
            let exact = ln_choose(m + 2 * j, j);
            rel(closed_form_entropy(m, j, 1.0), exact)
        })
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        tanh_err <= 1e-12 && cosh_err <= 1e-12 && gaps[0] <= 0.01 && decreasing,
        format!(
            "tanh err {tanh_err:.1e}, cosh err {cosh_err:.1e}, Stirling gap {:.2e} at N=1e4 down to {:.2e}",
            gaps[0],
            gaps[gaps.len() - 1]
        ),
    )
}

fn heat_equation() -> Outcome {
    let p = PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let (x, t) = (0.5, 1.0);
    let r1 = heat_residual(&p, x, t, 1e-3).unwrap();
    let r2 = heat_residual(&p, x, t, 5e-4).unwrap();
    let order = (r1 / r2).log2();
    let mut worst_norm = 0.0f64;
    let mut worst_value = 0.0f64;
    for &(mass, hbar, t) in &[(1.0, 1.0, 1.0), (2.5, 0.3, 0.7), (0.1, 4.0, 3.0)] {
        let q = PhysicalParams::new(mass, 1.0, 1.0, hbar, 1.0).unwrap();
        worst_norm = worst_norm.max((propagator_mass(&q, t, 12.0, 4000).unwrap() - 1.0).abs());
        let x: f64 = 0.8;
        let direct = (mass / (2.0 * std::f64::consts::PI * hbar * t)).sqrt() * (-mass * x * x / (2.0 * hbar * t)).exp();
        worst_value = worst_value.max(rel(propagator_closed(&q, x, t).unwrap(), direct));
    }
    outcome(
        r1 <= 1e-6 && (order - 2.0).abs() <= 0.5 && worst_norm <= 1e-9 && worst_value <= 1e-14,
        format!("residual {r1:.2e} at h=1e-3, order {order:.3}, |mass-1| {worst_norm:.1e}"),
    )
}

fn reindexing() -> Outcome {
    let trunc = Truncation::new(1e-16);
    let mut worst = 0.0f64;
    for &b in &[0.1, 0.25, 0.5, 1.0, 2.0] {
        for m1 in 1..=5u64 {
            let mut acc = CompensatedSum::new();
            for j in 0..150u64 {
                for k in 0..150u64 {
                    let n = (m1 + 2 * j + 2 * k) as f64;
                    acc.add((-b * n * n).exp());
                }
            }
            let reindexed = kernel_sum_2d(b, m1, &trunc).unwrap().value;
            worst = worst.max(rel(acc.value(), reindexed));
        }
    }
    let one_d_ok = kernel_sum_1d(0.5, 1, &trunc).unwrap().value > 0.0;
    outcome(
        worst <= 1e-12 && one_d_ok,
        format!("max rel diff {worst:.2e} over 25 (b, m1) points"),
    )
}

fn prob2d_report() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_pathsum"))
            .args(["prob2d", "--m1", "1", "--j", "1", "--k", "1", "--format", "json"])
            .env_remove("PATHSUM_MAX_TERMS")
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        serde_json::from_slice::<serde_json::Value>(&out.stdout).expect("json report")
    };
    let (a, b) = (run(), run());
    let p = |v: &serde_json::Value| v["probability"].as_f64().unwrap();
    let tail = a["tail_bound"].as_f64().unwrap();
    let reported = a.get("reference").is_some() && a.get("agrees_with_reference").is_some() && a.get("notes").is_some();
    outcome(
        (p(&a) - p(&b)).abs() <= 1e-9 && tail.is_finite() && tail < 1e-9 && reported,
        format!(
            "P_2d(1,1,1) = {:.10} (tail bound {tail:.1e}), reference 0.0003, agrees: {}",
            p(&a),
            a["agrees_with_reference"]
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 11] = [
        ("1 combinatorial ground truth", ground_truth, Duration::from_secs(1)),
        ("2 oracle equivalence", oracle_equivalence, Duration::from_secs(60)),
        ("3 convergence scan", fig2, Duration::from_secs(5)),
        ("4 entropy-rate limit", entropy_rate_limit, Duration::from_secs(1)),
        ("5 classical-limit probability", classical_limit, Duration::from_secs(5)),
        ("6 moment identity", moment_identity, Duration::from_secs(1)),
        (
            "7 alternative probability divergence",
            alternative_divergence,
            Duration::from_secs(1),
        ),
        ("8 ensemble identities", ensemble_identities, Duration::from_secs(5)),
        ("9 heat-equation residual", heat_equation, Duration::from_secs(1)),
        ("10 2D kernel reindexing", reindexing, Duration::from_secs(5)),
        // Two process launches; the budget covers the builds' startup cost.
        ("11 2D probability report", prob2d_report, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let passed = result.passed && elapsed <= budget;
        if !passed {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.3} s, budget {} s]",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
