//! One function per subcommand. Each returns a renderable document.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use pathsum_core::combinatorics::{
    entropy_1d, entropy_2d, enumerate_paths, multiplicity_1d, multiplicity_2d_full, multiplicity_3d, walk_paths,
    StepSequence,
};
use pathsum_core::count::multinomial;
use pathsum_core::ensemble::{
    energy_moments, ensemble_entropy_large_n, printed_entropy_large_n, two_level_entropy, InverseTemperature,
    SpinEnsemble1D,
};
use pathsum_core::kernel::{
    b_grid, heat_residual, kernel_sum_1d, kernel_sum_2d, propagator_closed, propagator_mass, threshold_scan_on,
};
use pathsum_core::stats::{alt_divergence_probe, probability_1d, probability_2d};
use pathsum_core::{debroglie_limit, BigCount, PathClass1D, PathClassND, PhysicalParams};

use crate::output::{round_to_digits, Document, Report, Table, Value};
use crate::{CliError, Outcome, RunConfig};

/// Reported value of `P_2d(1, 1, 1)`, 0.03%.
pub const QUOTED_P2D: f64 = 3e-4;
pub const CODATA_HBAR: f64 = 1.054_571_817e-34;
pub const CODATA_KB: f64 = 1.380_649e-23;

fn count_value(w: &BigCount) -> Value {
    match w.exact() {
        Some(e) => Value::Big(e.to_string()),
        None => Value::Str(format!("exp({})", w.log_value())),
    }
}

pub fn multiplicity(dim: u8, m: Option<u64>, m2: u64, j: u64, k: u64, l: u64, kb: f64) -> Result<Document, CliError> {
    let m = m.ok_or_else(|| CliError::usage("invalid parameter `m`: required (use --m or --m1)"))?;
    let mut r = Report::default();
    let (w, entropy) = match dim {
        1 => {
            let cls = PathClass1D::new(m, j)?;
            r.push("steps", cls.steps());
            (multiplicity_1d(&cls), entropy_1d(&cls, kb))
        }
        2 => {
            let w = multiplicity_2d_full(m, m2, j, k)?;
            r.push("steps", m + m2 + 2 * j + 2 * k);
            (w, entropy_2d(m, m2, j, k, kb)?)
        }
        3 => {
            let cls = PathClassND::spatial(m, j, k, l)?;
            r.push("steps", cls.steps());
            let w = multiplicity_3d(&cls)?;
            let s = kb * w.log_value();
            (w, s)
        }
        other => {
            return Err(CliError::usage(format!(
                "invalid parameter `dim`: must be 1, 2 or 3, got {other}"
            )))
        }
    };
    let mut out = Report::default();
    out.push("W", count_value(&w));
    out.push("ln_W", w.log_value());
    out.push("entropy", entropy);
    out.fields.extend(r.fields);
    Ok(Document::Report(out))
}

/// Number of sequences with the given net displacement and length, summed
/// over every split of the spare steps into per-axis flips.
pub fn expected_path_count(net: &[i64], total: u64) -> Option<BigUint> {
    let base: u64 = net.iter().map(|v| v.unsigned_abs()).sum();
    if total < base || !(total - base).is_multiple_of(2) {
        return Some(BigUint::default());
    }
    let flips = (total - base) / 2;
    let mut sum = BigUint::default();
    let mut split = vec![0u64; net.len()];
    loop {
        if split.iter().sum::<u64>() == flips {
            let parts: Vec<u64> = net
                .iter()
                .zip(&split)
                .flat_map(|(n, f)| [n.unsigned_abs() + f, *f])
                .collect();
            sum += multinomial(&parts).exact()?.clone();
        }
        // Odometer over all splits with entries up to `flips`.
        let mut axis = 0;
        loop {
            if axis == split.len() {
                return Some(sum);
            }
            if split[axis] < flips {
                split[axis] += 1;
                break;
            }
            split[axis] = 0;
            axis += 1;
        }
    }
}

/// Size of the single flip class `flips` (zero when the flips do not fit
/// the length).
fn expected_class_count(net: &[i64], total: u64, flips: &[u64]) -> Option<BigUint> {
    let used: u64 = net.iter().zip(flips).map(|(n, f)| n.unsigned_abs() + 2 * f).sum();
    if used != total {
        return Some(BigUint::default());
    }
    let parts: Vec<u64> = net
        .iter()
        .zip(flips)
        .flat_map(|(n, f)| [n.unsigned_abs() + f, *f])
        .collect();
    multinomial(&parts).exact().cloned()
}

pub fn paths(dim: u8, net: &[i64], total: u64, flips: Option<&[u64]>, cap: usize) -> Result<Outcome, CliError> {
    if !(1..=3).contains(&dim) {
        return Err(CliError::usage(format!(
            "invalid parameter `dim`: must be 1, 2 or 3, got {dim}"
        )));
    }
    if net.len() != dim as usize {
        return Err(CliError::usage(format!(
            "invalid parameter `net`: expected {dim} components, got {}",
            net.len()
        )));
    }
    if let Some(f) = flips {
        if f.len() != net.len() {
            return Err(CliError::usage(format!(
                "invalid parameter `flips`: expected {dim} components, got {}",
                f.len()
            )));
        }
    }
    let expected = match flips {
        Some(f) => expected_class_count(net, total, f),
        None => expected_path_count(net, total),
    }
    .ok_or_else(|| CliError::cap(format!("enumeration cap of {cap} sequences exceeded")))?;
    if expected > BigUint::from(cap) {
        return Err(CliError::cap(format!(
            "enumeration cap of {cap} sequences exceeded ({expected} sequences)"
        )));
    }
    let seqs = match flips {
        None => enumerate_paths(dim, net, total, cap)?,
        Some(f) => {
            let mut out = Vec::new();
            walk_paths(dim, net, total, |steps| {
                let seq = StepSequence::new(steps.to_vec());
                if seq.flips(dim) == f {
                    out.push(seq);
                }
                if out.len() > cap {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            if out.len() > cap {
                return Err(CliError::cap(format!("enumeration cap of {cap} sequences exceeded")));
            }
            out
        }
    };
    let mut r = Report::default();
    r.push("count", seqs.len() as u64);
    r.push("expected", Value::Big(expected.to_string()));
    let matches = BigUint::from(seqs.len()) == expected;
    r.push("matches_formula", matches);
    let lines = seqs.iter().map(|s| s.to_string()).collect();
    let mut outcome = Outcome::ok(Document::Lines(r, lines));
    if !matches {
        outcome.failures.push("paths.count_matches_formula".into());
    }
    Ok(outcome)
}

pub fn kernel(dim: u8, b: f64, m: u64, cfg: &RunConfig) -> Result<Document, CliError> {
    let sum = match dim {
        1 => kernel_sum_1d(b, m, &cfg.trunc)?,
        2 => kernel_sum_2d(b, m, &cfg.trunc)?,
        other => {
            return Err(CliError::usage(format!(
                "invalid parameter `dim`: must be 1 or 2, got {other}"
            )))
        }
    };
    if sum.diverged {
        return Err(CliError::cap(format!(
            "series did not converge within {} terms",
            cfg.trunc.max_terms
        )));
    }
    let mut r = Report::default();
    r.push("dim", dim as u64)
        .push("b", b)
        .push("m", m)
        .push("sum", sum.value)
        .push("truncation_bound", sum.truncation_bound)
        .push("terms", sum.terms_used as u64);
    Ok(Document::Report(r))
}

fn check_ms(ms: &[u64]) -> Result<(), CliError> {
    if ms.is_empty() {
        return Err(CliError::usage("invalid parameter `m`: need at least one value"));
    }
    if ms.contains(&0) {
        return Err(CliError::usage("invalid parameter `m`: must be at least 1"));
    }
    Ok(())
}

/// Grid values are rounded to the printed precision first, so every `b` in
/// the file is exactly the value the row was computed from.
pub fn fig2(ms: &[u64], b_min: f64, b_max: f64, n_points: usize, cfg: &RunConfig) -> Result<Document, CliError> {
    check_ms(ms)?;
    let grid: Vec<f64> = b_grid(b_min, b_max, n_points)?
        .into_iter()
        .map(|b| round_to_digits(b, cfg.digits))
        .collect();
    let rows = threshold_scan_on(ms, &grid, &cfg.trunc)?;
    let mut t = Table::new(&["m", "b", "bm", "sum", "limit", "ratio"]);
    t.meta.push(("tol".into(), cfg.trunc.tol.into()));
    t.meta.push(("digits".into(), (cfg.digits as u64).into()));
    t.rows = rows
        .iter()
        .map(|r| {
            vec![
                r.m.into(),
                r.b.into(),
                r.bm().into(),
                r.sum_value.into(),
                r.limit_value.into(),
                r.ratio.into(),
            ]
        })
        .collect();
    Ok(Document::Table(t))
}

pub fn fig3(ms: &[u64], j_max: u64, cfg: &RunConfig) -> Result<Document, CliError> {
    check_ms(ms)?;
    let mut t = Table::new(&["m", "j", "probability"]);
    t.meta.push(("tol".into(), cfg.trunc.tol.into()));
    for &m in ms {
        let table = probability_1d(m, j_max, &cfg.trunc)?;
        t.meta.push((format!("normalization_m{m}"), table.normalization.into()));
        t.meta.push((format!("tail_bound_m{m}"), table.tail_bound.into()));
        t.rows.extend(
            table
                .entries
                .iter()
                .map(|e| vec![m.into(), e.j.into(), e.probability.into()]),
        );
    }
    Ok(Document::Table(t))
}

pub fn prob2d(m1: u64, j: u64, k: u64, reference: f64, cfg: &RunConfig) -> Result<Document, CliError> {
    PathClassND::planar(m1, j, k)?;
    let table = probability_2d(m1, j + k, &cfg.trunc)?;
    let entry = table
        .get(j, Some(k))
        .expect("table lists every class up to the requested diagonal");
    let p = entry.probability;
    // The true normalizer is at most normalization * (1 + tail_bound).
    let lower = p / (1.0 + table.tail_bound);
    let mut r = Report::default();
    r.push("m1", m1).push("j", j).push("k", k);
    r.push("multiplicity", count_value(&entry.multiplicity));
    if let Some(w) = entry.exact_weight() {
        r.push("weight_exact", w.to_string());
    }
    r.push("weight", entry.weight)
        .push("normalization", table.normalization)
        .push("tail_bound", table.tail_bound)
        .push("probability", p)
        .push("probability_lower", lower)
        .push("reference", reference)
        .push("ratio_to_reference", p / reference);
    let agrees = reference >= lower && reference <= p;
    r.push("agrees_with_reference", agrees);
    r.note(format!(
        "computed probability {:.6}% versus the quoted {:.6}%; {}",
        100.0 * p,
        100.0 * reference,
        if agrees {
            "consistent within the truncation bound"
        } else {
            "the quoted value is not reproduced by the 1/W normalization"
        }
    ));
    Ok(Document::Report(r))
}

pub fn alt(m: u64, target: f64, j_cap: u64) -> Result<Document, CliError> {
    let probe = alt_divergence_probe(m, target, j_cap)?;
    let mut r = Report::default();
    r.push("m", m)
        .push("target", target)
        .push("j_cap", j_cap)
        .push("crossed", probe.crossed)
        .push("at_j", probe.at_j)
        .push("partial_sum", probe.partial_sum);
    Ok(Document::Report(r))
}

/// Relative gap between the closed-form entropy and `kB ln W`.
pub fn stirling_gap(m: u64, j: u64) -> Result<f64, CliError> {
    let cls = PathClass1D::new(m, j)?;
    let exact = entropy_1d(&cls, 1.0);
    let closed = pathsum_core::ensemble::closed_form_entropy(m, j, 1.0);
    Ok(if exact == 0.0 {
        closed.abs()
    } else {
        ((closed - exact) / exact).abs()
    })
}

pub fn ensemble(m: u64, j: u64, energy: f64, kb: f64) -> Result<Document, CliError> {
    let cls = PathClass1D::new(m, j)?;
    let ens = SpinEnsemble1D::from_path(cls, energy)?;
    let mut r = Report::default();
    r.push("m", m)
        .push("j", j)
        .push("spins", ens.spins())
        .push("spins_up", ens.spins_up())
        .push("spins_down", ens.spins_down());
    match ens.beta() {
        InverseTemperature::Classical => {
            r.push("beta", "inf");
            r.push("classical", true);
            r.push("entropy", 0.0);
            r.note("classical limit: zero flips, every spin up, beta -> infinity");
            return Ok(Document::Report(r));
        }
        InverseTemperature::Finite(beta) => {
            r.push("beta", beta);
            r.push("classical", false);
        }
    }
    let closed = ensemble_entropy_large_n(&ens, kb);
    let two_level = two_level_entropy(&ens, kb);
    let printed = printed_entropy_large_n(&ens, kb);
    let exact = entropy_1d(&cls, kb);
    let moments = energy_moments(&ens);
    let gap = stirling_gap(m, j)?;
    r.push("partition", ens.partition())
        .push("p_up", ens.p_up())
        .push("entropy", closed)
        .push("entropy_two_level", two_level)
        .push("entropy_ln_cosh_form", printed)
        .push("entropy_exact", exact)
        .push("stirling_relative_gap", gap)
        .push("stirling_within_1pct", gap <= 0.01)
        .push("energy_mean", moments.mean)
        .push("energy_mean_square", moments.mean_square)
        .push("energy_variance", moments.variance);
    let sign_mismatch = closed.signum() != printed.signum();
    r.push("entropy_forms_disagree_in_sign", sign_mismatch);
    if sign_mismatch {
        r.note("the ln-cosh form of the large-N entropy is negative; it omits N kB ln 2 relative to the closed form");
    }
    Ok(Document::Report(r))
}

pub fn physical(mass: f64, dx: f64, dt: f64, hbar: f64, kb: f64, distance: Option<f64>) -> Result<Document, CliError> {
    let p = PhysicalParams::new(mass, dx, dt, hbar, kb)?;
    let mut r = Report::default();
    r.push("b", p.b()).push("action_coefficient", p.action_coefficient());
    if let Some(d) = distance {
        let check = debroglie_limit(&p, d)?;
        r.push("velocity", check.velocity)
            .push("lambda", check.lambda)
            .push("dx_ok", check.dx_ok)
            .push("range_ok", check.range_ok);
    }
    Ok(Document::Report(r))
}

pub fn propagator(mass: f64, hbar: f64, x: f64, t: f64, h: f64) -> Result<Document, CliError> {
    let p = PhysicalParams::new(mass, 1.0, 1.0, hbar, 1.0)?;
    let value = propagator_closed(&p, x, t)?;
    let r_h = heat_residual(&p, x, t, h)?;
    let r_half = heat_residual(&p, x, t, h / 2.0)?;
    let norm = propagator_mass(&p, t, 12.0, 4000)?;
    let mut r = Report::default();
    r.push("x", x)
        .push("t", t)
        .push("value", value)
        .push("h", h)
        .push("heat_residual", r_h)
        .push("heat_residual_half_h", r_half)
        .push("convergence_order", (r_h / r_half).log2())
        .push("normalization", norm);
    Ok(Document::Report(r))
}
