//! Path actions, the Euclidean kernel sums over path classes and the closed
//! form propagator they approach once the step size exceeds the de Broglie
//! wavelength.
//!
//! Kernel sums are unnormalized: the overall constant appears only in
//! [`propagator_closed`]. Terms are summed in ascending flip order with
//! compensated accumulation, so repeated calls are bit-identical.

use std::f64::consts::PI;

use crate::error::{require_positive, Error, Result};
use crate::params::{PathClass1D, PathClassND, PhysicalParams};
use crate::series::{sum_positive_series, ScaledSeries, SumResult, Truncation};

/// `S = c N_j^2`.
pub fn action_1d(params: &PhysicalParams, cls: &PathClass1D) -> f64 {
    let n = cls.steps() as f64;
    params.action_coefficient() * n * n
}

/// `S = M v_j^2 dt / 2` with `v_j = N_j dx / dt`. Same value as
/// [`action_1d`], reached through the path speed.
pub fn action_1d_kinetic(params: &PhysicalParams, cls: &PathClass1D) -> f64 {
    let v = cls.steps() as f64 * params.dx() / params.dt();
    0.5 * params.mass() * v * v * params.dt()
}

/// Rotated-frame 2D action `c (N_j + 2k)^2`. Only defined for `dx == dy`.
pub fn action_2d(params: &PhysicalParams, cls: &PathClassND) -> Result<f64> {
    if cls.l().is_some() {
        return Err(Error::invalid("l", "planar action takes a 2D class"));
    }
    if params.dx() != params.dy() {
        return Err(Error::invalid("dy", "the 2D action requires dy == dx"));
    }
    let n = cls.steps() as f64;
    Ok(params.action_coefficient() * n * n)
}

fn check_series_args(b: f64, m: u64, trunc: &Truncation) -> Result<()> {
    if b.is_nan() || b.is_infinite() {
        return Err(Error::invalid("b", format!("must be finite, got {b}")));
    }
    if b <= 0.0 {
        return Err(Error::Divergent(format!(
            "kernel sum with b = {b} has terms that do not decay"
        )));
    }
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    require_positive("tol", trunc.tol)?;
    if trunc.max_terms == 0 {
        return Err(Error::invalid("max_terms", "must be at least 1"));
    }
    Ok(())
}

fn series_1d(b: f64, m: u64, trunc: &Truncation) -> Result<ScaledSeries> {
    check_series_args(b, m, trunc)?;
    let m = m as f64;
    // Term ratios exp(-4b(m + 2j + 1)) strictly decrease, so the current
    // ratio bounds every later one.
    Ok(sum_positive_series(
        |j| {
            let n = m + 2.0 * j as f64;
            -b * (n * n)
        },
        |_, cur, next| (next - cur).exp(),
        trunc,
    ))
}

fn series_2d(b: f64, m1: u64, trunc: &Truncation) -> Result<ScaledSeries> {
    check_series_args(b, m1, trunc)?;
    let m1 = m1 as f64;
    // Reindexed by n = j + k, which has n + 1 decompositions. The ratio
    // (n + 2)/(n + 1) * exp(-4b(m1 + 2n + 1)) is a product of two strictly
    // decreasing factors.
    Ok(sum_positive_series(
        |n| {
            let steps = m1 + 2.0 * n as f64;
            ((n + 1) as f64).ln() - b * (steps * steps)
        },
        |_, cur, next| (next - cur).exp(),
        trunc,
    ))
}

/// `sum_{j >= 0} exp(-b (m + 2j)^2)`.
pub fn kernel_sum_1d(b: f64, m: u64, trunc: &Truncation) -> Result<SumResult> {
    Ok(series_1d(b, m, trunc)?.into_sum_result())
}

/// `sum_{j, k >= 0} exp(-b (m1 + 2j + 2k)^2)`, evaluated as
/// `sum_n (n + 1) exp(-b (m1 + 2n)^2)`.
pub fn kernel_sum_2d(b: f64, m1: u64, trunc: &Truncation) -> Result<SumResult> {
    Ok(series_2d(b, m1, trunc)?.into_sum_result())
}

/// One point of the convergence scan: the kernel sum against its classical
/// limit `exp(-b m^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelScanRow {
    pub b: f64,
    pub m: u64,
    pub sum_value: f64,
    pub limit_value: f64,
    /// `sum_value / limit_value`, computed directly from the scaled series so
    /// it stays finite when both numbers underflow.
    pub ratio: f64,
    pub truncation_bound: f64,
}

impl KernelScanRow {
    pub fn bm(&self) -> f64 {
        self.b * self.m as f64
    }
}

pub fn scan_row(b: f64, m: u64, trunc: &Truncation) -> Result<KernelScanRow> {
    let series = series_1d(b, m, trunc)?;
    if series.capped {
        return Err(Error::TermLimit {
            max_terms: trunc.max_terms,
        });
    }
    let sum = series.into_sum_result();
    Ok(KernelScanRow {
        b,
        m,
        sum_value: sum.value,
        limit_value: series.log_scale.exp(),
        ratio: series.scaled_value,
        truncation_bound: sum.truncation_bound,
    })
}

/// `n_points` evenly spaced values covering `[b_min, b_max]`.
pub fn b_grid(b_min: f64, b_max: f64, n_points: usize) -> Result<Vec<f64>> {
    require_positive("b_min", b_min)?;
    if !(b_max.is_finite() && b_max > b_min) {
        return Err(Error::invalid(
            "b_max",
            format!("must exceed b_min = {b_min}, got {b_max}"),
        ));
    }
    if n_points < 2 {
        return Err(Error::invalid("n_points", "need at least 2 grid points"));
    }
    let step = (b_max - b_min) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                b_max
            } else {
                b_min + step * i as f64
            }
        })
        .collect())
}

/// Rows for every `m` in `ms` and every `b` in `grid`, ordered by `(m, b)`
/// in input order.
pub fn threshold_scan_on(ms: &[u64], grid: &[f64], trunc: &Truncation) -> Result<Vec<KernelScanRow>> {
    ms.iter()
        .flat_map(|&m| grid.iter().map(move |&b| scan_row(b, m, trunc)))
        .collect()
}

pub fn threshold_scan(
    ms: &[u64],
    b_min: f64,
    b_max: f64,
    n_points: usize,
    trunc: &Truncation,
) -> Result<Vec<KernelScanRow>> {
    threshold_scan_on(ms, &b_grid(b_min, b_max, n_points)?, trunc)
}

/// Normalized Euclidean propagator `sqrt(M / (2 pi hbar t)) exp(-M x^2 / (2 hbar t))`.
pub fn propagator_closed(params: &PhysicalParams, x: f64, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("propagator needs t > 0, got {t}")));
    }
    let (mass, hbar) = (params.mass(), params.hbar());
    Ok((mass / (2.0 * PI * hbar * t)).sqrt() * (-mass * x * x / (2.0 * hbar * t)).exp())
}

/// `|dK/dt - (hbar / 2M) d^2K/dx^2|` from central differences with spacing `h`.
/// Vanishes at second order in `h` because the propagator solves the heat
/// equation.
pub fn heat_residual(params: &PhysicalParams, x: f64, t: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0 && t > 2.0 * h) {
        return Err(Error::Domain(format!("need t > 2h > 0, got t = {t}, h = {h}")));
    }
    let k = |x, t| propagator_closed(params, x, t);
    let dt = (k(x, t + h)? - k(x, t - h)?) / (2.0 * h);
    let dxx = (k(x + h, t)? - 2.0 * k(x, t)? + k(x - h, t)?) / (h * h);
    let diffusion = params.hbar() / (2.0 * params.mass());
    Ok((dt - diffusion * dxx).abs())
}

/// Composite Simpson integral of the propagator over
/// `[-w sigma, w sigma]` with `sigma = sqrt(hbar t / M)`.
pub fn propagator_mass(params: &PhysicalParams, t: f64, half_width_sigmas: f64, intervals: usize) -> Result<f64> {
    require_positive("half_width_sigmas", half_width_sigmas)?;
    if intervals < 2 || !intervals.is_multiple_of(2) {
        return Err(Error::invalid("intervals", "must be even and at least 2"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("propagator needs t > 0, got {t}")));
    }
    let sigma = (params.hbar() * t / params.mass()).sqrt();
    let a = -half_width_sigmas * sigma;
    let h = 2.0 * half_width_sigmas * sigma / intervals as f64;
    let mut acc = crate::series::CompensatedSum::new();
    for i in 0..=intervals {
        let weight = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(weight * propagator_closed(params, a + h * i as f64, t)?);
    }
    Ok(acc.value() * h / 3.0)
}
