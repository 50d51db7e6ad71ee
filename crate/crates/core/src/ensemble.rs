//! Two-level spin ensembles that mirror the path classes: a spin up is a
//! forward step, a spin down a backward one, and the `j`-th ensemble holds
//! `N_j = m + 2j` spins with net moment `m`.
//!
//! Each ensemble's inverse temperature follows from `exp(2 beta E) = (m+j)/j`.
//! The classical path (`j = 0`) has no finite solution and is represented by
//! [`InverseTemperature::Classical`], the zero-temperature limit.
//!
//! Two forms of the large-`N` entropy exist. [`printed_entropy_large_n`]
//! evaluates `N kB (ln cosh(beta E) - beta E tanh(beta E))` literally; it is
//! negative for every finite ensemble here. The entropy actually returned by
//! [`ensemble_entropy_large_n`] is the closed form
//! `kB N [ln(N / sqrt(j(m+j))) - (m / 2N) ln((m+j)/j)]`, which equals the
//! standard two-level result `N kB (ln(2 cosh beta E) - beta E tanh beta E)`.

use crate::error::{Error, Result};
use crate::params::{PathClass1D, PathClassND};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InverseTemperature {
    Finite(f64),
    /// `beta -> inf`: every spin up.
    Classical,
}

impl InverseTemperature {
    pub fn finite(self) -> Option<f64> {
        match self {
            InverseTemperature::Finite(b) => Some(b),
            InverseTemperature::Classical => None,
        }
    }
}

/// `Z = exp(beta E) + exp(-beta E)`.
pub fn partition_1d(beta: f64, energy: f64) -> f64 {
    let x = beta * energy;
    x.exp() + (-x).exp()
}

/// `ln(2 cosh x)` without overflow for large `|x|`.
fn ln_two_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

fn check_energy(name: &'static str, energy: f64) -> Result<f64> {
    if !energy.is_finite() {
        return Err(Error::invalid(name, format!("must be finite, got {energy}")));
    }
    if energy == 0.0 {
        return Err(Error::Domain(format!(
            "{name} = 0 leaves the inverse temperature undetermined"
        )));
    }
    Ok(energy)
}

/// Solves `exp(2 beta E) = (m + j) / j`.
pub fn beta_for_path(m: u64, j: u64, energy: f64) -> Result<InverseTemperature> {
    let energy = check_energy("energy", energy)?;
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    if j == 0 {
        return Ok(InverseTemperature::Classical);
    }
    let ratio = (m + j) as f64 / j as f64;
    Ok(InverseTemperature::Finite(ratio.ln() / (2.0 * energy)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinEnsemble1D {
    class: PathClass1D,
    energy: f64,
    beta: InverseTemperature,
}

impl SpinEnsemble1D {
    pub fn from_path(class: PathClass1D, energy: f64) -> Result<Self> {
        let beta = beta_for_path(class.m(), class.j(), energy)?;
        Ok(Self { class, energy, beta })
    }

    pub fn m(&self) -> u64 {
        self.class.m()
    }

    pub fn j(&self) -> u64 {
        self.class.j()
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn beta(&self) -> InverseTemperature {
        self.beta
    }

    pub fn spins(&self) -> u64 {
        self.class.steps()
    }

    pub fn spins_up(&self) -> u64 {
        self.class.forward()
    }

    pub fn spins_down(&self) -> u64 {
        self.class.backward()
    }

    /// Spin-up probability `p = (m + j) / N`.
    pub fn p_up(&self) -> f64 {
        self.spins_up() as f64 / self.spins() as f64
    }

    /// `beta E`, infinite in the classical limit.
    pub fn reduced_energy(&self) -> f64 {
        match self.beta {
            InverseTemperature::Finite(b) => b * self.energy,
            InverseTemperature::Classical => f64::INFINITY,
        }
    }

    /// Single-spin partition function; infinite in the classical limit.
    pub fn partition(&self) -> f64 {
        match self.beta {
            InverseTemperature::Finite(b) => partition_1d(b, self.energy),
            InverseTemperature::Classical => f64::INFINITY,
        }
    }
}

/// Closed-form large-`N` entropy for `net` spins of excess moment and
/// `flips` down spins. `net = 0` gives the unbiased `2 flips kB ln 2`;
/// zero flips give zero.
pub fn closed_form_entropy(net: u64, flips: u64, kb: f64) -> f64 {
    if flips == 0 {
        return 0.0;
    }
    let (m, j) = (net as f64, flips as f64);
    let n = m + 2.0 * j;
    kb * n * ((n / (j * (m + j)).sqrt()).ln() - m / (2.0 * n) * ((m + j) / j).ln())
}

/// Entropy of the ensemble (closed form); zero for the classical path.
pub fn ensemble_entropy_large_n(ens: &SpinEnsemble1D, kb: f64) -> f64 {
    closed_form_entropy(ens.m(), ens.j(), kb)
}

/// `N kB (ln(2 cosh x) - x tanh x)` at `x = beta E`.
pub fn two_level_entropy(ens: &SpinEnsemble1D, kb: f64) -> f64 {
    match ens.beta {
        InverseTemperature::Classical => 0.0,
        InverseTemperature::Finite(_) => {
            let x = ens.reduced_energy();
            ens.spins() as f64 * kb * (ln_two_cosh(x) - x * x.tanh())
        }
    }
}

/// `N kB (ln cosh x - x tanh x)` at `x = beta E`, evaluated exactly as
/// written. Differs from [`two_level_entropy`] by `N kB ln 2`.
pub fn printed_entropy_large_n(ens: &SpinEnsemble1D, kb: f64) -> f64 {
    match ens.beta {
        InverseTemperature::Classical => 0.0,
        InverseTemperature::Finite(_) => {
            let x = ens.reduced_energy();
            ens.spins() as f64 * kb * (x.cosh().ln() - x * x.tanh())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMoments {
    pub mean: f64,
    pub mean_square: f64,
    pub variance: f64,
}

/// Energy moments from the spin counts: mean `(n_up - n_down) E`, mean
/// square `N^2 E^2`, variance `4 n_up n_down E^2`.
pub fn energy_moments(ens: &SpinEnsemble1D) -> EnergyMoments {
    let e = ens.energy;
    let up = ens.spins_up() as f64;
    let down = ens.spins_down() as f64;
    let n = ens.spins() as f64;
    EnergyMoments {
        mean: (up - down) * e,
        mean_square: n * n * e * e,
        variance: 4.0 * up * down * e * e,
    }
}

/// `Z = 2 cosh(beta1 E1) + 2 cosh(beta2 E2)`.
pub fn partition_2d(beta1: f64, e1: f64, beta2: f64, e2: f64) -> f64 {
    partition_1d(beta1, e1) + partition_1d(beta2, e2)
}

/// Two spin species at separate temperatures. Species 1 carries the axial
/// steps (`N1 = m1 + 2j`), species 2 the transverse flips (`N2 = 2k`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinEnsemble2D {
    class: PathClassND,
    e1: f64,
    e2: f64,
    beta1: InverseTemperature,
    beta2: InverseTemperature,
}

impl SpinEnsemble2D {
    /// Temperatures from the path class: species 1 from
    /// `exp(2 beta1 E1) = (m1+j)/j`; species 2 has equal up and down counts in
    /// the rotated frame, which forces `beta2 = 0`.
    pub fn from_path(class: PathClassND, e1: f64, e2: f64) -> Result<Self> {
        if class.l().is_some() {
            return Err(Error::invalid("l", "two-species ensemble takes a planar class"));
        }
        let beta1 = beta_for_path(class.m1(), class.j(), e1)?;
        check_energy("e2", e2)?;
        Ok(Self {
            class,
            e1,
            e2,
            beta1,
            beta2: InverseTemperature::Finite(0.0),
        })
    }

    /// Explicit temperatures, for checking arbitrary states against the
    /// restriction.
    pub fn with_betas(class: PathClassND, e1: f64, e2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        if class.l().is_some() {
            return Err(Error::invalid("l", "two-species ensemble takes a planar class"));
        }
        for (name, v) in [("e1", e1), ("e2", e2), ("beta1", beta1), ("beta2", beta2)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(Self {
            class,
            e1,
            e2,
            beta1: InverseTemperature::Finite(beta1),
            beta2: InverseTemperature::Finite(beta2),
        })
    }

    pub fn class(&self) -> &PathClassND {
        &self.class
    }

    pub fn beta1(&self) -> InverseTemperature {
        self.beta1
    }

    pub fn beta2(&self) -> InverseTemperature {
        self.beta2
    }

    pub fn n1(&self) -> u64 {
        self.class.axial_steps()
    }

    pub fn n2(&self) -> u64 {
        2 * self.class.k()
    }

    fn log_species(beta: InverseTemperature, energy: f64) -> f64 {
        match beta {
            InverseTemperature::Finite(b) => ln_two_cosh(b * energy),
            InverseTemperature::Classical => f64::INFINITY,
        }
    }

    /// `ln(2 cosh(beta1 E1))`.
    pub fn log_z1(&self) -> f64 {
        Self::log_species(self.beta1, self.e1)
    }

    /// `ln(2 cosh(beta2 E2))`.
    pub fn log_z2(&self) -> f64 {
        Self::log_species(self.beta2, self.e2)
    }
}

/// Checks `Z1 / Z2 = N1 / N2` to relative tolerance `tol`.
pub fn restriction_check(ens: &SpinEnsemble2D, tol: f64) -> Result<bool> {
    if ens.n2() == 0 {
        return Err(Error::Domain("restriction needs k >= 1 (N2 = 0)".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid("tol", format!("must be non-negative, got {tol}")));
    }
    let target = ens.n1() as f64 / ens.n2() as f64;
    let ratio = (ens.log_z1() - ens.log_z2()).exp();
    Ok((ratio - target).abs() <= tol * target)
}

/// `N x ln(1 + y/x)`-style mixing term, with the `x -> 0` limit of zero.
fn mixing(x: u64, y: u64) -> f64 {
    if x == 0 {
        return 0.0;
    }
    let (x, y) = (x as f64, y as f64);
    x * (y / x).ln_1p()
}

/// `ln Z^(N1+N2) = N1 ln Z1 + N2 ln Z2 + N2 ln(1 + N1/N2) + N1 ln(1 + N2/N1)`.
/// Reduces to `N1 ln Z1` when `N2 = 0`.
pub fn combined_partition_2d(ens: &SpinEnsemble2D) -> f64 {
    let (n1, n2) = (ens.n1(), ens.n2());
    let species2 = if n2 == 0 { 0.0 } else { n2 as f64 * ens.log_z2() };
    n1 as f64 * ens.log_z1() + species2 + mixing(n2, n1) + mixing(n1, n2)
}

/// Entropy of the two-species system: the species-1 closed form, the
/// unbiased species-2 term `2k kB ln 2`, and the mixing terms.
pub fn ensemble_entropy_2d(ens: &SpinEnsemble2D, kb: f64) -> f64 {
    let (n1, n2) = (ens.n1(), ens.n2());
    let s1 = closed_form_entropy(ens.class.m1(), ens.class.j(), kb);
    let s2 = closed_form_entropy(0, ens.class.k(), kb);
    s1 + s2 + kb * (mixing(n2, n1) + mixing(n1, n2))
}
