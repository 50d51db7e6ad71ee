//! Shared domain types: path classes, physical parameters and the
//! dimensionless reduction used by every other module.
//!
//! Constructors validate eagerly. Once a value of one of these types exists
//! it is known to be valid, so downstream code never re-checks it.

use crate::error::{require_positive, Error, Result};

/// A one-dimensional path class: `m` net forward steps with `j` flips.
///
/// Every member sequence has `m + j` forward and `j` backward steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathClass1D {
    m: u64,
    j: u64,
}

impl PathClass1D {
    pub fn new(m: u64, j: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m", "must be at least 1"));
        }
        j.checked_mul(2)
            .and_then(|two_j| two_j.checked_add(m))
            .ok_or_else(|| Error::invalid("j", "step count m + 2j overflows"))?;
        Ok(Self { m, j })
    }

    /// Minimum number of steps, `d / dx`.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Number of flips.
    pub fn j(&self) -> u64 {
        self.j
    }

    /// Total step count `N_j = m + 2j`.
    pub fn steps(&self) -> u64 {
        self.m + 2 * self.j
    }

    pub fn forward(&self) -> u64 {
        self.m + self.j
    }

    pub fn backward(&self) -> u64 {
        self.j
    }
}

/// A path class in the rotated frame where the displacement lies along the
/// first axis. Net displacement along the transverse axes is zero and is not
/// stored. `l` is present only for three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathClassND {
    m1: u64,
    j: u64,
    k: u64,
    l: Option<u64>,
}

impl PathClassND {
    /// Two-dimensional class `(m1, j, k)`.
    pub fn planar(m1: u64, j: u64, k: u64) -> Result<Self> {
        Self::build(m1, j, k, None)
    }

    /// Three-dimensional class `(m1, j, k, l)`.
    pub fn spatial(m1: u64, j: u64, k: u64, l: u64) -> Result<Self> {
        Self::build(m1, j, k, Some(l))
    }

    fn build(m1: u64, j: u64, k: u64, l: Option<u64>) -> Result<Self> {
        if m1 == 0 {
            return Err(Error::invalid("m1", "must be at least 1"));
        }
        let flips = [j, k, l.unwrap_or(0)]
            .iter()
            .try_fold(0u64, |acc, &f| acc.checked_add(f))
            .and_then(|f| f.checked_mul(2))
            .and_then(|f| f.checked_add(m1));
        if flips.is_none() {
            return Err(Error::invalid("j", "step count overflows"));
        }
        Ok(Self { m1, j, k, l })
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> Option<u64> {
        self.l
    }

    pub fn dimension(&self) -> u8 {
        if self.l.is_some() {
            3
        } else {
            2
        }
    }

    /// Steps along the first axis, `m1 + 2j`.
    pub fn axial_steps(&self) -> u64 {
        self.m1 + 2 * self.j
    }

    /// `N_jk = m1 + 2j + 2k` in 2D, `N_jkl = m1 + 2j + 2k + 2l` in 3D.
    pub fn steps(&self) -> u64 {
        self.m1 + 2 * (self.j + self.k + self.l.unwrap_or(0))
    }
}

/// Physical inputs of the model. Units are whatever the caller picks, as
/// long as they are used consistently; nothing here assumes SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mass: f64,
    dx: f64,
    dy: f64,
    dt: f64,
    hbar: f64,
    kb: f64,
}

impl PhysicalParams {
    /// Builds a parameter set with `dy = dx`.
    pub fn new(mass: f64, dx: f64, dt: f64, hbar: f64, kb: f64) -> Result<Self> {
        Ok(Self {
            mass: require_positive("mass", mass)?,
            dx: require_positive("dx", dx)?,
            dy: dx,
            dt: require_positive("dt", dt)?,
            hbar: require_positive("hbar", hbar)?,
            kb: require_positive("kb", kb)?,
        })
    }

    pub fn with_dy(mut self, dy: f64) -> Result<Self> {
        self.dy = require_positive("dy", dy)?;
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn kb(&self) -> f64 {
        self.kb
    }

    /// Action coefficient `c = M dx^2 / (2 dt)`, so that `S = c N^2`.
    pub fn action_coefficient(&self) -> f64 {
        self.mass * self.dx * self.dx / (2.0 * self.dt)
    }

    /// Dimensionless `b = c / hbar`.
    pub fn b(&self) -> f64 {
        self.action_coefficient() / self.hbar
    }
}

/// Dimensionless kernel parameter `M dx^2 / (2 dt hbar)`.
pub fn dimensionless_b(params: &PhysicalParams) -> f64 {
    params.b()
}

/// Outcome of comparing the step size with the de Broglie wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeBroglieCheck {
    /// `hbar / (M v)` with `v = distance / dt`.
    pub lambda: f64,
    pub velocity: f64,
    /// `dx >= lambda`.
    pub dx_ok: bool,
    /// `lambda <= dx <= distance`.
    pub range_ok: bool,
}

pub fn debroglie_limit(params: &PhysicalParams, distance: f64) -> Result<DeBroglieCheck> {
    let distance = require_positive("distance", distance)?;
    let velocity = distance / params.dt;
    let lambda = params.hbar / (params.mass * velocity);
    let dx_ok = params.dx >= lambda;
    Ok(DeBroglieCheck {
        lambda,
        velocity,
        dx_ok,
        range_ok: dx_ok && params.dx <= distance,
    })
}
