//! Multiplicities and entropies of path classes in one, two and three
//! dimensions, plus a brute-force enumerator of step sequences used as an
//! independent check of every closed form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use crate::count::{multinomial, BigCount};
use crate::error::{Error, Result};
use crate::params::{PathClass1D, PathClassND};

/// Default bound on the number of sequences [`enumerate_paths`] returns.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// `W_1d = N! / ((m + j)! j!)`.
pub fn multiplicity_1d(cls: &PathClass1D) -> BigCount {
    multinomial(&[cls.forward(), cls.backward()])
}

/// `kB ln W_1d`. Zero for the classical path.
pub fn entropy_1d(cls: &PathClass1D, kb: f64) -> f64 {
    if cls.j() == 0 {
        return 0.0;
    }
    kb * multiplicity_1d(cls).log_value()
}

/// Entropy per step, `s / N_j`. Tends to `kB ln 2` as `j` grows.
pub fn entropy_rate(cls: &PathClass1D, kb: f64) -> f64 {
    if cls.j() == 0 {
        return 0.0;
    }
    entropy_1d(cls, kb) / cls.steps() as f64
}

/// Unrotated 2D count for a displacement `(m1, m2)` with `j` flips along x
/// and `k` along y.
pub fn multiplicity_2d_full(m1: u64, m2: u64, j: u64, k: u64) -> Result<BigCount> {
    if m1 == 0 {
        return Err(Error::invalid("m1", "must be at least 1"));
    }
    Ok(multinomial(&[m1 + j, j, m2 + k, k]))
}

/// Rotated-frame 2D count, `(m1 + 2j + 2k)! / ((m1 + j)! j! (k!)^2)`.
pub fn multiplicity_2d_rotated(cls: &PathClassND) -> Result<BigCount> {
    if cls.l().is_some() {
        return Err(Error::invalid("l", "a planar class has no third axis"));
    }
    Ok(multinomial(&[cls.m1() + cls.j(), cls.j(), cls.k(), cls.k()]))
}

/// Rotated-frame 3D count, `(m1 + 2j + 2k + 2l)! / ((m1 + j)! j! (k!)^2 (l!)^2)`.
pub fn multiplicity_3d(cls: &PathClassND) -> Result<BigCount> {
    let l = cls
        .l()
        .ok_or_else(|| Error::invalid("l", "a spatial class needs the third-axis flip count"))?;
    Ok(multinomial(&[cls.m1() + cls.j(), cls.j(), cls.k(), cls.k(), l, l]))
}

/// `kB ln W_2d` for the unrotated count.
pub fn entropy_2d(m1: u64, m2: u64, j: u64, k: u64, kb: f64) -> Result<f64> {
    let w = multiplicity_2d_full(m1, m2, j, k)?;
    Ok(kb * w.log_value())
}

/// One unit move along an axis (0 = x, 1 = y, 2 = z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub axis: u8,
    pub forward: bool,
}

impl Step {
    pub fn delta(&self) -> i64 {
        if self.forward {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.forward { '+' } else { '-' };
        let axis = ['x', 'y', 'z'][self.axis as usize];
        write!(f, "{sign}{axis}")
    }
}

/// A concrete member of a path class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepSequence {
    steps: Vec<Step>,
}

impl StepSequence {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Net displacement per axis.
    pub fn net(&self, dimension: u8) -> Vec<i64> {
        net_of(&self.steps, dimension)
    }

    /// Flips per axis: `(steps on axis - |net on axis|) / 2`.
    pub fn flips(&self, dimension: u8) -> Vec<u64> {
        flips_of(&self.steps, dimension)
    }
}

impl fmt::Display for StepSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn net_of(steps: &[Step], dimension: u8) -> Vec<i64> {
    let mut net = vec![0i64; dimension as usize];
    for s in steps {
        net[s.axis as usize] += s.delta();
    }
    net
}

fn flips_of(steps: &[Step], dimension: u8) -> Vec<u64> {
    let mut on_axis = vec![0u64; dimension as usize];
    for s in steps {
        on_axis[s.axis as usize] += 1;
    }
    net_of(steps, dimension)
        .iter()
        .zip(on_axis)
        .map(|(n, count)| (count - n.unsigned_abs()) / 2)
        .collect()
}

fn validate_target(dimension: u8, net: &[i64], total_steps: u64) -> Result<()> {
    if !(1..=3).contains(&dimension) {
        return Err(Error::invalid(
            "dimension",
            format!("must be 1, 2 or 3, got {dimension}"),
        ));
    }
    if net.len() != dimension as usize {
        return Err(Error::invalid(
            "net",
            format!("expected {dimension} components, got {}", net.len()),
        ));
    }
    let minimum: u64 = net.iter().map(|n| n.unsigned_abs()).sum();
    if minimum > total_steps {
        return Err(Error::invalid(
            "total_steps",
            format!("{total_steps} steps cannot cover a net displacement of {minimum}"),
        ));
    }
    if !(total_steps - minimum).is_multiple_of(2) {
        return Err(Error::invalid(
            "total_steps",
            "parity of total steps does not match the net displacement",
        ));
    }
    Ok(())
}

/// Visits every step sequence of length `total_steps` whose net displacement
/// is `net`, in lexicographic order of `(axis, backward-first)`. Returns the
/// number of sequences visited; the visitor can stop the walk early.
pub fn walk_paths<V>(dimension: u8, net: &[i64], total_steps: u64, mut visit: V) -> Result<u64>
where
    V: FnMut(&[Step]) -> ControlFlow<()>,
{
    validate_target(dimension, net, total_steps)?;
    let moves: Vec<Step> = (0..dimension)
        .flat_map(|axis| [false, true].into_iter().map(move |forward| Step { axis, forward }))
        .collect();
    let mut walker = Walker {
        moves: &moves,
        remaining: net.to_vec(),
        prefix: Vec::with_capacity(total_steps as usize),
        total: total_steps as usize,
        visited: 0,
    };
    // Break only means the visitor asked to stop.
    let _ = walker.descend(&mut visit);
    Ok(walker.visited)
}

struct Walker<'a> {
    moves: &'a [Step],
    /// Displacement still to be covered, per axis.
    remaining: Vec<i64>,
    prefix: Vec<Step>,
    total: usize,
    visited: u64,
}

impl Walker<'_> {
    fn descend<V>(&mut self, visit: &mut V) -> ControlFlow<()>
    where
        V: FnMut(&[Step]) -> ControlFlow<()>,
    {
        let left = self.total - self.prefix.len();
        if left == 0 {
            self.visited += 1;
            return visit(&self.prefix);
        }
        for &mv in self.moves {
            let axis = mv.axis as usize;
            self.remaining[axis] -= mv.delta();
            let needed: u64 = self.remaining.iter().map(|r| r.unsigned_abs()).sum();
            if needed < left as u64 {
                self.prefix.push(mv);
                let flow = self.descend(visit);
                self.prefix.pop();
                if flow.is_break() {
                    self.remaining[axis] += mv.delta();
                    return flow;
                }
            }
            self.remaining[axis] += mv.delta();
        }
        ControlFlow::Continue(())
    }
}

/// Every distinct sequence of `total_steps` unit moves with net displacement
/// `net`. Fails rather than truncating when more than `cap` sequences exist.
pub fn enumerate_paths(dimension: u8, net: &[i64], total_steps: u64, cap: usize) -> Result<Vec<StepSequence>> {
    let mut out = Vec::new();
    let mut overflow = false;
    walk_paths(dimension, net, total_steps, |steps| {
        if out.len() == cap {
            overflow = true;
            return ControlFlow::Break(());
        }
        out.push(StepSequence::new(steps.to_vec()));
        ControlFlow::Continue(())
    })?;
    if overflow {
        return Err(Error::CapExceeded { cap });
    }
    Ok(out)
}

/// Counts enumerated sequences grouped by their per-axis flip counts.
pub fn tally_flip_classes(dimension: u8, net: &[i64], total_steps: u64) -> Result<BTreeMap<Vec<u64>, u64>> {
    let mut tally = BTreeMap::new();
    walk_paths(dimension, net, total_steps, |steps| {
        *tally.entry(flips_of(steps, dimension)).or_insert(0) += 1;
        ControlFlow::Continue(())
    })?;
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn exact(w: &BigCount) -> u64 {
        u64::try_from(w.exact().unwrap().clone()).unwrap()
    }

    fn c1(m: u64, j: u64) -> PathClass1D {
        PathClass1D::new(m, j).unwrap()
    }

    #[test]
    fn one_dimensional_counts() {
        assert_eq!(exact(&multiplicity_1d(&c1(2, 1))), 4);
        assert_eq!(exact(&multiplicity_1d(&c1(5, 0))), 1);
        assert_eq!(exact(&multiplicity_1d(&c1(2, 2))), 15);
    }

    #[test]
    fn one_dimensional_entropies() {
        assert_eq!(entropy_1d(&c1(3, 0), 1.0), 0.0);
        assert!((entropy_1d(&c1(2, 1), 1.0) - 4f64.ln()).abs() < 1e-15);
        assert!((entropy_1d(&c1(2, 2), 2.0) - 2.0 * 15f64.ln()).abs() < 1e-14);
        assert!((entropy_1d(&c1(2, 2), 2.0) - 5.4161).abs() < 1e-4);
    }

    #[test]
    fn entropy_rate_values() {
        assert!((entropy_rate(&c1(2, 1), 1.0) - 4f64.ln() / 4.0).abs() < 1e-15);
        assert_eq!(entropy_rate(&c1(1, 0), 1.0), 0.0);
        let far = entropy_rate(&c1(2, 1_000_000), 1.0);
        assert!((far - std::f64::consts::LN_2).abs() <= 1e-4);
    }

    #[test]
    fn entropy_rate_approaches_ln2_monotonically() {
        // Beyond a small j0 the gap to ln 2 shrinks at every sampled j.
        for m in 1..=3u64 {
            let js: Vec<u64> = (0..=24)
                .map(|e| 1u64 << e)
                .filter(|&j| j <= 1_000_000)
                .chain([1_000_000])
                .collect();
            let gaps: Vec<f64> = js
                .iter()
                .map(|&j| (entropy_rate(&c1(m, j), 1.0) - std::f64::consts::LN_2).abs())
                .collect();
            for w in gaps.windows(2).skip(2) {
                assert!(w[1] < w[0], "m = {m}: {gaps:?}");
            }
            assert!(*gaps.last().unwrap() < 1e-4);
        }
    }

    #[test]
    fn two_dimensional_counts() {
        assert_eq!(exact(&multiplicity_2d_full(2, 2, 0, 0).unwrap()), 6);
        assert_eq!(exact(&multiplicity_2d_full(3, 0, 0, 0).unwrap()), 1);
        assert_eq!(exact(&multiplicity_2d_full(1, 1, 1, 0).unwrap()), 12);
        let rot = |m1, j, k| exact(&multiplicity_2d_rotated(&PathClassND::planar(m1, j, k).unwrap()).unwrap());
        assert_eq!(rot(2, 0, 1), 12);
        assert_eq!(rot(4, 0, 0), 1);
        assert_eq!(rot(1, 1, 1), 60);
        assert!(multiplicity_2d_full(0, 1, 0, 0).is_err());
    }

    #[test]
    fn three_dimensional_counts() {
        let w3 = |m1, j, k, l| exact(&multiplicity_3d(&PathClassND::spatial(m1, j, k, l).unwrap()).unwrap());
        assert_eq!(w3(2, 0, 0, 0), 1);
        assert_eq!(w3(2, 0, 0, 1), 12);
        // +x, +y, -y, +z, -z are five distinct moves: 5! orderings.
        assert_eq!(w3(1, 0, 1, 1), 120);
        assert!(multiplicity_3d(&PathClassND::planar(1, 0, 0).unwrap()).is_err());
        assert!(multiplicity_2d_rotated(&PathClassND::spatial(1, 0, 0, 0).unwrap()).is_err());
    }

    #[test]
    fn two_dimensional_entropies() {
        assert!((entropy_2d(2, 2, 0, 0, 1.0).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert_eq!(entropy_2d(7, 0, 0, 0, 1.0).unwrap(), 0.0);
        assert!((entropy_2d(2, 0, 0, 1, 1.0).unwrap() - 12f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn enumerates_four_step_line() {
        let paths = enumerate_paths(1, &[2], 4, DEFAULT_ENUMERATION_CAP).unwrap();
        let rendered: Vec<String> = paths.iter().map(ToString::to_string).collect();
        assert_eq!(rendered, ["-x +x +x +x", "+x -x +x +x", "+x +x -x +x", "+x +x +x -x"]);
        let straight = enumerate_paths(1, &[5], 5, 10).unwrap();
        assert_eq!(straight.len(), 1);
        assert!(straight[0].steps().iter().all(|s| s.forward));
    }

    #[test]
    fn enumerates_planar_examples() {
        let square = enumerate_paths(2, &[2, 2], 4, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(square.len(), 6);
        let rotated = tally_flip_classes(2, &[2, 0], 4).unwrap();
        assert_eq!(rotated[&vec![0, 1]], 12);
        assert_eq!(rotated[&vec![1, 0]], 4);
    }

    #[test]
    fn enumeration_rejects_bad_targets() {
        assert!(enumerate_paths(1, &[3], 2, 10).is_err());
        assert!(enumerate_paths(1, &[2], 3, 10).is_err());
        assert!(enumerate_paths(4, &[1, 0, 0, 0], 1, 10).is_err());
        assert!(enumerate_paths(2, &[1], 1, 10).is_err());
    }

    #[test]
    fn enumeration_cap_is_an_error() {
        let err = enumerate_paths(1, &[2], 6, 14).unwrap_err();
        assert_eq!(err, Error::CapExceeded { cap: 14 });
        assert_eq!(enumerate_paths(1, &[2], 6, 15).unwrap().len(), 15);
    }

    #[test]
    fn negative_net_displacement() {
        let paths = enumerate_paths(2, &[-1, 1], 4, 100).unwrap();
        for p in &paths {
            assert_eq!(p.net(2), vec![-1, 1]);
        }
        let tally = tally_flip_classes(2, &[-1, 1], 4).unwrap();
        assert_eq!(tally[&vec![1, 0]], 12);
        assert_eq!(tally[&vec![0, 1]], 12);
    }

    #[test]
    fn one_dimensional_oracle() {
        for m in 1..=6u64 {
            for j in 0..=4u64 {
                let cls = c1(m, j);
                let tally = tally_flip_classes(1, &[m as i64], cls.steps()).unwrap();
                assert_eq!(tally.len(), 1);
                assert_eq!(BigUint::from(tally[&vec![j]]), *multiplicity_1d(&cls).exact().unwrap());
            }
        }
    }

    #[test]
    fn three_dimensional_oracle_and_symmetry() {
        for m1 in 1..=2u64 {
            for s in 0..=2u64 {
                let tally = tally_flip_classes(3, &[m1 as i64, 0, 0], m1 + 2 * s).unwrap();
                for (flips, count) in tally {
                    let cls = PathClassND::spatial(m1, flips[0], flips[1], flips[2]).unwrap();
                    assert_eq!(BigUint::from(count), *multiplicity_3d(&cls).unwrap().exact().unwrap());
                    let swapped = PathClassND::spatial(m1, flips[0], flips[2], flips[1]).unwrap();
                    assert_eq!(multiplicity_3d(&cls).unwrap(), multiplicity_3d(&swapped).unwrap());
                }
            }
        }
    }

    #[test]
    fn minimum_distance_count() {
        for m1 in 1..=8u64 {
            for m2 in 0..=8u64 {
                let w = multiplicity_2d_full(m1, m2, 0, 0).unwrap();
                assert_eq!(*w.exact().unwrap(), crate::count::binomial(m1 + m2, m1));
                let rotated = multiplicity_2d_rotated(&PathClassND::planar(m1, m2, 0).unwrap()).unwrap();
                let full = multiplicity_2d_full(m1, 0, m2, 0).unwrap();
                assert_eq!(rotated, full);
            }
        }
    }

    #[test]
    fn multiplicity_increases_with_flips() {
        for m in 1..=10u64 {
            let ws: Vec<BigUint> = (0..40)
                .map(|j| multiplicity_1d(&c1(m, j)).exact().unwrap().clone())
                .collect();
            assert!(ws.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
