//! Nonincreasing rearrangements, distribution functions and Lorentz norms.
//!
//! A sampled function is a step function on its lattice cells, so its
//! rearrangement `f*` is a step function on `(0, ∞)` and every Lorentz norm
//! below is an exact finite sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::GridFunction;

/// Left-continuous nonincreasing step function `f*` on `(0, ∞)`.
///
/// `f*(t) = v_k` for `t ∈ (t_{k-1}, t_k]` with `t_0 = 0`, and `f*(t) = 0`
/// beyond `t_K`. Adjacent equal values are always coalesced.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StepProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        let mut prev_t = 0.0;
        let mut prev_v = f64::INFINITY;
        for (&t, &v) in breakpoints.iter().zip(&values) {
            if !(t.is_finite() && t > prev_t) {
                return Err(Error::InvalidInput(format!(
                    "breakpoints must be finite and strictly increasing from 0, got {t} after {prev_t}"
                )));
            }
            if !(v.is_finite() && v >= 0.0 && v <= prev_v) {
                return Err(Error::InvalidInput(format!(
                    "values must be finite, nonnegative and nonincreasing, got {v} after {prev_v}"
                )));
            }
            prev_t = t;
            prev_v = v;
        }
        Ok(Self::coalesced(breakpoints, values))
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Merge equal neighbours and drop trailing zero steps.
    fn coalesced(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut t_out: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut v_out: Vec<f64> = Vec::with_capacity(values.len());
        for (t, v) in breakpoints.into_iter().zip(values) {
            if v == 0.0 {
                break;
            }
            match v_out.last() {
                Some(&last) if last == v => *t_out.last_mut().expect("paired") = t,
                _ => {
                    t_out.push(t);
                    v_out.push(v);
                }
            }
        }
        Self {
            breakpoints: t_out,
            values: v_out,
        }
    }

    /// Rearrangement of nonnegative magnitudes, each occupying `cell_volume`.
    pub fn from_magnitudes(magnitudes: &[f64], cell_volume: f64) -> Result<Self> {
        if !(cell_volume.is_finite() && cell_volume > 0.0) {
            return Err(Error::param(
                "cell_volume",
                format!("must be positive, got {cell_volume}"),
            ));
        }
        check_magnitudes(magnitudes)?;
        let mut sorted: Vec<f64> = magnitudes.iter().copied().filter(|&v| v > 0.0).collect();
        sorted.sort_unstable_by(|a, b| b.total_cmp(a));
        let mut t = Vec::new();
        let mut v = Vec::new();
        for (i, &value) in sorted.iter().enumerate() {
            let end = (i + 1) as f64 * cell_volume;
            if v.last() == Some(&value) {
                *t.last_mut().expect("paired") = end;
            } else {
                t.push(end);
                v.push(value);
            }
        }
        Ok(Self {
            breakpoints: t,
            values: v,
        })
    }

    /// Rearrangement of an arbitrary step function given by consecutive
    /// interval widths and the (unordered) values on them.
    pub fn rearrange_steps(widths: &[f64], values: &[f64]) -> Result<Self> {
        if widths.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} widths but {} values",
                widths.len(),
                values.len()
            )));
        }
        if let Some(w) = widths.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidInput(format!("invalid width {w}")));
        }
        check_magnitudes(values)?;
        let mut pairs: Vec<(f64, f64)> = values
            .iter()
            .copied()
            .zip(widths.iter().copied())
            .filter(|&(v, w)| v > 0.0 && w > 0.0)
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut t = Vec::new();
        let mut v = Vec::new();
        let mut acc = 0.0;
        for (value, width) in pairs {
            acc += width;
            if v.last() == Some(&value) {
                *t.last_mut().expect("paired") = acc;
            } else {
                t.push(acc);
                v.push(value);
            }
        }
        Ok(Self {
            breakpoints: t,
            values: v,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Measure of the support, `t_K`.
    pub fn support_measure(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Step intervals `(t_{k-1}, t_k, v_k)`.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let starts = std::iter::once(0.0).chain(self.breakpoints.iter().copied());
        starts
            .zip(&self.breakpoints)
            .zip(&self.values)
            .map(|((a, &b), &v)| (a, b, v))
    }

    /// `f*(t)` with the left-continuous convention; `f*(0)` is the supremum.
    pub fn eval(&self, t: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        if t <= 0.0 {
            return self.values[0];
        }
        let k = self.breakpoints.partition_point(|&b| b < t);
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// Measure of `{f* > λ}`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let k = self.values.partition_point(|&v| v > lambda);
        if k == 0 {
            0.0
        } else {
            self.breakpoints[k - 1]
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let c = c.abs();
        if c == 0.0 {
            return Self::empty();
        }
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `∫_0^∞ f*(t) t^{1/p - 1} dt = Σ_k v_k p (t_k^{1/p} - t_{k-1}^{1/p})`.
    pub fn lorentz_p1_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let e = p.recip();
        Ok(self.steps().map(|(a, b, v)| v * p * (b.powf(e) - a.powf(e))).sum())
    }

    /// `sup_t f*(t) t^{1/p}`, attained at a right endpoint of some step.
    pub fn lorentz_weak_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let e = p.recip();
        Ok(self.steps().map(|(_, b, v)| v * b.powf(e)).fold(0.0, f64::max))
    }

    /// `∫_0^∞ f*(t) g*(t) dt`, exact for two step profiles.
    pub fn inner_product(&self, other: &StepProfile) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut left = 0.0;
        let mut acc = 0.0;
        while i < self.len() && j < other.len() {
            let right = self.breakpoints[i].min(other.breakpoints[j]);
            acc += self.values[i] * other.values[j] * (right - left);
            left = right;
            if self.breakpoints[i] == right {
                i += 1;
            }
            if other.breakpoints[j] == right {
                j += 1;
            }
        }
        acc
    }
}

fn check_magnitudes(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(pos) => Err(Error::InvalidInput(format!(
            "magnitude at index {pos} is {}",
            values[pos]
        ))),
        None => Ok(()),
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::param("p", format!("Lorentz exponent must exceed 1, got {p}")))
    }
}

/// `f*` of a sampled function; the zero function yields an empty profile.
pub fn rearrangement(f: &GridFunction) -> Result<StepProfile> {
    StepProfile::from_magnitudes(&f.abs_values(), f.measure_element())
}

/// `|{x : |f(x)| > λ}|` on the lattice.
pub fn distribution_function(f: &GridFunction, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidInput(format!("level must be nonnegative, got {lambda}")));
    }
    let count = f.data().iter().filter(|z| z.norm() > lambda).count();
    Ok(count as f64 * f.measure_element())
}

pub fn lorentz_p1_norm(prof: &StepProfile, p: f64) -> Result<f64> {
    prof.lorentz_p1_norm(p)
}

pub fn lorentz_weak_norm(prof: &StepProfile, p: f64) -> Result<f64> {
    prof.lorentz_weak_norm(p)
}

/// Sorting permutation `h` with `|f| = f* ∘ h` on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportMap {
    ranks: Vec<usize>,
    cell_volume: f64,
}

impl TransportMap {
    /// Rank (1-based) of each cell in the descending order of `|f|`.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// `h(cell) = (rank - 1/2) · cell_volume`, the midpoint of the cell's slot.
    pub fn position(&self, cell: usize) -> f64 {
        (self.ranks[cell] as f64 - 0.5) * self.cell_volume
    }

    /// `f* ∘ h` at every cell.
    pub fn pull_back(&self, profile: &StepProfile) -> Vec<f64> {
        (0..self.ranks.len()).map(|c| profile.eval(self.position(c))).collect()
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.ranks.len()];
        for &r in &self.ranks {
            if r == 0 || r > seen.len() || seen[r - 1] {
                return false;
            }
            seen[r - 1] = true;
        }
        true
    }
}

pub fn transport_map(f: &GridFunction) -> TransportMap {
    let mags = f.abs_values();
    let mut order: Vec<usize> = (0..mags.len()).collect();
    // stable: ties keep index order
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]));
    let mut ranks = vec![0; mags.len()];
    for (pos, &cell) in order.iter().enumerate() {
        ranks[cell] = pos + 1;
    }
    TransportMap {
        ranks,
        cell_volume: f.measure_element(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Domain, Grid};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn grid_fn(values: &[f64], box_side: f64) -> GridFunction {
        let g = Grid::new(1, box_side, values.len()).unwrap();
        let data = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        GridFunction::new(g, Domain::Space, data).unwrap()
    }

    fn two_level() -> StepProfile {
        StepProfile::new(vec![1.0, 3.0], vec![3.0, 1.0]).unwrap()
    }

    #[test]
    fn two_level_function() {
        // cells of volume 1/2: A = two cells at height 3, B = four cells at height 1
        let f = grid_fn(&[1.0, 3.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0], 4.0);
        let prof = rearrangement(&f).unwrap();
        assert_eq!(prof.breakpoints(), &[1.0, 3.0]);
        assert_eq!(prof.values(), &[3.0, 1.0]);
        assert_eq!(distribution_function(&f, 2.0).unwrap(), 1.0);
        let expected = 6.0 + 2.0 * (3f64.sqrt() - 1.0);
        assert!((prof.lorentz_p1_norm(2.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn zero_function_has_empty_profile() {
        let prof = rearrangement(&grid_fn(&[0.0; 8], 1.0)).unwrap();
        assert!(prof.is_empty());
        assert_eq!(prof.support_measure(), 0.0);
        assert_eq!(prof.lorentz_weak_norm(2.0).unwrap(), 0.0);
        assert_eq!(prof.lorentz_p1_norm(2.0).unwrap(), 0.0);
    }

    #[test]
    fn indicator_norms() {
        let e1 = StepProfile::new(vec![1.0], vec![1.0]).unwrap();
        let e4 = StepProfile::new(vec![4.0], vec![1.0]).unwrap();
        assert_eq!(e1.lorentz_p1_norm(2.0).unwrap(), 2.0);
        assert_eq!(e4.lorentz_p1_norm(2.0).unwrap(), 4.0);
        assert!((e4.lorentz_weak_norm(3.0).unwrap() - 4f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let pr = StepProfile::new(vec![1.0, 8.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(pr.lorentz_weak_norm(3.0).unwrap(), 2.0);
    }

    #[test]
    fn indicator_distribution_is_strict() {
        let f = grid_fn(&[1.0, 1.0, 0.0, 0.0], 4.0);
        assert_eq!(distribution_function(&f, 0.5).unwrap(), 2.0);
        assert_eq!(distribution_function(&f, 1.0).unwrap(), 0.0);
        assert!(distribution_function(&f, -0.1).is_err());
    }

    #[test]
    fn exponent_must_exceed_one() {
        assert!(two_level().lorentz_p1_norm(1.0).is_err());
        assert!(two_level().lorentz_weak_norm(0.5).is_err());
    }

    #[test]
    fn gaussian_rearrangement() {
        // On the line f*(t) = f(t/2); each level away from the box edge is
        // hit by the symmetric pair ±x, whose step is centred at t = 2|x|.
        let g = Grid::new(1, 16.0, 1024).unwrap();
        let f = GridFunction::from_real_fn(g, |x| (-std::f64::consts::PI * x[0] * x[0]).exp()).unwrap();
        let prof = rearrangement(&f).unwrap();
        let mut worst: f64 = 0.0;
        for (a, b, v) in prof.steps() {
            if v < 1e-10 {
                continue;
            }
            let t = 0.5 * (a + b);
            let exact = (-std::f64::consts::PI * t * t / 4.0).exp();
            worst = worst.max((v - exact).abs() / exact);
        }
        assert!(worst < 1e-3, "worst relative error {worst}");
    }

    #[test]
    fn transport_identity_for_decreasing_samples() {
        let f = grid_fn(&[8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0], 8.0);
        let h = transport_map(&f);
        assert_eq!(h.ranks(), &[1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn transport_constant_function() {
        let f = grid_fn(&[2.5; 16], 2.0);
        let h = transport_map(&f);
        assert!(h.is_bijective());
        let prof = rearrangement(&f).unwrap();
        assert_eq!(h.pull_back(&prof), vec![2.5; 16]);
    }

    #[test]
    fn inner_product_of_steps() {
        let f = StepProfile::new(vec![1.0, 3.0], vec![3.0, 1.0]).unwrap();
        let g = StepProfile::new(vec![2.0], vec![2.0]).unwrap();
        assert_eq!(f.inner_product(&g), 3.0 * 2.0 + 1.0 * 2.0);
    }

    fn profile_strategy() -> impl Strategy<Value = StepProfile> {
        prop::collection::vec((0.01f64..3.0, 0.0f64..5.0), 0..20).prop_map(|steps| {
            let widths: Vec<f64> = steps.iter().map(|s| s.0).collect();
            let values: Vec<f64> = steps.iter().map(|s| s.1).collect();
            StepProfile::rearrange_steps(&widths, &values).unwrap()
        })
    }

    proptest! {
        #[test]
        fn equimeasurable(values in prop::collection::vec(-4.0f64..4.0, 32), lambda in 0.0f64..4.0) {
            let f = grid_fn(&values, 3.0);
            let prof = rearrangement(&f).unwrap();
            prop_assert_eq!(prof.distribution(lambda), distribution_function(&f, lambda).unwrap());
            for &v in &values {
                let l = v.abs();
                prop_assert_eq!(prof.distribution(l), distribution_function(&f, l).unwrap());
            }
        }

        #[test]
        fn rearrangement_is_monotone(
            values in prop::collection::vec(0.0f64..4.0, 16),
            bumps in prop::collection::vec(0.0f64..1.0, 16),
        ) {
            let g: Vec<f64> = values.iter().zip(&bumps).map(|(a, b)| a + b).collect();
            let pf = rearrangement(&grid_fn(&values, 2.0)).unwrap();
            let pg = rearrangement(&grid_fn(&g, 2.0)).unwrap();
            for &t in pf.breakpoints().iter().chain(pg.breakpoints()) {
                prop_assert!(pf.eval(t) <= pg.eval(t));
            }
            prop_assert!(pf.lorentz_p1_norm(2.0).unwrap() <= pg.lorentz_p1_norm(2.0).unwrap() + 1e-12);
        }

        #[test]
        fn norms_are_homogeneous(prof in profile_strategy(), c in 0.0f64..10.0, p in 1.01f64..6.0) {
            let a = prof.scaled(c).lorentz_p1_norm(p).unwrap();
            let b = c * prof.lorentz_p1_norm(p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
            let a = prof.scaled(c).lorentz_weak_norm(p).unwrap();
            let b = c * prof.lorentz_weak_norm(p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }

        #[test]
        fn weak_is_below_strong(prof in profile_strategy(), p in 1.000001f64..8.0) {
            let weak = prof.lorentz_weak_norm(p).unwrap();
            let strong = prof.lorentz_p1_norm(p).unwrap();
            prop_assert!(weak <= strong * (1.0 + 1e-12));
        }

        #[test]
        fn strong_norm_matches_level_sets(prof in profile_strategy(), p in 1.01f64..6.0) {
            // ∫ f* t^{1/p-1} dt = p ∫_0^∞ μ(λ)^{1/p} dλ, exact on the level steps
            let mut level_form = 0.0;
            let vals = prof.values();
            for k in 0..vals.len() {
                let below = vals.get(k + 1).copied().unwrap_or(0.0);
                level_form += p * (vals[k] - below) * prof.distribution(below).powf(1.0 / p);
            }
            let direct = prof.lorentz_p1_norm(p).unwrap();
            prop_assert!((level_form - direct).abs() <= 1e-10 * direct.max(1.0));
        }

        #[test]
        fn weak_norm_matches_level_sets(prof in profile_strategy(), p in 1.01f64..6.0) {
            // sup_λ λ μ(λ)^{1/p}, approached as λ increases to each v_k
            let mut level_form: f64 = 0.0;
            for &v in prof.values() {
                let below = v * (1.0 - 1e-15);
                level_form = level_form.max(below * prof.distribution(below).powf(1.0 / p));
            }
            let direct = prof.lorentz_weak_norm(p).unwrap();
            prop_assert!((level_form - direct).abs() <= 1e-12 * direct.max(1.0));
        }

        #[test]
        fn transport_reproduces_samples(values in prop::collection::vec(-3.0f64..3.0, 1..64)) {
            let n = values.len().next_power_of_two().max(2);
            let mut padded = values.clone();
            padded.resize(n, 0.0);
            let f = grid_fn(&padded, 5.0);
            let h = transport_map(&f);
            prop_assert!(h.is_bijective());
            let prof = rearrangement(&f).unwrap();
            let back = h.pull_back(&prof);
            for (b, v) in back.iter().zip(&padded) {
                prop_assert_eq!(*b, v.abs());
            }
        }
    }
}
