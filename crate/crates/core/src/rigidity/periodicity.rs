use crate::error::{Error, Result};
use crate::predictor::{orthant_predictor, IndexSet};
use crate::rng::SeededRng;
use crate::spectral::{fold_angle, Atom, DomainTag, SpectralMeasure};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Integer values on the cube `{0, …, side-1}^d`, first coordinate fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntField {
    pub dim: usize,
    pub side: usize,
    pub values: Vec<i64>,
}

impl IntField {
    pub fn from_fn(dim: usize, side: usize, f: impl Fn(&[usize]) -> i64) -> Self {
        let len = side.pow(dim as u32);
        let values = (0..len).map(|i| f(&unflatten(i, dim, side))).collect();
        IntField { dim, side, values }
    }

    pub fn get(&self, idx: &[usize]) -> i64 {
        self.values[flatten(idx, self.side)]
    }

    pub fn set(&mut self, idx: &[usize], v: i64) {
        let i = flatten(idx, self.side);
        self.values[i] = v;
    }

    pub fn center(&self) -> usize {
        (self.side - 1) / 2
    }

    /// Largest `n` with the centred cube `C_n` inside the window.
    pub fn max_radius(&self) -> usize {
        let c = self.center();
        c.min(self.side - 1 - c)
    }

    fn at_offset(&self, k: &[i64]) -> i64 {
        let c = self.center() as i64;
        let idx: Vec<usize> = k.iter().map(|&x| (c + x) as usize).collect();
        self.get(&idx)
    }

    fn set_offset(&mut self, k: &[i64], v: i64) {
        let c = self.center() as i64;
        let idx: Vec<usize> = k.iter().map(|&x| (c + x) as usize).collect();
        self.set(&idx, v)
    }

    /// Per-axis minimal period `p ≤ side/2` of the centred cube `C_radius`, if every axis
    /// has one.
    pub fn minimal_period(&self, radius: usize) -> Option<Vec<usize>> {
        let r = radius as i64;
        let cube = cube_offsets(self.dim, r);
        (0..self.dim)
            .map(|l| {
                (1..=radius).find(|&p| {
                    cube.iter().filter(|k| k[l] + p as i64 <= r).all(|k| {
                        let mut q = k.clone();
                        q[l] += p as i64;
                        self.at_offset(k) == self.at_offset(&q)
                    })
                })
            })
            .collect()
    }
}

fn flatten(idx: &[usize], side: usize) -> usize {
    idx.iter().rev().fold(0, |acc, &i| acc * side + i)
}

fn unflatten(mut i: usize, dim: usize, side: usize) -> Vec<usize> {
    (0..dim)
        .map(|_| {
            let r = i % side;
            i /= side;
            r
        })
        .collect()
}

fn cube_offsets(d: usize, r: i64) -> Vec<Vec<i64>> {
    let side = (2 * r + 1) as usize;
    (0..side.pow(d as u32)).map(|i| unflatten(i, d, side).into_iter().map(|x| x as i64 - r).collect()).collect()
}

/// Uniformly discrete value set with ties in rounding going to the smaller element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueSet {
    pub values: Vec<i64>,
}

impl ValueSet {
    pub fn new(mut values: Vec<i64>) -> Result<Self> {
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err(Error::InvalidInput("empty value set".into()));
        }
        Ok(ValueSet { values })
    }

    pub fn of_field(f: &IntField) -> Result<Self> {
        Self::new(f.values.clone())
    }

    /// `δ_U`; a singleton is given separation 1.
    pub fn separation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]) as f64).reduce(f64::min).unwrap_or(1.0)
    }

    /// `([z], |z - [z]|)`.
    pub fn round(&self, z: f64) -> (i64, f64) {
        let mut best = (self.values[0], (z - self.values[0] as f64).abs());
        for &v in &self.values[1..] {
            let r = (z - v as f64).abs();
            if r < best.1 {
                best = (v, r);
            }
        }
        best
    }
}

/// A fixed pattern repeated with period vector `period`; `values` follows the layout of
/// [`IntField`] on the box `Π [0, N_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPattern {
    pub period: Vec<usize>,
    pub values: Vec<i64>,
}

impl PeriodicPattern {
    pub fn new(period: Vec<usize>, values: Vec<i64>) -> Result<Self> {
        if period.is_empty() || period.iter().any(|&n| n == 0) || period.iter().product::<usize>() != values.len() {
            return Err(Error::InvalidInput("pattern size does not match its period".into()));
        }
        Ok(PeriodicPattern { period, values })
    }

    /// Indicator of the lattice `N ℤ^d`.
    pub fn lattice(d: usize, n: usize) -> Self {
        let period = vec![n; d];
        let values = (0..n.pow(d as u32)).map(|i| i64::from(i == 0)).collect();
        PeriodicPattern { period, values }
    }

    pub fn dim(&self) -> usize {
        self.period.len()
    }

    pub fn at(&self, x: &[i64]) -> i64 {
        let mut i = 0;
        for (l, &n) in self.period.iter().enumerate().rev() {
            i = i * n + x[l].rem_euclid(n as i64) as usize;
        }
        self.values[i]
    }

    /// Smallest per-axis shift leaving the pattern invariant.
    pub fn minimal_period(&self) -> Vec<usize> {
        let pts = self.box_points();
        (0..self.dim())
            .map(|l| {
                (1..=self.period[l])
                    .find(|&q| {
                        pts.iter().all(|x| {
                            let mut y = x.clone();
                            y[l] += q as i64;
                            self.at(x) == self.at(&y)
                        })
                    })
                    .unwrap_or(self.period[l])
            })
            .collect()
    }

    fn box_points(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = vec![vec![]];
        for &n in &self.period {
            out = out.into_iter().flat_map(|p| (0..n as i64).map(move |x| [p.clone(), vec![x]].concat())).collect();
        }
        out
    }

    /// Second-moment spectral measure of a uniformly random translate: atoms at `2πj/N`
    /// with weight `(2π)^d |p̂(j)|² / |N|²`.
    pub fn spectral_measure(&self) -> SpectralMeasure {
        let d = self.dim();
        let pts = self.box_points();
        let vol = pts.len() as f64;
        let atoms = pts
            .iter()
            .filter_map(|j| {
                let c: Complex64 = pts
                    .iter()
                    .map(|x| {
                        let phase: f64 = (0..d).map(|l| -2.0 * PI * (j[l] * x[l]) as f64 / self.period[l] as f64).sum();
                        Complex64::from_polar(self.at(x) as f64, phase)
                    })
                    .sum::<Complex64>()
                    / vol;
                let w = (2.0 * PI).powi(d as i32) * c.norm_sqr();
                (w > 1e-14).then(|| Atom((0..d).map(|l| fold_angle(2.0 * PI * j[l] as f64 / self.period[l] as f64)).collect(), w))
            })
            .collect();
        SpectralMeasure::atomic(DomainTag::discrete(d), atoms).with_tag("periodic pattern")
    }

    /// Window of side `side` cut from a uniformly random translate.
    pub fn sample(&self, side: usize, rng: &mut SeededRng) -> IntField {
        let shift: Vec<i64> = self.period.iter().map(|&n| rng.gen_range(0..n as i64)).collect();
        IntField::from_fn(self.dim(), side, |idx| {
            let x: Vec<i64> = idx.iter().zip(&shift).map(|(&i, s)| i as i64 + s).collect();
            self.at(&x)
        })
    }
}

/// Linear predictors of a site from the cube `σ ∘ [1, s]^d` next to it, one per sign
/// pattern `σ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictorTable {
    pub order: usize,
    /// `(σ, offsets, weights)`.
    pub entries: Vec<(Vec<i8>, Vec<Vec<i64>>, Vec<f64>)>,
    pub max_error: f64,
}

impl PredictorTable {
    pub fn build(s: &SpectralMeasure, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("predictor order must be ≥ 1".into()));
        }
        let mut entries = Vec::new();
        let mut max_error: f64 = 0.0;
        for set in IndexSet::all_orthants(s.dim()) {
            let p = orthant_predictor(s, order, &set)?;
            max_error = max_error.max(p.error);
            let IndexSet::Orthant { signs } = set else { unreachable!() };
            entries.push((signs, p.indices, p.coefficients.iter().map(|c| c.re).collect()));
        }
        Ok(PredictorTable { order, entries, max_error })
    }

    fn for_site(&self, k: &[i64]) -> &(Vec<i8>, Vec<Vec<i64>>, Vec<f64>) {
        let signs: Vec<i8> = k.iter().map(|&x| if x > 0 { -1 } else { 1 }).collect();
        self.entries.iter().find(|e| e.0 == signs).expect("all orthants present")
    }
}

/// Values predicted on the shell `D_n = C_{n+1} ∖ C_n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShellPrediction {
    pub sites: Vec<Vec<i64>>,
    pub values: Vec<i64>,
    pub flagged: Vec<bool>,
}

/// Predicts every site of `D_n` from the values of `window` on `C_n` (offsets from the
/// window centre), rounding into `u`. A site is flagged when the residual before rounding
/// reaches `δ_U / 2`.
pub fn propagate_step(window: &IntField, n: usize, u: &ValueSet, table: &PredictorTable) -> Result<ShellPrediction> {
    if n + 1 > window.max_radius() {
        return Err(Error::InvalidInput(format!("shell {} leaves the window", n + 1)));
    }
    if table.order > n {
        return Err(Error::InvalidInput(format!("predictor order {} exceeds cube radius {n}", table.order)));
    }
    let half = u.separation() / 2.0;
    let r = n as i64 + 1;
    let sites: Vec<Vec<i64>> = cube_offsets(window.dim, r).into_iter().filter(|k| k.iter().any(|x| x.abs() == r)).collect();
    let mut values = Vec::with_capacity(sites.len());
    let mut flagged = Vec::with_capacity(sites.len());
    for k in &sites {
        let (_, offsets, weights) = table.for_site(k);
        let z: f64 = offsets
            .iter()
            .zip(weights)
            .map(|(m, w)| {
                let q: Vec<i64> = k.iter().zip(m).map(|(a, b)| a + b).collect();
                w * window.at_offset(&q) as f64
            })
            .sum();
        let (v, res) = u.round(z);
        values.push(v);
        flagged.push(res >= half);
    }
    Ok(ShellPrediction { sites, values, flagged })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub period: Option<Vec<usize>>,
    pub propagation_failures: usize,
    pub mismatches: usize,
    pub flagged: usize,
    pub window_side: usize,
    pub seed_radius: usize,
    pub verified_radius: usize,
    pub predictor_order: usize,
    pub predictor_error: f64,
    pub values: Vec<i64>,
    pub separation: f64,
    #[serde(skip)]
    pub propagated: Option<IntField>,
}

/// Runs the shell recursion from `C_{n0}` to the largest centred cube of `sample`, checks
/// the propagated values against the sample, and reports the per-axis minimal period of
/// the propagated cube when no site failed. Predictors use the fixed order `⌊n0/2⌋ - 1`.
pub fn detect_period(sample: &IntField, u: &ValueSet, s: &SpectralMeasure, n0: usize) -> Result<PeriodicityReport> {
    if s.dim() != sample.dim {
        return Err(Error::InvalidInput("measure and field dimensions differ".into()));
    }
    let order = (n0 / 2).saturating_sub(1);
    let n_max = sample.max_radius();
    if order == 0 || n0 >= n_max {
        return Err(Error::InvalidInput(format!("need 4 ≤ n0 < {n_max} (window radius)")));
    }
    if let Some(v) = sample.values.iter().find(|v| u.values.binary_search(v).is_err()) {
        return Err(Error::InvalidInput(format!("sample value {v} not in U")));
    }
    let table = PredictorTable::build(s, order)?;
    let mut known = sample.clone();
    let (mut mismatches, mut flagged, mut failures) = (0, 0, 0);
    for n in n0..n_max {
        let shell = propagate_step(&known, n, u, &table)?;
        for ((k, &v), &f) in shell.sites.iter().zip(&shell.values).zip(&shell.flagged) {
            let wrong = sample.at_offset(k) != v;
            mismatches += usize::from(wrong);
            flagged += usize::from(f);
            failures += usize::from(wrong || f);
            known.set_offset(k, v);
        }
    }
    let period = if failures == 0 { known.minimal_period(n_max) } else { None };
    Ok(PeriodicityReport {
        period,
        propagation_failures: failures,
        mismatches,
        flagged,
        window_side: sample.side,
        seed_radius: n0,
        verified_radius: n_max,
        predictor_order: order,
        predictor_error: table.max_error,
        values: u.values.clone(),
        separation: u.separation(),
        propagated: Some(known),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Density;

    fn brute_period(p: &PeriodicPattern) -> Vec<usize> {
        (0..p.dim())
            .map(|l| {
                (1..=p.period[l])
                    .find(|&q| {
                        p.box_points().iter().all(|x| {
                            let mut y = x.clone();
                            y[l] += q as i64;
                            p.at(x) == p.at(&y)
                        })
                    })
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn minimal_period_matches_brute_force() {
        let cases = [
            PeriodicPattern::new(vec![6], vec![1, 2, 1, 2, 1, 2]).unwrap(),
            PeriodicPattern::new(vec![4], vec![1, 0, 0, 2]).unwrap(),
            PeriodicPattern::new(vec![2, 4], vec![0, 1, 0, 1, 0, 1, 0, 1]).unwrap(),
            PeriodicPattern::new(vec![3, 5], vec![0, 2, 1, 1, 0, 0, 2, 1, 0, 0, 1, 2, 1, 1, 0]).unwrap(),
        ];
        for p in &cases {
            assert_eq!(p.minimal_period(), brute_period(p));
        }
        assert_eq!(cases[0].minimal_period(), vec![2]);
    }

    #[test]
    fn rounding_breaks_ties_downwards() {
        let u = ValueSet::new(vec![3, -1, 1]).unwrap();
        assert_eq!(u.separation(), 2.0);
        assert_eq!(u.round(0.0), (-1, 1.0));
        assert_eq!(u.round(0.9), (1, 0.09999999999999998));
        assert_eq!(u.round(7.0).0, 3);
        assert_eq!(ValueSet::new(vec![5]).unwrap().separation(), 1.0);
    }

    #[test]
    fn pattern_spectrum_reproduces_covariance() {
        let p = PeriodicPattern::new(vec![4], vec![2, -1, 0, 3]).unwrap();
        let s = p.spectral_measure();
        for k in 0..4i64 {
            let direct: f64 = (0..4i64).map(|x| (p.at(&[x + k]) * p.at(&[x])) as f64).sum::<f64>() / 4.0;
            let spectral: f64 = s.atoms.iter().map(|a| a.1 * (a.0[0] * k as f64).cos()).sum::<f64>() / (2.0 * PI);
            assert!((direct - spectral).abs() < 1e-12, "{k}: {direct} vs {spectral}");
        }
    }

    #[test]
    fn constant_field() {
        let p = PeriodicPattern::new(vec![1], vec![7]).unwrap();
        let f = p.sample(33, &mut SeededRng::new(0));
        let u = ValueSet::new(vec![0, 7]).unwrap();
        let table = PredictorTable::build(&p.spectral_measure(), 2).unwrap();
        let shell = propagate_step(&f, 4, &u, &table).unwrap();
        assert!(shell.values.iter().all(|&v| v == 7) && shell.flagged.iter().all(|f| !f));
        let r = detect_period(&f, &u, &p.spectral_measure(), 6).unwrap();
        assert_eq!(r.period, Some(vec![1]));
        assert_eq!(r.propagation_failures, 0);
    }

    #[test]
    fn alternation_from_the_atom_at_pi() {
        let s = SpectralMeasure::atomic(DomainTag::discrete(1), vec![Atom(vec![PI], 1.0)]);
        let f = IntField::from_fn(1, 41, |i| if i[0] % 2 == 0 { 1 } else { -1 });
        let u = ValueSet::new(vec![-1, 1]).unwrap();
        let r = detect_period(&f, &u, &s, 8).unwrap();
        assert!(r.predictor_error < 1e-12);
        assert_eq!(r.propagation_failures, 0);
        assert_eq!(r.period, Some(vec![2]));
    }

    #[test]
    fn four_periodic_translates() {
        let p = PeriodicPattern::new(vec![4], vec![1, 0, 0, 2]).unwrap();
        let s = p.spectral_measure();
        let u = ValueSet::new(vec![0, 1, 2]).unwrap();
        for seed in 0..8 {
            let f = p.sample(64, &mut SeededRng::new(seed));
            let r = detect_period(&f, &u, &s, 10).unwrap();
            assert_eq!(r.propagation_failures, 0);
            assert_eq!(r.period, Some(brute_period(&p)));
        }
    }

    #[test]
    fn two_dimensional_pattern() {
        let mut rng = SeededRng::new(5);
        let values: Vec<i64> = (0..15).map(|_| rng.gen_range(0..3)).collect();
        let p = PeriodicPattern::new(vec![3, 5], values).unwrap();
        let truth = brute_period(&p);
        let f = p.sample(40, &mut SeededRng::new(1));
        let r = detect_period(&f, &ValueSet::new(vec![0, 1, 2]).unwrap(), &p.spectral_measure(), 12).unwrap();
        assert_eq!(r.propagation_failures, 0);
        assert_eq!(r.period, Some(truth));
    }

    #[test]
    fn lattice_indicator() {
        let p = PeriodicPattern::lattice(2, 3);
        let f = p.sample(31, &mut SeededRng::new(2));
        let r = detect_period(&f, &ValueSet::new(vec![0, 1]).unwrap(), &p.spectral_measure(), 8).unwrap();
        assert_eq!(r.period, Some(vec![3, 3]));
    }

    #[test]
    fn white_noise_is_not_recovered() {
        let mut rng = SeededRng::new(3);
        let noise: Vec<i64> = (0..64).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        let f = IntField { dim: 1, side: 64, values: noise };
        let s = SpectralMeasure::new(DomainTag::discrete(1), Density::lebesgue(), vec![]);
        let r = detect_period(&f, &ValueSet::new(vec![-1, 1]).unwrap(), &s, 10).unwrap();
        assert!(r.period.is_none());
        assert!(r.propagation_failures > 0);
    }

    #[test]
    fn rerun_on_propagated_window_is_stable() {
        let p = PeriodicPattern::new(vec![4], vec![1, 0, 0, 2]).unwrap();
        let u = ValueSet::new(vec![0, 1, 2]).unwrap();
        let f = p.sample(64, &mut SeededRng::new(9));
        let a = detect_period(&f, &u, &p.spectral_measure(), 10).unwrap();
        let b = detect_period(a.propagated.as_ref().unwrap(), &u, &p.spectral_measure(), 10).unwrap();
        assert_eq!(a.period, b.period);
    }
}
