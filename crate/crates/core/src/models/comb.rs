//! Dirac combs `M = Σ_i Σ_k δ_{a_i(U_i + k)}` with independent uniform shifts.

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::spectral::checks::kappa;
use crate::spectral::{Atom, DomainTag, SpectralMeasure};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombModel {
    pub a: Vec<f64>,
    pub d: usize,
    /// Spectral sums keep `0 < ‖k‖_∞ ≤ truncation`.
    pub truncation: usize,
}

impl CombModel {
    pub fn new(a: Vec<f64>, d: usize, truncation: usize) -> Result<Self> {
        let m = CombModel { a, d, truncation };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("comb dimension must be ≥ 1".into()));
        }
        if self.truncation == 0 {
            return Err(Error::InvalidInput("comb truncation must be ≥ 1".into()));
        }
        if self.a.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidInput("lattice scales must be positive".into()));
        }
        Ok(())
    }

    /// Mean number of points per unit volume, `Σ a_i^{-d}`.
    pub fn intensity(&self) -> f64 {
        self.a.iter().map(|a| a.powi(-(self.d as i32))).sum()
    }

    /// Atom weight of lattice `a`: `(2π)^d a^{-2d}`.
    pub fn atom_weight(&self, a: f64) -> f64 {
        (2.0 * PI).powi(self.d as i32) * a.powi(-2 * self.d as i32)
    }

    /// Upper bound on `∫ κ dS` over the atoms dropped by the truncation.
    pub fn tail_bound(&self) -> f64 {
        let d = self.d as i32;
        let t = self.truncation;
        let far = 1_000_000usize.max(4 * t);
        let mut total = 0.0;
        for &a in &self.a {
            let w = self.atom_weight(a);
            // shell ‖k‖_∞ = m holds ≤ 2d(2m+1)^{d-1} points, each with ‖k‖_2 ≥ m
            let mut s = 0.0;
            for m in t + 1..=far {
                let mf = m as f64;
                s += 2.0 * self.d as f64 * (2.0 * mf + 1.0).powi(d - 1) * kappa(self.d, 2.0 * PI * mf / a);
            }
            let rest = 2.0 * self.d as f64 * 3f64.powi(d - 1) * (a / (2.0 * PI)).powi(d + 1) / far as f64;
            total += w * (s + rest);
        }
        total
    }
}

/// Multi-indices with `0 < ‖k‖_∞ ≤ t`.
fn shell_indices(d: usize, t: i64) -> Vec<Vec<i64>> {
    let side = (2 * t + 1) as usize;
    let mut out = Vec::with_capacity(side.pow(d as u32));
    let mut k = vec![-t; d];
    loop {
        if k.iter().any(|&x| x != 0) {
            out.push(k.clone());
        }
        let mut l = 0;
        loop {
            if l == d {
                return out;
            }
            k[l] += 1;
            if k[l] <= t {
                break;
            }
            k[l] = -t;
            l += 1;
        }
    }
}

/// Atoms at `2πk/a_i`, weight `(2π)^d a_i^{-2d}`, merged where lattices overlap.
pub fn comb_spectral_measure(m: &CombModel) -> SpectralMeasure {
    let dom = DomainTag::continuous(m.d);
    let ks = shell_indices(m.d, m.truncation as i64);
    let mut atoms = Vec::with_capacity(ks.len() * m.a.len());
    for &a in &m.a {
        let w = m.atom_weight(a);
        for k in &ks {
            atoms.push(Atom(k.iter().map(|&x| 2.0 * PI * x as f64 / a).collect(), w));
        }
    }
    let mut s = SpectralMeasure::atomic(dom, atoms).with_tag("comb");
    s.merge_atoms();
    s
}

/// Axis-aligned box `Π [lo_l, hi_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Window { lo, hi }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Window { lo: vec![lo], hi: vec![hi] }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a && *v < *b)
    }
}

/// One realisation of the comb inside `window`, lattice by lattice.
pub fn sample_comb(m: &CombModel, window: &Window, mut rng: SeededRng) -> Result<Vec<Vec<f64>>> {
    if window.lo.len() != m.d || window.hi.len() != m.d {
        return Err(Error::InvalidInput("window dimension mismatch".into()));
    }
    if window.lo.iter().chain(&window.hi).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("window must be bounded".into()));
    }
    let mut points = Vec::new();
    for &a in &m.a {
        let u: Vec<f64> = (0..m.d).map(|_| rng.gen::<f64>()).collect();
        // k_l ranges over integers with a(u_l + k_l) ∈ [lo_l, hi_l)
        let ranges: Vec<(i64, i64)> = (0..m.d)
            .map(|l| ((window.lo[l] / a - u[l]).ceil() as i64, (window.hi[l] / a - u[l]).ceil() as i64 - 1))
            .collect();
        if ranges.iter().any(|(lo, hi)| hi < lo) {
            continue;
        }
        let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            let x: Vec<f64> = (0..m.d).map(|l| a * (u[l] + k[l] as f64)).collect();
            if window.contains(&x) {
                points.push(x);
            }
            for l in 0..m.d {
                k[l] += 1;
                if k[l] <= ranges[l].1 {
                    continue 'outer;
                }
                k[l] = ranges[l].0;
            }
            break;
        }
    }
    Ok(points)
}

/// Number of points of `sample` in `window`.
pub fn count_in(points: &[Vec<f64>], window: &Window) -> usize {
    points.iter().filter(|p| window.contains(p)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{check_symmetry, check_tempered};

    #[test]
    fn unit_comb_atoms() {
        let s = comb_spectral_measure(&CombModel::new(vec![1.0], 1, 2).unwrap());
        let locs: Vec<f64> = s.atoms.iter().map(|a| a.0[0]).collect();
        assert_eq!(locs.len(), 4);
        for (x, k) in locs.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((x - 2.0 * PI * k).abs() < 1e-12);
        }
        assert!(s.atoms.iter().all(|a| (a.1 - 2.0 * PI).abs() < 1e-12));
    }

    #[test]
    fn overlapping_lattices_merge() {
        let s = comb_spectral_measure(&CombModel::new(vec![1.0, 2.0], 1, 4).unwrap());
        let at = |u: f64| s.atoms.iter().find(|a| (a.0[0] - u).abs() < 1e-9).map(|a| a.1);
        // 2π: k=1 of a=1 and k=2 of a=2
        assert!((at(2.0 * PI).unwrap() - 2.0 * PI * 1.25).abs() < 1e-12);
        assert!((at(PI).unwrap() - 2.0 * PI / 4.0).abs() < 1e-12);
        assert!(comb_spectral_measure(&CombModel { a: vec![], d: 2, truncation: 3 }).is_zero());
    }

    #[test]
    fn comb_is_symmetric_and_tempered() {
        for a in [vec![1.0, 2.0, 4.0], vec![0.7], vec![1.0, 3.0_f64.sqrt()]] {
            let s = comb_spectral_measure(&CombModel::new(a, 1, 200).unwrap());
            assert!(check_symmetry(&s, 1e-12));
            assert!(check_tempered(&s, 1e-6).unwrap().tempered);
        }
        let m = CombModel::new(vec![1.0, 2.0, 4.0], 1, 200).unwrap();
        // partial-sum oracle for the dropped κ mass
        let mut tail = 0.0;
        for &a in &m.a {
            for k in 201..1_000_000 {
                tail += 2.0 * m.atom_weight(a) * kappa(1, 2.0 * PI * k as f64 / a);
            }
        }
        assert!(m.tail_bound() >= tail && m.tail_bound() < 1.01 * tail + 1e-9);
    }

    #[test]
    fn sampling_counts() {
        let one = CombModel::new(vec![1.0], 1, 1).unwrap();
        let pts = sample_comb(&one, &Window::interval(0.0, 10.0), SeededRng::new(3)).unwrap();
        assert_eq!(pts.len(), 10);
        let mut xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!(xs.windows(2).all(|w| (w[1] - w[0] - 1.0).abs() < 1e-12));
        let two = CombModel::new(vec![1.0, 2.0], 1, 1).unwrap();
        let pts = sample_comb(&two, &Window::interval(0.0, 20.0), SeededRng::new(4)).unwrap();
        assert_eq!(pts.len(), 30);
        let grid = CombModel::new(vec![0.5], 2, 1).unwrap();
        let pts = sample_comb(&grid, &Window::new(vec![0.0, 0.0], vec![3.0, 2.0]), SeededRng::new(5)).unwrap();
        assert_eq!(pts.len(), 24);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = CombModel::new(vec![1.0, 2.5], 1, 1).unwrap();
        let w = Window::interval(-5.0, 5.0);
        assert_eq!(sample_comb(&m, &w, SeededRng::new(11)).unwrap(), sample_comb(&m, &w, SeededRng::new(11)).unwrap());
    }
}
