use super::measure::SpectralMeasure;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform grid `lo + (hi - lo) i / (n - 1)` on every axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn torus(n: usize) -> Self {
        GridSpec { lo: -std::f64::consts::PI, hi: std::f64::consts::PI * (1.0 - 2.0 / n as f64), n }
    }

    pub fn node(&self, i: usize) -> f64 {
        if self.n == 1 {
            return self.lo;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    pub dominated: bool,
    /// Largest `density(u) / Π density_i(u_i)` on the grid (∞ if the product vanishes first).
    pub max_ratio: f64,
    pub worst_location: Vec<f64>,
    /// Atoms of S not covered by a product of factor atoms with enough weight.
    pub atom_violations: usize,
    pub max_atom_ratio: f64,
}

const RATIO_TOL: f64 = 1e-9;

/// Checks `S ≤ S_1 × ⋯ × S_d` on a grid and atom by atom.
pub fn tensor_domination_check(s: &SpectralMeasure, factors: &[SpectralMeasure], grid: &GridSpec) -> Result<DominationReport> {
    let d = s.dim();
    if factors.len() != d || factors.iter().any(|f| f.dim() != 1) {
        return Err(Error::InvalidInput(format!("need {d} one-dimensional factors")));
    }
    let total = grid.n.pow(d as u32);
    let mut idx = vec![0usize; d];
    let mut max_ratio: f64 = 0.0;
    let mut worst = vec![0.0; d];
    for _ in 0..total {
        let u: Vec<f64> = idx.iter().map(|&i| grid.node(i)).collect();
        let top = s.density_at(&u);
        if top > 0.0 {
            let bound: f64 = factors.iter().zip(&u).map(|(f, &x)| f.density_at(&[x])).product();
            let ratio = if bound > 0.0 { top / bound } else { f64::INFINITY };
            if ratio > max_ratio {
                max_ratio = ratio;
                worst = u.clone();
            }
        }
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < grid.n {
                break;
            }
            idx[k] = 0;
        }
    }
    let mut violations = 0;
    let mut max_atom: f64 = 0.0;
    for a in &s.atoms {
        if a.1 == 0.0 {
            continue;
        }
        let mut prod = 1.0;
        for (f, &x) in factors.iter().zip(&a.0) {
            let w: f64 = f.atoms.iter().filter(|b| (b.0[0] - x).abs() <= 1e-9).map(|b| b.1).sum();
            prod *= w;
        }
        let ratio = if prod > 0.0 { a.1 / prod } else { f64::INFINITY };
        max_atom = max_atom.max(ratio);
        if ratio > 1.0 + RATIO_TOL {
            violations += 1;
        }
    }
    Ok(DominationReport {
        dominated: max_ratio <= 1.0 + RATIO_TOL && violations == 0,
        max_ratio,
        worst_location: worst,
        atom_violations: violations,
        max_atom_ratio: max_atom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Atom, Density, DomainTag};

    fn factors() -> (Density, Density) {
        (Density::GapIndicator { radius: 0.5, value: 3.0 }, Density::Cosine { coeffs: vec![1.0, 0.8] })
    }

    fn one_d(s: &Density) -> SpectralMeasure {
        SpectralMeasure::new(DomainTag::discrete(1), s.clone(), vec![])
    }

    #[test]
    fn equality_scaling_and_clamping() {
        let (a, b) = factors();
        let fs = vec![one_d(&a), one_d(&b)];
        let dom = DomainTag::discrete(2);
        let grid = GridSpec::torus(64);
        let prod = Density::tensor(vec![a.clone(), b.clone()]);
        let r = tensor_domination_check(&SpectralMeasure::new(dom, prod.clone(), vec![]), &fs, &grid).unwrap();
        assert!(r.dominated && (r.max_ratio - 1.0).abs() < 1e-12);
        let r = tensor_domination_check(&SpectralMeasure::new(dom, prod.clone().scaled(2.0), vec![]), &fs, &grid).unwrap();
        assert!(!r.dominated && (r.max_ratio - 2.0).abs() < 1e-12);
        let r = tensor_domination_check(&SpectralMeasure::new(dom, prod.clamped(1.0), vec![]), &fs, &grid).unwrap();
        assert!(r.dominated);
    }

    #[test]
    fn atoms_need_product_atoms() {
        let f1 = SpectralMeasure::atomic(DomainTag::discrete(1), vec![Atom(vec![0.5], 2.0)]);
        let f2 = SpectralMeasure::atomic(DomainTag::discrete(1), vec![Atom(vec![1.0], 0.5)]);
        let ok = SpectralMeasure::atomic(DomainTag::discrete(2), vec![Atom(vec![0.5, 1.0], 1.0)]);
        let r = tensor_domination_check(&ok, &[f1.clone(), f2.clone()], &GridSpec::torus(8)).unwrap();
        assert!(r.dominated);
        let bad = SpectralMeasure::atomic(DomainTag::discrete(2), vec![Atom(vec![0.5, 0.0], 0.1)]);
        let r = tensor_domination_check(&bad, &[f1, f2], &GridSpec::torus(8)).unwrap();
        assert_eq!(r.atom_violations, 1);
    }
}
