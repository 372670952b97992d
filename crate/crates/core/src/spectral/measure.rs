use super::density::Density;
use super::domain::{fold_point, DomainTag};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point mass `(location, weight)` of a spectral measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom(pub Vec<f64>, pub f64);

impl Atom {
    pub fn loc(&self) -> &[f64] {
        &self.0
    }
    pub fn weight(&self) -> f64 {
        self.1
    }
}

/// Spectral measure `S = s(u) du + Σ a_j δ_{u_j}` on `ℝ^d` or `𝕋^d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub domain: DomainTag,
    pub density: Density,
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<String>,
}

/// Angle tolerance used when merging atoms.
pub const MERGE_TOL: f64 = 1e-10;

impl SpectralMeasure {
    /// Builds a measure; atom locations on the torus are folded to `[-π, π)`.
    pub fn new(domain: DomainTag, density: Density, atoms: Vec<Atom>) -> Self {
        let atoms = if domain.is_discrete() {
            atoms.into_iter().map(|a| Atom(fold_point(&a.0), a.1)).collect()
        } else {
            atoms
        };
        SpectralMeasure { domain, density, atoms, metadata: None }
    }

    pub fn zero(domain: DomainTag) -> Self {
        Self::new(domain, Density::Zero, vec![])
    }

    /// `c · du`. On the torus `c = 1` gives total mass `(2π)^d`.
    pub fn lebesgue(domain: DomainTag, c: f64) -> Self {
        Self::new(domain, Density::Constant { value: c }, vec![])
    }

    pub fn atomic(domain: DomainTag, atoms: Vec<Atom>) -> Self {
        Self::new(domain, Density::Zero, atoms)
    }

    /// Atoms at `±u` with weight `a` each (a single atom when `u = -u`).
    pub fn symmetric_atoms(domain: DomainTag, pairs: &[(Vec<f64>, f64)]) -> Self {
        let mut atoms = Vec::new();
        for (u, a) in pairs {
            atoms.push(Atom(u.clone(), *a));
            atoms.push(Atom(u.iter().map(|x| -x).collect(), *a));
        }
        let mut m = Self::atomic(domain, atoms);
        m.merge_atoms();
        m
    }

    pub fn with_tag(mut self, tag: &str) -> Self {
        self.metadata = Some(tag.to_string());
        self
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_atomic(&self) -> bool {
        self.density.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.density.is_zero() && self.atoms.iter().all(|a| a.1 == 0.0)
    }

    pub fn density_at(&self, u: &[f64]) -> f64 {
        self.density.eval(u, self.domain.is_discrete())
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Multiplies the whole measure by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut m = self.clone();
        m.density = if c == 1.0 { m.density } else { m.density.scaled(c) };
        for a in &mut m.atoms {
            a.1 *= c;
        }
        m
    }

    /// Merges atoms closer than `MERGE_TOL` (angle-wise on the torus), summing weights,
    /// and drops zero weights. Output is sorted lexicographically.
    pub fn merge_atoms(&mut self) {
        let discrete = self.domain.is_discrete();
        let mut atoms: Vec<Atom> = std::mem::take(&mut self.atoms).into_iter().filter(|a| a.1 != 0.0).collect();
        if discrete {
            for a in &mut atoms {
                // snap -π+tiny and π-tiny onto one representative
                for x in &mut a.0 {
                    if (*x - PI).abs() < MERGE_TOL || (*x + PI).abs() < MERGE_TOL {
                        *x = -PI;
                    }
                }
            }
        }
        atoms.sort_by(|a, b| {
            for (x, y) in a.0.iter().zip(&b.0) {
                let o = x.total_cmp(y);
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        });
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        'next: for a in atoms {
            for o in out.iter_mut().rev() {
                // sorted by first coordinate: stop scanning once far away
                if a.0[0] - o.0[0] > MERGE_TOL {
                    break;
                }
                if a.0.iter().zip(&o.0).all(|(x, y)| (x - y).abs() <= MERGE_TOL) {
                    o.1 += a.1;
                    continue 'next;
                }
            }
            out.push(a);
        }
        self.atoms = out;
    }

    /// Symmetry `S(-A) = S(A)`: every atom has a partner at `-u` with equal weight,
    /// and the density is even at the probe points.
    pub fn check_symmetry(&self, tol: f64) -> bool {
        let discrete = self.domain.is_discrete();
        let neg = |u: &[f64]| -> Vec<f64> {
            let v: Vec<f64> = u.iter().map(|x| -x).collect();
            if discrete {
                fold_point(&v)
            } else {
                v
            }
        };
        let same = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).all(|(x, y)| {
                let dx = (x - y).abs();
                dx <= 1e-9 || (discrete && (dx - 2.0 * PI).abs() <= 1e-9)
            })
        };
        for a in &self.atoms {
            let m = neg(&a.0);
            let partner: f64 = self.atoms.iter().filter(|b| same(&b.0, &m)).map(|b| b.1).sum();
            let own: f64 = self.atoms.iter().filter(|b| same(&b.0, &a.0)).map(|b| b.1).sum();
            if (partner - own).abs() > tol * own.abs().max(1.0) {
                return false;
            }
        }
        let d = self.dim();
        let mut probe = 0x2545F4914F6CDD1Du64;
        for _ in 0..64 {
            let u: Vec<f64> = (0..d)
                .map(|_| {
                    probe ^= probe << 13;
                    probe ^= probe >> 7;
                    probe ^= probe << 17;
                    ((probe >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 2.0 * PI
                })
                .collect();
            let a = self.density_at(&u);
            let b = self.density_at(&neg(&u));
            if (a - b).abs() > tol * a.abs().max(b.abs()).max(1.0) {
                return false;
            }
        }
        true
    }

    pub fn validate(&self) -> Result<()> {
        self.density.validate(self.dim())?;
        for a in &self.atoms {
            if a.0.len() != self.dim() {
                return Err(Error::InvalidInput(format!("atom of dimension {} in dimension {}", a.0.len(), self.dim())));
            }
            if !(a.1 >= 0.0) || !a.1.is_finite() {
                return Err(Error::InvalidInput(format!("atom weight {} is not a finite nonnegative number", a.1)));
            }
            if self.domain.is_discrete() && a.0.iter().any(|x| !(-PI..PI).contains(x)) {
                return Err(Error::InvalidInput("torus atom outside [-π, π)".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: SpectralMeasure = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_sums_and_sorts() {
        let mut m = SpectralMeasure::atomic(
            DomainTag::continuous(1),
            vec![Atom(vec![1.0], 1.0), Atom(vec![-1.0], 0.5), Atom(vec![1.0 + 1e-12], 0.5), Atom(vec![3.0], 0.0)],
        );
        m.merge_atoms();
        assert_eq!(m.atoms.len(), 2);
        assert_eq!(m.atoms[1].1, 1.5);
        assert_eq!(m.atoms[0].0, vec![-1.0]);
    }

    #[test]
    fn torus_pi_atoms_merge() {
        let mut m = SpectralMeasure::atomic(DomainTag::discrete(1), vec![Atom(vec![PI], 1.0), Atom(vec![-PI], 1.0)]);
        m.merge_atoms();
        assert_eq!(m.atoms.len(), 1);
        assert_eq!(m.atoms[0].1, 2.0);
        assert!(m.check_symmetry(1e-12));
    }

    #[test]
    fn symmetry_detection() {
        let s = SpectralMeasure::symmetric_atoms(DomainTag::continuous(2), &[(vec![1.0, 2.0], 0.3)]);
        assert!(s.check_symmetry(1e-12));
        let bad = SpectralMeasure::atomic(DomainTag::continuous(1), vec![Atom(vec![1.0], 1.0)]);
        assert!(!bad.check_symmetry(1e-12));
        let odd = SpectralMeasure::new(DomainTag::continuous(1), Density::custom("odd", |u| 1.0 + u[0].tanh()), vec![]);
        assert!(!odd.check_symmetry(1e-9));
    }

    #[test]
    fn json_document_shape() {
        let s = SpectralMeasure::symmetric_atoms(DomainTag::discrete(1), &[(vec![0.5], 2.0)]);
        let j = s.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["domain"]["kind"], "discrete");
        assert_eq!(v["density"]["tag"], "zero");
        assert_eq!(v["atoms"][0][1], 2.0);
        let back = SpectralMeasure::from_json(&j).unwrap();
        assert_eq!(back.atoms, s.atoms);
    }
}
