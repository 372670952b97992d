use crate::error::{Error, Result};
use crate::rng::SeededRng;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Nonnegative hull of finitely many generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub generators: Vec<Vec<f64>>,
}

impl ConeSpec {
    /// Normalizes the generators; rejects zero vectors, mixed dimensions and cones that do
    /// not span `ℝ^d`.
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let d = generators.first().map(|g| g.len()).unwrap_or(0);
        if d == 0 || generators.iter().any(|g| g.len() != d) {
            return Err(Error::InvalidInput("generators must be nonempty vectors of one dimension".into()));
        }
        let mut out = Vec::with_capacity(generators.len());
        for g in generators {
            let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::InvalidInput("zero or non-finite generator".into()));
            }
            out.push(g.iter().map(|x| x / n).collect());
        }
        let cone = ConeSpec { generators: out };
        if cone.rank() < d {
            return Err(Error::InvalidInput(format!("generators span dimension {} < {d}", cone.rank())));
        }
        Ok(cone)
    }

    pub fn dim(&self) -> usize {
        self.generators[0].len()
    }

    fn rank(&self) -> usize {
        let d = self.generators[0].len();
        let m = DMatrix::from_fn(self.generators.len(), d, |i, j| self.generators[i][j]);
        m.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-10).count()
    }
}

/// `t₀` with `⟨t₀, g_i⟩ ≥ 1` for every generator, or `None` when the cone contains a line.
pub fn minor_cone_witness(cone: &ConeSpec) -> Option<Vec<f64>> {
    let d = cone.dim();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let pos: Vec<_> = (0..d).map(|_| p.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let neg: Vec<_> = (0..d).map(|_| p.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for g in &cone.generators {
        let expr: Vec<_> = (0..d).flat_map(|l| [(pos[l], g[l]), (neg[l], -g[l])]).collect();
        p.add_constraint(expr.as_slice(), ComparisonOp::Ge, 1.0);
    }
    let sol = p.solve().ok()?;
    let t: Vec<f64> = (0..d).map(|l| sol[pos[l]] - sol[neg[l]]).collect();
    let ok = cone.generators.iter().all(|g| g.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>() >= 1.0 - 1e-7);
    ok.then_some(t)
}

/// Gordan alternative: the cone contains a line iff some convex combination of the
/// generators vanishes.
pub fn contains_line(cone: &ConeSpec) -> bool {
    let d = cone.dim();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let lam: Vec<_> = cone.generators.iter().map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let ones: Vec<_> = lam.iter().map(|&v| (v, 1.0)).collect();
    p.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    for l in 0..d {
        let expr: Vec<_> = lam.iter().zip(&cone.generators).map(|(&v, g)| (v, g[l])).collect();
        p.add_constraint(expr.as_slice(), ComparisonOp::Eq, 0.0);
    }
    p.solve().is_ok()
}

/// Some pair `g_i = -λ g_j` with `λ > 0`.
pub fn has_antipodal_pair(cone: &ConeSpec, tol: f64) -> bool {
    let g = &cone.generators;
    (0..g.len()).any(|i| (i + 1..g.len()).any(|j| g[i].iter().zip(&g[j]).all(|(a, b)| (a + b).abs() <= tol)))
}

/// How a random test cone was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeFamily {
    Generic,
    PlantedAntipodal,
    Pointed,
}

/// Random cones in dimensions `2..=max_dim`, cycling through the three families.
pub fn random_cones(rng: &mut SeededRng, count: usize, max_dim: usize) -> Vec<(ConeFamily, ConeSpec)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let family = [ConeFamily::Generic, ConeFamily::PlantedAntipodal, ConeFamily::Pointed][out.len() % 3];
        let d = rng.gen_range(2..=max_dim.max(2));
        let k = rng.gen_range(d..=2 * d + 1);
        let mut gens: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect()).collect();
        match family {
            ConeFamily::Generic => {}
            ConeFamily::PlantedAntipodal => {
                let lambda: f64 = rng.gen_range(0.5..2.0);
                let g = gens[0].iter().map(|x| -x * lambda).collect();
                gens.push(g);
            }
            ConeFamily::Pointed => {
                let c: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                for g in gens.iter_mut() {
                    let dot: f64 = g.iter().zip(&c).map(|(a, b)| a * b).sum();
                    if dot < 0.0 {
                        g.iter_mut().for_each(|x| *x = -*x);
                    }
                }
            }
        }
        if let Ok(cone) = ConeSpec::new(gens) {
            out.push((family, cone));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn quadrant_is_minor() {
        let c = ConeSpec::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let t = minor_cone_witness(&c).unwrap();
        assert!(c.generators.iter().all(|g| dot(g, &t) >= 1.0 - 1e-9));
        assert!((t[0] - 1.0).abs() < 1e-9 && (t[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn line_has_no_witness() {
        let c = ConeSpec::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(minor_cone_witness(&c).is_none());
        assert!(contains_line(&c));
        assert!(has_antipodal_pair(&c, 1e-12));
    }

    #[test]
    fn fan_around_first_axis() {
        let c = ConeSpec::new(vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let t = minor_cone_witness(&c).unwrap();
        assert!(t[0] > 0.0 && t[1].abs() < 1e-9);
    }

    #[test]
    fn positively_spanning_triple_without_antipodes() {
        let c = ConeSpec::new(vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert!(!has_antipodal_pair(&c, 1e-9));
        assert!(contains_line(&c));
        assert!(minor_cone_witness(&c).is_none());
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(ConeSpec::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(ConeSpec::new(vec![vec![1.0, 0.0]]).is_err());
        assert!(ConeSpec::new(vec![]).is_err());
    }

    #[test]
    fn witness_matches_gordan_on_random_cones() {
        let mut rng = SeededRng::new(11);
        for (family, c) in random_cones(&mut rng, 90, 4) {
            let w = minor_cone_witness(&c);
            assert_eq!(w.is_some(), !contains_line(&c), "{family:?} {c:?}");
            match family {
                ConeFamily::PlantedAntipodal => assert!(w.is_none()),
                ConeFamily::Pointed => assert!(w.is_some()),
                ConeFamily::Generic => {}
            }
        }
    }
}
