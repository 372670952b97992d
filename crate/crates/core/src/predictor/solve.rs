use super::design::ObservationDesign;
use super::gram::{cross_vector, gram_matrix, inner};
use crate::error::{Error, Result};
use crate::linalg::{extreme_eigenvalues, CMatrix, CVector};
use crate::quad::QuadratureSpec;
use crate::spectral::{LinearFunctional, SpectralMeasure};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Condition number beyond which an unregularised Gram is refused.
pub const MAX_CONDITION: f64 = 1e14;

/// Ridge added to the Gram diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Ridge {
    /// `1e-10 · tr(G) / n`.
    #[default]
    Auto,
    Fixed(f64),
    /// No ridge; fails with `SingularGram` past `MAX_CONDITION`.
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionResult {
    /// Prediction is `Σ w_i M(h_i)`.
    pub weights: Vec<Complex64>,
    /// `b_i = ⟨target, h_i⟩_S`.
    pub rhs: Vec<Complex64>,
    pub mse: f64,
    pub target_variance: f64,
    pub gram_condition: f64,
    pub regularization: f64,
}

impl PredictionResult {
    pub fn relative_mse(&self) -> f64 {
        if self.target_variance > 0.0 {
            self.mse / self.target_variance
        } else {
            0.0
        }
    }
}

/// Best linear predictor of `M(target)` from the design observations.
pub fn solve_predictor(
    target: &LinearFunctional,
    design: &ObservationDesign,
    s: &SpectralMeasure,
    ridge: Ridge,
    spec: &QuadratureSpec,
) -> Result<PredictionResult> {
    if design.is_empty() {
        return Err(Error::InvalidInput("design is empty".into()));
    }
    let g = gram_matrix(&design.functionals, s, spec)?;
    let c = cross_vector(&design.functionals, target, s, spec)?;
    let var = inner(target, target, s, spec)?.re.max(0.0);
    solve_system(&g, &c, var, ridge)
}

/// Solves `(G + reg I) v = c` and reports the error of the predictor `w = conj(v)`.
pub fn solve_system(g: &CMatrix, c: &CVector, target_variance: f64, ridge: Ridge) -> Result<PredictionResult> {
    let n = g.nrows();
    let trace: f64 = (0..n).map(|i| g[(i, i)].re).sum();
    let reg = match ridge {
        Ridge::Auto => 1e-10 * trace / n as f64,
        Ridge::Fixed(r) if r >= 0.0 => r,
        Ridge::Fixed(_) => return Err(Error::InvalidInput("ridge must be ≥ 0".into())),
        Ridge::None => 0.0,
    };
    if trace == 0.0 {
        // S vanishes on every observation: nothing to learn
        return Ok(PredictionResult {
            weights: vec![Complex64::new(0.0, 0.0); n],
            rhs: c.iter().copied().collect(),
            mse: target_variance,
            target_variance,
            gram_condition: f64::INFINITY,
            regularization: reg,
        });
    }
    let mut a = g.clone();
    for i in 0..n {
        a[(i, i)] += reg;
    }
    let chol = a.clone().cholesky();
    let (lmax, lmin) = extreme_eigenvalues(g, chol.as_ref());
    let lmin_g = (lmin - reg).max(0.0);
    let condition = if lmin_g > 0.0 { lmax / lmin_g } else { f64::INFINITY };
    if matches!(ridge, Ridge::None) && (chol.is_none() || condition > MAX_CONDITION) {
        return Err(Error::SingularGram { condition });
    }
    let v = match chol {
        Some(ch) => ch.solve(c),
        None => crate::linalg::pinv_solve(&a, c, 1e-14),
    };
    let gv = g * &v;
    let mse_raw = target_variance - 2.0 * v.dotc(c).re + v.dotc(&gv).re;
    Ok(PredictionResult {
        weights: v.iter().map(|z| z.conj()).collect(),
        rhs: c.iter().copied().collect(),
        mse: mse_raw.max(0.0),
        target_variance,
        gram_condition: condition,
        regularization: reg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::TriangleModel;
    use crate::predictor::design::ExclusionRegion;
    use crate::spectral::DomainTag;
    use approx::assert_relative_eq;

    fn dom() -> DomainTag {
        DomainTag::continuous(1)
    }

    #[test]
    fn self_prediction() {
        let s = TriangleModel::canonical(1).spectral_measure();
        let fs: Vec<_> = (0..5).map(|i| LinearFunctional::cell(dom(), vec![0.4 * i as f64], 0.4)).collect();
        let target = fs[2].clone();
        let design = ObservationDesign::from_functionals(fs, ExclusionRegion::Ball { radius: 0.0 }).unwrap();
        let r = solve_predictor(&target, &design, &s, Ridge::None, &QuadratureSpec::default()).unwrap();
        assert!((r.weights[2] - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(r.mse < 1e-12 * r.target_variance);
    }

    #[test]
    fn decorrelated_design_leaves_variance() {
        let s = TriangleModel::canonical(1).spectral_measure();
        let target = LinearFunctional::centered_cell(dom(), &[0.0], 0.2);
        let design = ObservationDesign::cells(dom(), ExclusionRegion::Ball { radius: 2.1 }, 0.1, 6.0).unwrap();
        let r = solve_predictor(&target, &design, &s, Ridge::Auto, &QuadratureSpec::default()).unwrap();
        assert!(((r.mse - r.target_variance) / r.target_variance).abs() < 1e-6);
        assert!(r.weights.iter().all(|w| w.norm() < 1e-6));
    }

    #[test]
    fn normal_equation_identity() {
        let s = TriangleModel::canonical(1).spectral_measure();
        let target = LinearFunctional::centered_cell(dom(), &[0.0], 0.05);
        let design = ObservationDesign::cells(dom(), ExclusionRegion::Ball { radius: 0.5 }, 0.2, 4.0).unwrap();
        let r = solve_predictor(&target, &design, &s, Ridge::None, &QuadratureSpec::default()).unwrap();
        let wb: f64 = r.weights.iter().zip(&r.rhs).map(|(w, b)| (w * b).re).sum();
        assert_relative_eq!(r.mse, r.target_variance - wb, max_relative = 1e-8);
        assert!(r.mse <= r.target_variance);
    }

    #[test]
    fn singular_gram_without_ridge() {
        let s = TriangleModel::canonical(1).spectral_measure();
        let f = LinearFunctional::cell(dom(), vec![1.0], 0.3);
        let design = ObservationDesign::from_functionals(vec![f.clone(), f.clone()], ExclusionRegion::Ball { radius: 0.5 }).unwrap();
        let target = LinearFunctional::cell(dom(), vec![0.0], 0.1);
        let err = solve_predictor(&target, &design, &s, Ridge::None, &QuadratureSpec::default());
        assert!(matches!(err, Err(Error::SingularGram { .. })));
        assert!(solve_predictor(&target, &design, &s, Ridge::Auto, &QuadratureSpec::default()).is_ok());
    }
}
