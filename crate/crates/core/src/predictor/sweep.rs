use super::design::{ExclusionRegion, ObservationDesign};
use super::solve::{solve_predictor, Ridge};
use crate::error::{Error, Result};
use crate::quad::QuadratureSpec;
use crate::spectral::{LinearFunctional, SpectralMeasure};
use serde::{Deserialize, Serialize};

/// Last mse below this fraction of the first, on a nonincreasing curve.
pub const VANISHING_RATIO: f64 = 0.1;
/// Relative change of the last refinement below which the curve is flat.
pub const PLATEAU_CHANGE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Vanishing,
    Undetermined,
    Plateau,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub rho: f64,
    pub h: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub mse: f64,
    pub target_var: f64,
    pub cond: f64,
    pub reg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub trends: Vec<(f64, Trend)>,
    pub vanishing_ratio: f64,
    pub plateau_change: f64,
}

/// Classifies an mse curve along a refining schedule.
pub fn classify(mses: &[f64]) -> Trend {
    if mses.len() < 2 {
        return Trend::Undetermined;
    }
    let first = mses[0];
    let last = mses[mses.len() - 1];
    let prev = mses[mses.len() - 2];
    let monotone = mses.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    if monotone && last < VANISHING_RATIO * first {
        Trend::Vanishing
    } else if (prev - last).abs() <= PLATEAU_CHANGE * prev.abs().max(f64::MIN_POSITIVE) {
        Trend::Plateau
    } else {
        Trend::Undetermined
    }
}

/// Runs the predictor for every exclusion radius and schedule step `(h, R)`.
pub fn interpolation_error_sweep(
    s: &SpectralMeasure,
    rhos: &[f64],
    schedule: &[(f64, f64)],
    target: &LinearFunctional,
    spec: &QuadratureSpec,
) -> Result<SweepTable> {
    if rhos.is_empty() || schedule.is_empty() {
        return Err(Error::InvalidInput("sweep needs radii and a schedule".into()));
    }
    if schedule.windows(2).any(|w| !(w[1].0 < w[0].0 && w[1].1 >= w[0].1)) {
        return Err(Error::InvalidInput("schedule must refine: h decreasing, R nondecreasing".into()));
    }
    let mut rows = Vec::new();
    let mut trends = Vec::new();
    for &rho in rhos {
        let mut mses = Vec::new();
        for &(h, r) in schedule {
            let outcome = ObservationDesign::cells(s.domain, ExclusionRegion::Ball { radius: rho }, h, r)
                .and_then(|design| solve_predictor(target, &design, s, Ridge::Auto, spec));
            match outcome {
                Ok(p) => {
                    mses.push(p.mse);
                    rows.push(SweepRow { rho, h, r, mse: p.mse, target_var: p.target_variance, cond: p.gram_condition, reg: p.regularization, failure: None });
                }
                Err(e) => rows.push(SweepRow { rho, h, r, mse: f64::NAN, target_var: f64::NAN, cond: f64::NAN, reg: f64::NAN, failure: Some(e.to_string()) }),
            }
        }
        trends.push((rho, if mses.len() == schedule.len() { classify(&mses) } else { Trend::Undetermined }));
    }
    Ok(SweepTable { rows, trends, vanishing_ratio: VANISHING_RATIO, plateau_change: PLATEAU_CHANGE })
}

impl SweepTable {
    /// CSV with columns `rho,h,R,mse,target_var,cond,reg`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rho", "h", "R", "mse", "target_var", "cond", "reg"]).unwrap();
        for r in &self.rows {
            w.write_record([r.rho, r.h, r.r, r.mse, r.target_var, r.cond, r.reg].map(|v| format!("{v:e}"))).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::TriangleModel;
    use crate::spectral::DomainTag;

    #[test]
    fn trend_rules() {
        assert_eq!(classify(&[1.0, 0.5, 0.05]), Trend::Vanishing);
        assert_eq!(classify(&[1.0, 1.0, 0.999]), Trend::Plateau);
        assert_eq!(classify(&[1.0, 0.8, 0.6]), Trend::Undetermined);
        assert_eq!(classify(&[1.0, 0.05, 0.2]), Trend::Undetermined);
    }

    #[test]
    fn short_sweep_orders_trends() {
        let dom = DomainTag::continuous(1);
        let s = TriangleModel::canonical(1).spectral_measure();
        let target = LinearFunctional::centered_cell(dom, &[0.0], 0.025);
        let t = interpolation_error_sweep(&s, &[0.3, 2.5], &[(0.2, 6.0), (0.1, 8.0), (0.05, 10.0)], &target, &QuadratureSpec::default()).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.trends[1].1, Trend::Plateau);
        assert!(t.trends[0].1 < t.trends[1].1);
        assert!(t.to_csv().starts_with("rho,h,R,mse,target_var,cond,reg\n"));
    }

    #[test]
    fn rejects_coarsening_schedule() {
        let dom = DomainTag::continuous(1);
        let s = TriangleModel::canonical(1).spectral_measure();
        let target = LinearFunctional::centered_cell(dom, &[0.0], 0.025);
        assert!(interpolation_error_sweep(&s, &[0.5], &[(0.1, 5.0), (0.2, 5.0)], &target, &QuadratureSpec::default()).is_err());
        assert!(interpolation_error_sweep(&s, &[], &[(0.1, 5.0)], &target, &QuadratureSpec::default()).is_err());
    }
}
