use super::density::Density;
use super::domain::DomainTag;
use super::gap::spectral_gap_search_in;
use super::measure::SpectralMeasure;
use crate::error::{Error, Result};
use crate::quad::integrate_pts;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum SzegoClass {
    Gap,
    /// Fitted order α of a zero like `exp(-c|u|^{-α})`.
    DeepZeroOrder(f64),
    Regular,
}

#[derive(Debug, Clone, Serialize)]
pub struct SzegoVerdict {
    pub divergent: bool,
    /// `(M, ∫ max(ln s, -M) κ)` for each cutoff.
    pub evidence: Vec<(f64, f64)>,
    pub classification: SzegoClass,
    /// Growth exponent β of the truncated integral, `-D(M) ~ M^β`.
    pub growth_exponent: Option<f64>,
}

/// β above this is read as divergence (α ≥ 1).
pub const DIVERGENT_BETA: f64 = -0.03;
/// β below this is read as convergence.
pub const REGULAR_BETA: f64 = -0.15;

pub fn default_cutoffs() -> Vec<f64> {
    (0..13).map(|k| 4.0 * 2f64.powi(k)).collect()
}

/// Truncated log-integrals `∫ max(ln s, -M) κ` for each cutoff.
pub fn truncated_log_integrals(s: &Density, domain: DomainTag, cutoffs: &[f64]) -> Vec<f64> {
    let disc = domain.is_discrete();
    let (lo, hi) = if disc { (-PI, PI) } else { (-FRAC_PI_2, FRAC_PI_2) };
    // u = tan φ turns κ(u) du = (1+|u|)^{-2} du into a bounded weight
    let map = move |phi: f64| -> (f64, f64) {
        if disc {
            (phi, 1.0)
        } else {
            let t = phi.tan();
            let c = phi.cos();
            (t, 1.0 / ((1.0 + t.abs()).powi(2) * c * c))
        }
    };
    let logs = |phi: f64| s.ln_eval(&[map(phi).0], disc);
    let n = 4000;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&p| logs(p)).collect();
    cutoffs
        .iter()
        .map(|&m| {
            let mut pts = grid.clone();
            for i in 0..n {
                let (a, b) = (vals[i] + m, vals[i + 1] + m);
                if (a < 0.0) != (b < 0.0) {
                    let (mut x0, mut x1) = (grid[i], grid[i + 1]);
                    let neg0 = a < 0.0;
                    for _ in 0..80 {
                        let mid = 0.5 * (x0 + x1);
                        if (logs(mid) + m < 0.0) == neg0 {
                            x0 = mid;
                        } else {
                            x1 = mid;
                        }
                    }
                    pts.push(0.5 * (x0 + x1));
                }
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let f = |phi: f64| {
                let (u, w) = map(phi);
                if w == 0.0 {
                    return 0.0;
                }
                s.ln_eval(&[u], disc).max(-m) * w
            };
            integrate_pts(f, &pts, 0.05, 1e-11, 1e-12, 5_000_000).0
        })
        .collect()
}

/// Numerical Szegő / Wiener classifier for a one-dimensional spectral density.
pub fn log_integral_verdict(s: &Density, domain: DomainTag, cutoffs: &[f64]) -> Result<SzegoVerdict> {
    if domain.dim() != 1 {
        return Err(Error::InvalidInput("the log-integral verdict is one-dimensional".into()));
    }
    if cutoffs.len() < 4 || cutoffs.windows(2).any(|w| w[1] <= w[0]) || cutoffs[0] <= 0.0 {
        return Err(Error::InvalidInput("need at least four increasing positive cutoffs".into()));
    }
    let mut values = truncated_log_integrals(s, domain, cutoffs);
    // the exact sequence is nonincreasing; clip quadrature noise
    for i in 1..values.len() {
        values[i] = values[i].min(values[i - 1]);
    }
    let evidence: Vec<(f64, f64)> = cutoffs.iter().copied().zip(values.iter().copied()).collect();

    // zero set of s, read through ln s so that deep zeros do not underflow into fake gaps
    let owned = s.clone();
    let disc = domain.is_discrete();
    let zero_set = Density::custom("zero-set", move |u| if owned.ln_eval(u, disc) == f64::NEG_INFINITY { 0.0 } else { 1.0 });
    let measure = SpectralMeasure::new(domain, zero_set, vec![]);
    let window = if domain.is_discrete() { PI } else { 50.0 };
    if spectral_gap_search_in(&measure, 1e-3, 0.5, window).is_some() {
        return Ok(SzegoVerdict { divergent: true, evidence, classification: SzegoClass::Gap, growth_exponent: Some(1.0) });
    }

    let inc: Vec<f64> = values.windows(2).map(|w| w[0] - w[1]).collect();
    let scale = values.last().unwrap().abs() + 1.0;
    let tail = &inc[inc.len() - 3..];
    if tail.iter().all(|v| *v <= 1e-10 * scale) {
        return Ok(SzegoVerdict { divergent: false, evidence, classification: SzegoClass::Regular, growth_exponent: None });
    }
    let k = cutoffs.len();
    let mut betas = Vec::new();
    for j in (k - 3)..(k - 1) {
        let (a, b) = (inc[j - 1], inc[j]);
        if a > 0.0 && b > 0.0 {
            betas.push((b / a).ln() / (cutoffs[j + 1] / cutoffs[j]).ln());
        }
    }
    if betas.is_empty() {
        return Err(Error::Inconclusive("increments vanish irregularly".into()));
    }
    let beta = betas.iter().sum::<f64>() / betas.len() as f64;
    let alpha = if beta < 1.0 { 1.0 / (1.0 - beta) } else { f64::INFINITY };
    let divergent = if beta >= DIVERGENT_BETA {
        true
    } else if beta <= REGULAR_BETA {
        false
    } else {
        return Err(Error::Inconclusive(format!("fitted zero order α ≈ {alpha:.3} is too close to the boundary α = 1")));
    };
    Ok(SzegoVerdict { divergent, evidence, classification: SzegoClass::DeepZeroOrder(alpha), growth_exponent: Some(beta) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> DomainTag {
        DomainTag::continuous(1)
    }

    #[test]
    fn exponential_zero_diverges() {
        let v = log_integral_verdict(&Density::DeepZero { alpha: 1.0, c: 1.0 }, line(), &default_cutoffs()).unwrap();
        assert!(v.divergent);
        assert!(matches!(v.classification, SzegoClass::DeepZeroOrder(a) if (a - 1.0).abs() < 0.05), "{v:?}");
    }

    #[test]
    fn square_root_zero_converges() {
        let v = log_integral_verdict(&Density::DeepZero { alpha: 0.5, c: 1.0 }, line(), &default_cutoffs()).unwrap();
        assert!(!v.divergent);
        assert!(matches!(v.classification, SzegoClass::DeepZeroOrder(a) if (a - 0.5).abs() < 0.1));
    }

    #[test]
    fn gap_diverges() {
        let s = Density::GapIndicator { radius: 0.3, value: 1.0 };
        let v = log_integral_verdict(&s, line(), &default_cutoffs()).unwrap();
        assert!(v.divergent);
        assert_eq!(v.classification, SzegoClass::Gap);
        // linear in M: -D(M) ≈ M ∫_{-0.3}^{0.3} κ for large M
        let (m, d) = *v.evidence.last().unwrap();
        assert!((-d / m - 2.0 * (1.0 - 1.0 / 1.3)).abs() < 0.01);
    }

    #[test]
    fn bounded_below_is_regular() {
        let v = log_integral_verdict(&Density::Cosine { coeffs: vec![1.0, 0.5] }, DomainTag::discrete(1), &default_cutoffs()).unwrap();
        assert!(!v.divergent);
        assert_eq!(v.classification, SzegoClass::Regular);
        // ∫ ln(1 + cos θ / 2) dθ = 2π ln((1 + √(3/4)) / 2)
        let exact = 2.0 * PI * ((1.0 + 0.75f64.sqrt()) / 2.0).ln();
        assert!((v.evidence[0].1 - exact).abs() < 1e-9);
    }

    #[test]
    fn evidence_is_monotone() {
        let v = log_integral_verdict(&Density::DeepZero { alpha: 2.0, c: 0.5 }, line(), &default_cutoffs()).unwrap();
        assert!(v.divergent);
        assert!(v.evidence.windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn boundary_is_inconclusive() {
        let r = log_integral_verdict(&Density::DeepZero { alpha: 0.93, c: 1.0 }, line(), &default_cutoffs());
        assert!(matches!(r, Err(Error::Inconclusive(_))), "{r:?}");
    }
}
