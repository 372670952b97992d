use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Physical domain of the random measure. The dual space is `ℝ^d` (continuous)
/// or the torus `𝕋^d` parametrised by angles in `[-π, π)` (discrete).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainTag {
    Continuous { d: usize },
    Discrete { d: usize },
}

impl DomainTag {
    pub fn continuous(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        DomainTag::Continuous { d }
    }

    pub fn discrete(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        DomainTag::Discrete { d }
    }

    pub fn dim(&self) -> usize {
        match *self {
            DomainTag::Continuous { d } | DomainTag::Discrete { d } => d,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, DomainTag::Discrete { .. })
    }

    /// `(2π)^{-d}`.
    pub fn fourier_norm(&self) -> f64 {
        (2.0 * PI).powi(-(self.dim() as i32))
    }
}

/// Representative of an angle in `[-π, π)`.
pub fn fold_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = (x + PI).rem_euclid(two_pi) - PI;
    if y >= PI {
        y -= two_pi;
    }
    y
}

pub fn fold_point(u: &[f64]) -> Vec<f64> {
    u.iter().map(|&x| fold_angle(x)).collect()
}

/// Euclidean norm, with angles folded first on the torus.
pub fn dual_norm(u: &[f64], discrete: bool) -> f64 {
    if discrete {
        u.iter().map(|&x| fold_angle(x).powi(2)).sum::<f64>().sqrt()
    } else {
        u.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding() {
        assert_eq!(fold_angle(0.5), 0.5);
        assert!((fold_angle(PI) + PI).abs() < 1e-15);
        assert!((fold_angle(2.0 * PI + 1.0) - 1.0).abs() < 1e-14);
        assert!((fold_angle(-3.0 * PI + 0.25) - (-PI + 0.25)).abs() < 1e-14);
        for k in -50..50 {
            let y = fold_angle(k as f64 * 0.77);
            assert!((-PI..PI).contains(&y));
        }
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&DomainTag::discrete(2)).unwrap();
        assert_eq!(s, r#"{"kind":"discrete","d":2}"#);
    }
}
