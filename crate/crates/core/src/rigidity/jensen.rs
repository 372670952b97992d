use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Zero counts `n_T` of a real function on `[-T, T]` and `ζ̂ = min_{tail} n_T / T`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroDensityEstimate {
    pub tag: String,
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    pub zeta_hat: f64,
    pub zeros: Vec<f64>,
    pub refinement: f64,
}

/// Radii reported per estimate.
pub const RADII: usize = 100;
/// `ζ̂` is the minimum of `n_T / T` over `T ∈ [TAIL · T_max, T_max]`.
pub const TAIL: f64 = 0.75;
const RETRIES: usize = 3;

impl ZeroDensityEstimate {
    pub fn ratios(&self) -> Vec<f64> {
        self.radii.iter().zip(&self.counts).map(|(t, &n)| n as f64 / t).collect()
    }

    /// Columns `T, n_T, n_T/T`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("T,n_T,ratio\n");
        for (t, n) in self.radii.iter().zip(&self.counts) {
            s.push_str(&format!("{t},{n},{}\n", *n as f64 / t));
        }
        s
    }
}

/// Counts sign changes of `psi` on `[-t_max, t_max]` at grid step `refinement`, polishing
/// each bracket by bisection. When two polished zeros are closer than two grid steps the
/// grid is refined fourfold, at most three times.
pub fn jensen_zero_density(psi: &dyn Fn(f64) -> f64, tag: &str, t_max: f64, refinement: f64) -> Result<ZeroDensityEstimate> {
    if !(t_max > 0.0) || !(refinement > 0.0) || refinement >= t_max {
        return Err(Error::InvalidInput("need 0 < refinement < T_max".into()));
    }
    let mut step = refinement;
    for attempt in 0..=RETRIES {
        let zeros = sign_change_zeros(psi, t_max, step)?;
        match zeros.windows(2).find(|w| w[1] - w[0] < 2.0 * step) {
            Some(_) if attempt < RETRIES => step /= 4.0,
            Some(w) => return Err(Error::ClusteredZeros { location: 0.5 * (w[0] + w[1]), step }),
            None => return Ok(summarize(tag, zeros, t_max, step)),
        }
    }
    unreachable!()
}

fn sign_change_zeros(psi: &dyn Fn(f64) -> f64, t_max: f64, step: f64) -> Result<Vec<f64>> {
    let n = (2.0 * t_max / step).ceil() as usize;
    let h = 2.0 * t_max / n as f64;
    let mut zeros = Vec::new();
    let mut x0 = -t_max;
    let mut f0 = psi(x0);
    if f0 == 0.0 {
        zeros.push(x0);
    }
    for i in 1..=n {
        let x1 = -t_max + h * i as f64;
        let f1 = psi(x1);
        if !f1.is_finite() {
            return Err(Error::InvalidInput(format!("ψ({x1}) is not finite")));
        }
        if f1 == 0.0 {
            zeros.push(x1);
        } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            zeros.push(bisect(psi, x0, x1, f0));
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(zeros)
}

fn bisect(psi: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if b - a <= 1e-13 * (1.0 + m.abs()) {
            break;
        }
        let fm = psi(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn summarize(tag: &str, zeros: Vec<f64>, t_max: f64, step: f64) -> ZeroDensityEstimate {
    let radii: Vec<f64> = (1..=RADII).map(|j| t_max * j as f64 / RADII as f64).collect();
    let counts: Vec<usize> = radii.iter().map(|&t| zeros.iter().filter(|z| z.abs() <= t).count()).collect();
    let zeta_hat = radii
        .iter()
        .zip(&counts)
        .filter(|(t, _)| **t >= TAIL * t_max - 1e-12)
        .map(|(t, &n)| n as f64 / t)
        .fold(f64::INFINITY, f64::min);
    ZeroDensityEstimate { tag: tag.into(), radii, counts, zeta_hat, zeros, refinement: step }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sinc;
    use std::f64::consts::PI;

    #[test]
    fn cosine_density() {
        let z = jensen_zero_density(&f64::cos, "cos", 200.0, 0.05).unwrap();
        assert!((z.zeta_hat / (2.0 / PI) - 1.0).abs() < 0.02, "{}", z.zeta_hat);
        assert!(z.counts.windows(2).all(|w| w[0] <= w[1]));
        for (k, x) in z.zeros.iter().filter(|x| **x > 0.0).enumerate() {
            assert!((x - (PI / 2.0 + k as f64 * PI)).abs() < 1e-9);
        }
    }

    #[test]
    fn no_zeros() {
        let z = jensen_zero_density(&|_| 1.0, "one", 50.0, 0.1).unwrap();
        assert_eq!(z.zeta_hat, 0.0);
    }

    #[test]
    fn sinc_zeros_on_pi_lattice() {
        let z = jensen_zero_density(&|x| 2.0 * sinc(x), "sinc", 200.0, 0.05).unwrap();
        let expected = 2.0 * (200.0 / PI).floor();
        assert_eq!(z.zeros.len() as f64, expected);
        assert!((z.zeta_hat / (2.0 / PI) - 1.0).abs() < 0.02);
    }

    #[test]
    fn refines_close_zeros() {
        let f = |x: f64| (x - 1.01) * (x - 1.16);
        let z = jensen_zero_density(&f, "pair", 5.0, 0.1).unwrap();
        assert_eq!(z.zeros.len(), 2);
        assert!(z.refinement < 0.1);
    }

    #[test]
    fn clustered_zeros_error() {
        let f = |x: f64| (x - 1.1 + 1e-7) * (x - 1.1 - 1e-7);
        assert!(matches!(jensen_zero_density(&f, "tight", 5.0, 0.1), Err(Error::ClusteredZeros { .. })));
    }

    #[test]
    fn csv_columns() {
        let z = jensen_zero_density(&f64::cos, "cos", 10.0, 0.05).unwrap();
        let csv = z.to_csv();
        assert!(csv.starts_with("T,n_T,ratio\n"));
        assert_eq!(csv.lines().count(), RADII + 1);
    }
}
