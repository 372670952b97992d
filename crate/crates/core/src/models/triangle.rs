//! Triangle covariance `Δ = 1_{B(0,1)} ∗ 1_{B(0,1)}`, its pointwise powers and their spectra.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_line, QuadratureSpec};
use crate::special::{ball_transform, bessel_j};
use crate::spectral::{Density, DomainTag, SpectralMeasure};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Field with covariance `scale · Δ(x)^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleModel {
    pub d: usize,
    pub q: u32,
    pub scale: f64,
}

impl TriangleModel {
    pub fn new(d: usize, q: u32, scale: f64) -> Result<Self> {
        let m = TriangleModel { d, q, scale };
        m.density().validate(d)?;
        Ok(m)
    }

    /// The canonical normalisation `Δ(0) = vol B(0,1)`.
    pub fn canonical(d: usize) -> Self {
        TriangleModel { d, q: 1, scale: 1.0 }
    }

    /// `(1 - |x|/2)_+` in d = 1.
    pub fn unit_peak_1d() -> Self {
        TriangleModel { d: 1, q: 1, scale: 0.5 }
    }

    pub fn density(&self) -> Density {
        Density::Triangle { d: self.d, q: self.q, scale: self.scale }
    }

    pub fn spectral_measure(&self) -> SpectralMeasure {
        SpectralMeasure::new(DomainTag::continuous(self.d), self.density(), vec![])
            .with_tag(&format!("triangle-d{}-q{}", self.d, self.q))
    }

    pub fn covariance(&self, r: f64) -> f64 {
        self.scale * lens_volume(self.d, r).powi(self.q as i32)
    }

    pub fn support_radius(&self) -> f64 {
        2.0
    }
}

/// `scale · ℱ(Δ^q)(u)`.
pub fn triangle_spectral_density(m: &TriangleModel, u: &[f64]) -> Result<f64> {
    if m.q > 1 && m.d > 2 {
        return Err(Error::Unsupported("powers of Δ are implemented for d ≤ 2".into()));
    }
    let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(m.scale * fourier_of_power(m.d, m.q, r))
}

/// `Δ_d(r)`: volume of the intersection of two unit balls at distance `r`.
pub fn lens_volume(d: usize, r: f64) -> f64 {
    let r = r.abs();
    if r >= 2.0 {
        return 0.0;
    }
    match d {
        1 => 2.0 - r,
        2 => 2.0 * (r / 2.0).acos() - 0.5 * r * (4.0 - r * r).sqrt(),
        3 => PI / 12.0 * (4.0 + r) * (2.0 - r).powi(2),
        _ => panic!("lens volume implemented for d ≤ 3"),
    }
}

/// `∫ e^{-iu·x} Δ(x)^q dx` at `‖u‖ = r`.
pub fn fourier_of_power(d: usize, q: u32, r: f64) -> f64 {
    let r = r.abs();
    if q == 1 {
        return ball_transform(d, r).powi(2);
    }
    match d {
        1 => 2.0 * cosine_transform_poly(q, r),
        2 => {
            let f = |x: f64| lens_volume(2, x).powi(q as i32) * bessel_j(0, r * x) * x;
            let (v, _) = integrate(f, 0.0, 2.0, (1.0 / (1.0 + r)).max(0.01), 1e-14);
            2.0 * PI * v
        }
        _ => f64::NAN,
    }
}

/// `∫_0^2 (2-x)^q cos(r x) dx` in closed form.
pub fn cosine_transform_poly(q: u32, r: f64) -> f64 {
    let qf = q as i32;
    if r < 1.0 {
        // Σ_m (-1)^m r^{2m} 2^{q+2m+1} q! / (q+2m+1)!
        let mut sum = 0.0;
        let mut m = 0;
        loop {
            let mut t = 2f64.powi(qf + 2 * m + 1) * r.powi(2 * m);
            for j in 1..=(2 * m + 1) {
                t /= (qf + j) as f64;
            }
            let t = if m % 2 == 0 { t } else { -t };
            sum += t;
            if t.abs() < 1e-18 * sum.abs() || m > 60 {
                break;
            }
            m += 1;
        }
        return sum;
    }
    // Re{ e^{2ir} q!/(ir)^{q+1} - Σ_j q!/(q-j)! 2^{q-j} / (ir)^{j+1} }
    let ir = num_complex::Complex64::new(0.0, r);
    let qfact: f64 = (1..=q).map(|k| k as f64).product();
    let mut total = num_complex::Complex64::from_polar(1.0, 2.0 * r) * qfact / ir.powi(qf + 1);
    let mut falling = 1.0;
    for j in 0..=q {
        if j > 0 {
            falling *= (q - j + 1) as f64;
        }
        total -= falling * 2f64.powi(qf - j as i32) / ir.powi(j as i32 + 1);
    }
    total.re
}

/// Density of the pointwise power by the q-fold convolution `(2π)^{-(q-1)}(J_1²)^{∗q}` in d = 1.
pub fn convolution_density_1d(q: u32, u: f64, spec: &QuadratureSpec) -> Result<f64> {
    if q == 1 {
        return Ok(ball_transform(1, u).powi(2));
    }
    let inner = |v: f64| -> f64 {
        let prev = convolution_density_1d(q - 1, u - v, spec).unwrap_or(f64::NAN);
        ball_transform(1, v).powi(2) * prev
    };
    let v = integrate_line(inner, spec, 4.0 + u.abs() * 0.0, &[])?;
    if v.is_nan() {
        return Err(Error::QuadratureDivergence { estimate: f64::NAN, tolerance: spec.abs_tol });
    }
    Ok(v / (2.0 * PI))
}

/// Even second antiderivative of `scale · (2-|z|)_+^q` with `Φ(0) = Φ'(0) = 0`.
pub fn second_antiderivative(q: u32, scale: f64, z: f64) -> f64 {
    let z = z.abs();
    let qf = q as f64;
    let two_q1 = 2f64.powi(q as i32 + 1);
    let phi = |z: f64| two_q1 * z / (qf + 1.0) - (2.0 * two_q1 - (2.0 - z).powi(q as i32 + 2)) / ((qf + 1.0) * (qf + 2.0));
    let v = if z <= 2.0 { phi(z) } else { phi(2.0) + two_q1 / (qf + 1.0) * (z - 2.0) };
    scale * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_values() {
        let m = TriangleModel::canonical(1);
        assert_relative_eq!(triangle_spectral_density(&m, &[0.0]).unwrap(), 4.0, epsilon = 1e-14);
        assert!(triangle_spectral_density(&m, &[PI]).unwrap().abs() < 1e-30);
        let m2 = TriangleModel::new(1, 2, 1.0).unwrap();
        assert!(triangle_spectral_density(&m2, &[2.0 * PI]).unwrap() > 1e-3);
        assert!(triangle_spectral_density(&TriangleModel { d: 3, q: 2, scale: 1.0 }, &[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn lens_endpoints() {
        assert_eq!(lens_volume(1, 0.5), 1.5);
        assert_relative_eq!(lens_volume(2, 0.0), PI, epsilon = 1e-14);
        assert_relative_eq!(lens_volume(3, 0.0), 4.0 * PI / 3.0, epsilon = 1e-14);
        for d in 1..=3 {
            assert!(lens_volume(d, 2.0).abs() < 1e-12);
            assert_eq!(lens_volume(d, 3.0), 0.0);
        }
    }

    #[test]
    fn cosine_transform_matches_quadrature() {
        for q in 1..=4u32 {
            for &r in &[0.0, 0.3, 0.99, 1.0, 2.5, 7.0, 40.0] {
                let (direct, _) = integrate(|x: f64| (2.0 - x).powi(q as i32) * (r * x).cos(), 0.0, 2.0, 0.05, 1e-15);
                assert_relative_eq!(cosine_transform_poly(q, r), direct, epsilon = 1e-12, max_relative = 1e-10);
            }
        }
        // q = 1 is 2 sin²(r)/r² = J_1²/2
        assert_relative_eq!(2.0 * cosine_transform_poly(1, 1.7), ball_transform(1, 1.7).powi(2), epsilon = 1e-13);
    }

    #[test]
    fn convolution_route_fills_zeros() {
        let spec = QuadratureSpec::with_tol(1e-9);
        let conv = convolution_density_1d(2, 2.0 * PI, &spec).unwrap();
        assert!(conv > 0.0);
        assert_relative_eq!(conv, fourier_of_power(1, 2, 2.0 * PI), max_relative = 1e-6);
        let conv0 = convolution_density_1d(2, 0.0, &spec).unwrap();
        // ∫ (2-|x|)^2 dx = 16/3
        assert_relative_eq!(conv0, 16.0 / 3.0, max_relative = 1e-7);
    }

    #[test]
    fn second_antiderivative_derivatives() {
        for q in 1..=3u32 {
            for &z in &[0.2, 1.1, 1.9, 2.5] {
                let h = 1e-4;
                let dd = (second_antiderivative(q, 1.0, z + h) - 2.0 * second_antiderivative(q, 1.0, z)
                    + second_antiderivative(q, 1.0, z - h))
                    / (h * h);
                assert_relative_eq!(dd, (2.0f64 - z).max(0.0).powi(q as i32), epsilon = 1e-5);
            }
        }
        // triangle: z² - z³/6 on [0,2]
        assert_relative_eq!(second_antiderivative(1, 1.0, 1.5), 1.5 * 1.5 - 1.5f64.powi(3) / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn hankel_route_q1_matches_bessel_square() {
        let f = |r: f64| {
            let g = |x: f64| lens_volume(2, x) * bessel_j(0, r * x) * x;
            2.0 * PI * integrate(g, 0.0, 2.0, 0.05, 1e-14).0
        };
        for &r in &[0.0, 1.0, 4.5] {
            assert_relative_eq!(f(r), ball_transform(2, r).powi(2), epsilon = 1e-10);
        }
    }
}
