//! Elementary special functions: sinc, the unit-cell transform and Bessel factors.

use num_complex::Complex64;
use std::f64::consts::PI;

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `∫_0^1 e^{-i s w} dw = e^{-i s/2} sinc(s/2)`.
pub fn unit_interval_transform(s: f64) -> Complex64 {
    Complex64::from_polar(sinc(s / 2.0), -s / 2.0)
}

/// `J(s) = ∫_{[0,1]^d} e^{-i s·w} dw`.
pub fn unit_cell_transform(s: &[f64]) -> Complex64 {
    s.iter()
        .map(|&x| unit_interval_transform(x))
        .fold(Complex64::new(1.0, 0.0), |a, b| a * b)
}

/// `|J(s)|^2 = Π sinc²(s_l / 2)`.
pub fn unit_cell_transform_sq(s: &[f64]) -> f64 {
    s.iter().map(|&x| sinc(x / 2.0).powi(2)).product()
}

/// Gamma at half-integers and integers, `Γ(nu2 / 2)`.
fn gamma_half(nu2: i32) -> f64 {
    assert!(nu2 > 0);
    if nu2 % 2 == 0 {
        (1..nu2 / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut a: f64 = 0.5;
        while ((2.0 * a).round() as i32) < nu2 {
            g *= a;
            a += 1.0;
        }
        g
    }
}

/// Bessel function of the first kind `B_ν(x)`, `ν = nu2 / 2` integer or half-integer, `ν ≥ -1/2`.
pub fn bessel_j(nu2: i32, x: f64) -> f64 {
    assert!(nu2 >= -1, "order must be at least -1/2");
    if x < 0.0 {
        // B_ν(-x) = (-1)^ν B_ν(x) only makes sense for integer ν
        assert!(nu2 % 2 == 0, "negative argument for half-integer order");
        let s = if (nu2 / 2) % 2 == 0 { 1.0 } else { -1.0 };
        return s * bessel_j(nu2, -x);
    }
    let nu = nu2 as f64 / 2.0;
    if x < 1e-300 {
        return if nu2 == 0 { 1.0 } else if nu2 == -1 { f64::INFINITY } else { 0.0 };
    }
    if nu2 % 2 == 0 {
        let n = nu2 / 2;
        return match n {
            0 => libm::j0(x),
            1 => libm::j1(x),
            _ => libm::jn(n, x),
        };
    }
    if x < nu + 2.0 {
        return x.powf(nu) * bessel_over_power(nu2, x);
    }
    let c = (2.0 / (PI * x)).sqrt();
    let mut jm = c * x.cos(); // ν = -1/2
    if nu2 == -1 {
        return jm;
    }
    let mut j = c * x.sin(); // ν = 1/2
    let mut order = 0.5;
    while order < nu - 1e-9 {
        let next = (2.0 * order / x) * j - jm;
        jm = j;
        j = next;
        order += 1.0;
    }
    j
}

/// `B_ν(x) / x^ν`, analytic at 0 with value `1 / (2^ν Γ(ν+1))`.
pub fn bessel_over_power(nu2: i32, x: f64) -> f64 {
    let nu = nu2 as f64 / 2.0;
    let ax = x.abs();
    if ax > nu + 2.0 {
        return bessel_j(nu2, ax) / ax.powf(nu);
    }
    let h = ax * ax / 4.0;
    let mut term = 1.0 / (2f64.powf(nu) * gamma_half(nu2 + 2));
    let mut sum = term;
    for k in 1..60 {
        term *= -h / (k as f64 * (k as f64 + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Volume of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d as i32 + 2)
}

/// `J_d(r) = (2π)^{d/2} B_{d/2}(r) / r^{d/2}`: Fourier transform of the unit-ball indicator at radius `r`.
pub fn ball_transform(d: usize, r: f64) -> f64 {
    if d == 1 {
        return 2.0 * sinc(r);
    }
    (2.0 * PI).powf(d as f64 / 2.0) * bessel_over_power(d as i32, r)
}

/// Radial kernel of the d-dimensional Fourier transform:
/// `∫_{S^{d-1}} e^{i r ρ ω·e} dω = (2π)^{d/2} B_{d/2-1}(rρ) / (rρ)^{d/2-1}`.
pub fn sphere_average_kernel(d: usize, z: f64) -> f64 {
    if d == 1 {
        return 2.0 * z.cos();
    }
    (2.0 * PI).powf(d as f64 / 2.0) * bessel_over_power(d as i32 - 2, z)
}

/// Surface area of the unit sphere `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert_relative_eq!(sinc(PI / 2.0), 2.0 / PI, epsilon = 1e-15);
        assert!(sinc(3.0 * PI).abs() < 1e-15);
        assert_relative_eq!(sinc(1e-5), (1e-5f64).sin() / 1e-5, epsilon = 1e-15);
    }

    #[test]
    fn half_integer_bessel_closed_forms() {
        for &x in &[0.3, 1.0, 2.5, 7.0, 30.0] {
            let j12 = (2.0 / (PI * x)).sqrt() * x.sin();
            let j32 = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert_relative_eq!(bessel_j(1, x), j12, epsilon = 1e-13, max_relative = 1e-12);
            assert_relative_eq!(bessel_j(3, x), j32, epsilon = 1e-13, max_relative = 1e-11);
        }
    }

    #[test]
    fn integer_bessel_series_agrees_with_libm() {
        for &x in &[0.1, 0.9, 2.2, 3.9] {
            assert_relative_eq!(bessel_over_power(0, x), libm::j0(x), epsilon = 1e-14);
            assert_relative_eq!(bessel_over_power(2, x) * x, libm::j1(x), epsilon = 1e-14);
            assert_relative_eq!(bessel_over_power(4, x) * x * x, libm::jn(2, x), epsilon = 1e-14);
        }
    }

    #[test]
    fn ball_transform_low_dimensions() {
        assert_relative_eq!(ball_transform(1, PI / 2.0), 4.0 / PI, epsilon = 1e-14);
        assert!(ball_transform(1, 4.0 * PI).abs() < 1e-15);
        assert_relative_eq!(ball_transform(2, 0.0), PI, epsilon = 1e-14);
        assert_relative_eq!(ball_transform(3, 0.0), 4.0 * PI / 3.0, epsilon = 1e-14);
        // disc: 2π J1(r)/r
        assert_relative_eq!(ball_transform(2, 3.0), 2.0 * PI * libm::j1(3.0) / 3.0, epsilon = 1e-13);
        // d = 1 via the general formula
        let r = 2.3;
        assert_relative_eq!(
            (2.0 * PI).sqrt() * bessel_j(1, r) / r.sqrt(),
            2.0 * sinc(r),
            epsilon = 1e-14
        );
    }

    #[test]
    fn cell_transform_modulus() {
        let s = [1.3, -0.4];
        let direct: f64 = s.iter().map(|x| sinc(x / 2.0).abs()).product();
        assert_relative_eq!(unit_cell_transform(&s).norm(), direct, epsilon = 1e-15);
        assert!(unit_cell_transform(&[2.0 * PI]).norm() < 1e-15);
    }
}
