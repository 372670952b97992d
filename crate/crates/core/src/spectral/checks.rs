use super::density::Density;
use super::domain::dual_norm;
use super::integrals::{density_integral, Integrand};
use super::measure::SpectralMeasure;
use crate::error::{Error, Result};
use crate::quad::{integrate_pts, QuadratureSpec};
use crate::special::sphere_area;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Partial κ-weighted masses on growing balls.
#[derive(Debug, Clone, Serialize)]
pub struct TemperedEvidence {
    pub tempered: bool,
    pub radii: Vec<f64>,
    pub increments: Vec<f64>,
    pub partial_sums: Vec<f64>,
}

/// `κ(u) = (1+‖u‖)^{-d-1}` on `ℝ^d`.
pub fn kappa(d: usize, r: f64) -> f64 {
    (1.0 + r).powi(-(d as i32) - 1)
}

fn shell_density_mass(s: &Density, d: usize, r0: f64, r1: f64) -> Result<f64> {
    let spec = QuadratureSpec::with_tol(1e-12);
    let panel = ((r1 - r0) / 64.0).max(0.05);
    if d == 1 {
        let mut pts = vec![r0];
        pts.extend(s.breakpoints_1d().into_iter().map(f64::abs).filter(|b| *b > r0 && *b < r1));
        pts.push(r1);
        pts.sort_by(f64::total_cmp);
        let f = |u: f64| (s.eval(&[u], false) + s.eval(&[-u], false)) * kappa(1, u);
        return Ok(integrate_pts(f, &pts, panel, spec.abs_tol, 1e-10, spec.max_evals).0);
    }
    if let Some(p) = s.radial_profile() {
        let area = sphere_area(d);
        let f = |r: f64| area * r.powi(d as i32 - 1) * p(r) * kappa(d, r);
        return Ok(integrate_pts(f, &[r0, r1], panel, spec.abs_tol, 1e-10, spec.max_evals).0);
    }
    if d == 2 {
        let f = |r: f64| {
            let g = |phi: f64| s.eval(&[r * phi.cos(), r * phi.sin()], false);
            r * kappa(2, r) * integrate_pts(g, &[0.0, 2.0 * PI], 0.2, 1e-12, 1e-10, 1_000_000).0
        };
        return Ok(integrate_pts(f, &[r0, r1], panel, 1e-10, 1e-9, 2_000_000).0);
    }
    Err(Error::Unsupported(format!("temperedness of a non-radial density in d = {d}")))
}

/// Checks `∫ κ dS < ∞` from the κ-mass of dyadic shells `2^{j-1} < ‖u‖ ≤ 2^j`.
pub fn check_tempered(s: &SpectralMeasure, tol: f64) -> Result<TemperedEvidence> {
    let d = s.dim();
    if s.domain.is_discrete() {
        let spec = QuadratureSpec::with_tol(1e-10);
        let g = Integrand { general: Box::new(|_| Complex64::new(1.0, 0.0)), product: None, radial: None, freq: 0.0 };
        let g = if d == 1 || s.density.factors(d).is_none() {
            g
        } else {
            Integrand { product: Some((0..d).map(|_| Box::new(|_| Complex64::new(1.0, 0.0)) as _).collect()), ..g }
        };
        let mass = density_integral(&s.density, s.domain, &g, &spec)?.re + s.atom_mass();
        return Ok(TemperedEvidence { tempered: mass.is_finite(), radii: vec![PI], increments: vec![mass], partial_sums: vec![mass] });
    }
    let levels = 24;
    let mut radii = Vec::new();
    let mut inc = Vec::new();
    let mut partial = Vec::new();
    let mut total = 0.0;
    let mut prev = 0.0;
    for j in 0..levels {
        let r = 2f64.powi(j);
        let dens = if s.density.is_zero() { 0.0 } else { shell_density_mass(&s.density, d, prev, r)? };
        let atoms: f64 = s
            .atoms
            .iter()
            .filter(|a| {
                let n = dual_norm(&a.0, false);
                (n > prev || (j == 0 && n == 0.0)) && n <= r
            })
            .map(|a| a.1 * kappa(d, dual_norm(&a.0, false)))
            .sum();
        let v = dens + atoms;
        total += v;
        radii.push(r);
        inc.push(v);
        partial.push(total);
        prev = r;
    }
    let beyond: f64 = s.atoms.iter().filter(|a| dual_norm(&a.0, false) > prev).map(|a| a.1 * kappa(d, dual_norm(&a.0, false))).sum();
    let tail = &inc[levels as usize - 5..];
    let last = *tail.last().unwrap() + beyond;
    let ratios: Vec<f64> = tail.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
    let decaying = ratios.iter().all(|r| *r <= 0.9);
    let stalled = !ratios.is_empty() && ratios.iter().all(|r| *r >= 0.95);
    let tempered = if last <= tol && (decaying || tail.iter().all(|v| *v <= tol)) {
        true
    } else if stalled {
        false
    } else if decaying && total.is_finite() {
        // geometric decay not yet below tol: the sum still converges
        true
    } else {
        return Err(Error::Inconclusive(format!("shell increments {tail:?} neither decay nor stall")));
    };
    Ok(TemperedEvidence { tempered, radii, increments: inc, partial_sums: partial })
}

/// Alias for [`SpectralMeasure::check_symmetry`].
pub fn check_symmetry(s: &SpectralMeasure, tol: f64) -> bool {
    s.check_symmetry(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Atom, DomainTag};

    #[test]
    fn power_growth_is_not_tempered() {
        let s = SpectralMeasure::new(DomainTag::continuous(1), Density::Power { exponent: 1.0, value: 1.0 }, vec![]);
        assert!(!check_tempered(&s, 1e-6).unwrap().tempered);
        let s = SpectralMeasure::new(DomainTag::continuous(2), Density::Power { exponent: 2.0, value: 1.0 }, vec![]);
        assert!(!check_tempered(&s, 1e-6).unwrap().tempered);
    }

    #[test]
    fn lebesgue_is_tempered() {
        let s = SpectralMeasure::lebesgue(DomainTag::continuous(1), 1.0);
        let ev = check_tempered(&s, 1e-5).unwrap();
        assert!(ev.tempered);
        // ∫ (1+|u|)^{-2} du = 2
        assert!((ev.partial_sums.last().unwrap() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn torus_measures_are_tempered() {
        let s = SpectralMeasure::new(DomainTag::discrete(2), Density::Constant { value: 0.5 }, vec![Atom(vec![0.0, 0.0], 1.0)]);
        let ev = check_tempered(&s, 1e-9).unwrap();
        assert!(ev.tempered);
        assert!((ev.partial_sums[0] - (0.5 * 4.0 * PI * PI + 1.0)).abs() < 1e-8);
    }
}
