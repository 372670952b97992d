//! Cell-count discretization `X_k = M(t(k + [0,1)^d))` of an atomic spectrum.

use crate::error::{Error, Result};
use crate::special::unit_cell_transform_sq;
use crate::spectral::{Atom, DomainTag, SpectralMeasure};

/// `|J|²` below this is treated as an exact zero of the cell transform.
const ZERO_CUTOFF: f64 = 1e-24;

/// Torus spectral measure of the discretized field: each atom `(s, a)` moves to
/// `t·s mod 2π` with weight `t^{2d} a |J(t s)|²`.
pub fn discretized_spectral_measure(s: &SpectralMeasure, t: f64) -> Result<SpectralMeasure> {
    if s.domain.is_discrete() {
        return Err(Error::InvalidInput("discretization needs a measure on ℝ^d".into()));
    }
    if !s.is_atomic() {
        return Err(Error::InvalidInput("discretization needs a purely atomic measure".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput("cell side must be positive".into()));
    }
    let d = s.dim();
    let t2d = t.powi(2 * d as i32);
    let atoms = s
        .atoms
        .iter()
        .filter_map(|a| {
            let ts: Vec<f64> = a.0.iter().map(|x| t * x).collect();
            let j2 = unit_cell_transform_sq(&ts);
            (j2 > ZERO_CUTOFF).then(|| Atom(ts, t2d * a.1 * j2))
        })
        .collect();
    let mut out = SpectralMeasure::atomic(DomainTag::discrete(d), atoms).with_tag("discretized");
    out.merge_atoms();
    debug_assert!(out.is_atomic());
    Ok(out)
}

/// `Var(X_0) = (2π)^{-d} S_t(𝕋^d)`.
pub fn cell_variance(st: &SpectralMeasure) -> f64 {
    st.atom_mass() * st.domain.fourier_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::comb::{comb_spectral_measure, CombModel};
    use crate::spectral::{variance_of_statistic, LinearFunctional};
    use crate::QuadratureSpec;
    use std::f64::consts::PI;

    #[test]
    fn sinc_zero_drops_atom() {
        let t = 0.5;
        let s = SpectralMeasure::symmetric_atoms(DomainTag::continuous(2), &[(vec![2.0 * PI / t, 2.0 * PI / t], 3.0)]);
        assert!(discretized_spectral_measure(&s, t).unwrap().atoms.is_empty());
        let unit = comb_spectral_measure(&CombModel::new(vec![1.0], 1, 50).unwrap());
        assert!(discretized_spectral_measure(&unit, 1.0).unwrap().atoms.is_empty());
    }

    #[test]
    fn single_atom_weight() {
        let s = SpectralMeasure::atomic(DomainTag::continuous(1), vec![Atom(vec![1.0], 2.0)]);
        let st = discretized_spectral_measure(&s, 0.5).unwrap();
        assert_eq!(st.atoms.len(), 1);
        assert!((st.atoms[0].0[0] - 0.5).abs() < 1e-15);
        assert!((st.atoms[0].1 - 0.25 * 2.0 * (0.25f64.sin() / 0.25).powi(2)).abs() < 1e-15);
        let far = SpectralMeasure::atomic(DomainTag::continuous(1), vec![Atom(vec![7.0], 1.0)]);
        let st = discretized_spectral_measure(&far, 1.0).unwrap();
        assert!((st.atoms[0].0[0] - (7.0 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn mass_matches_cell_variance() {
        let s = comb_spectral_measure(&CombModel::new(vec![1.0, 2.0, 4.0], 1, 400).unwrap());
        let t = 0.7;
        let st = discretized_spectral_measure(&s, t).unwrap();
        let f = LinearFunctional::cell(DomainTag::continuous(1), vec![0.0], t);
        let v = variance_of_statistic(&f, &s, &QuadratureSpec::default()).unwrap();
        assert!((cell_variance(&st) - v).abs() < 1e-8);
        // p(1-p) per lattice with p = frac(t/a)
        let exact: f64 = [1.0, 2.0, 4.0].iter().map(|a| {
            let p = (t / a) % 1.0;
            p * (1.0 - p)
        }).sum();
        assert!((v - exact).abs() < 2e-3, "{v} vs {exact}");
    }

    #[test]
    fn rejects_densities() {
        let s = SpectralMeasure::lebesgue(DomainTag::continuous(1), 1.0);
        assert!(discretized_spectral_measure(&s, 1.0).is_err());
    }
}
