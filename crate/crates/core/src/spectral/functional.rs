use super::domain::DomainTag;
use crate::error::{Error, Result};
use crate::special::{ball_transform, unit_interval_transform};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Building block of a linear statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    PointMass { x: Vec<f64> },
    /// Indicator of `corner + [0, side)^d`.
    CellIndicator { corner: Vec<f64>, side: f64 },
    BallIndicator { center: Vec<f64>, radius: f64 },
}

impl Shape {
    pub fn anchor(&self) -> &[f64] {
        match self {
            Shape::PointMass { x } => x,
            Shape::CellIndicator { corner, .. } => corner,
            Shape::BallIndicator { center, .. } => center,
        }
    }

    /// Point whose removal makes the transform modulus real and shift free.
    pub fn center(&self) -> Vec<f64> {
        match self {
            Shape::CellIndicator { corner, side } => corner.iter().map(|c| c + side / 2.0).collect(),
            _ => self.anchor().to_vec(),
        }
    }

    /// One coordinate factor of the transform for points and cells.
    pub fn factor(&self, l: usize, u: f64, discrete: bool) -> Complex64 {
        match self {
            Shape::PointMass { x } => {
                if discrete {
                    Complex64::from_polar(1.0, u * x[l])
                } else {
                    Complex64::from_polar(1.0, -u * x[l])
                }
            }
            Shape::CellIndicator { corner, side } => {
                if discrete {
                    Complex64::from_polar(1.0, u * corner[l]) * dirichlet(*side as i64, u)
                } else {
                    Complex64::from_polar(1.0, -u * corner[l]) * side * unit_interval_transform(side * u)
                }
            }
            Shape::BallIndicator { .. } => panic!("ball indicators do not factorise"),
        }
    }

    /// Radial part of the transform around `center()`, when it exists.
    pub fn radial_amplitude(&self, d: usize, r: f64, discrete: bool) -> Option<f64> {
        if discrete {
            return match self {
                Shape::PointMass { .. } => Some(1.0),
                _ => None,
            };
        }
        match self {
            Shape::PointMass { .. } => Some(1.0),
            Shape::BallIndicator { radius, .. } => Some(radius.powi(d as i32) * ball_transform(d, radius * r)),
            Shape::CellIndicator { .. } => None,
        }
    }

    pub fn fourier(&self, u: &[f64], discrete: bool) -> Complex64 {
        match self {
            Shape::BallIndicator { center, radius } => {
                let d = u.len();
                if discrete {
                    lattice_ball(center, *radius)
                        .iter()
                        .map(|k| Complex64::from_polar(1.0, k.iter().zip(u).map(|(a, b)| a * b).sum()))
                        .sum()
                } else {
                    let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let phase: f64 = u.iter().zip(center).map(|(a, b)| a * b).sum();
                    Complex64::from_polar(radius.powi(d as i32) * ball_transform(d, radius * r), -phase)
                }
            }
            _ => (0..u.len()).map(|l| self.factor(l, u[l], discrete)).product(),
        }
    }

    /// Largest distance from the origin to the support.
    pub fn support_radius(&self) -> f64 {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        match self {
            Shape::PointMass { x } => norm(x),
            Shape::CellIndicator { corner, side } => {
                let far: Vec<f64> = corner.iter().map(|c| c.abs().max((c + side).abs())).collect();
                norm(&far)
            }
            Shape::BallIndicator { center, radius } => norm(center) + radius,
        }
    }

    fn translated(&self, x: &[f64]) -> Shape {
        let add = |v: &[f64]| v.iter().zip(x).map(|(a, b)| a + b).collect::<Vec<f64>>();
        match self {
            Shape::PointMass { x: p } => Shape::PointMass { x: add(p) },
            Shape::CellIndicator { corner, side } => Shape::CellIndicator { corner: add(corner), side: *side },
            Shape::BallIndicator { center, radius } => Shape::BallIndicator { center: add(center), radius: *radius },
        }
    }
}

/// `Σ_{j<t} e^{iθj}`.
pub fn dirichlet(t: i64, theta: f64) -> Complex64 {
    let h = theta / 2.0;
    if h.sin().abs() < 1e-12 {
        // θ ≡ 0 mod 2π
        return Complex64::new(t as f64, 0.0);
    }
    Complex64::from_polar((t as f64 * h).sin() / h.sin(), h * (t - 1) as f64)
}

/// Lattice points within distance `radius` of `center`.
pub fn lattice_ball(center: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let d = center.len();
    let lo: Vec<i64> = center.iter().map(|c| (c - radius).ceil() as i64).collect();
    let hi: Vec<i64> = center.iter().map(|c| (c + radius).floor() as i64).collect();
    let mut out = Vec::new();
    let mut k = lo.clone();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return out;
    }
    loop {
        let p: Vec<f64> = k.iter().map(|&x| x as f64).collect();
        if p.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() <= radius * radius + 1e-12 {
            out.push(p);
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            k[i] += 1;
            if k[i] <= hi[i] {
                break;
            }
            k[i] = lo[i];
            i += 1;
        }
    }
}

/// A linear statistic `M(f)` with `f = Σ w_j f_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFunctional {
    pub domain: DomainTag,
    pub terms: Vec<(Shape, Complex64)>,
}

impl LinearFunctional {
    pub fn single(domain: DomainTag, shape: Shape) -> Self {
        LinearFunctional { domain, terms: vec![(shape, Complex64::new(1.0, 0.0))] }
    }

    pub fn point_mass(domain: DomainTag, x: Vec<f64>) -> Self {
        Self::single(domain, Shape::PointMass { x })
    }

    pub fn cell(domain: DomainTag, corner: Vec<f64>, side: f64) -> Self {
        Self::single(domain, Shape::CellIndicator { corner, side })
    }

    /// Cell of side `side` centred at `center`.
    pub fn centered_cell(domain: DomainTag, center: &[f64], side: f64) -> Self {
        Self::cell(domain, center.iter().map(|c| c - side / 2.0).collect(), side)
    }

    pub fn ball(domain: DomainTag, center: Vec<f64>, radius: f64) -> Self {
        Self::single(domain, Shape::BallIndicator { center, radius })
    }

    pub fn weighted_sum(domain: DomainTag, terms: Vec<(Shape, Complex64)>) -> Self {
        LinearFunctional { domain, terms }
    }

    pub fn kind(&self) -> &'static str {
        match self.terms.as_slice() {
            [(Shape::PointMass { .. }, w)] if *w == Complex64::new(1.0, 0.0) => "point_mass",
            [(Shape::CellIndicator { .. }, w)] if *w == Complex64::new(1.0, 0.0) => "cell_indicator",
            [(Shape::BallIndicator { .. }, w)] if *w == Complex64::new(1.0, 0.0) => "ball_indicator",
            _ => "weighted_sum",
        }
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        LinearFunctional { domain: self.domain, terms: self.terms.iter().map(|(s, w)| (s.clone(), w * lambda)).collect() }
    }

    pub fn translated(&self, x: &[f64]) -> Self {
        LinearFunctional { domain: self.domain, terms: self.terms.iter().map(|(s, w)| (s.translated(x), *w)).collect() }
    }

    pub fn fourier(&self, u: &[f64]) -> Complex64 {
        let disc = self.domain.is_discrete();
        self.terms.iter().map(|(s, w)| w * s.fourier(u, disc)).sum()
    }

    pub fn support_radius(&self) -> f64 {
        self.terms.iter().map(|(s, _)| s.support_radius()).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.domain.dim();
        if self.terms.is_empty() {
            return Err(Error::InvalidInput("empty functional".into()));
        }
        for (s, w) in &self.terms {
            if s.anchor().len() != d {
                return Err(Error::InvalidInput("shape dimension mismatch".into()));
            }
            if !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::InvalidInput("non-finite weight".into()));
            }
            match s {
                Shape::CellIndicator { side, .. } if *side <= 0.0 => {
                    return Err(Error::InvalidInput("cell side must be positive".into()))
                }
                Shape::BallIndicator { radius, .. } if *radius <= 0.0 => {
                    return Err(Error::InvalidInput("ball radius must be positive".into()))
                }
                _ => {}
            }
            if self.domain.is_discrete() {
                let integral = |x: f64| (x - x.round()).abs() < 1e-12;
                let ok = match s {
                    Shape::PointMass { x } => x.iter().all(|&v| integral(v)),
                    Shape::CellIndicator { corner, side } => corner.iter().all(|&v| integral(v)) && integral(*side),
                    Shape::BallIndicator { .. } => true,
                };
                if !ok {
                    return Err(Error::InvalidInput("lattice functionals need integer corners and sides".into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sinc;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn point_mass_at_origin_is_one() {
        let f = LinearFunctional::point_mass(DomainTag::continuous(2), vec![0.0, 0.0]);
        assert_eq!(f.fourier(&[3.0, -1.0]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn unit_cell_transform() {
        let f = LinearFunctional::cell(DomainTag::continuous(2), vec![0.0, 0.0], 1.0);
        let u = [1.2, -0.7];
        let expect = Complex64::from_polar(sinc(0.6) * sinc(-0.35), -(u[0] + u[1]) / 2.0);
        assert_relative_eq!((f.fourier(&u) - expect).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unit_ball_is_two_sinc() {
        let f = LinearFunctional::ball(DomainTag::continuous(1), vec![0.0], 1.0);
        assert_relative_eq!(f.fourier(&[0.9]).re, 2.0 * sinc(0.9), epsilon = 1e-15);
    }

    #[test]
    fn lattice_cell_is_geometric_sum() {
        let f = LinearFunctional::cell(DomainTag::discrete(1), vec![2.0], 3.0);
        let th = 0.4;
        let direct: Complex64 = (2..5).map(|k| Complex64::from_polar(1.0, th * k as f64)).sum();
        assert_relative_eq!((f.fourier(&[th]) - direct).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(f.fourier(&[0.0]).re, 3.0, epsilon = 1e-14);
        assert_relative_eq!(f.fourier(&[2.0 * PI]).re, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn lattice_ball_counts() {
        assert_eq!(lattice_ball(&[0.0, 0.0], 1.0).len(), 5);
        assert_eq!(lattice_ball(&[0.5], 1.0).len(), 2);
    }

    #[test]
    fn kinds() {
        let dom = DomainTag::continuous(1);
        assert_eq!(LinearFunctional::point_mass(dom, vec![0.0]).kind(), "point_mass");
        assert_eq!(LinearFunctional::cell(dom, vec![0.0], 1.0).scaled(Complex64::new(2.0, 0.0)).kind(), "weighted_sum");
        assert!(LinearFunctional::cell(DomainTag::discrete(1), vec![0.5], 1.0).validate().is_err());
    }
}
