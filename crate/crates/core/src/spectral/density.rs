use super::domain::{dual_norm, fold_angle};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// User-supplied density; not serialisable.
#[derive(Clone)]
pub struct CustomDensity {
    pub name: String,
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomDensity({})", self.name)
    }
}

/// Closed-form spectral densities. Serialised as `{tag, params}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "tag", content = "params", rename_all = "snake_case")]
pub enum Density {
    Zero,
    Constant { value: f64 },
    /// Fourier transform of `scale·Δ^q`, `Δ = 1_{B(0,1)} ∗ 1_{B(0,1)}`.
    Triangle { d: usize, q: u32, scale: f64 },
    /// `exp(-c ‖u‖^{-α})`: a zero of order α at the origin.
    DeepZero { alpha: f64, c: f64 },
    /// `value · 1{‖u‖ ≥ radius}`.
    GapIndicator { radius: f64, value: f64 },
    /// `value · (1 + ‖u‖)^exponent`.
    Power { exponent: f64, value: f64 },
    /// One-dimensional cosine series `c_0 + Σ c_k cos(k u)`.
    Cosine { coeffs: Vec<f64> },
    /// `Π_l s_l(u_l)`.
    Tensor { factors: Vec<Density> },
    Scaled { factor: f64, inner: Box<Density> },
    /// `min(inner, max)`.
    Clamp { max: f64, inner: Box<Density> },
    #[serde(skip)]
    Custom(CustomDensity),
}

impl Density {
    pub fn lebesgue() -> Self {
        Density::Constant { value: 1.0 }
    }

    pub fn custom(name: &str, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Density::Custom(CustomDensity { name: name.to_string(), f: Arc::new(f) })
    }

    pub fn tensor(factors: Vec<Density>) -> Self {
        Density::Tensor { factors }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Density::Scaled { factor, inner: Box::new(self) }
    }

    pub fn clamped(self, max: f64) -> Self {
        Density::Clamp { max, inner: Box::new(self) }
    }

    pub fn eval(&self, u: &[f64], discrete: bool) -> f64 {
        match self {
            Density::Zero => 0.0,
            Density::Constant { value } => *value,
            Density::Triangle { d, q, scale } => {
                scale * crate::models::triangle::fourier_of_power(*d, *q, dual_norm(u, discrete))
            }
            Density::DeepZero { alpha, c } => {
                let r = dual_norm(u, discrete);
                if r == 0.0 {
                    0.0
                } else {
                    (-c * r.powf(-alpha)).exp()
                }
            }
            Density::GapIndicator { radius, value } => {
                if dual_norm(u, discrete) >= *radius {
                    *value
                } else {
                    0.0
                }
            }
            Density::Power { exponent, value } => value * (1.0 + dual_norm(u, discrete)).powf(*exponent),
            Density::Cosine { coeffs } => {
                let x = if discrete { fold_angle(u[0]) } else { u[0] };
                coeffs.iter().enumerate().map(|(k, c)| c * (k as f64 * x).cos()).sum()
            }
            Density::Tensor { factors } => factors.iter().zip(u).map(|(f, &x)| f.eval(&[x], discrete)).product(),
            Density::Scaled { factor, inner } => factor * inner.eval(u, discrete),
            Density::Clamp { max, inner } => inner.eval(u, discrete).min(*max),
            Density::Custom(c) => (c.f)(u),
        }
    }

    /// `ln s(u)` without underflow for the closed forms that allow it.
    pub fn ln_eval(&self, u: &[f64], discrete: bool) -> f64 {
        match self {
            Density::DeepZero { alpha, c } => {
                let r = dual_norm(u, discrete);
                if r == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -c * r.powf(-alpha)
                }
            }
            Density::Tensor { factors } => factors.iter().zip(u).map(|(f, &x)| f.ln_eval(&[x], discrete)).sum(),
            Density::Scaled { factor, inner } => factor.ln() + inner.ln_eval(u, discrete),
            Density::Clamp { max, inner } => inner.ln_eval(u, discrete).min(max.ln()),
            _ => self.eval(u, discrete).ln(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Density::Zero => true,
            Density::Constant { value } => *value == 0.0,
            Density::GapIndicator { value, .. } | Density::Power { value, .. } => *value == 0.0,
            Density::Triangle { scale, .. } => *scale == 0.0,
            Density::Cosine { coeffs } => coeffs.iter().all(|&c| c == 0.0),
            Density::Tensor { factors } => factors.iter().any(|f| f.is_zero()),
            Density::Scaled { factor, inner } => *factor == 0.0 || inner.is_zero(),
            Density::Clamp { max, inner } => *max <= 0.0 || inner.is_zero(),
            _ => false,
        }
    }

    /// Profile `r ↦ s(r e)` when the density depends on `‖u‖` only.
    pub fn radial_profile(&self) -> Option<Arc<dyn Fn(f64) -> f64 + Send + Sync + '_>> {
        match self {
            Density::Zero
            | Density::Constant { .. }
            | Density::Triangle { .. }
            | Density::DeepZero { .. }
            | Density::GapIndicator { .. }
            | Density::Power { .. } => Some(Arc::new(move |r: f64| self.eval(&[r], false))),
            Density::Scaled { factor, inner } => {
                let p = inner.radial_profile()?;
                let k = *factor;
                Some(Arc::new(move |r| k * p(r)))
            }
            Density::Clamp { max, inner } => {
                let p = inner.radial_profile()?;
                let m = *max;
                Some(Arc::new(move |r| p(r).min(m)))
            }
            _ => None,
        }
    }

    /// One-dimensional factors when the density is a tensor product in `d` coordinates.
    pub fn factors(&self, d: usize) -> Option<Vec<Density>> {
        let ones = |first: Density| {
            let mut v = vec![first];
            v.extend((1..d).map(|_| Density::lebesgue()));
            v
        };
        match self {
            Density::Zero => Some(ones(Density::Zero)),
            Density::Constant { value } => Some(ones(Density::Constant { value: *value })),
            Density::Tensor { factors } if factors.len() == d => Some(factors.clone()),
            Density::Scaled { factor, inner } => {
                let mut f = inner.factors(d)?;
                f[0] = f[0].clone().scaled(*factor);
                Some(f)
            }
            _ if d == 1 => Some(vec![self.clone()]),
            _ => None,
        }
    }

    /// Angular frequency of the density's own oscillation (for panel sizing).
    pub fn oscillation(&self) -> f64 {
        match self {
            Density::Triangle { q, .. } => 2.0 + *q as f64,
            Density::Cosine { coeffs } => coeffs.len() as f64,
            Density::Tensor { factors } => factors.iter().map(|f| f.oscillation()).fold(0.0, f64::max),
            Density::Scaled { inner, .. } | Density::Clamp { inner, .. } => inner.oscillation(),
            _ => 0.0,
        }
    }

    /// Kinks and jumps of a one-dimensional density.
    pub fn breakpoints_1d(&self) -> Vec<f64> {
        match self {
            Density::GapIndicator { radius, .. } => vec![-radius, *radius],
            Density::DeepZero { .. } | Density::Power { .. } => vec![0.0],
            Density::Triangle { .. } => vec![0.0],
            Density::Tensor { factors } if factors.len() == 1 => factors[0].breakpoints_1d(),
            Density::Scaled { inner, .. } | Density::Clamp { inner, .. } => inner.breakpoints_1d(),
            _ => vec![],
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            Density::Constant { value } | Density::GapIndicator { value, .. } | Density::Power { value, .. } => {
                if *value < 0.0 || !value.is_finite() {
                    return Err(Error::InvalidInput("density values must be finite and nonnegative".into()));
                }
            }
            Density::Triangle { d: td, q, scale } => {
                if *td != d {
                    return Err(Error::InvalidInput(format!("triangle dimension {td} on a {d}-dimensional domain")));
                }
                if *q == 0 || *scale < 0.0 {
                    return Err(Error::InvalidInput("triangle needs q ≥ 1 and scale ≥ 0".into()));
                }
                if *td > 3 || (*td > 2 && *q > 1) {
                    return Err(Error::Unsupported(format!("triangle density in d = {td} with q = {q}")));
                }
            }
            Density::DeepZero { alpha, c } => {
                if *alpha <= 0.0 || *c <= 0.0 {
                    return Err(Error::InvalidInput("deep zero needs α > 0 and c > 0".into()));
                }
            }
            Density::Cosine { coeffs } => {
                if d != 1 {
                    return Err(Error::InvalidInput("cosine series densities are one-dimensional".into()));
                }
                let tail: f64 = coeffs.iter().skip(1).map(|c| c.abs()).sum();
                if coeffs.first().copied().unwrap_or(0.0) < tail - 1e-12 {
                    return Err(Error::InvalidInput("cosine series may be negative".into()));
                }
            }
            Density::Tensor { factors } => {
                if factors.len() != d {
                    return Err(Error::InvalidInput(format!("{} tensor factors for dimension {d}", factors.len())));
                }
                for f in factors {
                    f.validate(1)?;
                }
            }
            Density::Scaled { factor, inner } => {
                if *factor < 0.0 {
                    return Err(Error::InvalidInput("negative density scale".into()));
                }
                inner.validate(d)?;
            }
            Density::Clamp { inner, .. } => inner.validate(d)?,
            Density::Zero | Density::Custom(_) => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn json_roundtrip() {
        let d = Density::tensor(vec![Density::GapIndicator { radius: 1.0, value: 2.0 }, Density::lebesgue()]).clamped(1.0);
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains(r#""tag":"clamp""#));
        let back: Density = serde_json::from_str(&s).unwrap();
        for u in [[0.5, 0.1], [1.5, -3.0], [-2.0, 0.0]] {
            assert_eq!(back.eval(&u, false), d.eval(&u, false));
        }
    }

    #[test]
    fn values() {
        let t = Density::Triangle { d: 1, q: 1, scale: 1.0 };
        assert!((t.eval(&[0.0], false) - 4.0).abs() < 1e-12);
        assert!(t.eval(&[PI], false) < 1e-28);
        let g = Density::GapIndicator { radius: 1.0, value: 1.0 };
        assert_eq!(g.eval(&[0.3, 0.3], false), 0.0);
        assert_eq!(g.eval(&[0.8, 0.8], false), 1.0);
        let z = Density::DeepZero { alpha: 1.0, c: 1.0 };
        assert!((z.eval(&[0.5], false) - (-2.0f64).exp()).abs() < 1e-15);
        // torus folding
        let c = Density::Cosine { coeffs: vec![1.0, 0.5] };
        assert!((c.eval(&[2.0 * PI], true) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn structure_queries() {
        let t = Density::tensor(vec![Density::lebesgue(), Density::Constant { value: 2.0 }]);
        assert_eq!(t.factors(2).unwrap().len(), 2);
        assert!(Density::Constant { value: 3.0 }.scaled(2.0).factors(3).is_some());
        assert!(Density::DeepZero { alpha: 1.0, c: 1.0 }.factors(2).is_none());
        assert!(t.radial_profile().is_none());
        assert!(Density::Triangle { d: 2, q: 1, scale: 1.0 }.radial_profile().is_some());
        assert!(Density::Zero.is_zero());
        assert!(Density::Triangle { d: 4, q: 2, scale: 1.0 }.validate(4).is_err());
        assert!(Density::Cosine { coeffs: vec![1.0, 2.0] }.validate(1).is_err());
    }
}
