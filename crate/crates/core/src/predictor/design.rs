use crate::error::{Error, Result};
use crate::spectral::{DomainTag, LinearFunctional, Shape};
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

/// Region whose interior the observation supports must avoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExclusionRegion {
    /// Open ball `‖x‖ < radius`.
    Ball { radius: f64 },
    /// Cone `{Σ λ_i g_i : λ ≥ 0}`; cells may touch but not overlap it.
    Cone { generators: Vec<Vec<f64>> },
    /// Open half space `x·normal > 0`.
    HalfSpace { normal: Vec<f64> },
    /// Open slab `|x·normal| < width / 2`.
    Band { normal: Vec<f64>, width: f64 },
    /// Everything outside the closed orthant `σ_l x_l ≥ 0`.
    OrthantComplement { signs: Vec<i8> },
}

impl ExclusionRegion {
    /// Whether the closed cell `corner + [0, side]^d` stays out of the region.
    pub fn admits_cell(&self, corner: &[f64], side: f64) -> bool {
        let d = corner.len();
        let corners = || {
            (0..1usize << d).map(move |mask| {
                (0..d).map(|l| corner[l] + if mask >> l & 1 == 1 { side } else { 0.0 }).collect::<Vec<f64>>()
            })
        };
        let dot = |x: &[f64], n: &[f64]| x.iter().zip(n).map(|(a, b)| a * b).sum::<f64>();
        match self {
            ExclusionRegion::Ball { radius } => {
                let nearest: f64 = (0..d)
                    .map(|l| {
                        let (lo, hi) = (corner[l], corner[l] + side);
                        if lo > 0.0 {
                            lo
                        } else if hi < 0.0 {
                            -hi
                        } else {
                            0.0
                        }
                    })
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt();
                nearest >= radius - 1e-12
            }
            ExclusionRegion::HalfSpace { normal } => corners().all(|c| dot(&c, normal) <= 1e-12),
            ExclusionRegion::Band { normal, width } => {
                let vals: Vec<f64> = corners().map(|c| dot(&c, normal)).collect();
                let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                lo >= width / 2.0 - 1e-12 || hi <= -width / 2.0 + 1e-12
            }
            ExclusionRegion::OrthantComplement { signs } => {
                (0..d).all(|l| signs[l] as f64 * corner[l] >= -1e-12 && signs[l] as f64 * (corner[l] + side) >= -1e-12)
            }
            ExclusionRegion::Cone { generators } => !cone_meets_box(generators, corner, side),
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        match self {
            ExclusionRegion::Ball { radius } if !(*radius >= 0.0) => bad("ball radius must be ≥ 0"),
            ExclusionRegion::Cone { generators } if generators.iter().any(|g| g.len() != d || g.iter().all(|x| *x == 0.0)) => {
                bad("cone generators must be nonzero vectors of the domain dimension")
            }
            ExclusionRegion::HalfSpace { normal } | ExclusionRegion::Band { normal, .. } if normal.len() != d => {
                bad("normal has the wrong dimension")
            }
            ExclusionRegion::OrthantComplement { signs } if signs.len() != d || signs.iter().any(|s| s.abs() != 1) => {
                bad("orthant signs must be ±1 per coordinate")
            }
            _ => Ok(()),
        }
    }
}

/// Feasibility of `Σ λ_i g_i` in the interior of `corner + [0, side]^d`, `λ ≥ 0`.
fn cone_meets_box(generators: &[Vec<f64>], corner: &[f64], side: f64) -> bool {
    let d = corner.len();
    let margin = 1e-6 * side;
    let (corner, side): (Vec<f64>, f64) = (corner.iter().map(|c| c + margin).collect(), side - 2.0 * margin);
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = generators.iter().map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for l in 0..d {
        let expr: Vec<_> = vars.iter().zip(generators).map(|(v, g)| (*v, g[l])).collect();
        p.add_constraint(expr.as_slice(), ComparisonOp::Ge, corner[l]);
        p.add_constraint(expr.as_slice(), ComparisonOp::Le, corner[l] + side);
    }
    p.solve().is_ok()
}

/// Observation functionals together with the region they avoid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservationDesign {
    pub functionals: Vec<LinearFunctional>,
    pub exclusion: ExclusionRegion,
    pub step: f64,
    pub extent: f64,
}

impl ObservationDesign {
    /// Cells of side `h` inside `[-R, R]^d` that avoid the region. In d = 1 with a ball the
    /// cells tile `[ρ, R]` and `[-R, -ρ]` from the boundary outwards, so halving `h` and
    /// growing `R` nests the designs.
    pub fn cells(domain: DomainTag, exclusion: ExclusionRegion, h: f64, extent: f64) -> Result<Self> {
        let d = domain.dim();
        exclusion.validate(d)?;
        if !(h > 0.0 && extent > 0.0) {
            return Err(Error::InvalidInput("design step and extent must be positive".into()));
        }
        let mut functionals = Vec::new();
        if let (1, ExclusionRegion::Ball { radius }) = (d, &exclusion) {
            let n = ((extent - radius) / h + 1e-9).floor().max(0.0) as usize;
            for j in (0..n).rev() {
                functionals.push(LinearFunctional::cell(domain, vec![-radius - h * (j + 1) as f64], h));
            }
            for j in 0..n {
                functionals.push(LinearFunctional::cell(domain, vec![radius + h * j as f64], h));
            }
        } else {
            let k = (extent / h + 1e-9).floor() as i64;
            let side = (2 * k) as usize;
            let total = side.checked_pow(d as u32).filter(|t| *t <= 1 << 22).ok_or_else(|| {
                Error::BudgetExceeded(format!("design with {side}^{d} candidate cells"))
            })?;
            for flat in 0..total {
                let mut r = flat;
                let mut corner = vec![0.0; d];
                for c in corner.iter_mut().rev() {
                    *c = h * ((r % side) as i64 - k) as f64;
                    r /= side;
                }
                if exclusion.admits_cell(&corner, h) {
                    functionals.push(LinearFunctional::cell(domain, corner, h));
                }
            }
        }
        if functionals.is_empty() {
            return Err(Error::InvalidInput("design is empty".into()));
        }
        Ok(ObservationDesign { functionals, exclusion, step: h, extent })
    }

    /// A design from explicit functionals; supports are checked against the region.
    pub fn from_functionals(functionals: Vec<LinearFunctional>, exclusion: ExclusionRegion) -> Result<Self> {
        let d = functionals.first().map(|f| f.domain.dim()).ok_or_else(|| Error::InvalidInput("design is empty".into()))?;
        exclusion.validate(d)?;
        for f in &functionals {
            for (shape, _) in &f.terms {
                let ok = match shape {
                    Shape::PointMass { x } => exclusion.admits_cell(x, 0.0),
                    Shape::CellIndicator { corner, side } => exclusion.admits_cell(corner, *side),
                    Shape::BallIndicator { center, radius } => {
                        let corner: Vec<f64> = center.iter().map(|c| c - radius).collect();
                        exclusion.admits_cell(&corner, 2.0 * radius)
                    }
                };
                if !ok {
                    return Err(Error::InvalidInput("observation support meets the exclusion region".into()));
                }
            }
        }
        Ok(ObservationDesign { functionals, exclusion, step: 0.0, extent: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }
}
