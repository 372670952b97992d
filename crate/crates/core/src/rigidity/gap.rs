use crate::error::{Error, Result};
use crate::linalg::{pinv_solve, CMatrix, CVector};
use crate::spectral::{fold_angle, SpectralMeasure};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Removed open arc `(center - half_width, center + half_width)` of one circle factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcGap {
    pub center: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportDescriptor {
    /// Product of arc complements, one gap per coordinate.
    Corridor { gaps: Vec<ArcGap> },
    /// Arbitrary point cloud.
    Sampled { name: String },
}

/// Finite sample of a support set in `𝕋^d` with its sup-norm covering radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportSample {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub spacing: f64,
    pub descriptor: SupportDescriptor,
}

impl SupportSample {
    /// `Π (𝕋 ∖ I_l)` sampled with `per_axis` points per coordinate, arc endpoints included.
    pub fn corridor(gaps: &[ArcGap], per_axis: usize) -> Result<Self> {
        if gaps.is_empty() || per_axis < 2 {
            return Err(Error::InvalidInput("corridor needs at least one gap and two points per axis".into()));
        }
        for g in gaps {
            if !(g.half_width > 0.0 && g.half_width < PI) {
                return Err(Error::InvalidInput(format!("gap half width {} outside (0, π)", g.half_width)));
            }
        }
        let axes: Vec<Vec<f64>> = gaps.iter().map(|g| arc_points(g, per_axis)).collect();
        let spacing = gaps.iter().map(|g| (2.0 * PI - 2.0 * g.half_width) / (per_axis - 1) as f64 / 2.0).fold(0.0, f64::max);
        Ok(SupportSample { dim: gaps.len(), points: product(&axes), spacing, descriptor: SupportDescriptor::Corridor { gaps: gaps.to_vec() } })
    }

    /// Single arc complement `{e^{iθ} : |θ - c| ≥ w}`.
    pub fn arc(center: f64, half_width: f64, n: usize) -> Result<Self> {
        Self::corridor(&[ArcGap { center, half_width }], n)
    }

    /// Grid of `per_axis^d` points on the whole torus.
    pub fn torus(d: usize, per_axis: usize) -> Self {
        Self::grid_filter(d, per_axis, "torus", |_| true)
    }

    /// Regular grid points kept by `keep`; spacing is half the grid step.
    pub fn grid_filter(d: usize, per_axis: usize, name: &str, keep: impl Fn(&[f64]) -> bool) -> Self {
        let step = 2.0 * PI / per_axis as f64;
        let axis: Vec<f64> = (0..per_axis).map(|i| -PI + step * i as f64).collect();
        let axes = vec![axis; d];
        let points = product(&axes).into_iter().filter(|p| keep(p)).collect();
        SupportSample { dim: d, points, spacing: step / 2.0, descriptor: SupportDescriptor::Sampled { name: name.into() } }
    }

    /// Atom locations of `s` (exact support, zero spacing).
    pub fn atoms_of(s: &SpectralMeasure) -> Self {
        let points = s.atoms.iter().filter(|a| a.1 > 0.0).map(|a| a.0.iter().map(|&t| fold_angle(t)).collect()).collect();
        SupportSample { dim: s.dim(), points, spacing: 0.0, descriptor: SupportDescriptor::Sampled { name: "atoms".into() } }
    }

    /// Same set at `factor` times the density, when the descriptor allows it.
    pub fn refined(&self, factor: usize) -> Option<Self> {
        match &self.descriptor {
            SupportDescriptor::Corridor { gaps } => {
                let per_axis = (self.points.len() as f64).powf(1.0 / self.dim as f64).round() as usize;
                Self::corridor(gaps, (per_axis - 1) * factor + 1).ok()
            }
            SupportDescriptor::Sampled { .. } => None,
        }
    }

    fn axis(&self, l: usize) -> SupportSample {
        match &self.descriptor {
            SupportDescriptor::Corridor { gaps } => {
                let per_axis = (self.points.len() as f64).powf(1.0 / self.dim as f64).round() as usize;
                SupportSample::corridor(&[gaps[l]], per_axis.max(AXIS_POINTS)).expect("validated gap")
            }
            SupportDescriptor::Sampled { .. } => unreachable!("axis split needs a corridor"),
        }
    }
}

fn arc_points(g: &ArcGap, n: usize) -> Vec<f64> {
    let lo = g.center + g.half_width;
    let len = 2.0 * PI - 2.0 * g.half_width;
    (0..n).map(|i| fold_angle(lo + len * i as f64 / (n - 1) as f64)).collect()
}

fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![vec![]];
    for axis in axes {
        out = out.into_iter().flat_map(|p| axis.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

/// `Q(z) = 1 - Σ_{m ∈ Q_k} h_m z^m` with a certified sup bound on a support sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapPolynomial {
    pub dim: usize,
    pub degree: usize,
    /// `(m, h_m)`.
    pub terms: Vec<(Vec<i64>, Complex64)>,
    pub sample_max: f64,
    /// `Σ |h_m| |m|_1`.
    pub lipschitz: f64,
    pub spacing: f64,
    /// `sample_max + lipschitz · spacing`.
    pub bound: f64,
    pub target: f64,
    pub support: SupportDescriptor,
    pub construction: String,
    /// Certified factor bounds of a tensor construction; `Π (1 + b_l) - 1` bounds `|Q|`
    /// on the whole corridor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_bounds: Option<Vec<f64>>,
}

impl GapPolynomial {
    fn from_terms(dim: usize, terms: Vec<(Vec<i64>, Complex64)>, support: &SupportSample, target: f64, construction: &str) -> Self {
        let degree = terms.iter().flat_map(|t| t.0.iter().map(|&m| m.unsigned_abs() as usize)).max().unwrap_or(0);
        let mut q = GapPolynomial {
            dim,
            degree,
            terms,
            sample_max: 0.0,
            lipschitz: 0.0,
            spacing: 0.0,
            bound: 0.0,
            target,
            support: support.descriptor.clone(),
            construction: construction.into(),
            factor_bounds: None,
        };
        q.lipschitz = q.terms.iter().map(|(m, h)| h.norm() * m.iter().map(|x| x.abs() as f64).sum::<f64>()).sum();
        q.certify_on(support);
        q
    }

    /// `Q` at the torus point with angles `theta`.
    pub fn eval(&self, theta: &[f64]) -> Complex64 {
        let mut s = Complex64::new(1.0, 0.0);
        for (m, h) in &self.terms {
            let phase: f64 = m.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
            s -= h * Complex64::from_polar(1.0, phase);
        }
        s
    }

    /// Recomputes the certificate against `support`.
    pub fn certify_on(&mut self, support: &SupportSample) -> f64 {
        self.sample_max = support.points.iter().map(|p| self.eval(p).norm()).fold(0.0, f64::max);
        self.spacing = support.spacing;
        self.bound = self.sample_max + self.lipschitz * support.spacing;
        if let Some(b) = &self.factor_bounds {
            self.bound = self.bound.min(b.iter().map(|x| 1.0 + x).product::<f64>() - 1.0);
        }
        self.bound
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

const LAWSON_ITERS: usize = 300;
const LAWSON_ITERS_LARGE: usize = 60;
const FIT_POINTS: usize = 4000;
const AXIS_POINTS: usize = 8001;

/// Searches `k = 1..=k_max` for `Q = 1 - Σ_{m ∈ [1,k]^d} h_m z^m` with certified
/// `‖Q‖ ≤ target` on `support`. Corridor supports in `d ≥ 2` try a product of
/// one-dimensional factors first.
pub fn build_gap_polynomial(support: &SupportSample, k_max: usize, target: f64) -> Result<GapPolynomial> {
    if support.points.is_empty() {
        return Err(Error::InvalidInput("empty support sample".into()));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidInput(format!("target bound {target} outside (0, 1)")));
    }
    if support.dim > 1 {
        if let SupportDescriptor::Corridor { .. } = support.descriptor {
            if let Ok(q) = tensor_gap_polynomial(support, k_max, target) {
                return Ok(q);
            }
        }
    }
    let fit = subsample(&support.points, FIT_POINTS);
    let mut best = f64::INFINITY;
    for k in 1..=k_max {
        if k.pow(support.dim as u32) > fit.len() {
            break;
        }
        let idx = cube_indices(k, support.dim);
        let h = lawson(&fit, &idx);
        let terms: Vec<_> = idx.into_iter().zip(h).collect();
        let q = GapPolynomial::from_terms(support.dim, terms, support, target, "minimax");
        best = best.min(q.bound);
        if q.bound <= target {
            return Ok(q);
        }
    }
    Err(Error::NoCertificate { k_max, best })
}

fn tensor_gap_polynomial(support: &SupportSample, k_max: usize, target: f64) -> Result<GapPolynomial> {
    let d = support.dim;
    let eps = (1.0 + target).powf(1.0 / d as f64) - 1.0;
    let mut factors: Vec<GapPolynomial> = Vec::with_capacity(d);
    for l in 0..d {
        factors.push(build_gap_polynomial(&support.axis(l), k_max, eps)?);
    }
    // 1 - Q = Π_l (1 - Q_l) = Π_l Σ_m h_{l,m} z_l^{m}
    let mut terms: Vec<(Vec<i64>, Complex64)> = vec![(vec![], Complex64::new(1.0, 0.0))];
    for f in &factors {
        let mut next = Vec::with_capacity(terms.len() * f.terms.len());
        for (m, c) in &terms {
            for (mf, hf) in &f.terms {
                let mut key = m.clone();
                key.push(mf[0]);
                next.push((key, c * hf));
            }
        }
        terms = next;
    }
    let mut q = GapPolynomial::from_terms(d, terms, support, target, "tensor");
    q.factor_bounds = Some(factors.iter().map(|f| f.bound).collect());
    q.certify_on(support);
    if q.bound <= target {
        Ok(q)
    } else {
        Err(Error::NoCertificate { k_max, best: q.bound })
    }
}

fn subsample(points: &[Vec<f64>], max: usize) -> Vec<Vec<f64>> {
    if points.len() <= max {
        return points.to_vec();
    }
    let stride = points.len() as f64 / max as f64;
    (0..max).map(|i| points[(i as f64 * stride) as usize].clone()).collect()
}

fn cube_indices(k: usize, d: usize) -> Vec<Vec<i64>> {
    let axis: Vec<f64> = (1..=k).map(|m| m as f64).collect();
    product(&vec![axis; d]).into_iter().map(|m| m.into_iter().map(|x| x as i64).collect()).collect()
}

/// Lawson's iteratively reweighted least squares for `min_h max_j |1 - Σ h_m z_j^m|`.
fn lawson(points: &[Vec<f64>], idx: &[Vec<i64>]) -> Vec<Complex64> {
    let (n, m) = (points.len(), idx.len());
    let a = CMatrix::from_fn(n, m, |j, c| {
        let phase: f64 = idx[c].iter().zip(&points[j]).map(|(&k, t)| k as f64 * t).sum();
        Complex64::from_polar(1.0, phase)
    });
    let ah = a.adjoint();
    let mut w = vec![1.0 / n as f64; n];
    let mut best = (f64::INFINITY, vec![Complex64::new(0.0, 0.0); m]);
    let iters = if m > 64 { LAWSON_ITERS_LARGE } else { LAWSON_ITERS };
    for _ in 0..iters {
        let wa = CMatrix::from_fn(n, m, |j, c| a[(j, c)] * w[j]);
        let mut g = &ah * &wa;
        let tr: f64 = (0..m).map(|i| g[(i, i)].re).sum();
        for i in 0..m {
            g[(i, i)] += Complex64::new(1e-13 * tr / m as f64, 0.0);
        }
        let rhs = CVector::from_iterator(m, (0..m).map(|c| (0..n).map(|j| ah[(c, j)] * w[j]).sum::<Complex64>()));
        let h = match g.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => pinv_solve(&g, &rhs, 1e-14),
        };
        let r: Vec<f64> = (&a * &h).iter().map(|v| (Complex64::new(1.0, 0.0) - v).norm()).collect();
        let max = r.iter().copied().fold(0.0, f64::max);
        if max < best.0 {
            best = (max, h.iter().copied().collect());
        }
        let mut total = 0.0;
        for (wj, rj) in w.iter_mut().zip(&r) {
            *wj *= rj;
            total += *wj;
        }
        if total <= 0.0 || !total.is_finite() {
            break;
        }
        w.iter_mut().for_each(|x| *x /= total);
    }
    best.1
}

/// `4^{-n} S(𝕋^d)` together with the coefficients of `Q^n = 1 - Σ h_{m,n} z^m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerBound {
    pub n: usize,
    pub bound: f64,
    pub terms: Vec<(Vec<i64>, Complex64)>,
}

impl PowerBound {
    /// `∫ |Q^n|² dS` for an atomic measure.
    pub fn l2_error(&self, s: &SpectralMeasure) -> f64 {
        s.atoms
            .iter()
            .map(|a| {
                let mut v = Complex64::new(1.0, 0.0);
                for (m, h) in &self.terms {
                    let phase: f64 = m.iter().zip(&a.0).map(|(&k, t)| k as f64 * t).sum();
                    v -= h * Complex64::from_polar(1.0, phase);
                }
                a.1 * v.norm_sqr()
            })
            .sum()
    }
}

pub fn power_error_bound(q: &GapPolynomial, n: usize, total_mass: f64) -> Result<PowerBound> {
    if q.bound > 0.5 {
        return Err(Error::InvalidInput(format!("gap polynomial bound {:.4} exceeds 1/2", q.bound)));
    }
    let zero = vec![0i64; q.dim];
    let mut base: HashMap<Vec<i64>, Complex64> = HashMap::new();
    base.insert(zero.clone(), Complex64::new(1.0, 0.0));
    for (m, h) in &q.terms {
        *base.entry(m.clone()).or_default() -= h;
    }
    let mut acc: HashMap<Vec<i64>, Complex64> = HashMap::from([(zero.clone(), Complex64::new(1.0, 0.0))]);
    for _ in 0..n {
        let mut next: HashMap<Vec<i64>, Complex64> = HashMap::new();
        for (ma, ca) in &acc {
            for (mb, cb) in &base {
                let key: Vec<i64> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                *next.entry(key).or_default() += ca * cb;
            }
        }
        acc = next;
    }
    let mut terms: Vec<(Vec<i64>, Complex64)> = acc.into_iter().filter(|(m, _)| *m != zero).map(|(m, c)| (m, -c)).collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(PowerBound { n, bound: 0.25f64.powi(n as i32) * total_mass, terms })
}
