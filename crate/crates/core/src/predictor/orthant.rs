use crate::error::{Error, Result};
use crate::linalg::{least_squares, pinv_solve, CMatrix, CVector};
use crate::quad::integrate_pts;
use crate::spectral::{fold_angle, Density, SpectralMeasure};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Frequencies allowed in the approximating polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSet {
    /// `Q_n = {m : σ_l m_l ∈ [1, n]}`.
    Orthant { signs: Vec<i8> },
    /// `σ m_axis ∈ [1, n]`, other coordinates in `[-n, n]`.
    HalfSpace { axis: usize, sign: i8 },
}

impl IndexSet {
    pub fn positive(d: usize) -> Self {
        IndexSet::Orthant { signs: vec![1; d] }
    }

    /// All `2^d` sign patterns.
    pub fn all_orthants(d: usize) -> Vec<IndexSet> {
        (0..1usize << d).map(|mask| IndexSet::Orthant { signs: (0..d).map(|l| if mask >> l & 1 == 1 { -1 } else { 1 }).collect() }).collect()
    }

    pub fn dim(&self, d: usize) -> usize {
        match self {
            IndexSet::Orthant { signs } => signs.len(),
            IndexSet::HalfSpace { .. } => d,
        }
    }

    pub fn indices(&self, n: usize, d: usize) -> Vec<Vec<i64>> {
        let n = n as i64;
        let ranges: Vec<(i64, i64, i64)> = match self {
            IndexSet::Orthant { signs } => signs.iter().map(|&s| (1, n, s as i64)).collect(),
            IndexSet::HalfSpace { axis, sign } => {
                (0..d).map(|l| if l == *axis { (1, n, *sign as i64) } else { (-n, n, 1) }).collect()
            }
        };
        let mut out = Vec::new();
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        if ranges.iter().any(|r| r.1 < r.0) {
            return out;
        }
        loop {
            out.push(cur.iter().zip(&ranges).map(|(v, r)| v * r.2).collect());
            let mut l = 0;
            loop {
                if l == cur.len() {
                    return out;
                }
                cur[l] += 1;
                if cur[l] <= ranges[l].1 {
                    break;
                }
                cur[l] = ranges[l].0;
                l += 1;
            }
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let ok = match self {
            IndexSet::Orthant { signs } => signs.len() == d && signs.iter().all(|s| s.abs() == 1),
            IndexSet::HalfSpace { axis, sign } => *axis < d && sign.abs() == 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("index set {self:?} does not fit dimension {d}")))
        }
    }
}

/// `∫_{-π}^{π} e^{ikθ} s(θ) dθ` for a one-dimensional density.
pub fn torus_moment_1d(s: &Density, k: i64) -> Complex64 {
    let mut pts = vec![-PI, PI];
    for b in s.breakpoints_1d() {
        let b = fold_angle(b);
        if b > -PI && b < PI {
            pts.push(b);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let kf = k as f64;
    let f = |t: f64| Complex64::from_polar(s.eval(&[t], true), kf * t);
    integrate_pts(f, &pts, PI / (4.0 + kf.abs()), 1e-14, 1e-14, 2_000_000).0
}

/// Moment table `μ(k) = ∫ e^{ik·θ} dS` over the requested multi-indices.
struct Moments<'a> {
    s: &'a SpectralMeasure,
    factors: Option<Vec<Density>>,
    axis_cache: Vec<HashMap<i64, Complex64>>,
    grid: Option<(usize, Vec<f64>)>,
}

impl<'a> Moments<'a> {
    fn new(s: &'a SpectralMeasure) -> Result<Self> {
        let d = s.dim();
        let factors = s.density.factors(d);
        let grid = if s.density.is_zero() || factors.is_some() {
            None
        } else if d == 2 {
            // periodic trapezoid rule, spectrally accurate for smooth densities
            let n = 512;
            let h = 2.0 * PI / n as f64;
            let mut vals = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    vals.push(s.density.eval(&[-PI + h * i as f64, -PI + h * j as f64], true) * h * h);
                }
            }
            Some((n, vals))
        } else {
            return Err(Error::Unsupported("moments of non-product densities need d ≤ 2".into()));
        };
        Ok(Moments { s, factors, axis_cache: vec![HashMap::new(); d], grid })
    }

    fn get(&mut self, k: &[i64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        if let Some(f) = &self.factors {
            let mut prod = Complex64::new(1.0, 0.0);
            for (l, &kl) in k.iter().enumerate() {
                let v = *self.axis_cache[l].entry(kl).or_insert_with(|| torus_moment_1d(&f[l], kl));
                prod *= v;
            }
            total += prod;
        } else if let Some((n, vals)) = &self.grid {
            let h = 2.0 * PI / *n as f64;
            let e0: Vec<Complex64> = (0..*n).map(|i| Complex64::from_polar(1.0, k[0] as f64 * (-PI + h * i as f64))).collect();
            let e1: Vec<Complex64> = (0..*n).map(|j| Complex64::from_polar(1.0, k[1] as f64 * (-PI + h * j as f64))).collect();
            for i in 0..*n {
                let mut row = Complex64::new(0.0, 0.0);
                for j in 0..*n {
                    row += e1[j] * vals[i * n + j];
                }
                total += e0[i] * row;
            }
        }
        for a in &self.s.atoms {
            let phase: f64 = a.0.iter().zip(k).map(|(t, &m)| t * m as f64).sum();
            total += Complex64::from_polar(a.1, phase);
        }
        total
    }
}

/// `e_n(S) = inf ∫ |1 - Σ_{m ∈ Q_n} h_m u^m|² dS`.
pub fn orthant_error_en(s: &SpectralMeasure, n: usize, set: &IndexSet) -> Result<f64> {
    Ok(orthant_errors(s, &[n], set)?[0])
}

/// `e_n` for several `n`, sharing the moment table.
pub fn orthant_errors(s: &SpectralMeasure, ns: &[usize], set: &IndexSet) -> Result<Vec<f64>> {
    Ok(orthant_solutions(s, ns, set)?.into_iter().map(|p| p.error).collect())
}

/// Minimizer `h` of `∫ |1 - Σ_{m ∈ Q_n} h_m u^m|² dS` and the attained error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthantPredictor {
    pub indices: Vec<Vec<i64>>,
    pub coefficients: Vec<Complex64>,
    pub error: f64,
}

pub fn orthant_predictor(s: &SpectralMeasure, n: usize, set: &IndexSet) -> Result<OrthantPredictor> {
    Ok(orthant_solutions(s, &[n], set)?.remove(0))
}

fn orthant_solutions(s: &SpectralMeasure, ns: &[usize], set: &IndexSet) -> Result<Vec<OrthantPredictor>> {
    if !s.domain.is_discrete() {
        return Err(Error::InvalidInput("e_n needs a measure on the torus".into()));
    }
    let d = s.dim();
    set.validate(d)?;
    if s.density.is_zero() {
        return Ok(ns.iter().map(|&n| atomic_solution(s, set.indices(n, d))).collect());
    }
    let mut mom = Moments::new(s)?;
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let idx = set.indices(n, d);
        let mu0 = mom.get(&vec![0; d]).re;
        if idx.is_empty() {
            out.push(OrthantPredictor { indices: idx, coefficients: vec![], error: mu0 });
            continue;
        }
        let m = idx.len();
        let mut g = CMatrix::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let k: Vec<i64> = idx[a].iter().zip(&idx[b]).map(|(x, y)| x - y).collect();
                let v = mom.get(&k);
                g[(a, b)] = v;
                g[(b, a)] = v.conj();
            }
            g[(a, a)] = Complex64::new(g[(a, a)].re, 0.0);
        }
        let rhs = CVector::from_iterator(m, idx.iter().map(|k| mom.get(k)));
        let sol = match g.clone().cholesky() {
            Some(c) if min_pivot_ok(&c) => c.solve(&rhs),
            _ => pinv_solve(&g, &rhs, 1e-13),
        };
        let e = mu0 - 2.0 * sol.dotc(&rhs).re + sol.dotc(&(&g * &sol)).re;
        out.push(OrthantPredictor { indices: idx, coefficients: sol.iter().map(|c| c.conj()).collect(), error: e.max(0.0) });
    }
    Ok(out)
}

fn min_pivot_ok(c: &nalgebra::Cholesky<Complex64, nalgebra::Dyn>) -> bool {
    let l = c.l_dirty();
    let diag: Vec<f64> = (0..l.nrows()).map(|i| l[(i, i)].re).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    min > 1e-7 * max
}

fn atomic_solution(s: &SpectralMeasure, idx: Vec<Vec<i64>>) -> OrthantPredictor {
    let atoms: Vec<_> = s.atoms.iter().filter(|a| a.1 > 0.0).collect();
    let b = CVector::from_iterator(atoms.len(), atoms.iter().map(|a| Complex64::new(a.1.sqrt(), 0.0)));
    if idx.is_empty() || atoms.is_empty() {
        let coefficients = vec![Complex64::new(0.0, 0.0); idx.len()];
        return OrthantPredictor { indices: idx, coefficients, error: b.norm_squared() };
    }
    let a = CMatrix::from_fn(atoms.len(), idx.len(), |j, m| {
        let phase: f64 = atoms[j].0.iter().zip(&idx[m]).map(|(t, &k)| t * k as f64).sum();
        Complex64::from_polar(atoms[j].1.sqrt(), phase)
    });
    let (x, res) = least_squares(&a, &b, 1e-15);
    OrthantPredictor { indices: idx, coefficients: x.iter().copied().collect(), error: res }
}

/// Nonincreasing `e_n` curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnCurve {
    pub n_values: Vec<usize>,
    pub errors: Vec<f64>,
    pub measure_id: Option<String>,
    pub index_set: IndexSet,
    pub total_mass: f64,
}

impl EnCurve {
    /// Computes `e_n` at each `n` (ascending) and keeps the running minimum.
    pub fn compute(s: &SpectralMeasure, n_values: &[usize], set: &IndexSet) -> Result<Self> {
        let raw = orthant_errors(s, n_values, set)?;
        let mut errors = Vec::with_capacity(raw.len());
        let mut best = f64::INFINITY;
        for e in raw {
            best = best.min(e);
            errors.push(best);
        }
        Ok(EnCurve { n_values: n_values.to_vec(), errors, measure_id: s.metadata.clone(), index_set: set.clone(), total_mass: total_mass(s)? })
    }

    pub fn to_csv(&self, bound: Option<&dyn Fn(usize) -> f64>) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if bound.is_some() {
            w.write_record(["n", "e_n", "bound_4pow"]).unwrap();
        } else {
            w.write_record(["n", "e_n"]).unwrap();
        }
        for (n, e) in self.n_values.iter().zip(&self.errors) {
            let mut row = vec![n.to_string(), format!("{e:e}")];
            if let Some(b) = bound {
                row.push(format!("{:e}", b(*n)));
            }
            w.write_record(&row).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// `S(𝕋^d)`.
pub fn total_mass(s: &SpectralMeasure) -> Result<f64> {
    let zero = vec![0; s.dim()];
    if s.density.is_zero() {
        return Ok(s.atom_mass());
    }
    Ok(Moments::new(s)?.get(&zero).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolabilityClass {
    /// `e_n` reaches zero at a finite `n`.
    Exact { n: usize },
    Geometric,
    Plateau,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrongVerdict {
    pub strongly_interpolable: bool,
    /// Worst fitted per-step decay factor over the orthants.
    pub rate: f64,
    pub classification: InterpolabilityClass,
    pub curves: Vec<EnCurve>,
    pub residual: f64,
}

/// Relative level below which `e_n` counts as zero.
pub const EXACT_LEVEL: f64 = 1e-12;
/// Fitted decay factor at or below which the curve counts as geometric.
pub const GEOMETRIC_RATE: f64 = 0.95;

/// Fits `ln e_n` on the upper half of `1..=n_max` for every orthant.
pub fn strong_interpolability_check(s: &SpectralMeasure, n_max: usize) -> Result<StrongVerdict> {
    if n_max < 8 {
        return Err(Error::InvalidInput("n_max must be at least 8".into()));
    }
    let d = s.dim();
    let ns: Vec<usize> = (1..=n_max).collect();
    let mut curves = Vec::new();
    let mut worst = (InterpolabilityClass::Exact { n: 0 }, 0.0f64, 0.0f64);
    for set in IndexSet::all_orthants(d) {
        let c = EnCurve::compute(s, &ns, &set)?;
        let mass = c.total_mass.max(f64::MIN_POSITIVE);
        let (class, rate, resid) = classify_curve(&c.n_values, &c.errors, mass)?;
        let rank = |k: &InterpolabilityClass| match k {
            InterpolabilityClass::Exact { .. } => 0,
            InterpolabilityClass::Geometric => 1,
            InterpolabilityClass::Plateau => 2,
        };
        let later_exact = matches!((&class, &worst.0), (InterpolabilityClass::Exact { n: a }, InterpolabilityClass::Exact { n: b }) if a > b);
        if rank(&class) > rank(&worst.0) || (rank(&class) == rank(&worst.0) && (rate > worst.1 || later_exact)) {
            worst = (class, rate, resid);
        }
        curves.push(c);
    }
    Ok(StrongVerdict {
        strongly_interpolable: !matches!(worst.0, InterpolabilityClass::Plateau),
        rate: worst.1,
        classification: worst.0,
        curves,
        residual: worst.2,
    })
}

fn classify_curve(ns: &[usize], es: &[f64], mass: f64) -> Result<(InterpolabilityClass, f64, f64)> {
    if let Some(i) = es.iter().position(|&e| e <= EXACT_LEVEL * mass) {
        return Ok((InterpolabilityClass::Exact { n: ns[i] }, 0.0, 0.0));
    }
    let half = es.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = ns[half..].iter().zip(&es[half..]).map(|(&n, &e)| (n as f64, e.ln())).unzip();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx;
    let resid = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).abs()).fold(0.0, f64::max);
    let rate = slope.exp();
    let first = es[half];
    let last = es[es.len() - 1];
    if last >= 0.99 * first {
        Ok((InterpolabilityClass::Plateau, rate, resid))
    } else if rate <= GEOMETRIC_RATE {
        Ok((InterpolabilityClass::Geometric, rate, resid))
    } else {
        Err(Error::Inconclusive(format!("e_n decays with fitted factor {rate:.4} per step")))
    }
}
