//! Centred Gaussian fields on regular grids by circulant embedding.

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::spectral::CovarianceKernel;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Largest grid handled by the dense fallback.
pub const DENSE_LIMIT: usize = 4096;
/// Relative size of negative circulant eigenvalues that may be clipped.
pub const CLIP_TOL: f64 = 1e-8;

/// Points `origin + step·i`, `0 ≤ i_l < extent_l`, last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub origin: Vec<f64>,
    pub step: f64,
    pub extent: Vec<usize>,
}

impl FieldGrid {
    pub fn new(origin: Vec<f64>, step: f64, extent: Vec<usize>) -> Self {
        FieldGrid { origin, step, extent }
    }

    pub fn line(n: usize, step: f64) -> Self {
        FieldGrid::new(vec![0.0], step, vec![n])
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn len(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        let mut r = flat;
        for l in (0..self.dim()).rev() {
            idx[l] = r % self.extent[l];
            r /= self.extent[l];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.index(flat).iter().zip(&self.origin).map(|(&i, o)| o + self.step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSample {
    pub grid: FieldGrid,
    pub values: Vec<f64>,
    pub seed: u64,
    pub method: String,
}

impl FieldSample {
    pub fn at(&self, idx: &[usize]) -> f64 {
        let mut flat = 0;
        for (i, n) in idx.iter().zip(&self.grid.extent) {
            flat = flat * n + i;
        }
        self.values[flat]
    }

    /// One row per grid point: coordinates then value. The sidecar carries the
    /// grid, the seed and any model parameters supplied by the caller.
    pub fn write_csv(&self, path: &Path, model: serde_json::Value) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
        let mut header: Vec<String> = (0..self.grid.dim()).map(|l| format!("x{l}")).collect();
        header.push("value".into());
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for (i, v) in self.values.iter().enumerate() {
            let mut row: Vec<String> = self.grid.point(i).iter().map(|x| format!("{x}")).collect();
            row.push(format!("{v}"));
            w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        let sidecar = serde_json::json!({
            "grid": self.grid,
            "seed": self.seed,
            "method": self.method,
            "model": model,
        });
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&sidecar).unwrap())?;
        Ok(())
    }
}

/// Writes a point list as CSV with a JSON sidecar.
pub fn write_points_csv(points: &[Vec<f64>], path: &Path, seed: u64, model: serde_json::Value) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let d = points.first().map_or(1, |p| p.len());
    w.write_record((0..d).map(|l| format!("x{l}"))).map_err(|e| Error::Io(e.to_string()))?;
    for p in points {
        w.write_record(p.iter().map(|x| format!("{x}"))).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    let sidecar = serde_json::json!({ "count": points.len(), "seed": seed, "model": model });
    std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&sidecar).unwrap())?;
    Ok(())
}

/// One draw with `Cov(X(x_i), X(x_j)) = C(x_i - x_j)`.
pub fn sample_gaussian_field(c: &CovarianceKernel, grid: &FieldGrid, mut rng: SeededRng) -> Result<FieldSample> {
    if grid.dim() != c.domain.dim() || grid.is_empty() || !(grid.step > 0.0) {
        return Err(Error::InvalidInput("grid does not match the covariance domain".into()));
    }
    let seed = rng.seed();
    let (values, method) = match grid.dim() {
        1 | 2 => match circulant(c, grid, &mut rng) {
            Ok(v) => (v, "circulant"),
            Err(e @ Error::EmbeddingNotPSD { .. }) => {
                if grid.len() > DENSE_LIMIT {
                    return Err(e);
                }
                (dense(c, grid, &mut SeededRng::new(seed))?, "dense")
            }
            Err(e) => return Err(e),
        },
        _ => {
            if grid.len() > DENSE_LIMIT {
                return Err(Error::Unsupported(format!("dense sampling limited to {DENSE_LIMIT} points")));
            }
            (dense(c, grid, &mut rng)?, "dense")
        }
    };
    Ok(FieldSample { grid: grid.clone(), values, seed, method: method.into() })
}

fn embed_len(n: usize, step: f64, range: Option<f64>) -> usize {
    let m = match range {
        Some(r) => n + (2.0 * r / step).ceil() as usize,
        None => 2 * n.saturating_sub(1),
    };
    m.max(2 * n.saturating_sub(1)).max(1)
}

/// Eigenvalues of the circulant embedding on a `Π m_l` torus.
fn circulant_spectrum(c: &CovarianceKernel, grid: &FieldGrid, ms: &[usize]) -> Result<Vec<f64>> {
    let total: usize = ms.iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    for (flat, v) in buf.iter_mut().enumerate() {
        let mut r = flat;
        let mut lag = vec![0.0; ms.len()];
        for l in (0..ms.len()).rev() {
            let j = r % ms[l];
            r /= ms[l];
            lag[l] = grid.step * j.min(ms[l] - j) as f64;
        }
        *v = Complex64::new(c.at(&lag), 0.0);
    }
    fft_nd(&mut buf, ms, false);
    let lam: Vec<f64> = buf.iter().map(|z| z.re).collect();
    let max = lam.iter().copied().fold(0.0, f64::max);
    let min = lam.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -CLIP_TOL * max.max(f64::MIN_POSITIVE) {
        return Err(Error::EmbeddingNotPSD { min_eigenvalue: min, relative: min / max });
    }
    Ok(lam.into_iter().map(|v| v.max(0.0)).collect())
}

fn fft_nd(buf: &mut [Complex64], ms: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let total: usize = ms.iter().product();
    let mut stride = 1;
    for l in (0..ms.len()).rev() {
        let n = ms[l];
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                for (i, z) in line.iter_mut().enumerate() {
                    *z = buf[base + off + i * stride];
                }
                fft.process(&mut line);
                for (i, z) in line.iter().enumerate() {
                    buf[base + off + i * stride] = *z;
                }
            }
        }
        stride = block;
    }
}

fn circulant(c: &CovarianceKernel, grid: &FieldGrid, rng: &mut SeededRng) -> Result<Vec<f64>> {
    let ms: Vec<usize> = grid.extent.iter().map(|&n| embed_len(n, grid.step, c.range)).collect();
    let total: usize = ms.iter().product();
    let lam = circulant_spectrum(c, grid, &ms)?;
    let mut buf: Vec<Complex64> = lam
        .iter()
        .map(|&l| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            Complex64::new(a, b) * (l / total as f64).sqrt()
        })
        .collect();
    fft_nd(&mut buf, &ms, false);
    let mut out = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        let idx = grid.index(flat);
        let mut e = 0;
        for (i, m) in idx.iter().zip(&ms) {
            e = e * m + i;
        }
        out.push(buf[e].re);
    }
    Ok(out)
}

fn dense(c: &CovarianceKernel, grid: &FieldGrid, rng: &mut SeededRng) -> Result<Vec<f64>> {
    let n = grid.len();
    let pts: Vec<Vec<f64>> = (0..n).map(|i| grid.point(i)).collect();
    let g = DMatrix::from_fn(n, n, |i, j| {
        let lag: Vec<f64> = pts[i].iter().zip(&pts[j]).map(|(a, b)| a - b).collect();
        c.at(&lag)
    });
    let eig = g.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -CLIP_TOL * max {
        return Err(Error::EmbeddingNotPSD { min_eigenvalue: min, relative: min / max });
    }
    let z: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
    let scaled = DVector::from_iterator(n, eig.eigenvalues.iter().zip(z.iter()).map(|(l, z)| l.max(0.0).sqrt() * z));
    Ok((eig.eigenvectors * scaled).iter().copied().collect())
}
