use crate::error::Result;
use crate::linalg::{CMatrix, CVector};
use crate::models::triangle::second_antiderivative;
use crate::quad::QuadratureSpec;
use crate::spectral::{gram_inner_product, Density, LinearFunctional, Shape, SpectralMeasure};
use num_complex::Complex64;

/// `∫_0^z scale (2-|x|)_+^q dx`, odd in `z`.
fn first_antiderivative(q: u32, scale: f64, z: f64) -> f64 {
    let a = z.abs().min(2.0);
    let qf = q as f64;
    let v = (2f64.powi(q as i32 + 1) - (2.0 - a).powi(q as i32 + 1)) / (qf + 1.0);
    scale * v * z.signum()
}

/// `Cov` of two point/cell shapes under `C(x) = scale (2-|x|)_+^q` in d = 1, in the
/// spatial domain.
fn triangle_pair(a: &Shape, b: &Shape, q: u32, scale: f64) -> Option<f64> {
    let c = |x: f64| scale * (2.0 - x.abs()).max(0.0).powi(q as i32);
    let phi = |z: f64| second_antiderivative(q, scale, z);
    let dphi = |z: f64| first_antiderivative(q, scale, z);
    Some(match (a, b) {
        (Shape::PointMass { x }, Shape::PointMass { x: y }) => c(x[0] - y[0]),
        (Shape::PointMass { x }, Shape::CellIndicator { corner, side }) | (Shape::CellIndicator { corner, side }, Shape::PointMass { x }) => {
            dphi(x[0] - corner[0]) - dphi(x[0] - corner[0] - side)
        }
        (Shape::CellIndicator { corner: ca, side: s }, Shape::CellIndicator { corner: cb, side: t }) => {
            let (a, b) = (ca[0], cb[0]);
            phi(a + s - b) - phi(a + s - b - t) - phi(a - b) + phi(a - b - t)
        }
        _ => return None,
    })
}

/// Closed-form route when `S` is a one-dimensional triangle model plus atoms.
fn spatial_inner(h: &LinearFunctional, g: &LinearFunctional, s: &SpectralMeasure) -> Option<Complex64> {
    let Density::Triangle { d: 1, q, scale } = s.density else { return None };
    if s.domain.is_discrete() || s.dim() != 1 {
        return None;
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (sa, wa) in &h.terms {
        for (sb, wb) in &g.terms {
            total += wa * wb.conj() * triangle_pair(sa, sb, q, scale)?;
        }
    }
    for a in &s.atoms {
        total += a.1 * h.fourier(&a.0) * g.fourier(&a.0).conj() / (2.0 * std::f64::consts::PI);
    }
    Some(total)
}

/// `⟨h, g⟩_S`, by the spatial closed form when available.
pub fn inner(h: &LinearFunctional, g: &LinearFunctional, s: &SpectralMeasure, spec: &QuadratureSpec) -> Result<Complex64> {
    match spatial_inner(h, g, s) {
        Some(v) => Ok(v),
        None => gram_inner_product(h, g, s, spec),
    }
}

/// `G_ij = ⟨h_i, h_j⟩_S`, filled in parallel by rows.
pub fn gram_matrix(fs: &[LinearFunctional], s: &SpectralMeasure, spec: &QuadratureSpec) -> Result<CMatrix> {
    let n = fs.len();
    let threads = std::thread::available_parallelism().map_or(1, |v| v.get()).min(n.max(1));
    let rows: Vec<Result<Vec<(usize, Vec<Complex64>)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for i in (t..n).step_by(threads) {
                        let mut row = Vec::with_capacity(n - i);
                        for j in i..n {
                            row.push(inner(&fs[i], &fs[j], s, spec)?);
                        }
                        out.push((i, row));
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("gram worker panicked")).collect()
    });
    let mut g = CMatrix::zeros(n, n);
    for chunk in rows {
        for (i, row) in chunk? {
            for (k, v) in row.into_iter().enumerate() {
                let j = i + k;
                if i == j {
                    g[(i, i)] = Complex64::new(v.re, 0.0);
                } else {
                    g[(i, j)] = v;
                    g[(j, i)] = v.conj();
                }
            }
        }
    }
    Ok(g)
}

/// `c_i = ⟨h_i, target⟩_S`.
pub fn cross_vector(fs: &[LinearFunctional], target: &LinearFunctional, s: &SpectralMeasure, spec: &QuadratureSpec) -> Result<CVector> {
    let vals: Result<Vec<Complex64>> = fs.iter().map(|h| inner(h, target, s, spec)).collect();
    Ok(CVector::from_vec(vals?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::TriangleModel;
    use crate::spectral::DomainTag;
    use approx::assert_relative_eq;

    #[test]
    fn spatial_route_matches_spectral_route() {
        let dom = DomainTag::continuous(1);
        let spec = QuadratureSpec::with_tol(1e-10);
        for q in 1..=2 {
            let s = TriangleModel::new(1, q, 0.7).unwrap().spectral_measure();
            let fs = [
                LinearFunctional::cell(dom, vec![0.0], 0.3),
                LinearFunctional::cell(dom, vec![0.5], 0.2),
                LinearFunctional::cell(dom, vec![-1.9], 0.25),
            ];
            for a in &fs {
                for b in &fs {
                    let fast = inner(a, b, &s, &spec).unwrap();
                    let slow = gram_inner_product(a, b, &s, &spec).unwrap();
                    assert_relative_eq!(fast.re, slow.re, epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn point_and_cell_pairs() {
        let (q, scale) = (1, 1.0);
        let p = Shape::PointMass { x: vec![0.0] };
        let cell = Shape::CellIndicator { corner: vec![0.5], side: 0.5 };
        // ∫_{0.5}^{1} (2 - y) dy = 0.625
        assert_relative_eq!(triangle_pair(&p, &cell, q, scale).unwrap(), 0.625, epsilon = 1e-14);
        assert_relative_eq!(triangle_pair(&p, &Shape::PointMass { x: vec![0.5] }, q, scale).unwrap(), 1.5);
        assert!(triangle_pair(&p, &Shape::BallIndicator { center: vec![0.0], radius: 1.0 }, q, scale).is_none());
    }

    #[test]
    fn gram_is_hermitian() {
        let dom = DomainTag::continuous(1);
        let s = TriangleModel::canonical(1).spectral_measure();
        let fs: Vec<_> = (0..7).map(|i| LinearFunctional::cell(dom, vec![0.3 * i as f64], 0.3)).collect();
        let g = gram_matrix(&fs, &s, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!((&g - g.adjoint()).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(g[(2, 2)].re, variance_of(&fs[2], &s), epsilon = 1e-9);
    }

    fn variance_of(f: &LinearFunctional, s: &SpectralMeasure) -> f64 {
        crate::spectral::variance_of_statistic(f, s, &QuadratureSpec::default()).unwrap()
    }
}
