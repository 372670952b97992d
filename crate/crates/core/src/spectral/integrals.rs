//! Variance, covariance and Gram integrals against a spectral measure.

use super::density::Density;
use super::domain::DomainTag;
use super::functional::{LinearFunctional, Shape};
use super::measure::SpectralMeasure;
use crate::error::{Error, Result};
use crate::quad::{integrate_circle, integrate_line, QuadratureSpec};
use crate::special::{sphere_area, sphere_average_kernel};
use num_complex::Complex64;
use std::cell::RefCell;
use std::sync::Arc;

type Fn1<'a> = Box<dyn Fn(f64) -> Complex64 + 'a>;

/// A function on the dual space with optional structure that enables fast paths.
pub struct Integrand<'a> {
    pub general: Box<dyn Fn(&[f64]) -> Complex64 + 'a>,
    /// `g(u) = Π_l g_l(u_l)`.
    pub product: Option<Vec<Fn1<'a>>>,
    /// `g(u) = a(‖u‖)` (continuous domains only).
    pub radial: Option<Box<dyn Fn(f64) -> f64 + 'a>>,
    /// Angular frequency bound for panel sizing.
    pub freq: f64,
}

fn line_or_circle<'a>(
    discrete: bool,
    f: impl Fn(f64) -> Complex64 + 'a,
    spec: &QuadratureSpec,
    freq: f64,
    breaks: &[f64],
) -> Result<Complex64> {
    if discrete {
        Ok(integrate_circle(f, spec, freq, breaks))
    } else {
        integrate_line(f, spec, freq, breaks)
    }
}

/// `∫ g(u) s(u) du` over the dual space.
pub fn density_integral(s: &Density, domain: DomainTag, g: &Integrand, spec: &QuadratureSpec) -> Result<Complex64> {
    if s.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = domain.dim();
    let disc = domain.is_discrete();
    let freq = g.freq + s.oscillation();
    if d == 1 {
        let br = s.breakpoints_1d();
        return line_or_circle(disc, |u| (g.general)(&[u]) * s.eval(&[u], disc), spec, freq, &br);
    }
    if let (Some(parts), Some(factors)) = (&g.product, s.factors(d)) {
        let mut total = Complex64::new(1.0, 0.0);
        for (gl, sl) in parts.iter().zip(&factors) {
            if sl.is_zero() {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let br = sl.breakpoints_1d();
            total *= line_or_circle(disc, |u| gl(u) * sl.eval(&[u], disc), spec, freq, &br)?;
        }
        return Ok(total);
    }
    if !disc {
        if let (Some(a), Some(p)) = (&g.radial, s.radial_profile()) {
            let area = sphere_area(d);
            let f = |r: f64| {
                let r = r.abs();
                Complex64::new(0.5 * area * r.powi(d as i32 - 1) * a(r) * p(r), 0.0)
            };
            let mut br = s.breakpoints_1d();
            br.push(0.0);
            return integrate_line(f, spec, freq, &br);
        }
    }
    if d == 2 {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let inner_spec = QuadratureSpec { abs_tol: spec.abs_tol * 1e-2, ..*spec };
        let outer = |u1: f64| -> Complex64 {
            let inner = |u2: f64| (g.general)(&[u1, u2]) * s.eval(&[u1, u2], disc);
            match line_or_circle(disc, inner, &inner_spec, freq, &[]) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        };
        let v = line_or_circle(disc, outer, spec, freq, &[])?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        return Ok(v);
    }
    Err(Error::Unsupported(format!(
        "density integral in d = {d} needs a separable or radial density and integrand"
    )))
}

fn shape_size(s: &Shape, d: usize) -> f64 {
    match s {
        Shape::PointMass { .. } => 0.0,
        Shape::CellIndicator { side, .. } => side * (d as f64).sqrt(),
        Shape::BallIndicator { radius, .. } => 2.0 * radius,
    }
}

/// `ĥ_a(u) conj(ĥ_b(u))` with structure hints.
fn pair_integrand<'a>(a: &'a Shape, b: &'a Shape, domain: DomainTag) -> Integrand<'a> {
    let d = domain.dim();
    let disc = domain.is_discrete();
    let general = Box::new(move |u: &[f64]| a.fourier(u, disc) * b.fourier(u, disc).conj());
    let separable = !matches!(a, Shape::BallIndicator { .. }) && !matches!(b, Shape::BallIndicator { .. });
    let product = separable.then(|| {
        (0..d).map(|l| Box::new(move |x: f64| a.factor(l, x, disc) * b.factor(l, x, disc).conj()) as Fn1).collect()
    });
    let (ca, cb) = (a.center(), b.center());
    let same_center = ca.iter().zip(&cb).all(|(x, y)| (x - y).abs() < 1e-14);
    let radial = (!disc && same_center && a.radial_amplitude(d, 0.0, false).is_some() && b.radial_amplitude(d, 0.0, false).is_some())
        .then(|| Box::new(move |r: f64| a.radial_amplitude(d, r, false).unwrap() * b.radial_amplitude(d, r, false).unwrap()) as Box<dyn Fn(f64) -> f64>);
    let dist = ca.iter().zip(&cb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    Integrand { general, product, radial, freq: dist + shape_size(a, d) + shape_size(b, d) }
}

/// `⟨h, h'⟩_S = (2π)^{-d} ∫ ĥ conj(ĥ') dS`.
pub fn gram_inner_product(
    h: &LinearFunctional,
    h2: &LinearFunctional,
    s: &SpectralMeasure,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let domain = s.domain;
    let mut total = Complex64::new(0.0, 0.0);
    if !s.density.is_zero() {
        for (i, (sa, wa)) in h.terms.iter().enumerate() {
            for (j, (sb, wb)) in h2.terms.iter().enumerate() {
                // reuse the mirrored pair when integrating a functional against itself
                if std::ptr::eq(h, h2) && j < i {
                    continue;
                }
                let g = pair_integrand(sa, sb, domain);
                let v = density_integral(&s.density, domain, &g, spec)?;
                if std::ptr::eq(h, h2) && j > i {
                    total += 2.0 * (wa * wb.conj() * v).re;
                } else {
                    total += wa * wb.conj() * v;
                }
            }
        }
    }
    for a in &s.atoms {
        total += a.1 * h.fourier(&a.0) * h2.fourier(&a.0).conj();
    }
    Ok(total * domain.fourier_norm())
}

/// `Var M(f) = (2π)^{-d} ∫ |f̂|² dS`.
pub fn variance_of_statistic(f: &LinearFunctional, s: &SpectralMeasure, spec: &QuadratureSpec) -> Result<f64> {
    if f.domain != s.domain {
        return Err(Error::InvalidInput("functional and measure live on different domains".into()));
    }
    let v = gram_inner_product(f, f, s, spec)?;
    Ok(v.re.max(0.0))
}

/// `C(x) = (2π)^{-d} [∫ e^{iu·x} s(u) du + Σ a cos(u_j·x)]`, evaluated at a canonical
/// representative of `{x, -x}` so that `C(x) = C(-x)` holds exactly.
pub fn covariance_eval(s: &SpectralMeasure, x: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let flip = x.iter().find(|v| **v != 0.0).map_or(false, |v| *v < 0.0);
    let x: Vec<f64> = if flip { x.iter().map(|v| -v).collect() } else { x.to_vec() };
    let d = s.dim();
    let disc = s.domain.is_discrete();
    let mut total = 0.0;
    if !s.density.is_zero() {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let xs = x.clone();
        let g = Integrand {
            general: Box::new(move |u: &[f64]| Complex64::new(u.iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>().cos(), 0.0)),
            product: Some(
                (0..d)
                    .map(|l| {
                        let xl = x[l];
                        Box::new(move |u: f64| Complex64::new((u * xl).cos(), 0.0)) as Fn1
                    })
                    .collect(),
            ),
            radial: None,
            freq: r,
        };
        let v = if d > 1 && !disc && s.density.factors(d).is_none() {
            match s.density.radial_profile() {
                Some(p) => {
                    let f = |t: f64| {
                        let t = t.abs();
                        Complex64::new(0.5 * t.powi(d as i32 - 1) * p(t) * sphere_average_kernel(d, t * r), 0.0)
                    };
                    let mut br = s.density.breakpoints_1d();
                    br.push(0.0);
                    integrate_line(f, spec, r + s.density.oscillation(), &br)?
                }
                None => density_integral(&s.density, s.domain, &g, spec)?,
            }
        } else {
            density_integral(&s.density, s.domain, &g, spec)?
        };
        total += v.re;
    }
    for a in &s.atoms {
        total += a.1 * a.0.iter().zip(&x).map(|(u, y)| u * y).sum::<f64>().cos();
    }
    Ok(total * s.domain.fourier_norm())
}

/// Evaluable covariance function.
#[derive(Clone)]
pub struct CovarianceKernel {
    pub domain: DomainTag,
    pub eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    /// Finite support radius when known.
    pub range: Option<f64>,
}

impl std::fmt::Debug for CovarianceKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CovarianceKernel {{ domain: {:?}, range: {:?} }}", self.domain, self.range)
    }
}

impl CovarianceKernel {
    pub fn new(domain: DomainTag, range: Option<f64>, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        CovarianceKernel { domain, eval: Arc::new(eval), range }
    }

    /// `C = ℱS` evaluated by quadrature at every call.
    pub fn from_measure(s: SpectralMeasure, spec: QuadratureSpec) -> Self {
        let domain = s.domain;
        CovarianceKernel::new(domain, None, move |x| covariance_eval(&s, x, &spec).unwrap_or(f64::NAN))
    }

    /// Covariance `scale · Δ(‖x‖)^q` of a triangle model.
    pub fn triangle(m: crate::models::TriangleModel) -> Self {
        CovarianceKernel::new(DomainTag::continuous(m.d), Some(2.0), move |x| {
            m.covariance(x.iter().map(|v| v * v).sum::<f64>().sqrt())
        })
    }

    /// `C(0) = c0`, zero elsewhere.
    pub fn white_noise(domain: DomainTag, c0: f64) -> Self {
        CovarianceKernel::new(domain, Some(0.0), move |x| if x.iter().all(|v| *v == 0.0) { c0 } else { 0.0 })
    }

    pub fn at(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Smallest eigenvalue of `[C(x_i - x_j)]` and the matrix norm.
    pub fn gram_min_eigenvalue(&self, points: &[Vec<f64>]) -> (f64, f64) {
        let n = points.len();
        let g = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let diff: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| a - b).collect();
            self.at(&diff)
        });
        let eig = g.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let norm = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
        (min, norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::TriangleModel;
    use crate::spectral::Atom;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn tol() -> QuadratureSpec {
        QuadratureSpec::with_tol(1e-10)
    }

    #[test]
    fn plancherel_unit_cell() {
        let dom = DomainTag::continuous(1);
        let v = variance_of_statistic(&LinearFunctional::cell(dom, vec![0.3], 1.0), &SpectralMeasure::lebesgue(dom, 1.0), &tol()).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn plancherel_square_and_disc() {
        let dom = DomainTag::continuous(2);
        let leb = SpectralMeasure::lebesgue(dom, 1.0);
        let v = variance_of_statistic(&LinearFunctional::cell(dom, vec![0.3, -1.0], 0.7), &leb, &tol()).unwrap();
        assert_relative_eq!(v, 0.49, epsilon = 1e-8);
        let v = variance_of_statistic(&LinearFunctional::ball(dom, vec![1.0, 2.0], 1.0), &leb, &tol()).unwrap();
        assert_relative_eq!(v, PI, epsilon = 1e-7);
    }

    #[test]
    fn atom_pair_variance() {
        let dom = DomainTag::continuous(1);
        let u0 = 1.3;
        let s = SpectralMeasure::symmetric_atoms(dom, &[(vec![u0], 0.4)]);
        let f = LinearFunctional::cell(dom, vec![0.0], 0.5);
        let v = variance_of_statistic(&f, &s, &tol()).unwrap();
        let expect = 2.0 * 0.4 * f.fourier(&[u0]).norm_sqr() / (2.0 * PI);
        assert_relative_eq!(v, expect, epsilon = 1e-15);
    }

    #[test]
    fn triangle_covariance_values() {
        let s = TriangleModel::canonical(1).spectral_measure();
        assert_relative_eq!(covariance_eval(&s, &[0.0], &tol()).unwrap(), 2.0, epsilon = 1e-8);
        assert!(covariance_eval(&s, &[3.0], &tol()).unwrap().abs() < 1e-8);
        assert_relative_eq!(covariance_eval(&s, &[0.5], &tol()).unwrap(), 1.5, epsilon = 1e-8);
        assert_eq!(covariance_eval(&s, &[0.7], &tol()).unwrap(), covariance_eval(&s, &[-0.7], &tol()).unwrap());
    }

    #[test]
    fn triangle_covariance_d2_radial_route() {
        let s = TriangleModel::canonical(2).spectral_measure();
        let spec = QuadratureSpec::with_tol(1e-8);
        assert_relative_eq!(covariance_eval(&s, &[0.0, 0.0], &spec).unwrap(), PI, epsilon = 1e-6);
        let x = [0.6, 0.8];
        assert_relative_eq!(
            covariance_eval(&s, &x, &spec).unwrap(),
            crate::models::triangle::lens_volume(2, 1.0),
            epsilon = 1e-6
        );
    }

    #[test]
    fn torus_total_mass() {
        let dom = DomainTag::discrete(1);
        let s = SpectralMeasure::new(dom, Density::Cosine { coeffs: vec![1.0, 0.5] }, vec![Atom(vec![0.5], 0.25), Atom(vec![-0.5], 0.25)]);
        let c0 = covariance_eval(&s, &[0.0], &tol()).unwrap();
        assert_relative_eq!(c0, (2.0 * PI + 0.5) / (2.0 * PI), epsilon = 1e-12);
        let c1 = covariance_eval(&s, &[1.0], &tol()).unwrap();
        assert_relative_eq!(c1, (0.5 * PI + 0.5 * 0.5f64.cos()) / (2.0 * PI), epsilon = 1e-12);
        let v = variance_of_statistic(&LinearFunctional::point_mass(dom, vec![0.0]), &s, &tol()).unwrap();
        assert_relative_eq!(v, c0, epsilon = 1e-12);
    }

    #[test]
    fn gram_conjugate_symmetry_and_diagonal() {
        let dom = DomainTag::continuous(1);
        let s = TriangleModel::canonical(1).spectral_measure();
        let a = LinearFunctional::cell(dom, vec![0.0], 0.3);
        let b = LinearFunctional::cell(dom, vec![0.5], 0.2);
        let ab = gram_inner_product(&a, &b, &s, &tol()).unwrap();
        let ba = gram_inner_product(&b, &a, &s, &tol()).unwrap();
        assert_relative_eq!((ab - ba.conj()).norm(), 0.0, epsilon = 1e-9);
        let aa = gram_inner_product(&a, &a.clone(), &s, &tol()).unwrap();
        assert_relative_eq!(aa.re, variance_of_statistic(&a, &s, &tol()).unwrap(), epsilon = 1e-9);
        // spatial oracle: ∫∫ (2-|x-y|) over [0,.3]×[.5,.7]
        let phi = |z: f64| crate::models::triangle::second_antiderivative(1, 1.0, z);
        let exact = phi(0.3 - 0.5) - phi(0.3 - 0.7) - phi(-0.5) + phi(-0.7);
        assert_relative_eq!(ab.re, exact, epsilon = 1e-8);
    }

    #[test]
    fn far_cells_decorrelate() {
        let dom = DomainTag::continuous(1);
        let s = TriangleModel::canonical(1).spectral_measure();
        let a = LinearFunctional::cell(dom, vec![0.0], 0.05);
        let b = LinearFunctional::cell(dom, vec![2.2], 0.05);
        assert!(gram_inner_product(&a, &b, &s, &tol()).unwrap().norm() < 1e-9);
    }
}
