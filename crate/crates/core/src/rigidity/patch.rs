use crate::error::{Error, Result};
use crate::linalg::{pinv_solve, CMatrix, CVector};
use crate::rng::SeededRng;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Laurent polynomial `Σ c_k z^k` on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub terms: Vec<(i64, Complex64)>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly { terms: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(k: i64, c: f64) -> Self {
        TrigPoly { terms: vec![(k, Complex64::new(c, 0.0))] }
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.terms.iter().map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * theta)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.1 == Complex64::new(0.0, 0.0))
    }

    /// `Σ |c_k|`, an upper bound for the sup norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm()).sum()
    }

    fn sup_norm(&self) -> f64 {
        (0..4096).map(|i| self.eval(2.0 * PI * i as f64 / 4096.0).norm()).fold(0.0, f64::max)
    }
}

/// Constants of the counter-example: notch half width `η`, arcs `J_0`, `J_π`, and the
/// approximation budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchConstants {
    pub eta: f64,
    pub j0: (f64, f64),
    pub jpi: (f64, f64),
    pub gamma_bound: f64,
    pub max_degree: usize,
    pub phi_degree: usize,
    pub sample_size: usize,
    pub slack: f64,
    pub seed: u64,
}

impl Default for PatchConstants {
    fn default() -> Self {
        PatchConstants {
            eta: 0.01,
            j0: (-PI / 3.0, PI / 3.0),
            jpi: (2.0 * PI / 3.0, 4.0 * PI / 3.0),
            gamma_bound: 0.25,
            max_degree: 4096,
            phi_degree: 256,
            sample_size: 2000,
            slack: 1e-3,
            seed: 0,
        }
    }
}

fn in_closed_arc(t: f64, a: f64, b: f64) -> bool {
    (t - a).rem_euclid(2.0 * PI) <= (b - a).rem_euclid(2.0 * PI)
}

/// `𝕋^x`: the circle minus the open arc of half width `η` around `x`.
pub fn outside_notch(t: f64, x: f64, eta: f64) -> bool {
    let r = (t - x + eta).rem_euclid(2.0 * PI);
    !(r > 0.0 && r < 2.0 * eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    J0,
    JPi,
    Between,
}

impl PatchConstants {
    pub fn band(&self, u: f64) -> Band {
        if in_closed_arc(u, self.j0.0, self.j0.1) {
            Band::J0
        } else if in_closed_arc(u, self.jpi.0, self.jpi.1) {
            Band::JPi
        } else {
            Band::Between
        }
    }

    /// Membership in the counter-example set `S ⊂ 𝕋²`.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        let eta = self.eta;
        outside_notch(u, 0.0, eta)
            && match self.band(u) {
                Band::J0 => outside_notch(v, 0.0, eta),
                Band::JPi => outside_notch(v, PI, eta),
                Band::Between => outside_notch(v, 0.0, eta) && outside_notch(v, PI, eta),
            }
    }

    /// `count` uniform points of `S` by rejection.
    pub fn sample_set(&self, count: usize, rng: &mut SeededRng) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let (u, v) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            if self.contains(u, v) {
                out.push((u, v));
            }
        }
        out
    }

    /// Ramp equal to 1 on `J_0`, 0 on `J_π`, linear in between.
    pub fn ramp(&self, u: f64) -> f64 {
        let a = u.rem_euclid(2.0 * PI).min((-u).rem_euclid(2.0 * PI));
        let (lo, hi) = (self.j0.1, self.jpi.0);
        ((hi - a) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// Analytic polynomial approximating a Laurent polynomial on `𝕋^x`. Negative powers use
/// `z̄ ≈ w(z) = e^{-ix}(1 - Q(ζ))/ζ`, `ζ = z e^{-ix}`, where `Q(ζ) = ζ^n P(ζ + 1/ζ)` and
/// `P` is the monic Chebyshev polynomial of `[-2, 2 cos η]`; `|Q| ≤ 2 cos^{2n}(η/2)` on
/// the arc.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcApproximant {
    pub notch: f64,
    pub eta: f64,
    pub half_degree: usize,
    pub target: TrigPoly,
    pub degree: usize,
    pub error_bound: f64,
}

impl ArcApproximant {
    pub fn build(target: &TrigPoly, notch: f64, eta: f64, eps: f64, max_degree: usize) -> Result<Self> {
        let neg: Vec<(usize, f64)> = target.terms.iter().filter(|t| t.0 < 0).map(|t| ((-t.0) as usize, t.1.norm())).collect();
        let pos_degree = target.terms.iter().filter(|t| t.0 >= 0).map(|t| t.0 as usize).max().unwrap_or(0);
        let j_max = neg.iter().map(|t| t.0).max().unwrap_or(0);
        let error = |n: usize| {
            let delta = arc_sup(n, eta);
            neg.iter().map(|&(j, c)| c * j as f64 * (1.0 + delta).powi(j as i32 - 1) * delta).sum::<f64>()
        };
        let mut n = 0;
        if j_max > 0 {
            let per_step = -(eta / 2.0).cos().ln();
            let needed = neg.iter().map(|&(j, c)| c * j as f64).sum::<f64>();
            // start from δ ≈ eps / Σ j|c_j| and walk up
            n = (((2.0 * needed / eps).ln() / (2.0 * per_step)).ceil().max(1.0)) as usize;
            let degree = |n: usize| pos_degree.max(j_max * (2 * n - 1));
            if degree(n) > max_degree {
                return Err(Error::ApproximantFailure(format!(
                    "approximating negative frequencies on the arc with notch {eta} to {eps} needs degree ≈ {} > {max_degree}",
                    degree(n)
                )));
            }
            while error(n) > eps {
                n += 1;
                if degree(n) > max_degree {
                    return Err(Error::ApproximantFailure(format!("degree budget {max_degree} exhausted")));
                }
            }
        }
        let degree = if j_max > 0 { pos_degree.max(j_max * (2 * n - 1)) } else { pos_degree };
        Ok(ArcApproximant { notch, eta, half_degree: n, target: target.clone(), degree, error_bound: if j_max > 0 { error(n) } else { 0.0 } })
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        let w = if self.half_degree > 0 { Some(conj_approx(theta - self.notch, self.eta, self.half_degree) * Complex64::from_polar(1.0, -self.notch)) } else { None };
        for (k, c) in &self.target.terms {
            if *k >= 0 {
                s += c * Complex64::from_polar(1.0, *k as f64 * theta);
            } else {
                s += c * w.expect("negative power needs the arc polynomial").powi(-*k as i32);
            }
        }
        s
    }

    pub fn is_exact(&self) -> bool {
        self.half_degree == 0
    }
}

/// `2 cos^{2n}(η/2)`.
fn arc_sup(n: usize, eta: f64) -> f64 {
    2.0 * (eta / 2.0).cos().powi(2 * n as i32)
}

/// `(1 - Q(ζ)) / ζ` at `ζ = e^{iθ}`.
fn conj_approx(theta: f64, eta: f64, n: usize) -> Complex64 {
    let zeta = Complex64::from_polar(1.0, theta);
    (Complex64::new(1.0, 0.0) - arc_chebyshev(theta, eta, n)) / zeta
}

/// `Q(e^{iθ}) = e^{inθ} P(2 cos θ)`.
fn arc_chebyshev(theta: f64, eta: f64, n: usize) -> Complex64 {
    let half = 1.0 + eta.cos();
    let c = eta.cos() - 1.0;
    let y = (2.0 * theta.cos() - c) / half;
    let nf = n as f64;
    let ln_scale = 2.0f64.ln() + nf * (half / 2.0).ln();
    let p = if y.abs() <= 1.0 {
        ln_scale.exp() * (nf * y.acos()).cos()
    } else {
        let a = y.abs().acosh();
        let ln_cosh = nf * a + (0.5 + 0.5 * (-2.0 * nf * a).exp()).ln();
        let sign = if y < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        sign * (ln_scale + ln_cosh).exp()
    };
    Complex64::from_polar(p, nf * theta)
}

/// Polynomial `H` on `𝕋²` with its certified distance to `γ₁ ⊗ γ₂` on a sample of `S`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatchPolynomial {
    pub h1: Option<ArcApproximant>,
    pub h2_zero: Option<ArcApproximant>,
    pub h2_pi: Option<ArcApproximant>,
    /// Coefficients of `φ₀(ū) = Σ a_j ū^j` when the two `h₂` differ.
    pub phi0: Option<Vec<Complex64>>,
    pub eps: f64,
    pub max_error: f64,
    pub bound: f64,
    pub slack: f64,
    pub sample_size: usize,
    pub certified: bool,
}

impl PatchPolynomial {
    pub fn eval(&self, u: f64, v: f64) -> Complex64 {
        let Some(h1) = &self.h1 else { return Complex64::new(0.0, 0.0) };
        let (h20, h2p) = (self.h2_zero.as_ref().unwrap(), self.h2_pi.as_ref().unwrap());
        match &self.phi0 {
            None => h1.eval(u) * h20.eval(v),
            Some(a) => {
                let phi = eval_phi(a, u);
                h1.eval(u) * (h20.eval(v) * phi + h2p.eval(v) * (Complex64::new(1.0, 0.0) - phi))
            }
        }
    }
}

fn eval_phi(a: &[Complex64], u: f64) -> Complex64 {
    a.iter().enumerate().map(|(j, c)| c * Complex64::from_polar(1.0, -(j as f64) * u)).sum()
}

/// Builds `H(u,v) = h₁(u)(h₂⁰(v)φ₀(ū) + h₂^π(v)φ_π(ū))` and certifies
/// `max |H - γ₁γ₂| ≤ 4ε + slack` on `constants.sample_size` random points of `S`.
pub fn patch_polynomial(gamma1: &TrigPoly, gamma2: &TrigPoly, eps: f64, constants: &PatchConstants) -> Result<PatchPolynomial> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("ε must be positive".into()));
    }
    for (name, g) in [("γ₁", gamma1), ("γ₂", gamma2)] {
        if g.sup_norm() > constants.gamma_bound + 1e-12 {
            return Err(Error::InvalidInput(format!("‖{name}‖ exceeds {}", constants.gamma_bound)));
        }
    }
    let eta = constants.eta;
    let mut rng = SeededRng::new(constants.seed);
    let sample = constants.sample_set(constants.sample_size, &mut rng);
    let mut out = PatchPolynomial {
        h1: None,
        h2_zero: None,
        h2_pi: None,
        phi0: None,
        eps,
        max_error: 0.0,
        bound: 4.0 * eps,
        slack: constants.slack,
        sample_size: sample.len(),
        certified: false,
    };
    if !gamma1.is_zero() && !gamma2.is_zero() {
        let h1 = ArcApproximant::build(gamma1, 0.0, eta, eps, constants.max_degree)?;
        let h20 = ArcApproximant::build(gamma2, 0.0, eta, eps, constants.max_degree)?;
        let h2p = ArcApproximant::build(gamma2, PI, eta, eps, constants.max_degree)?;
        if !(h20.is_exact() && h2p.is_exact()) {
            out.phi0 = Some(build_phi0(&h20, &h2p, eps, constants)?);
        }
        out.h1 = Some(h1);
        out.h2_zero = Some(h20);
        out.h2_pi = Some(h2p);
    }
    out.max_error = sample.iter().map(|&(u, v)| (out.eval(u, v) - gamma1.eval(u) * gamma2.eval(v)).norm()).fold(0.0, f64::max);
    out.certified = out.max_error <= out.bound + out.slack;
    Ok(out)
}

/// Disk-algebra `φ₀(ū)` with `|φ₀| ≤ ε/‖h₂⁰‖` on `J_π`, `|1 - φ₀| ≤ ε/‖h₂^π‖` on `J_0`,
/// and within 1/2 of the ramp in between, by weighted Lawson iteration.
fn build_phi0(h20: &ArcApproximant, h2p: &ArcApproximant, eps: f64, c: &PatchConstants) -> Result<Vec<Complex64>> {
    let grid: Vec<f64> = (0..8192).map(|i| -PI + 2.0 * PI * i as f64 / 8192.0).collect();
    let m0 = grid.iter().filter(|&&v| outside_notch(v, PI, c.eta)).map(|&v| h20.eval(v).norm()).fold(0.0, f64::max);
    let mpi = grid.iter().filter(|&&v| outside_notch(v, 0.0, c.eta)).map(|&v| h2p.eval(v).norm()).fold(0.0, f64::max);
    if !m0.is_finite() || !mpi.is_finite() || eps / m0.max(mpi) < 1e-12 {
        return Err(Error::ApproximantFailure(format!(
            "partition of unity would need |φ| ≤ {:.3e} against ‖h₂‖ = {:.3e}, beyond double precision",
            eps / m0.max(mpi),
            m0.max(mpi)
        )));
    }
    let pts: Vec<f64> = (0..4000).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / 4000.0).filter(|&u| outside_notch(u, 0.0, c.eta)).collect();
    let weight = |u: f64| match c.band(u) {
        Band::J0 => mpi / eps,
        Band::JPi => m0 / eps,
        Band::Between => 2.0,
    };
    let mut degree = 8;
    while degree <= c.phi_degree {
        let (coef, worst) = weighted_lawson(&pts, degree, &|u| c.ramp(u), &weight);
        if worst <= 1.0 {
            return Ok(coef);
        }
        degree *= 2;
    }
    Err(Error::ApproximantFailure(format!("no partition of unity of degree ≤ {} meets the weighted bounds", c.phi_degree)))
}

fn weighted_lawson(pts: &[f64], degree: usize, target: &dyn Fn(f64) -> f64, weight: &dyn Fn(f64) -> f64) -> (Vec<Complex64>, f64) {
    let (n, m) = (pts.len(), degree + 1);
    let wt: Vec<f64> = pts.iter().map(|&u| weight(u)).collect();
    let a = CMatrix::from_fn(n, m, |i, j| Complex64::from_polar(wt[i], -(j as f64) * pts[i]));
    let b = CVector::from_iterator(n, pts.iter().zip(&wt).map(|(&u, w)| Complex64::new(w * target(u), 0.0)));
    let mut lw = vec![1.0 / n as f64; n];
    let mut best = (vec![Complex64::new(0.0, 0.0); m], f64::INFINITY);
    for _ in 0..200 {
        let wa = CMatrix::from_fn(n, m, |i, j| a[(i, j)] * lw[i]);
        let g = a.adjoint() * &wa;
        let rhs = wa.adjoint() * &b;
        let x = pinv_solve(&g, &rhs, 1e-15);
        let r: Vec<f64> = (&a * &x - &b).iter().map(|z| z.norm()).collect();
        let worst = r.iter().copied().fold(0.0, f64::max);
        if worst < best.1 {
            best = (x.iter().copied().collect(), worst);
        }
        let mut total = 0.0;
        for (l, ri) in lw.iter_mut().zip(&r) {
            *l *= ri;
            total += *l;
        }
        if !(total > 0.0) {
            break;
        }
        lw.iter_mut().for_each(|l| *l /= total);
    }
    best
}
