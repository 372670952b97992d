//! Adaptive Gauss–Kronrod integration and the windowed real-line integrator.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600633323271,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and truncation schedule shared by every spectral integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// First window radius on the real line.
    pub base_radius: f64,
    /// Maximum number of window doublings.
    pub max_levels: usize,
    pub max_evals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-8, rel_tol: 1e-10, base_radius: 16.0, max_levels: 10, max_evals: 20_000_000 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadratureSpec { abs_tol, ..Default::default() }
    }
}

fn gk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = T::zero();
    for j in 0..10 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let err = ((k - g) * h).magnitude();
    (k * h, err)
}

struct Seg<T> {
    a: f64,
    b: f64,
    val: T,
    err: f64,
}

impl<T> PartialEq for Seg<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T> Eq for Seg<T> {}
impl<T> PartialOrd for Seg<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Seg<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Adaptive integral over the sorted breakpoints `pts`, each gap pre-split into
/// panels no wider than `max_panel`. Returns the value and the error estimate.
pub fn integrate_pts<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    pts: &[f64],
    max_panel: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_evals: usize,
) -> (T, f64) {
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    let mut evals = 0usize;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let n = ((b - a) / max_panel).ceil().max(1.0) as usize;
        let step = (b - a) / n as f64;
        for i in 0..n {
            let lo = a + step * i as f64;
            let hi = if i + 1 == n { b } else { lo + step };
            let (v, e) = gk21(&mut f, lo, hi);
            evals += 21;
            total = total + v;
            err += e;
            heap.push(Seg { a: lo, b: hi, val: v, err: e });
        }
    }
    while err > abs_tol.max(rel_tol * total.magnitude()) && evals < max_evals {
        let Some(s) = heap.pop() else { break };
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            heap.push(Seg { err: 0.0, ..s });
            continue;
        }
        let (v1, e1) = gk21(&mut f, s.a, m);
        let (v2, e2) = gk21(&mut f, m, s.b);
        evals += 42;
        total = total - s.val + v1 + v2;
        err += e1 + e2 - s.err;
        heap.push(Seg { a: s.a, b: m, val: v1, err: e1 });
        heap.push(Seg { a: m, b: s.b, val: v2, err: e2 });
    }
    // re-sum to shed accumulated rounding from the running updates
    let mut fresh = T::zero();
    let mut ferr = 0.0;
    for s in heap.iter() {
        fresh = fresh + s.val;
        ferr += s.err;
    }
    (fresh, ferr)
}

pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(f: F, a: f64, b: f64, max_panel: f64, abs_tol: f64) -> (T, f64) {
    integrate_pts(f, &[a, b], max_panel, abs_tol, 1e-13, 20_000_000)
}

/// Smooth cut-off: 1 on `[0,1]`, 0 on `[2,∞)`, C^∞ in between.
pub fn window(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        return 1.0;
    }
    if x >= 2.0 {
        return 0.0;
    }
    let psi = |y: f64| if y <= 0.0 { 0.0 } else { (-1.0 / y).exp() };
    let a = psi(2.0 - x);
    a / (a + psi(x - 1.0))
}

/// Panel width resolving oscillation at angular frequency `freq`.
pub fn panel_width(freq: f64) -> f64 {
    (2.0 / (1.0 + freq)).min(2.0)
}

/// `∫_ℝ f` through windowed truncations `∫ f(u) w(u/L)` at `L = L0·2^k`,
/// extrapolated in powers of `1/L`. The last Richardson difference is the tail estimate.
pub fn integrate_line<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    spec: &QuadratureSpec,
    freq: f64,
    breaks: &[f64],
) -> Result<T> {
    let l0 = spec.base_radius;
    let pw = panel_width(freq);
    let mut core_pts = vec![-l0];
    core_pts.extend(breaks.iter().copied().filter(|b| b.abs() < l0));
    core_pts.push(l0);
    core_pts.sort_by(f64::total_cmp);
    let tol = spec.abs_tol;
    let inner_tol = tol * 1e-3;
    let (core, _) = integrate_pts(&mut f, &core_pts, pw, inner_tol, spec.rel_tol * 1e-2, spec.max_evals);
    let mut table: Vec<Vec<T>> = Vec::new();
    let mut last_err = f64::INFINITY;
    for k in 0..spec.max_levels {
        let l = l0 * 2f64.powi(k as i32);
        let mut pts = vec![l0];
        pts.extend(breaks.iter().map(|b| b.abs()).filter(|&b| b > l0 && b < 2.0 * l));
        pts.push(2.0 * l);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let (shell, _) = integrate_pts(
            |u: f64| (f(u) + f(-u)) * window(u / l),
            &pts,
            pw,
            inner_tol,
            spec.rel_tol * 1e-2,
            spec.max_evals,
        );
        let mut row = vec![core + shell];
        for j in 1..=k {
            let p = 2f64.powi(j as i32);
            let v = (row[j - 1] * p - table[k - 1][j - 1]) * (1.0 / (p - 1.0));
            row.push(v);
        }
        if k >= 1 {
            // column with the smallest change between consecutive rows
            let mut best: Option<(f64, T)> = None;
            for c in 0..k {
                let e = (row[c] - table[k - 1][c]).magnitude();
                if best.map_or(true, |(b, _)| e < b) {
                    best = Some((e, row[c]));
                }
            }
            let (e, v) = best.unwrap();
            last_err = e;
            if k >= 2 && e <= tol.max(spec.rel_tol * v.magnitude()) {
                return Ok(v);
            }
        }
        table.push(row);
    }
    Err(Error::QuadratureDivergence { estimate: last_err, tolerance: tol })
}

/// `∫_{-π}^{π} f` with breakpoints.
pub fn integrate_circle<T: QuadValue, F: FnMut(f64) -> T>(f: F, spec: &QuadratureSpec, freq: f64, breaks: &[f64]) -> T {
    let mut pts = vec![-std::f64::consts::PI];
    pts.extend(breaks.iter().copied().filter(|b| b.abs() < std::f64::consts::PI));
    pts.push(std::f64::consts::PI);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    integrate_pts(f, &pts, panel_width(freq).min(0.5), spec.abs_tol * 1e-2, spec.rel_tol * 1e-2, spec.max_evals).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::sinc;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 10.0, 1e-14);
        assert_relative_eq!(v, (64.0 - 1.0) / 6.0 - 9.0, epsilon = 1e-13);
    }

    #[test]
    fn window_shape() {
        assert_eq!(window(0.5), 1.0);
        assert_eq!(window(2.5), 0.0);
        assert_relative_eq!(window(1.5), 0.5, epsilon = 1e-15);
        assert!(window(1.2) > window(1.8));
    }

    #[test]
    fn sinc_squared_line() {
        // ∫ sinc² = π
        let v: f64 = integrate_line(|u| sinc(u).powi(2), &QuadratureSpec::with_tol(1e-10), 2.0, &[]).unwrap();
        assert_relative_eq!(v, PI, epsilon = 1e-9);
    }

    #[test]
    fn lorentzian_line() {
        let v: f64 = integrate_line(|u| 1.0 / (1.0 + u * u), &QuadratureSpec::with_tol(1e-10), 0.0, &[]).unwrap();
        assert_relative_eq!(v, PI, epsilon = 1e-9);
    }

    #[test]
    fn divergent_line_is_reported() {
        let r: Result<f64> = integrate_line(|u: f64| 1.0 / (1.0 + u.abs()), &QuadratureSpec::default(), 0.0, &[]);
        assert!(matches!(r, Err(Error::QuadratureDivergence { .. })));
    }

    #[test]
    fn complex_oscillatory() {
        let spec = QuadratureSpec::with_tol(1e-11);
        let v: Complex64 = integrate_circle(|t| Complex64::from_polar(1.0, 3.0 * t) * t.cos(), &spec, 4.0, &[]);
        assert!(v.norm() < 1e-12);
    }
}
