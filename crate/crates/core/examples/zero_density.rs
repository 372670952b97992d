//! Counting real zeros of exponential-type functions on [−T, T].

use rigidity_lab::rigidity::jensen_zero_density;
use rigidity_lab::special::{ball_transform, sinc};
use std::f64::consts::PI;

fn main() -> rigidity_lab::Result<()> {
    let f_cos = |x: f64| x.cos();
    let f_sinc = |x: f64| sinc(x);
    let f_ball = |x: f64| ball_transform(2, x.abs());
    let fs: [(&str, &dyn Fn(f64) -> f64); 3] = [("cos", &f_cos), ("sinc", &f_sinc), ("ball_d2", &f_ball)];
    for (tag, f) in fs {
        let z = jensen_zero_density(f, tag, 200.0, 0.05)?;
        println!("{tag:>8}: ζ̂ = {:.4} (2/π = {:.4}), {} zeros", z.zeta_hat, 2.0 / PI, z.zeros.len());
    }
    Ok(())
}
