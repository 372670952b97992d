//! Predicting a small cell of the triangle model from cells outside a ball of radius ρ.

use rigidity_lab::models::TriangleModel;
use rigidity_lab::predictor::interpolation_error_sweep;
use rigidity_lab::spectral::{DomainTag, LinearFunctional};
use rigidity_lab::QuadratureSpec;

fn main() -> rigidity_lab::Result<()> {
    let s = TriangleModel::canonical(1).spectral_measure();
    let target = LinearFunctional::centered_cell(DomainTag::continuous(1), &[0.0], 0.025);
    let schedule = [(0.2, 10.0), (0.1, 20.0), (0.05, 40.0)];
    let table = interpolation_error_sweep(&s, &[0.5, 1.0, 2.5], &schedule, &target, &QuadratureSpec::default())?;
    for r in &table.rows {
        println!("rho {:4} h {:5} R {:4}  mse/var {:.4e}", r.rho, r.h, r.r, r.mse / r.target_var);
    }
    for (rho, trend) in &table.trends {
        println!("rho {rho}: {trend:?}");
    }
    Ok(())
}
