//! A sample path of the triangle-covariance Gaussian field by circulant embedding.

use rigidity_lab::models::{sample_gaussian_field, FieldGrid, TriangleModel};
use rigidity_lab::spectral::CovarianceKernel;
use rigidity_lab::SeededRng;

fn main() -> rigidity_lab::Result<()> {
    let kernel = CovarianceKernel::triangle(TriangleModel::unit_peak_1d());
    let grid = FieldGrid::line(2048, 0.01);
    let sample = sample_gaussian_field(&kernel, &grid, SeededRng::new(42))?;
    let n = sample.values.len() as f64;
    let mean = sample.values.iter().sum::<f64>() / n;
    let var = sample.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    println!("{} points via {}, empirical variance {var:.3} (C(0) = 1)", sample.values.len(), sample.method);
    let out = std::env::temp_dir().join("triangle_field.csv");
    sample.write_csv(&out, serde_json::json!({"model": "triangle", "scale": 0.5}))?;
    println!("wrote {}", out.display());
    Ok(())
}
