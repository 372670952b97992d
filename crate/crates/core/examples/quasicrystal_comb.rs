//! Sum of randomly translated lattices: spectrum, discretization and a Monte-Carlo check.

use rigidity_lab::models::{cell_variance, comb_spectral_measure, discretized_spectral_measure, sample_comb, CombModel, Window};
use rigidity_lab::SeededRng;

fn main() -> rigidity_lab::Result<()> {
    let m = CombModel::new(vec![1.0, 2.0, 4.0], 1, 400)?;
    let s = comb_spectral_measure(&m);
    println!("{} atoms, intensity {}", s.atoms.len(), m.intensity());

    let t = 0.7;
    let st = discretized_spectral_measure(&s, t)?;
    println!("discretized at t = {t}: {} atoms on the circle, cell variance {:.5}", st.atoms.len(), cell_variance(&st));

    let window = Window::interval(0.0, t);
    let root = SeededRng::new(3);
    let counts: Vec<f64> = (0..20_000).map(|i| sample_comb(&m, &window, root.split(i)).map(|p| p.len() as f64)).collect::<Result<_, _>>()?;
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    println!("Monte Carlo: mean {mean:.4} (t·Σ1/a = {:.4}), variance {var:.5}", t * m.intensity());
    Ok(())
}
