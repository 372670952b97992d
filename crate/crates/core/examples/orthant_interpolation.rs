//! One-sided prediction errors e_n on the torus and the strong interpolability verdict.

use rigidity_lab::predictor::{strong_interpolability_check, EnCurve, IndexSet};
use rigidity_lab::spectral::{Atom, Density, DomainTag, SpectralMeasure};

fn main() -> rigidity_lab::Result<()> {
    let circle = DomainTag::discrete(1);
    let smooth = SpectralMeasure::new(circle, Density::Cosine { coeffs: vec![1.0, 0.8] }, vec![]);
    let ns: Vec<usize> = (1..=10).collect();
    let curve = EnCurve::compute(&smooth, &ns, &IndexSet::positive(1))?;
    print!("{}", curve.to_csv(None));

    // Atoms away from θ = 0 leave a gap, and e_n decays geometrically.
    let atoms = (0..12).map(|j| Atom(vec![1.0 + 0.35 * j as f64], 1.0)).collect();
    let v = strong_interpolability_check(&SpectralMeasure::atomic(circle, atoms), 16)?;
    println!("atoms: {:?}, worst rate {:.3}", v.classification, v.rate);

    let v = strong_interpolability_check(&smooth, 16)?;
    println!("density: {:?}, strongly interpolable = {}", v.classification, v.strongly_interpolable);
    Ok(())
}
