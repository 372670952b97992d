//! Product spectra: domination by factors, and the half-space plateau of Lebesgue ⊗ s̃.

use rigidity_lab::predictor::{EnCurve, IndexSet};
use rigidity_lab::spectral::{tensor_domination_check, Density, DomainTag, GridSpec, SpectralMeasure};

fn main() -> rigidity_lab::Result<()> {
    let torus2 = DomainTag::discrete(2);
    let a = Density::Cosine { coeffs: vec![1.0, 0.5] };
    let b = Density::Cosine { coeffs: vec![1.0, 0.2] };
    let s = SpectralMeasure::new(torus2, Density::tensor(vec![a.clone(), b.clone()]), vec![]);
    let factors = [SpectralMeasure::new(DomainTag::discrete(1), a, vec![]), SpectralMeasure::new(DomainTag::discrete(1), b.clone(), vec![])];
    let r = tensor_domination_check(&s, &factors, &GridSpec::torus(64))?;
    println!("dominated {}, max ratio {:.3}", r.dominated, r.max_ratio);

    let sep = SpectralMeasure::new(torus2, Density::tensor(vec![Density::lebesgue(), b]), vec![]);
    let c = EnCurve::compute(&sep, &[1, 2, 4, 8], &IndexSet::HalfSpace { axis: 0, sign: 1 })?;
    println!("S(T²) = {:.4}", c.total_mass);
    for (n, e) in c.n_values.iter().zip(&c.errors) {
        println!("n = {n}: e_n = {e:.4}");
    }
    Ok(())
}
