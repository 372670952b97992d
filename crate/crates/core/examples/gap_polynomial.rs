//! Minimax polynomial 1 − Σ h_m z^m that is small off an arc, and the bound it gives on e_{kn}.

use rigidity_lab::predictor::{orthant_error_en, IndexSet};
use rigidity_lab::rigidity::{build_gap_polynomial, power_error_bound, SupportSample};
use rigidity_lab::spectral::{DomainTag, SpectralMeasure};
use std::f64::consts::PI;

fn main() -> rigidity_lab::Result<()> {
    let support = SupportSample::arc(0.0, PI / 3.0, 4001)?;
    let q = build_gap_polynomial(&support, 16, 0.5)?;
    println!("degree {}, certified sup {:.4} ({})", q.degree, q.bound, q.construction);

    let pairs: Vec<(Vec<f64>, f64)> = (0..20).map(|j| (vec![PI / 3.0 + 0.1 + 0.1 * j as f64], 1.0)).collect();
    let s = SpectralMeasure::symmetric_atoms(DomainTag::discrete(1), &pairs);
    let mass = s.atom_mass();
    for n in 1..=4 {
        let pb = power_error_bound(&q, n, mass)?;
        let e = orthant_error_en(&s, q.degree * n, &IndexSet::positive(1))?;
        println!("n = {n}: e_kn = {e:.3e} ≤ ‖Q^n‖² = {:.3e} ≤ 4^-n S = {:.3e}", pb.l2_error(&s), pb.bound);
    }
    Ok(())
}
