//! Variance of linear statistics, Szegő verdicts and spectral gaps.

use rigidity_lab::spectral::szego::default_cutoffs;
use rigidity_lab::spectral::{log_integral_verdict, spectral_gap_search, variance_of_statistic, Density, DomainTag, LinearFunctional, SpectralMeasure};
use rigidity_lab::QuadratureSpec;

fn main() -> rigidity_lab::Result<()> {
    let line = DomainTag::continuous(1);
    let spec = QuadratureSpec::default();

    // Lebesgue spectrum: the variance of a cell statistic is its volume.
    let white = SpectralMeasure::lebesgue(line, 1.0);
    for side in [0.25, 1.0, 3.0] {
        let f = LinearFunctional::cell(line, vec![-1.0], side);
        println!("Var(M([−1, −1+{side}])) = {:.10}", variance_of_statistic(&f, &white, &spec)?);
    }

    for (name, s) in [
        ("exp(-1/|u|)", Density::DeepZero { alpha: 1.0, c: 1.0 }),
        ("exp(-1/sqrt|u|)", Density::DeepZero { alpha: 0.5, c: 1.0 }),
        ("gap |u| < 0.3", Density::GapIndicator { radius: 0.3, value: 1.0 }),
    ] {
        let v = log_integral_verdict(&s, line, &default_cutoffs())?;
        println!("{name:>16}: divergent = {:5}, {:?}", v.divergent, v.classification);
    }

    let gapped = SpectralMeasure::new(line, Density::GapIndicator { radius: 0.5, value: 1.0 }, vec![]);
    if let Some(g) = spectral_gap_search(&gapped, 0.01, 0.5) {
        println!("gap box {:?} .. {:?}", g.lo, g.hi);
    }
    Ok(())
}
