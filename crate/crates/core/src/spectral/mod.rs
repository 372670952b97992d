//! Spectral measures and the functionals computed from them.

pub mod density;
pub mod domain;
pub mod functional;
pub mod integrals;
pub mod measure;

pub use density::{CustomDensity, Density};
pub use domain::{fold_angle, DomainTag};
pub use functional::{LinearFunctional, Shape};
pub use integrals::{covariance_eval, gram_inner_product, variance_of_statistic, CovarianceKernel};
pub use measure::{Atom, SpectralMeasure};

/// `f̂(u)`.
pub fn fourier_of_functional(f: &LinearFunctional, u: &[f64]) -> num_complex::Complex64 {
    f.fourier(u)
}
pub mod checks;
pub use checks::{check_symmetry, check_tempered, TemperedEvidence};
pub mod gap;
pub use gap::{spectral_gap_search, spectral_gap_search_in, GapRegion};
pub mod szego;
pub use szego::{log_integral_verdict, SzegoClass, SzegoVerdict};
pub mod tensor;
pub use tensor::{tensor_domination_check, DominationReport, GridSpec};
