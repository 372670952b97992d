//! Model zoo: triangle fields, Dirac combs, discretization and Gaussian sampling.

pub mod comb;
pub mod discretize;
pub mod gaussian;
pub mod triangle;

pub use comb::{comb_spectral_measure, sample_comb, CombModel, Window};
pub use discretize::{cell_variance, discretized_spectral_measure};
pub use gaussian::{sample_gaussian_field, FieldGrid, FieldSample};
pub use triangle::{triangle_spectral_density, TriangleModel};
pub use crate::special::ball_transform as bessel_transform;
