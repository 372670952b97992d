pub mod cli;
pub mod error;
pub mod linalg;
pub mod models;
pub mod predictor;
pub mod quad;
pub mod rigidity;
pub mod rng;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use quad::QuadratureSpec;
pub use rng::SeededRng;
