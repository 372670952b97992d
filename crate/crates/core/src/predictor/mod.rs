//! Best linear prediction under `⟨h, h'⟩_S` and the orthant errors `e_n(S)`.

pub mod design;
pub mod gram;
pub mod orthant;
pub mod solve;
pub mod sweep;

pub use design::{ExclusionRegion, ObservationDesign};
pub use gram::{cross_vector, gram_matrix};
pub use orthant::{orthant_error_en, orthant_errors, orthant_predictor, OrthantPredictor, strong_interpolability_check, total_mass, EnCurve, IndexSet, InterpolabilityClass, StrongVerdict};
pub use solve::{solve_predictor, PredictionResult, Ridge};
pub use sweep::{classify, interpolation_error_sweep, SweepRow, SweepTable, Trend};
