//! Gap polynomials, minor cones, zero densities, periodicity recovery and the patching
//! polynomial of the counter-example set.

pub mod cone;
pub mod gap;
pub mod jensen;
pub mod patch;
pub mod periodicity;

pub use cone::{contains_line, has_antipodal_pair, minor_cone_witness, random_cones, ConeFamily, ConeSpec};
pub use gap::{build_gap_polynomial, power_error_bound, ArcGap, GapPolynomial, PowerBound, SupportDescriptor, SupportSample};
pub use jensen::{jensen_zero_density, ZeroDensityEstimate};
pub use patch::{patch_polynomial, ArcApproximant, PatchConstants, PatchPolynomial, TrigPoly};
pub use periodicity::{detect_period, propagate_step, IntField, PeriodicPattern, PeriodicityReport, PredictorTable, ShellPrediction, ValueSet};
