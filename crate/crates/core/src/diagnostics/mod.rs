//! Conserved quantities, virial and pseudo-conformal functionals, sharp
//! interpolation quotients, and the distance to a soliton orbit.

mod distance;
mod functionals;
mod series;

pub use distance::{modulated_distance, ModulatedDistance, OrbitDistance};
pub use functionals::{
    gn_ratio, gn_ratio_radial, invariants, pseudoconformal, pseudoconformal_lower,
    pseudoconformal_rate_check, virial, virial_acceleration, virial_rate, virial_unchecked,
    weinstein_quotient_3d, weinstein_quotient_radial, Functionals, InvariantTriple,
    PseudoconformalSample, VIRIAL_EDGE_LIMIT,
};
pub use series::{DiagnosticsRecorder, DiagnosticsRow, DiagnosticsSeries, SERIES_HEADER};
