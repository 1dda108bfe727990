//! Linearization about a ground state: angular sectors of `L1`, `L2`,
//! their bottom spectra, the radial zero-energy solution `δ`, and the
//! slope criterion for orbital stability.

mod delta;
mod operator;
mod report;
mod tridiag;

pub use delta::{delta_ode, DeltaConvention, DeltaTrajectory};
pub use operator::{
    build_sector, build_sector_on, centrifugal, eigen_bottom, eigenpair, negative_count, OperatorKind,
    SectorOperator, GRID_REFINEMENT, ZERO_MODE_TOL,
};
pub use report::{
    check_assumption, gss_verdict, gss_verdict_at, slope_at, spectral_report, AssumptionCheck, SectorSummary,
    SpectralReport, Verdict, SLOPE_TOL,
};
pub use tridiag::SymTridiagonal;
