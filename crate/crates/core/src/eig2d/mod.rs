//! Finite-difference Dirichlet Laplacian on masked planar domains and the
//! membrane experiments built on it.

mod domain;
mod experiments;
mod pleijel;
mod solver;

pub use domain::{build_mask, mask_components, DomainBoundary, DomainSpec, MIN_HOLE_CELLS};
pub use experiments::{
    alessandrini_check, annulus_comparison, convergence_study, courant_violations, interlacing_check, nodal_summary,
    payne_experiment, payne_run, solve_domain, AlessandriniCheck, AlessandriniSample, AnnulusComparison,
    ConvergenceStudy, InterlacingCheck, NodalSummary, PayneRun, PayneStudy, ANNULUS_TOLERANCE, ENDPOINT_CELLS,
    GAP_CONSISTENCY,
};
pub use pleijel::{pleijel_square_scan, square_levels, PleijelRow, PleijelScan, SquareLevel, COURANT_SHARP};
pub use solver::{eigen_smallest, DiscreteOperator, EigenPair2D, Spectrum, MAX_COUNT, RESIDUAL_TOLERANCE};
