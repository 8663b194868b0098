//! Hahn bases, spectral decomposition of the transition matrices, and
//! determinantal correlation functions of the dynamics.

pub mod hahn;
pub mod kernel;
pub mod mc;

pub use hahn::HahnBasis;
pub use kernel::{
    correlation, kernel, spectral_coeff, v_kernel, verify_spectral, AdmissibleSection,
    SpaceTimeKernel, SpaceTimePoint,
};
pub use mc::{mc_correlation, mc_correlations, mc_correlations_parallel, McEstimate};
