//! Library error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is out of its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Trap depth requested from trap parameters without a polarizability
    /// anisotropy and without a depth override.
    #[error("polarizability anisotropy not set and no depth override given")]
    MissingPolarizability,

    /// Basis truncation failed: the Boltzmann tail estimate exceeds the target.
    #[error(
        "basis truncation failure: j_max = {j_max} leaves estimated tail weight \
         {tail_estimate:.3e} > tail_epsilon = {tail_epsilon:.3e}"
    )]
    Truncation {
        j_max: u32,
        tail_estimate: f64,
        tail_epsilon: f64,
    },

    /// Tridiagonal eigensolver did not converge.
    #[error("eigensolver failed to converge (block size {size}, index {index})")]
    EigenFailure { size: usize, index: usize },

    /// A torque sweep produced a non-monotone revival-alignment table.
    #[error("torque sweep not monotone at entry {index}: {delta:.3e} above tolerance")]
    NonMonotoneSweep { index: usize, delta: f64 },

    /// Dense per-j propagator storage would exceed the configured cap.
    #[error("memory cap exceeded: {required} matrix entries > cap {cap}")]
    MemoryCap { required: u64, cap: u64 },

    /// Golden-section/maximum search failed to converge.
    #[error("optimization did not converge: {0}")]
    OptimizationFailure(String),

    /// State-cache I/O failure.
    #[error("state cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
