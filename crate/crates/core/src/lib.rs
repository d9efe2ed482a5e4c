//! Reflection of low-energy particles from one-dimensional attractive wells.
//!
//! A well whose strength `q = a√V0` (units `2μ = ħ² = 1`) sits at a critical
//! value `q_c` carries a zero-energy half-bound state: a solution that is flat
//! (`ψ' = 0`) on both sides instead of decaying. At those strengths the
//! reflection probability goes to zero as `E → 0⁺` for symmetric wells, and
//! becomes small for asymmetric ones, instead of the generic `R(0) = 1`.
//!
//! * [`potentials`]: the catalogued wells and strength families.
//! * [`specfun`]: complex gamma, Bessel `J_ν` of complex order, `Y₀`, `Y₁`.
//! * [`analytic`]: closed forms for the square, exponential, soliton and
//!   delta wells.
//! * [`scatter`]: numerical reflection by RK4 shooting and by transfer
//!   matrices.
//! * [`critical`]: half-bound-state detection and critical strengths.
//! * [`scan`]: reflection scans, Table-style grids and CSV/JSON output.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

mod dd;

pub mod analytic;
pub mod critical;
pub mod potentials;
pub mod roots;
pub mod scan;
pub mod scatter;
pub mod specfun;

pub use num_complex::Complex64;

pub use potentials::{Descriptor, Family, Potential, PotentialKind};
pub use scatter::{GridConfig, Method, ScatterResult};

use thiserror::Error;

/// Any failure surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Potential(#[from] potentials::PotentialError),
    #[error(transparent)]
    Specfun(#[from] specfun::SpecfunError),
    #[error(transparent)]
    Analytic(#[from] analytic::AnalyticError),
    #[error(transparent)]
    Scatter(#[from] scatter::ScatterError),
    #[error(transparent)]
    Critical(#[from] critical::CriticalError),
    #[error(transparent)]
    Scan(#[from] scan::ScanError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
