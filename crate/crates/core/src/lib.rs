//! Corrected Edgeworth expansions for standardized sums of iid heavy-tailed
//! random variables.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! evaluation over immutable values, so all types are `Send + Sync`.
//!
//! Module map:
//!
//! * [`special`]: Hermite polynomials, Dawson's integral and the derivatives
//!   of `D(x/√2)`, the parabolic cylinder function `D_ν`, and the Gaussian
//!   weighted Fourier kernels.
//! * [`slowly_varying`], [`density`]: slowly varying functions with their
//!   `ζ_L` integrals, heavy-tailed densities, moments, cumulants and the
//!   even/odd split.
//! * [`expansion`]: small-θ expansion of the cumulant function and the
//!   composition coefficients `ξ_{k,q}`.
//! * [`correction`]: the corrected density approximation.
//! * [`oracle`]: quadrature characteristic function and Fourier inversion.
#![no_std]

extern crate alloc;

pub mod correction;
pub mod density;
pub mod error;
pub mod expansion;
pub mod oracle;
pub mod parity;
pub mod quadrature;
pub mod slowly_varying;
pub mod special;

pub use correction::{
    corrected_density, correction_f, edgeworth_polynomial, g_alpha, moderate_region_bound,
    rozovskii_tail, tail_equivalent, CaseTag, ExpansionResult, Region,
};
pub use density::{cumulants, moment, standardize_pareto, CumulantSet, DensitySpec, Form};
pub use error::{Error, Result};
pub use expansion::{build_expansion, eval_psi_expansion, xi_kq, CharFnExpansion, Monomial};
pub use num_complex::Complex64;
pub use oracle::{charfn_numeric, density_by_inversion, InversionOracle, OracleConfig};
pub use parity::{Parity, ParityClass, INTEGER_TOLERANCE};
pub use slowly_varying::SlowlyVarying;
