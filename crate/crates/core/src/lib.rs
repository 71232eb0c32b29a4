//! Exact non-Markovian coherence dynamics of a single bosonic mode.
//!
//! A displaced squeezed thermal state of one mode is coupled bilinearly to an
//! Ohmic-family bosonic bath. The exact dynamics reduce to two Green's
//! functions: the survival amplitude `u(t)`, which solves a Volterra
//! integro-differential equation, and the thermal fluctuation `v(t)`. From
//! them the covariance matrix, von Neumann entropy and relative entropy of
//! coherence follow in closed form.
//!
//! * [`bath`]: spectral density, Bose occupation and memory kernels.
//! * [`greens`]: time-domain solvers for `u(t)` and `v(t)`.
//! * [`gaussian`]: state moments, covariance propagation, entropy, coherence.
//! * [`steady`]: self-energy, localized bound mode and long-time limits.
//! * [`oracle`]: discrete-mode and truncated-Fock ground truths.

pub mod bath;
pub mod error;
pub mod gaussian;
pub mod greens;
pub mod oracle;
pub mod quad;
pub mod steady;

pub use bath::BathSpec;
pub use error::{Error, Result};
pub use gaussian::{CoherencePoint, CovarianceMatrix, GaussianInit, Moments};
pub use greens::{GreensTrajectory, TimeGrid};
pub use steady::SteadyReport;
