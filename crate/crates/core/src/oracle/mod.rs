//! Independent ground truths: a finite bath solved by exact diagonalization
//! and Gaussian states written out in a truncated Fock basis.

pub mod discrete;
pub mod fock;

pub use discrete::{exact_u, exact_v, DiscreteBath, DiscretePropagator, Discretization};
pub use fock::{fock_moments_entropy_coherence, fock_state, fock_state_auto, FockState, FockSummary};
