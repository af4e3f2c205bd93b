//! Exact reduced dynamics of two qubits that dephase through local couplings
//! to a multimode bosonic field whose mode pairs start out in a correlated
//! two-mode Gaussian state.
//!
//! The crate is organised bottom-up:
//!
//! * [`gaussian`]: two-mode covariance matrices, the Robertson–Schrödinger
//!   check and the Gaussian characteristic function.
//! * [`coherence`]: interaction windows, displacement amplitudes and the six
//!   coherence factors, computed three ways (closed form for ohmic baths,
//!   continuum quadrature, explicit mode sums).
//! * [`dynamics`]: the reduced 4×4 density matrix, Bell states and the trace
//!   distance.
//! * [`nonmarkov`]: information backflow along a trajectory and its
//!   maximisation over orthogonal pure-state pairs.
//! * [`fock`]: a brute-force truncated Fock-space oracle used to validate the
//!   Gaussian layer.
//! * [`cli`]: scenario configuration, CSV emission and the `nlmem` commands.
//!
//! Times are measured in units of `1/ω_c`.

pub mod cli;
pub mod coherence;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod gaussian;
pub(crate) mod linalg;
pub mod nonmarkov;
pub mod quadrature;
pub mod simplex;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

// The guide's code listings are compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/gaussian.md")]
    pub mod gaussian {}
    #[doc = include_str!("../../../book/src/coherence.md")]
    pub mod coherence {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    pub mod dynamics {}
    #[doc = include_str!("../../../book/src/measure.md")]
    pub mod measure {}
    #[doc = include_str!("../../../book/src/fock_oracle.md")]
    pub mod fock_oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
