//! Simulation toolkit for a Kerr-nonlinear oscillator driven by a three-photon
//! parametric pump (3KPO).
//!
//! The crate covers the full workflow for this model in the frame rotating at
//! one third of the pump frequency:
//!
//! - [`fock`]: dense truncated Fock-space states, operators, Gaussian
//!   unitaries, Wigner functions and fidelities — the numerical substrate and
//!   the brute-force oracle everything else is checked against.
//! - [`semiclassical`]: the coherent-state meta-potential, its stationary
//!   points, thresholds and the three-region phase diagram.
//! - [`spectrum`]: Hamiltonian construction and sector-blocked
//!   diagonalization, excitation gaps, level crossings.
//! - [`states`]: closed-form ground states — the exact recurrence solutions
//!   on the degeneracy line, Airy-function wavefunctions, squeezed coherent
//!   states and three-legged squeezed cat states.
//! - [`qutrit`]: single-photon and dephasing matrix elements on the cat
//!   basis, leakage amplitudes, logical operators and Gell-Mann coordinates.
//! - [`dynamics`]: Lindblad evolution, steady states, adiabatic ramps,
//!   engineered dissipation and decay-time extraction.
//!
//! All quantities are expressed in units of the Kerr strength `U` (energies
//! in `U`, times in `1/U`); `U` itself is kept as an explicit parameter so
//! formulas stay dimensionally honest.

extern crate blas_src;

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod qutrit;
pub mod semiclassical;
pub mod special;
pub mod spectrum;
pub mod states;
pub mod wigner;

pub use error::Error;
pub use fock::{DensityMatrix, FockSpace, OperatorMatrix, StateVector};
pub use wigner::WignerField;
pub use semiclassical::{ModelParams, PhaseRegion, StationaryPoint};
pub use spectrum::SpectrumResult;
pub use states::{CatBasis, GaussianParams};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
