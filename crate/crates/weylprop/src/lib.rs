//! Quantum side and tooling for the short-time Weyl-equation propagator:
//!
//! * [`grid`] — periodic grids, FFTs with the ħ-scaled momentum lattice,
//!   and the two-component wavefunction;
//! * [`propagator`] — the parametrix U(t,s) as an oscillatory quadrature
//!   with a 2×2 kernel matrix, the Weyl-quantized Hamiltonian, Trotter
//!   composition, and defect diagnostics;
//! * [`reference`] — the ℂ²-spinor ground truth: ♯/♭ identification, exact
//!   free propagator, Strang split-step reference, matrix-potential
//!   reduction;
//! * [`config`] — scenario configuration for the batch CLI.
//!
//! The classical mechanics (Grassmann algebra, super flows, coefficient
//! ODEs) lives in the `weylprop-core` crate, which this crate drives.

pub mod config;
pub mod diag;
pub mod grid;
pub mod propagator;
pub mod reference;

pub use num_complex::Complex64;
pub use weylprop_core;
