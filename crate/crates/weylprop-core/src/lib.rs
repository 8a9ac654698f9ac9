//! Classical-mechanics side of the super Hamiltonian construction of a
//! short-time Weyl-equation propagator.
//!
//! The crate is split along the two routes to the same phase/amplitude data:
//!
//! * [`grassmann`] — the 16-dimensional complex Grassmann algebra on the four
//!   odd generators (θ̲₁, θ̲₂, π̲₁, π̲₂), with Berezin calculus and
//!   superdeterminants;
//! * [`superflow`] — the super Hamilton equations, their numerical flow,
//!   flow inversion, and the action-integral "oracle" for the phase S and
//!   van Vleck superdeterminant D;
//! * [`hjcoeffs`] — the fast scalar route: coefficient ODEs for the θ,π
//!   expansion of S and of the amplitude, their x-sensitivities, and the
//!   exact free-field closed forms;
//! * [`potential`] — electromagnetic potentials with analytic derivative
//!   jets to third order;
//! * [`jet`] — second-order truncated Taylor arithmetic in the three spatial
//!   directions, used to carry sensitivities through the ODE solves.
//!
//! The crate is `no_std` (with `alloc`); all float math goes through libm.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod grassmann;
pub mod hjcoeffs;
pub mod jet;
pub mod potential;
pub mod superflow;

pub use num_complex::Complex64;
