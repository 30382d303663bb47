//! Hagedorn wavepackets and their phase-space transforms.
//!
//! The crate is `no_std` with `alloc`. It covers
//!
//! * validated parameter sets `(ε, q, p, Q, P)` with squeeze and polar maps
//!   ([`params`]),
//! * Hermite and Laguerre scalars ([`special`]),
//! * wavepacket and polynomial recurrences, Gaussian moments and the ladder
//!   algebra on coefficients ([`hagedorn`]),
//! * closed-form Wigner, FBI and Husimi transforms ([`phase`]),
//! * an independent brute-force quadrature oracle ([`quadrature`]),
//! * projection onto hyperbolic-cross bases ([`approximation`]),
//! * Störmer–Verlet propagation of the parameters ([`dynamics`]).
//!
//! All complex scalars are [`C64`]; matrices are `nalgebra` dynamic matrices.

#![no_std]

extern crate alloc;

pub mod approximation;
pub mod dynamics;
pub mod error;
mod fm;
pub mod hagedorn;
pub mod index;
pub mod linalg;
pub mod params;
pub mod phase;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use index::{IndexSet, MultiIndex};
pub use num_complex::Complex64 as C64;
pub use params::ParameterSet;
pub use phase::PhasePoint;
