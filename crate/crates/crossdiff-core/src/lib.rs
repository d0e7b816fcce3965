//! Core algorithms for strongly coupled reaction-diffusion systems.
//!
//! The crate analyzes full diffusion matrices for well-posedness, builds
//! spectral bases on boxes, exponentiates modal symbols into exact
//! diffusion propagators, resolves nonlinear reactions through resolvent
//! and Yosida machinery, and composes both halves into splitting schemes
//! and a stationary solver. Everything is `no_std` with `alloc`; the
//! companion crate adds file formats and a command-line front end.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod evolution;
pub mod kouachi;
pub mod linalg;
pub mod reaction;
pub mod semigroup;
pub mod spectral;
