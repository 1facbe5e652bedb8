//! Numerical spectral theory of segments of periodic curved planar waveguides.
//!
//! The pipeline is: a periodic unit-speed [`curve`] and a half-width `ρ`
//! define a [`waveguide`] strip; its Dirichlet Laplacian is pulled back to a
//! flat rectangle and discretized by [`assembly`]; [`eigen`] computes the
//! lowest eigenpairs; [`analysis`] runs the gap-scaling, ground-state and
//! comparison checks on top.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod curve;
pub mod waveguide;
pub mod assembly;
pub mod sparse;
pub mod eigen;
pub mod analysis;
mod math;
