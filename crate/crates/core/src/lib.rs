//! Construction and numerical verification of holomorphic peak functions on
//! the symmetrized polydisc, bounded pseudoconvex Reinhardt domains and
//! convex domains, with transfer under proper holomorphic maps.

pub mod cconvex;
pub mod domain;
pub mod error;
pub mod io;
pub mod numerics;
pub mod polytope;
pub mod reinhardt;
pub mod sympoly;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
