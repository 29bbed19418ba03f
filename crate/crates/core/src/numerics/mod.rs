//! Shared numerical substrate: complex polynomials, Möbius geometry,
//! holomorphic expression trees, sampling and small dense linear algebra.

pub mod holo;
pub mod linalg;
pub mod mobius;
pub mod par;
pub mod poly;
pub mod sampling;
pub mod tolerance;

pub use num_complex::Complex64 as C64;

pub use holo::HoloFunction;
pub use mobius::{mobius_distance, poincare_from_mobius};
pub use poly::{roots, ComplexPoly};
pub use sampling::{SampleSet, SampleStrategy};
pub use tolerance::ToleranceProfile;
