//! Complete minimal surfaces with two ends, built from Weierstrass data on
//! superelliptic curves `w^N = prod (z - r_i)^e_i`.
//!
//! The crate is split by concern:
//! * [`quad`] real quadrature for algebraic endpoint singularities,
//! * [`curve`] the curves, their points and local orders of monomials,
//! * [`integrator`] branch tracking, path integrals, residues and the immersion,
//! * [`periods`] period closure for the two families and the obstruction reports,
//! * [`geometry`] curvature, ends, symmetries and meshes,
//! * [`classify`] ramification enumeration and the candidate catalog,
//! * [`families`] ready-made curves, data and cycles for each family.

pub mod classify;
pub mod curve;
pub mod error;
pub mod families;
pub mod geometry;
pub mod integrator;
pub mod periods;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;
