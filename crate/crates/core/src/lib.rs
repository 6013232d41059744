//! Exact construction and verification of smooth finite elements and
//! finite element complexes on triangulations in the plane.

pub mod bernstein;
pub mod complexes;
pub mod elements;
pub mod error;
pub mod exact_linalg;
pub mod lattice;
pub mod mesh;

pub use error::{Error, Result};
