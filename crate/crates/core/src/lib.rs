//! Numerical quaternionic operator theory on ℍⁿ.
//!
//! Matrices act on the right ℍ-module of column vectors. Spectral work is
//! routed through the complex adjoint representation χ (see [`qmatrix`]).

pub mod cli;
pub mod discretize;
pub mod error;
pub mod io;
pub mod irreducibility;
pub mod linalg;
pub mod oracles;
pub mod qmatrix;
pub mod quaternion;
pub mod scalculus;
pub mod spectrum;
pub mod testing;
pub mod verify;

pub use error::{Error, Result};
pub use qmatrix::QMatrix;
pub use quaternion::{ImaginaryUnit, Quaternion, Sphere};
