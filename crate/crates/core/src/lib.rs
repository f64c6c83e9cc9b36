//! Spectral theory toolkit for the third-order operator `i y'''` on [0, 1]
//! with boundary conditions `y''(0) = 0`, `y'(1) = y'(0)`, `y''(1) = 0`,
//! and its rank-one non-local perturbation `i y''' + alpha <y, v> v`.

pub mod bc;
pub mod error;
pub mod grid;
pub mod identities;
pub mod inverse;
pub mod io;
pub mod oracle;
pub mod perturbation;
pub mod potential;
pub mod quadrature;
pub mod spectrum_l0;
pub mod trigcubic;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
