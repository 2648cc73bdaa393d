//! Green functions for a charged particle in the plane pierced by one or two
//! idealized magnetic flux lines: the spinless Green function in separated
//! and chain-resummed form, the four-dimensional deficiency basis of the
//! two-vortex problem, and the finite-rank correction matrices that assemble
//! the spin-1/2 (Pauli) Green functions.
//!
//! All spectral integrals run over a shared lattice on the imaginary-order
//! line of the Macdonald function; chain integrals in n variables become
//! matrix chains on that lattice, so the cost is O(n N^2) instead of
//! exponential in n.

pub mod error;
pub mod boundary;
pub mod deficiency;
pub mod geometry;
pub mod krein;
pub mod one_vortex;
pub mod quadrature;
pub mod two_vortex;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
