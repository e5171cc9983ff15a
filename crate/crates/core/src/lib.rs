//! Long-wavelength light-matter Hamiltonians on an electron grid coupled to
//! truncated photon modes.

pub mod cli;
pub mod error;
pub mod hamiltonians;
pub mod hilbert;
pub mod quadrature;
pub mod quadratic;
pub mod semiclassical;
pub mod spectra;
pub mod variational;

pub use error::{Error, Result};
