//! Exact Mukai-lattice, stability-plane and polygon-bound computations for
//! K3 surfaces of Picard rank one with `H² = 2p`, `p` prime.

pub mod exactnum;
pub mod error;
pub mod mukai;
pub mod plane;
pub mod walls;
pub mod hzero;
pub mod polysearch;
pub mod tables;

pub use error::{Error, Result};
