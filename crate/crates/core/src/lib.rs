//! Numerical toolkit for two-sender interference channels with classical
//! inputs and quantum outputs.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex matrices, density operators, spectral calculus
//! - [`channel`]: channel data model, classical embedding, induced multiple
//!   access channels, on-disk channel files
//! - [`entropic`]: classical-quantum joint states and Holevo information
//! - [`region`]: rate points, pentagons, convex rate regions in the plane
//! - [`capacity`]: distribution grids, regime classification, achievable and
//!   outer rate regions
//! - [`sim`]: typicality, random codebooks, the square-root measurement
//!   decoder, and operator-inequality property checks
//!
//! All logarithms are base 2; every information quantity is in bits.
//!
//! Sweeps over distribution grids, enumeration of auxiliary inputs, and
//! Monte Carlo codebook sampling run data-parallel when the `parallel`
//! feature (default) is enabled; disabling it yields a dependency-free
//! sequential build with identical results.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channel;
pub mod entropic;
pub mod error;
pub mod io;
pub mod linalg;
pub mod par;
pub mod region;
pub mod sim;

pub use error::{Error, Result};
