//! Numerical laboratory for variable-coefficient multi-frequency variation
//! estimates and the circle-method decomposition of a discrete
//! maximal operator along the monomial curve with oscillating phase.
//!
//! The lattice `Z^n` is modelled by the periodic grid `(Z/NZ)^n`
//! ([`grid`]); every computable object (variation norms, jump counts,
//! Gauss sums, major arcs, multipliers) has an exact or independently
//! checked implementation.

pub mod bump;
pub mod circle;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod linalg;
pub mod multifreq;
pub mod quad;
pub mod rng;
pub mod variation;

pub use error::{Error, Result};
