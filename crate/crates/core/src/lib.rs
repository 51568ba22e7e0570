//! Verification and search toolkit for Bollobás-type set-pair and
//! subspace-pair systems.
//!
//! All sums are evaluated in exact rational arithmetic and all subspace
//! computations are exact over the rationals.

pub mod bitset;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod search;
pub mod setpair;
pub mod subspace;

pub use bitset::ElementSet;
pub use error::{Error, Result};
pub use exact::{binomial, rat_sum, Rational};
pub use setpair::{ClassificationReport, SetPair, SetPairSystem, Witness};
