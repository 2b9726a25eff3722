//! Exact-arithmetic toolkit for Sasakian structures on joins
//! `M *_{l1,l2} S^3_w`.
//!
//! - [`join`]: join parameters, rays of the w-Sasaki cone and their
//!   quotient / admissible data.
//! - [`admissible`]: the extremal polynomial, Sturm positivity, CSC and
//!   Kähler-Einstein criteria.
//! - [`cone`]: CSC ray scans, Einstein rays and existence searches.
//! - [`topology`]: cohomology rings, contact invariants and bouquets.

pub mod admissible;
pub mod arith;
pub mod cone;
pub mod error;
pub mod join;
pub mod poly;
pub mod ratfun;
pub mod sturm;
pub mod topology;

pub use error::{Error, Result};
