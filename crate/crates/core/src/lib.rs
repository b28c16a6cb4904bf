//! Qubit-state numerics and Renyi-alpha entanglement monogamy verification.
//!
//! The library provides dense complex linear algebra sized for few-qubit
//! problems, deterministic state sampling, Renyi-alpha entanglement measures
//! with their analytic two-qubit formula, a convex-roof upper-bound search,
//! and builders plus a sweep harness for tightened monogamy hierarchies.

pub mod convexroof;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod monogamy;
pub mod states;

pub use error::{Error, Result};
