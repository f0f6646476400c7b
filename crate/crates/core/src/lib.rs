//! Residue-class density tools for sets of integers.
//!
//! The crate computes upper bounds on the upper Buck density through exact
//! residue counting, produces independently checkable certificates that a
//! set has upper Buck density zero ("small"), classifies binary quadratic
//! forms by discriminant, and estimates the classical upper densities on
//! finite windows.

pub mod certify;
pub mod density;
pub mod estimators;
pub mod numtheory;
pub mod quadform;
pub mod serde_util;
pub mod setspec;
