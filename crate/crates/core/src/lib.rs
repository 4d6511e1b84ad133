//! Tameness analysis for constant-length substitutions and Toeplitz shifts.
//!
//! The crate decides tameness of substitution shifts through the subset
//! graph `G_theta`, classifies thickness on the extended Bratteli diagram,
//! builds independence sequences for non-tame shifts, and constructs two
//! explicit semicocycle families over odometers.

pub mod error;
pub mod extended_bratteli;
pub mod gtheta;
pub mod independence;
pub mod multigraph;
pub mod odometer;
pub mod semicocycle;
pub mod substitution;

pub use error::{Error, Result};
