//! Simulation and verification of trinary quantum systems.
//!
//! A trinary system splits a finite-dimensional space into a programming
//! register `P`, a measured system `S` and an apparatus `A`, ordered
//! `P (x) S (x) A` throughout this crate.

pub mod error;
pub mod hilbert;
pub mod trinary;
pub mod dynamics;
pub mod born;
pub mod icqc;

pub use error::{IcqtError, Result};
