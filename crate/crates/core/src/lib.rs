//! Exact computation with caps in n-dimensional affine space over GF(3).
//!
//! A *cap* is a set of points in AG(n,3) containing no three collinear
//! points. Three distinct points p, q, r are collinear exactly when
//! p + q + r = 0 coordinatewise mod 3, so every pair of points determines
//! a unique third point completing a line.
//!
//! The crate provides:
//!
//! - dense point sets over the fixed base-3 point enumeration ([`PointSet`]),
//! - cap validation, extension and completion queries ([`cap`]),
//! - invertible affine maps and their action on point sets ([`affine`]),
//! - fibrations by parallel flats and point-count spectra ([`directions`]),
//! - canonical forms, isomorphism tests and automorphism groups ([`canon`]),
//! - depth-first cap searches with fiber targets ([`search`]),
//! - relative placements of two caps in adjacent hyperplanes ([`placement`]),
//! - constructions of the distinguished caps in dimensions 3 to 6 ([`atlas`]),
//! - a registry of re-runnable consistency checks ([`verify`]).
//!
//! Everything is deterministic: iteration follows the base-3 point order
//! (coordinate 1 most significant), searches branch on the smallest legal
//! point, and reports use ordered maps.
//!
//! The crate is `no_std` (it allocates, but performs no IO); file formats
//! and the command-line driver live in the companion `capset` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod affine;
pub mod atlas;
pub mod brute;
pub mod canon;
pub mod cap;
pub mod directions;
pub mod fibration;
pub mod placement;
pub mod pointset;
pub mod search;
pub mod space;
#[cfg(test)]
pub(crate) mod testutil;
pub mod verify;

pub use affine::{AffineMap, Matrix};
pub use cap::CapSet;
pub use canon::CanonicalCertificate;
pub use directions::{DirectionSpec, Spectrum};
pub use fibration::Fibration;
pub use pointset::PointSet;
pub use space::{Point, Space, MAX_DIM, POW3};
