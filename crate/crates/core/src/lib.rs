//! Construction and verification of orthogonally resolvable matching designs.
//!
//! An OMD(n, k) is a square array of side `n - 1` whose cells are empty or
//! hold a `k`-edge matching on the points `0..n`, such that every row and
//! every column contains each point exactly once and every pair of points
//! appears together in exactly one block. One exists exactly when
//! `n ≡ 0 (mod 2k)`, except for `k = 1` and `n ∈ {4, 6}`.

pub mod base;
pub mod cli;
pub mod compose;
mod dlx;
pub mod search;
pub mod design;
pub mod error;
pub mod factorization;
pub mod format;
pub mod room;
pub mod verify;

pub use design::{Block, DesignArray, Edge, Hole, HostGraph, Point, Transversal};
pub use error::{Error, Result};
pub use verify::{verify, verify_hole, verify_transversal, VerificationReport};
