//! Positively curved 13-dimensional biquotients of U(5).
//!
//! A family of closed 13-dimensional manifolds is obtained by quotienting
//! U(5), equipped with a submersion metric, by a two-sided
//! S^1 x (Sp(2) x S^1) action whose weights are an integer 5-tuple
//! (p1,...,p5).  This crate computes, for any such tuple:
//!
//! - admissibility (the coprimality and triangle-type inequalities that
//!   guarantee a free action and positive curvature), exactly;
//! - topological invariants: fundamental group order, elementary symmetric
//!   values, the order and structure of the degree-6 cohomology group via
//!   an integer relation matrix, its determinant and Smith normal form;
//! - a numerical certificate of positivity for the induced curvature lower
//!   bound, by minimizing over 2-planes in the 13-dimensional horizontal
//!   space at Haar-random base points;
//! - brute-force and optimization oracles for the adjoint-orbit extremal
//!   arguments the curvature proof rests on.
//!
//! The `cli` module exposes all of this as batch subcommands.

pub mod biquotient;
pub mod cli;
pub mod cohomology;
pub mod error;
pub mod liealg;
pub mod metric;
pub mod oracles;
pub mod tuples;

pub use error::{Error, Result};
