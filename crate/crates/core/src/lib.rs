//! Coupled FEM–BEM solver for exterior transmission problems with a
//! nonmonotone, set-valued contact law on part of the interface.
//!
//! The interior quasilinear problem is discretized with P1 finite elements,
//! the exterior Laplace problem is condensed onto the interface with a
//! symmetric Galerkin Poincaré–Steklov operator, and the nonsmooth law enters
//! through a lumped Clarke-regular functional. The resulting discrete
//! hemivariational inequality is solved by a convex–concave outer iteration.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod bem;
pub mod control;
pub mod data;
pub mod error;
pub mod exterior;
pub mod fem;
pub mod geometry;
pub mod hvi;
pub mod linalg;
pub mod scenario;
pub mod stability;
pub mod superpotential;

pub use error::{Error, Result};
