//! Orthogonal polynomials on the unit circle.
//!
//! Transforms among Verblunsky coefficients, measures on the circle, moments,
//! Schur parameters, and Caratheodory/Schur functions; CMV operators and their
//! determinant, trace, and resolvent identities; Szego-function and sum-rule
//! machinery; band structure for periodic coefficients; and generators for the
//! standard model coefficient families. Everything is validated by exact
//! finite-order identities and quadrature oracles at desk scale.

pub mod cmv;
pub mod error;
pub mod measures;
pub mod numerics;
pub mod schur;
pub mod szegofn;
pub mod szego;

pub use error::{OpucError, Result};
