//! Numerical laboratory for the almost-periodicity hierarchy on the
//! half-line and the line: Bohr, asymptotic and remote almost periodicity,
//! their Stepanov variants, the translation (Bebutov) flow and its ω-limit
//! sets, and primitives of remotely almost periodic functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod classify;
pub mod dynamics;
pub mod error;
pub mod function;
pub mod metrics;
pub mod quadrature;
pub mod search;

pub use error::{LabError, Result};
pub use function::{builders, Expr, FunctionHandle, GridSpec, PointNorm, TimeDomain};
