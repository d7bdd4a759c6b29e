//! Functions on the time axis: closed-form expression trees and sampled
//! tables behind one immutable handle type.

pub mod builders;
mod expr;
mod handle;
pub mod io;

pub use expr::{Expr, Interval};
pub use handle::{FunctionHandle, GridSpec, PointNorm, TimeDomain};
