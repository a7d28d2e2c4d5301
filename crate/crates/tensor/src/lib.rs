//! Dense rank-2 tensors with tape-based reverse-mode automatic
//! differentiation.
//!
//! The tape records every operation in execution order together with the
//! information its backward rule needs. `Tape::backward` walks the record
//! once in reverse and accumulates gradients into every tensor that was
//! registered with `requires_grad`. Gradients sum over fan-out.
//!
//! All arithmetic is `f64`. Every op checks its output for NaN/Inf and
//! panics on the first non-finite value, so divergence surfaces at the op
//! that produced it rather than at the loss.

mod gradcheck;
mod tape;

pub use gradcheck::{numeric_gradient_check, GradCheckReport};
pub use tape::{Activation, Tape, TensorId};

pub type Matrix = ndarray::Array2<f64>;
