//! Numerical verification of large sieve inequalities over Farey points,
//! with linear and quadratic amplitudes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bounds;
pub mod cli;
pub mod counterexample;
pub mod dls;
pub mod error;
pub mod expsum;
pub mod farey;
pub mod sum;

pub use arith::Rational;
pub use error::{Error, Result};
pub use expsum::{CoeffSeq, Point, QuadraticAmplitude};
pub use farey::{farey_sequence, FareySet, SpacedPoints};
