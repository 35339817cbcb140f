//! Exact rationals and cyclotomic field elements.

mod cyclotomic;
pub mod int;
mod poly;
mod rational;

pub use cyclotomic::{cyclotomic_polynomial, CyclotomicField, CyclotomicNumber};
pub use rational::Rational;
