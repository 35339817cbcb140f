//! Exact twisted generalized Bernoulli numbers, and an auditor for the
//! symmetry identities built from them.
//!
//! Everything is computed in cyclotomic fields `Q(ζ_m)` with exact rational
//! coefficients. The layers, bottom up:
//!
//! - [`exactnum`]: rationals and cyclotomic numbers.
//! - [`dirichlet`]: characters mod `d` with a stable labelling.
//! - [`series`]: truncated power series, read as exponential generating
//!   functions.
//! - [`bernoulli`]: `B_{n,χ,ξ}`, `B_{n,χ,ξ}(x)` and twisted power sums.
//! - [`quotients`]: quotient closed forms and their expansions.
//! - [`identities`]: the theorem catalog and grid verification.
//! - [`padic`]: Riemann sums for the twisted measure in `Z[ζ_r]/p^M`.
//!
//! ```
//! use twistsym::bernoulli::{gen_bernoulli_numbers, TwistSpec};
//! use twistsym::dirichlet::DirichletCharacter;
//! use twistsym::CyclotomicNumber;
//!
//! let chi = DirichletCharacter::trivial(1)?;
//! let b = gen_bernoulli_numbers(&chi, TwistSpec::new(3, 1)?, 1, 2)?;
//! assert!(b[0].is_zero());
//! assert_eq!(b[2], CyclotomicNumber::from_rational(3, &"2/3".parse()?)?);
//! # Ok::<(), twistsym::Error>(())
//! ```

pub mod bernoulli;
pub mod config;
pub mod dirichlet;
pub mod error;
pub mod exactnum;
pub mod identities;
pub mod padic;
pub mod quotients;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use exactnum::{CyclotomicNumber, Rational};
