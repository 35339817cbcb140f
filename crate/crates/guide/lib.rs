//! The book's code listings, compiled as doc-tests.
//!
//! Each chapter of `book/src` is included as the docs of an empty module, so
//! `cargo test -p twistsym-guide --doc` runs every listing against the
//! current library.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../book/src/exact-arithmetic.md")]
pub mod exact_arithmetic {}
#[doc = include_str!("../../book/src/characters.md")]
pub mod characters {}
#[doc = include_str!("../../book/src/bernoulli.md")]
pub mod bernoulli {}
#[doc = include_str!("../../book/src/quotients.md")]
pub mod quotients {}
#[doc = include_str!("../../book/src/identities.md")]
pub mod identities {}
#[doc = include_str!("../../book/src/padic.md")]
pub mod padic {}
#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}
