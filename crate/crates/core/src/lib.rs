//! Word rewriting for free nilpotent groups: null-sequences with exact area,
//! filling length and height, commutator-power compression, a recursive
//! filling algorithm, and an independent truncated free-algebra oracle.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod compression;
pub mod error;
pub mod filler;
pub mod oracle;
pub mod presentation;
pub mod sequence;
pub mod word;

pub use error::{Error, ParseError, Result};
pub use presentation::{build_chain_presentation, Generator, Presentation, RelatorIndex, RelatorRef};
pub use sequence::{Metrics, Move, PSequence};
pub use word::{free_reduce, inverse_word, nested_commutator, Letter, Word};
