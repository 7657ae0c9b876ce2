//! Deciding and certifying von Neumann regularity of one-dimensional
//! cellular automata on full shifts.
//!
//! A CA `f` is regular when some CA `g` satisfies `f ∘ g ∘ f = f`. This crate
//! searches for such weak inverses by constraint propagation over periodic
//! points, and proves non-regularity with three obstructions: a proper sofic
//! image, a periodic point of the image without a preimage of the same
//! period, and failure of the strong periodic point condition at bounded
//! parameters.

pub mod automata;
pub mod error;
pub mod golden;
pub mod image;
pub mod periodic;
pub mod random;
pub mod regularity;
pub mod rule;

pub use error::{Error, Result};
pub use rule::{format_word, parse_word, LocalRule, Symbol, Transform, Word};
