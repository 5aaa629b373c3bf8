//! Reduced and cyclic words, eventually periodic rays and leaves over a
//! finite basis.

mod basis;
mod cyclic;
pub mod enumerate;
mod ray;
mod word;

pub use basis::Basis;
pub use cyclic::CyclicWord;
pub use ray::{BiinfiniteWord, Leaf, Ray};
pub use word::{subwords, ConjugacyDecomposition, Letter, Word};

pub(crate) use ray::periodic_factors;
pub(crate) use word::push_reducing as word_push;

use crate::error::Result;
use crate::laminations::{LaminaryLanguage, Provenance};

/// Parses and reduces a raw letter sequence.
pub fn reduce(letters: &str, basis: &Basis) -> Result<Word> {
    basis.parse_word(letters)
}

/// The recurrent laminary language of a ray at the given depth: factors of
/// its periodic tail and their inverses. The prefix contributes nothing.
pub fn recurrent_language(rank: usize, r: &Ray, depth: usize) -> LaminaryLanguage {
    LaminaryLanguage::from_closed_set(
        rank,
        depth,
        r.recurrent_factors(depth),
        Provenance::new("recurrent").param("period_len", r.period().len()),
    )
}
