//! Words over the generator alphabet, stopping times and doubling sets.

mod doubling;
mod first_passage;
mod sampling;
mod system;
mod word;

pub use doubling::{doubling_constant, doubling_mass, doubling_word_sets, is_doubling_word, DoublingSets};
pub use first_passage::{block_norm_constant, enumerate_first_passage};
pub use sampling::{sample_word, LetterSampler, WordKind, DEFAULT_MAX_LEN};
pub use system::{System, MAX_GENERATORS};
pub use word::{
    all_words, chi_word, product_of_word, product_of_word_exact, scaled_product, word_prob, Word, WordSet,
};
