//! Shared fixtures for the criterion benches.

use proxima::{generate_synthetic_corpus, SynthCorpus, SynthSpec};

/// A labeled synthetic corpus of `docs` documents of `len` terms over three
/// categories.
pub fn fixture(docs: usize, len: usize, seed: u64) -> SynthCorpus {
    let spec = SynthSpec {
        docs_per_category: docs.div_ceil(3),
        doc_length: len,
        ..SynthSpec::default()
    };
    generate_synthetic_corpus(&spec, seed).expect("valid bench spec")
}

/// Raw term lists of a fixture, for timing index construction alone.
pub fn term_lists(docs: usize, len: usize, seed: u64) -> Vec<(String, Vec<String>)> {
    fixture(docs, len, seed)
        .corpus
        .documents()
        .map(|d| (d.doc_id().to_string(), d.terms().to_vec()))
        .collect()
}
