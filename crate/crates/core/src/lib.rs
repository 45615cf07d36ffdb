//! Fuzzy proximity retrieval and classification.
//!
//! Documents are position-indexed term sequences. Query terms spread their
//! influence over nearby positions through bounded kernels, boolean
//! operators combine the resulting memberships with min and max, and a
//! document's similarity is the average membership over its positions. The
//! [`rbfwin`] module adds a radial-basis boost driven by the relevance
//! profile inside a sliding window around each position.

pub mod classify;
pub mod config;
pub mod engine;
pub mod error;
pub mod posindex;
pub mod proxcore;
pub mod querylang;
pub mod rbfwin;
pub mod synth;
pub mod textprep;

pub use classify::{classify, evaluate, CategoryModel, EvalReport, Prediction};
pub use config::RunConfig;
pub use engine::{rank_corpus, Scorer, ScoringMode};
pub use error::{Error, Result};
pub use posindex::{Corpus, PositionalDocument};
pub use proxcore::{DocQueryScore, InfluenceKernel, KernelShape};
pub use querylang::{parse_query, render_query, ParseError, QueryAst};
pub use rbfwin::{NeighborRelevance, RbfConfig, WindowStats};
pub use synth::{generate_synthetic_corpus, SynthCorpus, SynthSpec};
pub use textprep::{Analyzer, LightStemmer, Stemmer, StopList, TokenStream};
