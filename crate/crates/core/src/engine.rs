//! Scorer selection and corpus-wide ranking.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::posindex::{Corpus, PositionalDocument};
use crate::proxcore::{self, rank_scores, DocQueryScore, InfluenceKernel};
use crate::querylang::QueryAst;
use crate::rbfwin::{self, RbfConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ScoringMode {
    #[default]
    Standard,
    Rbf,
}

impl FromStr for ScoringMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(ScoringMode::Standard),
            "rbf" => Ok(ScoringMode::Rbf),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected standard or rbf)"
            ))),
        }
    }
}

impl fmt::Display for ScoringMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoringMode::Standard => "standard",
            ScoringMode::Rbf => "rbf",
        })
    }
}

/// Either the standard fuzzy model or its RBF sliding-window variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scorer {
    Standard(InfluenceKernel),
    Rbf(RbfConfig),
}

impl Scorer {
    pub fn from_mode(mode: ScoringMode, rbf: RbfConfig) -> Self {
        match mode {
            ScoringMode::Standard => Scorer::Standard(rbf.base_kernel),
            ScoringMode::Rbf => Scorer::Rbf(rbf),
        }
    }

    pub fn mode(&self) -> ScoringMode {
        match self {
            Scorer::Standard(_) => ScoringMode::Standard,
            Scorer::Rbf(_) => ScoringMode::Rbf,
        }
    }

    pub fn score(&self, doc: &PositionalDocument, ast: &QueryAst) -> f64 {
        match self {
            Scorer::Standard(kernel) => proxcore::score(doc, ast, kernel),
            Scorer::Rbf(cfg) => rbfwin::rbf_score(doc, ast, cfg),
        }
    }

    pub fn similarity(&self, doc: &PositionalDocument, ast: &QueryAst) -> f64 {
        match self {
            Scorer::Standard(kernel) => proxcore::similarity(doc, ast, kernel),
            Scorer::Rbf(cfg) => rbfwin::rbf_similarity(doc, ast, cfg),
        }
    }

    pub fn score_document(&self, doc: &PositionalDocument, ast: &QueryAst) -> DocQueryScore {
        DocQueryScore::new(doc, self.score(doc, ast))
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Scores every document; returns only documents with a positive
/// similarity, best first, ties by doc id.
pub fn rank_corpus(corpus: &Corpus, ast: &QueryAst, scorer: &Scorer) -> Vec<DocQueryScore> {
    let docs: Vec<&PositionalDocument> = corpus.documents().collect();
    let mut scores: Vec<DocQueryScore> = docs
        .par_iter()
        .map(|doc| scorer.score_document(doc, ast))
        .filter(|s| s.similarity > 0.0)
        .collect();
    rank_scores(&mut scores);
    scores
}
