//! Standard fuzzy-proximity scoring.
//!
//! Each occurrence of a term spreads its influence to nearby positions
//! through a bounded, symmetric [`InfluenceKernel`]. The local relevance of a
//! term at position `x` is the strongest influence any of its occurrences
//! exerts there; queries combine local relevances with min (AND) and max
//! (OR), and a document's score is the sum over its positions `0..N`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posindex::PositionalDocument;
use crate::querylang::QueryAst;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelShape {
    Triangular,
    Rectangular,
    Gaussian,
    Hanning,
}

impl KernelShape {
    pub const ALL: [KernelShape; 4] = [
        KernelShape::Triangular,
        KernelShape::Rectangular,
        KernelShape::Gaussian,
        KernelShape::Hanning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelShape::Triangular => "triangular",
            KernelShape::Rectangular => "rectangular",
            KernelShape::Gaussian => "gaussian",
            KernelShape::Hanning => "hanning",
        }
    }
}

impl fmt::Display for KernelShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelShape::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown kernel `{s}` (expected triangular, rectangular, gaussian or hanning)"
                ))
            })
    }
}

/// An influence function with support `(-width, width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InfluenceKernel {
    shape: KernelShape,
    width: u32,
}

impl InfluenceKernel {
    pub fn new(shape: KernelShape, width: u32) -> Result<Self> {
        if width == 0 {
            return Err(Error::Config("kernel width must be at least 1".into()));
        }
        Ok(InfluenceKernel { shape, width })
    }

    pub fn triangular(width: u32) -> Result<Self> {
        Self::new(KernelShape::Triangular, width)
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Same shape, different width.
    pub fn with_width(&self, width: u32) -> Result<Self> {
        Self::new(self.shape, width)
    }

    /// Influence of an occurrence at distance `offset`. Zero for `|offset| >= width`.
    pub fn influence(&self, offset: i64) -> f64 {
        let k = f64::from(self.width);
        let d = offset.unsigned_abs();
        if d >= u64::from(self.width) {
            return 0.0;
        }
        let x = d as f64;
        match self.shape {
            KernelShape::Triangular => (k - x) / k,
            KernelShape::Rectangular => 1.0,
            KernelShape::Hanning => 0.5 * (1.0 + (PI * x / k).cos()),
            KernelShape::Gaussian => {
                let sigma = k / 3.0;
                (-(x * x) / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

/// Distance from `x` to the nearest element of the sorted list `positions`.
fn nearest_distance(positions: &[usize], x: i64) -> Option<u64> {
    if positions.is_empty() {
        return None;
    }
    let idx = positions.partition_point(|&p| (p as i64) < x);
    let after = positions.get(idx).map(|&p| (p as i64 - x).unsigned_abs());
    let before = idx
        .checked_sub(1)
        .map(|i| (x - positions[i] as i64).unsigned_abs());
    match (before, after) {
        (Some(b), Some(a)) => Some(a.min(b)),
        (b, a) => b.or(a),
    }
}

/// Local relevance of `term` at position `x`, which may lie outside the document.
///
/// Every kernel is non-increasing in `|offset|`, so the maximum over all
/// occurrences is reached at the nearest one.
pub fn local_relevance(
    doc: &PositionalDocument,
    term: &str,
    x: i64,
    kernel: &InfluenceKernel,
) -> f64 {
    match nearest_distance(doc.positions_of(term), x) {
        Some(d) => kernel.influence(d.min(i64::MAX as u64) as i64),
        None => 0.0,
    }
}

/// Smallest `|j - i|` over occurrence pairs `i` of `a`, `j` of `b`, `i != j`.
fn closest_pair_distance(doc: &PositionalDocument, a: &str, b: &str) -> Option<usize> {
    let (pa, pb) = (doc.positions_of(a), doc.positions_of(b));
    if a == b {
        return pa.windows(2).map(|w| w[1] - w[0]).min();
    }
    let (mut i, mut j) = (0, 0);
    let mut best: Option<usize> = None;
    while i < pa.len() && j < pb.len() {
        let d = pa[i].abs_diff(pb[j]);
        best = Some(best.map_or(d, |b| b.min(d)));
        if pa[i] < pb[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    best
}

/// Document-level fuzzy NEAR: `max((k - |j - i|) / k, 0)` for the closest
/// pair of occurrences. Occurrences never share a position, so the value is
/// at most `(k - 1) / k`.
pub fn near_doc_relevance(doc: &PositionalDocument, a: &str, b: &str, width: u32) -> f64 {
    match closest_pair_distance(doc, a, b) {
        Some(d) if (d as u64) < u64::from(width) => {
            let k = f64::from(width);
            (k - d as f64) / k
        }
        _ => 0.0,
    }
}

/// Boolean NEAR: some occurrence of `a` lies fewer than `width` positions
/// from some occurrence of `b`.
pub fn near_boolean(doc: &PositionalDocument, a: &str, b: &str, width: u32) -> bool {
    closest_pair_distance(doc, a, b).is_some_and(|d| (d as u64) < u64::from(width))
}

/// Evaluates `ast` at one position, delegating term relevance to `term_rel`.
///
/// `term_rel(term, kernel)` receives the kernel in force for that term: the
/// query kernel, or the NEAR-width variant inside a `Near` node.
pub(crate) fn eval_with<F>(ast: &QueryAst, kernel: &InfluenceKernel, term_rel: &F) -> f64
where
    F: Fn(&str, &InfluenceKernel) -> f64,
{
    match ast {
        QueryAst::Term(t) => term_rel(t, kernel),
        QueryAst::And(l, r) => eval_with(l, kernel, term_rel).min(eval_with(r, kernel, term_rel)),
        QueryAst::Or(l, r) => eval_with(l, kernel, term_rel).max(eval_with(r, kernel, term_rel)),
        QueryAst::Near { width, left, right } => {
            let near_kernel = InfluenceKernel {
                shape: kernel.shape,
                width: (*width).max(1),
            };
            term_rel(left, &near_kernel).min(term_rel(right, &near_kernel))
        }
    }
}

/// Positional query relevance at `x`.
pub fn eval_query_at(
    doc: &PositionalDocument,
    ast: &QueryAst,
    x: i64,
    kernel: &InfluenceKernel,
) -> f64 {
    eval_with(ast, kernel, &|term, k| local_relevance(doc, term, x, k))
}

/// Sum of positional query relevance over `0..N`.
pub fn score(doc: &PositionalDocument, ast: &QueryAst, kernel: &InfluenceKernel) -> f64 {
    (0..doc.len() as i64)
        .map(|x| eval_query_at(doc, ast, x, kernel))
        .sum()
}

/// `score / N`, or 0 for an empty document.
pub fn similarity(doc: &PositionalDocument, ast: &QueryAst, kernel: &InfluenceKernel) -> f64 {
    normalize_score(score(doc, ast, kernel), doc.len())
}

pub(crate) fn normalize_score(raw: f64, len: usize) -> f64 {
    if len == 0 {
        0.0
    } else {
        raw / len as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocQueryScore {
    pub doc_id: String,
    pub raw_score: f64,
    pub similarity: f64,
}

impl DocQueryScore {
    pub fn new(doc: &PositionalDocument, raw_score: f64) -> Self {
        DocQueryScore {
            doc_id: doc.doc_id().to_string(),
            raw_score,
            similarity: normalize_score(raw_score, doc.len()),
        }
    }
}

pub fn score_document(
    doc: &PositionalDocument,
    ast: &QueryAst,
    kernel: &InfluenceKernel,
) -> DocQueryScore {
    DocQueryScore::new(doc, score(doc, ast, kernel))
}

/// Sorts by descending similarity, ties by ascending doc id.
pub fn rank_scores(scores: &mut [DocQueryScore]) {
    scores.sort_by(|a, b| {
        b.similarity
            .total_cmp(&a.similarity)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
}
