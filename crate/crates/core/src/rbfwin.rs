//! RBF-boosted local relevance over a sliding window.
//!
//! For a focal term `t` at position `x`, every position `i` within `window`
//! steps of `x` contributes a neighbor relevance `v_i`. The window's mean and
//! population standard deviation parameterize a Gaussian density `φ`, and the
//! neighbors lying within `threshold · σ` of the mean (the semantic
//! neighborhood) add `v_i · φ(v_i)` to the base relevance of `t` at `x`:
//!
//! ```text
//! μ'(x) = μ(x) + Σ_{kept i} v_i · φ(v_i),   φ(v) = exp(-(v-m)² / 2σ²) / (σ √(2π))
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::posindex::PositionalDocument;
use crate::proxcore::{eval_with, local_relevance, normalize_score, InfluenceKernel};
use crate::querylang::QueryAst;

/// How the relevance `v_i` of a window neighbor is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NeighborRelevance {
    /// Relevance of the focal term at the neighbor's position.
    #[default]
    FocalTerm,
    /// Relevance of the neighbor's own term at its own position. Equal to 1
    /// for every kernel, so the window statistics are constant.
    SelfTerm,
}

impl FromStr for NeighborRelevance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "focal" => Ok(NeighborRelevance::FocalTerm),
            "self" => Ok(NeighborRelevance::SelfTerm),
            other => Err(Error::Config(format!(
                "unknown neighbor relevance `{other}` (expected focal or self)"
            ))),
        }
    }
}

impl fmt::Display for NeighborRelevance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NeighborRelevance::FocalTerm => "focal",
            NeighborRelevance::SelfTerm => "self",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfConfig {
    /// Positions on each side of `x` (k_f).
    pub window: u32,
    pub base_kernel: InfluenceKernel,
    /// Half-width of the semantic neighborhood in standard deviations. A
    /// negative value keeps no neighbors, which reduces to the base model.
    pub threshold: f64,
    pub clamp_output: bool,
    pub neighbor_relevance: NeighborRelevance,
}

impl RbfConfig {
    pub fn new(window: u32, base_kernel: InfluenceKernel) -> Result<Self> {
        if window == 0 {
            return Err(Error::Config("sliding window must be at least 1".into()));
        }
        Ok(RbfConfig {
            window,
            base_kernel,
            threshold: 1.0,
            clamp_output: true,
            neighbor_relevance: NeighborRelevance::FocalTerm,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::Config("threshold must be finite".into()));
        }
        self.threshold = threshold;
        Ok(self)
    }

    pub fn with_clamp(mut self, clamp: bool) -> Self {
        self.clamp_output = clamp;
        self
    }

    pub fn with_neighbor_relevance(mut self, mode: NeighborRelevance) -> Self {
        self.neighbor_relevance = mode;
        self
    }

    fn with_kernel(&self, base_kernel: InfluenceKernel) -> Self {
        RbfConfig {
            base_kernel,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindowStats {
    pub mu: f64,
    /// Population standard deviation.
    pub sigma: f64,
    pub count: usize,
}

/// Mean and population standard deviation; both 0 for an empty list, and
/// `sigma` is 0 for a single value.
pub fn window_stats(values: &[f64]) -> WindowStats {
    let count = values.len();
    if count == 0 {
        return WindowStats::default();
    }
    let n = count as f64;
    let mu = values.iter().sum::<f64>() / n;
    let sigma = if count == 1 {
        0.0
    } else {
        (values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n).sqrt()
    };
    WindowStats { mu, sigma, count }
}

/// Gaussian density of `v` under `(mu, sigma)`. A zero `sigma` yields 1 at
/// the mean and 0 elsewhere.
pub fn gaussian_rbf(v: f64, stats: &WindowStats) -> f64 {
    if stats.sigma == 0.0 {
        return if v == stats.mu { 1.0 } else { 0.0 };
    }
    let z = (v - stats.mu) / stats.sigma;
    (-0.5 * z * z).exp() / (stats.sigma * (2.0 * PI).sqrt())
}

/// `(i, v_i)` for every in-document position `i != x` with `|i - x| <= window`.
pub fn window_neighbor_relevances(
    doc: &PositionalDocument,
    term: &str,
    x: usize,
    cfg: &RbfConfig,
) -> Vec<(usize, f64)> {
    let n = doc.len();
    if n == 0 {
        return Vec::new();
    }
    let w = cfg.window as usize;
    let lo = x.saturating_sub(w);
    let hi = x.saturating_add(w).min(n - 1);
    (lo..=hi)
        .filter(|&i| i != x)
        .map(|i| {
            let focus = match cfg.neighbor_relevance {
                NeighborRelevance::FocalTerm => term,
                NeighborRelevance::SelfTerm => doc.terms()[i].as_str(),
            };
            (i, local_relevance(doc, focus, i as i64, &cfg.base_kernel))
        })
        .collect()
}

/// Neighbors whose relevance lies within `threshold · σ` of the window mean.
/// With `σ = 0` only values equal to the mean are kept.
pub fn semantic_neighbors(
    neighbors: &[(usize, f64)],
    stats: &WindowStats,
    threshold: f64,
) -> Vec<(usize, f64)> {
    if threshold < 0.0 {
        return Vec::new();
    }
    let band = threshold * stats.sigma;
    neighbors
        .iter()
        .copied()
        .filter(|&(_, v)| {
            if stats.sigma == 0.0 {
                v == stats.mu
            } else {
                (v - stats.mu).abs() <= band
            }
        })
        .collect()
}

/// Base relevance of `term` at `x` plus the RBF-weighted contribution of its
/// semantic neighborhood, clamped to 1 unless `cfg.clamp_output` is off.
pub fn rbf_local_relevance(doc: &PositionalDocument, term: &str, x: usize, cfg: &RbfConfig) -> f64 {
    let base = local_relevance(doc, term, x as i64, &cfg.base_kernel);
    if cfg.clamp_output && base >= 1.0 {
        return 1.0;
    }
    let neighbors = window_neighbor_relevances(doc, term, x, cfg);
    let values: Vec<f64> = neighbors.iter().map(|&(_, v)| v).collect();
    let stats = window_stats(&values);
    let boost: f64 = semantic_neighbors(&neighbors, &stats, cfg.threshold)
        .iter()
        .map(|&(_, v)| v * gaussian_rbf(v, &stats))
        .sum();
    let raw = base + boost;
    if cfg.clamp_output {
        raw.min(1.0)
    } else {
        raw
    }
}

/// Positional query relevance with every term relevance replaced by its RBF
/// variant. `NEAR/k` nodes swap the base kernel width for `k`.
pub fn rbf_eval_query_at(
    doc: &PositionalDocument,
    ast: &QueryAst,
    x: usize,
    cfg: &RbfConfig,
) -> f64 {
    eval_with(ast, &cfg.base_kernel, &|term, kernel| {
        if *kernel == cfg.base_kernel {
            rbf_local_relevance(doc, term, x, cfg)
        } else {
            rbf_local_relevance(doc, term, x, &cfg.with_kernel(*kernel))
        }
    })
}

pub fn rbf_score(doc: &PositionalDocument, ast: &QueryAst, cfg: &RbfConfig) -> f64 {
    (0..doc.len())
        .map(|x| rbf_eval_query_at(doc, ast, x, cfg))
        .sum()
}

pub fn rbf_similarity(doc: &PositionalDocument, ast: &QueryAst, cfg: &RbfConfig) -> f64 {
    normalize_score(rbf_score(doc, ast, cfg), doc.len())
}
