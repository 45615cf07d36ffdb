//! Run configuration shared by the command-line tools.
//!
//! Values come from built-in defaults, then an optional `key=value` file,
//! then the paragraph preset, then explicit overrides.

use std::path::{Path, PathBuf};

use crate::engine::{Scorer, ScoringMode};
use crate::error::{Error, Result};
use crate::proxcore::{InfluenceKernel, KernelShape};
use crate::rbfwin::{NeighborRelevance, RbfConfig};
use crate::textprep::{Analyzer, LightStemmer, StopList};

/// Influence width for phrase-level proximity.
pub const PHRASE_WIDTH: u32 = 5;
/// Influence width for paragraph-level proximity.
pub const PARAGRAPH_WIDTH: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Phrase,
    Paragraph,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phrase" => Ok(Preset::Phrase),
            "paragraph" => Ok(Preset::Paragraph),
            other => Err(Error::Config(format!(
                "unknown preset `{other}` (expected phrase or paragraph)"
            ))),
        }
    }
}

impl Preset {
    pub fn width(self) -> u32 {
        match self {
            Preset::Phrase => PHRASE_WIDTH,
            Preset::Paragraph => PARAGRAPH_WIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kernel: KernelShape,
    pub k: u32,
    pub kf: u32,
    pub threshold: f64,
    pub mode: ScoringMode,
    pub clamp: bool,
    pub neighbor_relevance: NeighborRelevance,
    pub corpus: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub stemmer_rules: Option<PathBuf>,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kernel: KernelShape::Triangular,
            k: PHRASE_WIDTH,
            kf: 5,
            threshold: 1.0,
            mode: ScoringMode::Standard,
            clamp: true,
            neighbor_relevance: NeighborRelevance::FocalTerm,
            corpus: None,
            categories: None,
            stoplist: None,
            stemmer_rules: None,
            seed: 42,
            workers: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "invalid boolean `{value}` for `{key}`"
        ))),
    }
}

impl RunConfig {
    /// Applies one `key=value` setting. Relative paths resolve against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };
        match key {
            "kernel" => self.kernel = value.parse()?,
            "k" => self.k = parse_value(key, value)?,
            "kf" => self.kf = parse_value(key, value)?,
            "threshold" => self.threshold = parse_value(key, value)?,
            "mode" => self.mode = value.parse()?,
            "clamp" => self.clamp = parse_bool(key, value)?,
            "neighbor_relevance" => self.neighbor_relevance = value.parse()?,
            "preset" => self.k = value.parse::<Preset>()?.width(),
            "corpus" => self.corpus = Some(path(value)),
            "categories" => self.categories = Some(path(value)),
            "stoplist" => self.stoplist = Some(path(value)),
            "stemmer_rules" => self.stemmer_rules = Some(path(value)),
            "seed" => self.seed = parse_value(key, value)?,
            "workers" => self.workers = Some(parse_value(key, value)?),
            other => return Err(Error::Config(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    /// Applies a config file body: `key = value` lines, `#` comments.
    pub fn apply_text(&mut self, text: &str, base: Option<&Path>) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::format(
                    "config file",
                    idx + 1,
                    "expected `key=value`",
                ));
            };
            self.set(key.trim(), value.trim(), base)
                .map_err(|e| Error::format("config file", idx + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.kf == 0 {
            return Err(Error::Config("kf must be at least 1".into()));
        }
        if !self.threshold.is_finite() {
            return Err(Error::Config("threshold must be finite".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<InfluenceKernel> {
        InfluenceKernel::new(self.kernel, self.k)
    }

    pub fn rbf(&self) -> Result<RbfConfig> {
        Ok(RbfConfig::new(self.kf, self.kernel()?)?
            .with_threshold(self.threshold)?
            .with_clamp(self.clamp)
            .with_neighbor_relevance(self.neighbor_relevance))
    }

    pub fn scorer(&self) -> Result<Scorer> {
        self.validate()?;
        Ok(Scorer::from_mode(self.mode, self.rbf()?))
    }

    /// Stop list and stemmer from the configured files, or the built-ins.
    pub fn analyzer(&self) -> Result<Analyzer> {
        let stoplist = match &self.stoplist {
            Some(p) => StopList::load(p)?,
            None => StopList::arabic_default(),
        };
        let stemmer = match &self.stemmer_rules {
            Some(p) => LightStemmer::load(p)?,
            None => LightStemmer::arabic_default(),
        };
        Ok(Analyzer::new(stoplist, stemmer))
    }
}
