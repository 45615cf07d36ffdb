//! Text preparation: Arabic letter folding, tokenization, stop-word
//! filtering and light stemming.
//!
//! The output of [`Analyzer::preprocess`] is a [`TokenStream`] whose
//! positions are the consecutive integers `0..len`, counted after stop
//! words have been removed.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_ar.txt");
const DEFAULT_STEMMER_RULES: &str = include_str!("../data/stemmer_rules.txt");

/// Minimum number of characters a stem must keep after an affix is removed.
pub const MIN_STEM_CHARS: usize = 2;

const TATWEEL: char = '\u{0640}';
const ALEF: char = '\u{0627}';
const YEH: char = '\u{064A}';
const HEH: char = '\u{0647}';

fn fold_char(c: char) -> Option<char> {
    match c {
        // alef with madda, hamza above, hamza below, wasla
        '\u{0622}' | '\u{0623}' | '\u{0625}' | '\u{0671}' => Some(ALEF),
        // alef maqsura
        '\u{0649}' => Some(YEH),
        // ta marbuta
        '\u{0629}' => Some(HEH),
        TATWEEL => None,
        // tanwin, harakat, shadda, sukun, combining maddah/hamza, dagger alef
        '\u{064B}'..='\u{0655}' | '\u{0670}' => None,
        other => Some(other),
    }
}

/// Folds Arabic letter variants to a canonical form and strips diacritics
/// and tatweel. Every other character passes through unchanged.
pub fn normalize_text(raw: &str) -> String {
    raw.chars().filter_map(fold_char).collect()
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Splits normalized text on whitespace and punctuation. Tokens made only
/// of digits are dropped.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split(|c: char| !is_token_char(c))
        .filter(|t| !t.is_empty() && !t.chars().all(char::is_numeric))
        .collect()
}

/// A set of normalized stop words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
}

impl StopList {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses a stop-list file: one word per line, `#` starts a comment line.
    /// Entries are normalized on load.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(normalize_text)
            .filter(|w| !w.is_empty())
            .collect();
        StopList { words }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    /// The built-in list of common Arabic function words.
    pub fn arabic_default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for StopList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopList {
            words: iter.into_iter().map(Into::into).collect(),
        }
    }
}

/// Removes every token found in `stoplist`, keeping the order of the rest.
pub fn remove_stopwords<'a>(tokens: &[&'a str], stoplist: &StopList) -> Vec<&'a str> {
    tokens
        .iter()
        .copied()
        .filter(|t| !stoplist.contains(t))
        .collect()
}

/// Maps a normalized surface token to its indexing stem.
pub trait Stemmer: Send + Sync + fmt::Debug {
    fn stem(&self, token: &str) -> String;
}

/// Rule-based affix stripper driven by ordered prefix and suffix tables.
///
/// Each affix is tried once, in table order. A match is stripped only when
/// at least [`MIN_STEM_CHARS`] characters remain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LightStemmer {
    prefixes: Vec<String>,
    suffixes: Vec<String>,
}

impl LightStemmer {
    pub fn new(prefixes: Vec<String>, suffixes: Vec<String>) -> Self {
        LightStemmer { prefixes, suffixes }
    }

    /// Parses a rule file with `PREFIXES` and `SUFFIXES` sections.
    pub fn parse_rules(text: &str) -> Result<Self> {
        enum Section {
            None,
            Prefixes,
            Suffixes,
        }
        let mut section = Section::None;
        let mut prefixes = Vec::new();
        let mut suffixes = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "PREFIXES" => section = Section::Prefixes,
                "SUFFIXES" => section = Section::Suffixes,
                affix => {
                    if affix.chars().any(char::is_whitespace) {
                        return Err(Error::format(
                            "stemmer rules",
                            idx + 1,
                            format!("affix `{affix}` contains whitespace"),
                        ));
                    }
                    let affix = normalize_text(affix);
                    match section {
                        Section::Prefixes => prefixes.push(affix),
                        Section::Suffixes => suffixes.push(affix),
                        Section::None => {
                            return Err(Error::format(
                                "stemmer rules",
                                idx + 1,
                                "affix outside of a PREFIXES or SUFFIXES section",
                            ))
                        }
                    }
                }
            }
        }
        Ok(LightStemmer { prefixes, suffixes })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_rules(&text)
    }

    /// The built-in Arabic light-stemming tables.
    pub fn arabic_default() -> Self {
        Self::parse_rules(DEFAULT_STEMMER_RULES).expect("bundled stemmer rules are valid")
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }
}

impl Stemmer for LightStemmer {
    fn stem(&self, token: &str) -> String {
        let mut stem = token;
        for prefix in &self.prefixes {
            if let Some(rest) = stem.strip_prefix(prefix.as_str()) {
                if rest.chars().count() >= MIN_STEM_CHARS {
                    stem = rest;
                }
            }
        }
        for suffix in &self.suffixes {
            if let Some(rest) = stem.strip_suffix(suffix.as_str()) {
                if rest.chars().count() >= MIN_STEM_CHARS {
                    stem = rest;
                }
            }
        }
        stem.to_string()
    }
}

/// Convenience wrapper over the default stemmer tables.
pub fn light_stem(token: &str) -> String {
    thread_local! {
        static DEFAULT: LightStemmer = LightStemmer::arabic_default();
    }
    DEFAULT.with(|s| s.stem(token))
}

/// A document's content terms in order. The position of a term is its index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenStream {
    terms: Vec<String>,
}

impl TokenStream {
    pub fn new(terms: Vec<String>) -> Self {
        TokenStream { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<String> {
        self.terms
    }

    /// `(position, term)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &str)> {
        self.terms.iter().map(String::as_str).enumerate()
    }
}

impl<S: Into<String>> FromIterator<S> for TokenStream {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenStream::new(iter.into_iter().map(Into::into).collect())
    }
}

/// The full text-preparation pipeline: a stop list and a stemmer.
#[derive(Debug, Clone)]
pub struct Analyzer {
    stoplist: StopList,
    stemmed_stops: HashSet<String>,
    stemmer: Arc<dyn Stemmer>,
}

impl Default for Analyzer {
    fn default() -> Self {
        Analyzer::new(StopList::arabic_default(), LightStemmer::arabic_default())
    }
}

impl Analyzer {
    pub fn new(stoplist: StopList, stemmer: impl Stemmer + 'static) -> Self {
        Self::with_stemmer(stoplist, Arc::new(stemmer))
    }

    pub fn with_stemmer(stoplist: StopList, stemmer: Arc<dyn Stemmer>) -> Self {
        let stemmed_stops = stoplist.iter().map(|w| stemmer.stem(w)).collect();
        Analyzer {
            stoplist,
            stemmed_stops,
            stemmer,
        }
    }

    pub fn stoplist(&self) -> &StopList {
        &self.stoplist
    }

    pub fn stemmer(&self) -> &dyn Stemmer {
        self.stemmer.as_ref()
    }

    /// Normalizes and stems a single surface term without stop filtering.
    /// Returns `None` when the term has no indexable content or splits into
    /// more than one token.
    pub fn analyze_term(&self, surface: &str) -> Option<String> {
        let normalized = normalize_text(surface);
        match tokenize(&normalized).as_slice() {
            [single] => Some(self.stemmer.stem(single)),
            _ => None,
        }
    }

    /// normalize → tokenize → remove stop words → stem.
    ///
    /// Stems that collide with a stemmed stop word are dropped as well, so no
    /// output term equals any stop word after stemming.
    pub fn preprocess(&self, raw: &str) -> TokenStream {
        let normalized = normalize_text(raw);
        let tokens = tokenize(&normalized);
        remove_stopwords(&tokens, &self.stoplist)
            .into_iter()
            .map(|t| self.stemmer.stem(t))
            .filter(|s| !s.is_empty() && !self.stemmed_stops.contains(s))
            .collect()
    }
}
