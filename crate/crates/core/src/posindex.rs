//! Positional documents, the per-document inverted position map, and the
//! line-oriented corpus file.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::textprep::TokenStream;

pub const CORPUS_HEADER: &str = "#proxima-corpus v1";
const CORPUS_MAGIC: &str = "#proxima-corpus";
const UNLABELED: &str = "-";

/// A document as a position → term sequence together with `term → positions`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalDocument {
    doc_id: String,
    terms: Vec<String>,
    inverted: HashMap<String, Vec<usize>>,
}

impl PositionalDocument {
    pub fn new(doc_id: impl Into<String>, stream: TokenStream) -> Self {
        let terms = stream.into_terms();
        let mut inverted: HashMap<String, Vec<usize>> = HashMap::new();
        for (pos, term) in terms.iter().enumerate() {
            inverted.entry(term.clone()).or_default().push(pos);
        }
        PositionalDocument {
            doc_id: doc_id.into(),
            terms,
            inverted,
        }
    }

    pub fn from_terms<S: Into<String>>(
        doc_id: impl Into<String>,
        terms: impl IntoIterator<Item = S>,
    ) -> Self {
        Self::new(doc_id, terms.into_iter().collect())
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    /// Number of positions, `N`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_at(&self, pos: usize) -> Option<&str> {
        self.terms.get(pos).map(String::as_str)
    }

    /// Sorted positions of `term`; empty when the term does not occur.
    pub fn positions_of(&self, term: &str) -> &[usize] {
        self.inverted.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn distinct_terms(&self) -> usize {
        self.inverted.len()
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.inverted.keys().map(String::as_str)
    }

    /// Rewrites terms through `map` (terms without an entry are kept).
    pub fn substituted(&self, map: &BTreeMap<String, String>) -> PositionalDocument {
        if !self.inverted.keys().any(|t| map.contains_key(t)) {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|t| map.get(t).unwrap_or(t).clone())
            .collect();
        PositionalDocument::new(self.doc_id.clone(), TokenStream::new(terms))
    }
}

/// Documents keyed by id, plus optional category labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: BTreeMap<String, PositionalDocument>,
    labels: BTreeMap<String, String>,
}

fn check_field(kind: &str, value: &str) -> Result<()> {
    if value.is_empty() || value.contains(['\t', '\n', '\r']) {
        return Err(Error::Config(format!(
            "{kind} `{}` must be non-empty and free of tabs and newlines",
            value.escape_debug()
        )));
    }
    Ok(())
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, doc: PositionalDocument) -> Result<()> {
        check_field("document id", doc.doc_id())?;
        if self.documents.contains_key(doc.doc_id()) {
            return Err(Error::DuplicateDocId(doc.doc_id().to_string()));
        }
        self.documents.insert(doc.doc_id().to_string(), doc);
        Ok(())
    }

    pub fn set_label(&mut self, doc_id: &str, label: impl Into<String>) -> Result<()> {
        let label = label.into();
        check_field("label", &label)?;
        if label == UNLABELED {
            return Err(Error::Config(format!(
                "`{UNLABELED}` is reserved for unlabeled documents"
            )));
        }
        if !self.documents.contains_key(doc_id) {
            return Err(Error::UnknownDocument(doc_id.to_string()));
        }
        self.labels.insert(doc_id.to_string(), label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&PositionalDocument> {
        self.documents.get(doc_id)
    }

    /// Documents in ascending `doc_id` order.
    pub fn documents(&self) -> impl ExactSizeIterator<Item = &PositionalDocument> {
        self.documents.values()
    }

    pub fn label(&self, doc_id: &str) -> Option<&str> {
        self.labels.get(doc_id).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<String, String> {
        &self.labels
    }

    pub fn has_labels(&self) -> bool {
        !self.labels.is_empty()
    }

    pub fn total_tokens(&self) -> usize {
        self.documents.values().map(PositionalDocument::len).sum()
    }

    pub fn distinct_terms(&self) -> usize {
        let mut vocab = std::collections::HashSet::new();
        for doc in self.documents.values() {
            vocab.extend(doc.vocabulary());
        }
        vocab.len()
    }

    /// Serializes to the v1 corpus format.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(64 + self.total_tokens() * 8);
        out.push_str(CORPUS_HEADER);
        out.push('\n');
        for (id, doc) in &self.documents {
            let label = self.labels.get(id).map_or(UNLABELED, String::as_str);
            let _ = writeln!(out, "{id}\t{label}\t{}", doc.terms().join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "corpus";
        let mut lines = text.lines().enumerate();
        let header = match lines.next() {
            Some((_, h)) => h,
            None => return Err(Error::format(WHAT, 1, "empty file, missing header")),
        };
        if header != CORPUS_HEADER {
            if let Some(version) = header.strip_prefix(CORPUS_MAGIC) {
                return Err(Error::Version {
                    expected: CORPUS_HEADER.to_string(),
                    found: format!("{CORPUS_MAGIC}{version}"),
                });
            }
            return Err(Error::format(
                WHAT,
                1,
                format!("expected header `{CORPUS_HEADER}`"),
            ));
        }

        let mut corpus = Corpus::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, label, body] = fields.as_slice() else {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            };
            if id.is_empty() {
                return Err(Error::format(WHAT, lineno, "empty document id"));
            }
            if label.is_empty() {
                return Err(Error::format(WHAT, lineno, "empty label field (use `-`)"));
            }
            let stream: TokenStream = body.split(' ').filter(|s| !s.is_empty()).collect();
            let doc = PositionalDocument::new(*id, stream);
            corpus.insert(doc).map_err(|e| match e {
                Error::DuplicateDocId(id) => {
                    Error::format(WHAT, lineno, format!("duplicate document id `{id}`"))
                }
                other => other,
            })?;
            if *label != UNLABELED {
                corpus.labels.insert(id.to_string(), label.to_string());
            }
        }
        Ok(corpus)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}
