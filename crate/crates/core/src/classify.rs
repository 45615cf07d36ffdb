//! Category models, top-1 classification by fuzzy similarity, and the
//! recall/precision evaluation harness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::engine::{with_workers, Scorer};
use crate::error::{Error, Result};
use crate::posindex::{Corpus, PositionalDocument};
use crate::querylang::QueryAst;
use crate::textprep::Analyzer;

/// A category: descriptor stems plus equivalent stems that stand in for them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryModel {
    name: String,
    descriptors: BTreeSet<String>,
    equivalents: BTreeMap<String, String>,
}

impl CategoryModel {
    pub fn new(
        name: impl Into<String>,
        descriptors: impl IntoIterator<Item = impl Into<String>>,
        equivalents: impl IntoIterator<Item = (impl Into<String>, impl Into<String>)>,
    ) -> Result<Self> {
        let name = name.into();
        let descriptors: BTreeSet<String> = descriptors.into_iter().map(Into::into).collect();
        let equivalents: BTreeMap<String, String> = equivalents
            .into_iter()
            .map(|(k, v)| (k.into(), v.into()))
            .collect();
        let invalid = |message: String| Error::InvalidCategory {
            name: name.clone(),
            message,
        };
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(invalid("name must be a non-empty word".into()));
        }
        if descriptors.is_empty() {
            return Err(invalid("no descriptors".into()));
        }
        for (surface, descriptor) in &equivalents {
            if !descriptors.contains(descriptor) {
                return Err(invalid(format!(
                    "equivalent `{surface}` maps to `{descriptor}`, which is not a descriptor"
                )));
            }
            if descriptors.contains(surface) {
                return Err(invalid(format!(
                    "`{surface}` is both a descriptor and an equivalent"
                )));
            }
        }
        Ok(CategoryModel {
            name,
            descriptors,
            equivalents,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn descriptors(&self) -> &BTreeSet<String> {
        &self.descriptors
    }

    pub fn equivalents(&self) -> &BTreeMap<String, String> {
        &self.equivalents
    }

    /// The category as a query: an OR over its descriptors.
    pub fn query(&self) -> QueryAst {
        category_query(self)
    }

    /// The document with this category's equivalents rewritten to descriptors.
    pub fn view(&self, doc: &PositionalDocument) -> PositionalDocument {
        doc.substituted(&self.equivalents)
    }
}

pub fn category_query(model: &CategoryModel) -> QueryAst {
    QueryAst::any_of(model.descriptors.iter().cloned())
        .expect("category models always have descriptors")
}

const CATEGORY_FILE: &str = "category file";

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

/// Parses a category file.
///
/// ```text
/// # comment
/// category: economy
/// descriptors: market, bank
/// equivalents: bourse=market lender=bank
/// ```
///
/// Terms go through `analyzer` so they match document stems. Repeated
/// `descriptors:`/`equivalents:` lines accumulate.
pub fn parse_categories(text: &str, analyzer: &Analyzer) -> Result<Vec<CategoryModel>> {
    struct Pending {
        name: String,
        line: usize,
        descriptors: Vec<String>,
        equivalents: Vec<(String, String)>,
    }

    let analyze = |term: &str, line: usize| {
        analyzer.analyze_term(term).ok_or_else(|| {
            Error::format(
                CATEGORY_FILE,
                line,
                format!("`{term}` is not a single indexable word"),
            )
        })
    };

    let mut pending: Vec<Pending> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once(':') else {
            return Err(Error::format(CATEGORY_FILE, line, "expected `key: value`"));
        };
        let value = value.trim();
        match key.trim() {
            "category" => {
                if value.is_empty() || value.contains(char::is_whitespace) {
                    return Err(Error::format(
                        CATEGORY_FILE,
                        line,
                        "category name must be one word",
                    ));
                }
                if pending.iter().any(|p| p.name == value) {
                    return Err(Error::format(
                        CATEGORY_FILE,
                        line,
                        format!("duplicate category `{value}`"),
                    ));
                }
                pending.push(Pending {
                    name: value.to_string(),
                    line,
                    descriptors: Vec::new(),
                    equivalents: Vec::new(),
                });
            }
            "descriptors" => {
                let Some(cat) = pending.last_mut() else {
                    return Err(Error::format(
                        CATEGORY_FILE,
                        line,
                        "descriptors before any `category:`",
                    ));
                };
                for term in split_list(value) {
                    cat.descriptors.push(analyze(term, line)?);
                }
            }
            "equivalents" => {
                let Some(cat) = pending.last_mut() else {
                    return Err(Error::format(
                        CATEGORY_FILE,
                        line,
                        "equivalents before any `category:`",
                    ));
                };
                for pair in split_list(value) {
                    let Some((surface, descriptor)) = pair.split_once('=') else {
                        return Err(Error::format(
                            CATEGORY_FILE,
                            line,
                            format!("expected `surface=descriptor`, found `{pair}`"),
                        ));
                    };
                    cat.equivalents
                        .push((analyze(surface, line)?, analyze(descriptor, line)?));
                }
            }
            other => {
                return Err(Error::format(
                    CATEGORY_FILE,
                    line,
                    format!("unknown key `{other}`"),
                ))
            }
        }
    }
    if pending.is_empty() {
        return Err(Error::format(CATEGORY_FILE, 1, "no categories defined"));
    }
    pending
        .into_iter()
        .map(|p| {
            CategoryModel::new(p.name, p.descriptors, p.equivalents).map_err(|e| match e {
                Error::InvalidCategory { name, message } => Error::format(
                    CATEGORY_FILE,
                    p.line,
                    format!("category `{name}`: {message}"),
                ),
                other => other,
            })
        })
        .collect()
}

pub fn load_categories(path: &Path, analyzer: &Analyzer) -> Result<Vec<CategoryModel>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_categories(&text, analyzer)
}

/// Serializes categories in the format read by [`parse_categories`].
pub fn render_categories(categories: &[CategoryModel]) -> String {
    let mut out = String::new();
    for (i, c) in categories.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "category: {}", c.name);
        let descriptors: Vec<&str> = c.descriptors.iter().map(String::as_str).collect();
        let _ = writeln!(out, "descriptors: {}", descriptors.join(" "));
        if !c.equivalents.is_empty() {
            let pairs: Vec<String> = c
                .equivalents
                .iter()
                .map(|(s, d)| format!("{s}={d}"))
                .collect();
            let _ = writeln!(out, "equivalents: {}", pairs.join(" "));
        }
    }
    out
}

/// Similarity of `doc` to every category, best first; ties by ascending name.
pub fn classify(
    doc: &PositionalDocument,
    categories: &[CategoryModel],
    scorer: &Scorer,
) -> Vec<(String, f64)> {
    let mut ranked: Vec<(String, f64)> = categories
        .iter()
        .map(|c| (c.name.clone(), scorer.similarity(&c.view(doc), &c.query())))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc_id: String,
    pub category: String,
    pub similarity: f64,
}

/// Top-1 prediction for every document, in corpus order.
pub fn predict_corpus(
    corpus: &Corpus,
    categories: &[CategoryModel],
    scorer: &Scorer,
    workers: Option<usize>,
) -> Result<Vec<Prediction>> {
    if categories.is_empty() {
        return Err(Error::Config("at least one category is required".into()));
    }
    let docs: Vec<&PositionalDocument> = corpus.documents().collect();
    with_workers(workers, || {
        docs.par_iter()
            .map(|doc| {
                let (category, similarity) = classify(doc, categories, scorer)
                    .into_iter()
                    .next()
                    .expect("non-empty category list");
                Prediction {
                    doc_id: doc.doc_id().to_string(),
                    category,
                    similarity,
                }
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMetrics {
    pub name: String,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    /// No document carried this label (recall reported as 0).
    pub recall_undefined: bool,
    /// The category was never predicted (precision reported as 0).
    pub precision_undefined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub categories: Vec<CategoryMetrics>,
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub macro_f1: f64,
    /// `confusion[true][predicted]`, indexed in `categories` order.
    pub confusion: Vec<Vec<usize>>,
    pub evaluated: usize,
    pub correct: usize,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

impl EvalReport {
    /// Builds the report from a confusion matrix over `names`.
    pub fn from_confusion(names: &[String], confusion: Vec<Vec<usize>>) -> Self {
        let n = names.len();
        let mut categories = Vec::with_capacity(n);
        for (c, name) in names.iter().enumerate() {
            let tp = confusion[c][c];
            let row: usize = confusion[c].iter().sum();
            let col: usize = confusion.iter().map(|r| r[c]).sum();
            let (recall, recall_undefined) = ratio(tp, row);
            let (precision, precision_undefined) = ratio(tp, col);
            let f1 = if recall + precision > 0.0 {
                2.0 * recall * precision / (recall + precision)
            } else {
                0.0
            };
            categories.push(CategoryMetrics {
                name: name.clone(),
                true_positives: tp,
                false_positives: col - tp,
                false_negatives: row - tp,
                recall,
                precision,
                f1,
                recall_undefined,
                precision_undefined,
            });
        }
        let mean = |f: fn(&CategoryMetrics) -> f64| {
            if n == 0 {
                0.0
            } else {
                categories.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let macro_recall = mean(|m| m.recall);
        let macro_precision = mean(|m| m.precision);
        let macro_f1 = mean(|m| m.f1);
        let evaluated = confusion.iter().flatten().sum();
        let correct = (0..n).map(|i| confusion[i][i]).sum();
        EvalReport {
            categories,
            macro_recall,
            macro_precision,
            macro_f1,
            confusion,
            evaluated,
            correct,
        }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.correct, self.evaluated).0
    }

    /// `category TAB recall TAB precision TAB f1`, one line per category.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for m in &self.categories {
            let _ = writeln!(
                out,
                "{}\t{:.6}\t{:.6}\t{:.6}",
                m.name, m.recall, m.precision, m.f1
            );
        }
        out
    }

    /// Aligned plain-text table with macro averages and the confusion matrix.
    pub fn to_table(&self) -> String {
        let width = self
            .categories
            .iter()
            .map(|m| m.name.chars().count())
            .chain(["category".len(), "macro".len()])
            .max()
            .unwrap_or(8);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}",
            "category", "recall", "precision", "f1"
        );
        let mut flagged = false;
        for m in &self.categories {
            let mark = |undefined: bool| if undefined { "*" } else { " " };
            flagged |= m.recall_undefined || m.precision_undefined;
            let _ = writeln!(
                out,
                "{:<width$}  {:>8.4}{}  {:>8.4}{}  {:>9.4}",
                m.name,
                m.recall,
                mark(m.recall_undefined),
                m.precision,
                mark(m.precision_undefined),
                m.f1
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}",
            "macro", self.macro_recall, self.macro_precision, self.macro_f1
        );
        let _ = writeln!(
            out,
            "accuracy {}/{} = {:.4}",
            self.correct,
            self.evaluated,
            self.accuracy()
        );
        if flagged {
            out.push_str("* zero denominator, reported as 0\n");
        }
        out.push_str("\nconfusion (rows: true, columns: predicted)\n");
        let cell = self
            .confusion
            .iter()
            .flatten()
            .map(|v| v.to_string().len())
            .max()
            .unwrap_or(1)
            .max(
                self.categories
                    .iter()
                    .map(|m| m.name.chars().count())
                    .max()
                    .unwrap_or(1),
            );
        let _ = write!(out, "{:<width$}", "");
        for m in &self.categories {
            let _ = write!(out, "  {:>cell$}", m.name);
        }
        out.push('\n');
        for (m, row) in self.categories.iter().zip(&self.confusion) {
            let _ = write!(out, "{:<width$}", m.name);
            for v in row {
                let _ = write!(out, "  {v:>cell$}");
            }
            out.push('\n');
        }
        out
    }
}

/// Top-1 recall/precision over every labeled document of `corpus`.
/// Unlabeled documents are skipped.
pub fn evaluate(
    corpus: &Corpus,
    categories: &[CategoryModel],
    scorer: &Scorer,
    workers: Option<usize>,
) -> Result<EvalReport> {
    if !corpus.has_labels() {
        return Err(Error::NoLabels);
    }
    let mut names: Vec<String> = categories.iter().map(|c| c.name.clone()).collect();
    names.sort();
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    for (doc_id, label) in corpus.labels() {
        if !index.contains_key(label.as_str()) {
            return Err(Error::UnknownLabel {
                doc_id: doc_id.clone(),
                label: label.clone(),
            });
        }
    }

    let docs: Vec<(&PositionalDocument, usize)> = corpus
        .documents()
        .filter_map(|d| corpus.label(d.doc_id()).map(|l| (d, index[l])))
        .collect();
    let predicted: Vec<usize> = with_workers(workers, || {
        docs.par_iter()
            .map(|(doc, _)| {
                let (top, _) = &classify(doc, categories, scorer)[0];
                index[top.as_str()]
            })
            .collect()
    })?;

    let mut confusion = vec![vec![0usize; names.len()]; names.len()];
    for ((_, truth), pred) in docs.iter().zip(predicted) {
        confusion[*truth][pred] += 1;
    }
    Ok(EvalReport::from_confusion(&names, confusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxcore::InfluenceKernel;
    use crate::textprep::{LightStemmer, StopList};

    fn standard() -> Scorer {
        Scorer::Standard(InfluenceKernel::triangular(5).unwrap())
    }

    fn cat(name: &str, descriptors: &[&str]) -> CategoryModel {
        CategoryModel::new(
            name,
            descriptors.iter().copied(),
            Vec::<(String, String)>::new(),
        )
        .unwrap()
    }

    #[test]
    fn category_queries() {
        assert_eq!(cat("x", &["a"]).query(), QueryAst::term("a"));
        assert_eq!(
            cat("x", &["a", "b"]).query(),
            QueryAst::or(QueryAst::term("a"), QueryAst::term("b"))
        );
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(
            CategoryModel::new("x", Vec::<String>::new(), Vec::<(String, String)>::new()).is_err()
        );
        assert!(CategoryModel::new("x", ["a"], [("b", "c")]).is_err());
        assert!(CategoryModel::new("x", ["a", "b"], [("b", "a")]).is_err());
        assert!(CategoryModel::new("", ["a"], Vec::<(String, String)>::new()).is_err());
    }

    #[test]
    fn own_descriptor_wins() {
        let doc = PositionalDocument::from_terms("d", ["n", "x", "n"]);
        let ranked = classify(&doc, &[cat("Y", &["y"]), cat("X", &["x"])], &standard());
        assert_eq!(ranked[0].0, "X");
    }

    #[test]
    fn no_shared_terms_ranks_alphabetically() {
        let doc = PositionalDocument::from_terms("d", ["n", "m"]);
        let ranked = classify(
            &doc,
            &[cat("b", &["y"]), cat("a", &["x"]), cat("c", &["z"])],
            &standard(),
        );
        assert_eq!(
            ranked,
            [
                ("a".to_string(), 0.0),
                ("b".to_string(), 0.0),
                ("c".to_string(), 0.0)
            ]
        );
    }

    #[test]
    fn hand_computed_ranking() {
        // doc [x, n, y, y, n], k = 5
        // X = {x}: μ = 1, .8, .6, .4, .2 → 3.0 / 5 = 0.6
        // Y = {y}: μ = .6, .8, 1, 1, .8 → 4.2 / 5 = 0.84
        let doc = PositionalDocument::from_terms("d", ["x", "n", "y", "y", "n"]);
        let ranked = classify(&doc, &[cat("X", &["x"]), cat("Y", &["y"])], &standard());
        assert_eq!(ranked[0].0, "Y");
        assert!((ranked[0].1 - 0.84).abs() < 1e-12);
        assert!((ranked[1].1 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn equivalents_are_substituted() {
        let x = CategoryModel::new("X", ["x"], [("xx", "x")]).unwrap();
        let doc = PositionalDocument::from_terms("d", ["xx", "n", "y"]);
        let ranked = classify(&doc, &[x, cat("Y", &["y"])], &standard());
        assert_eq!(ranked[0].0, "X");
    }

    #[test]
    fn confusion_matrix_metrics() {
        let names = vec!["X".to_string(), "Y".to_string()];
        let r = EvalReport::from_confusion(&names, vec![vec![8, 2], vec![3, 7]]);
        let x = &r.categories[0];
        assert!((x.precision - 8.0 / 11.0).abs() < 1e-12);
        assert!((x.recall - 0.8).abs() < 1e-12);
        let y = &r.categories[1];
        assert!((y.precision - 7.0 / 9.0).abs() < 1e-12);
        assert!((y.recall - 0.7).abs() < 1e-12);
        assert_eq!((r.correct, r.evaluated), (15, 20));
        assert!(r.to_records().starts_with("X\t0.800000\t0.727273\t"));
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let names = vec!["X".to_string(), "Y".to_string()];
        let r = EvalReport::from_confusion(&names, vec![vec![0, 4], vec![0, 0]]);
        assert!(r.categories[0].precision_undefined);
        assert!(r.categories[1].recall_undefined);
        assert_eq!(r.macro_f1, 0.0);
        assert!(r.to_table().contains("zero denominator"));
    }

    fn labeled(pairs: &[(&str, &[&str], &str)]) -> Corpus {
        let mut c = Corpus::new();
        for (id, terms, label) in pairs {
            c.insert(PositionalDocument::from_terms(*id, terms.iter().copied()))
                .unwrap();
            c.set_label(id, *label).unwrap();
        }
        c
    }

    #[test]
    fn perfect_and_all_wrong() {
        let cats = [cat("X", &["x"]), cat("Y", &["y"])];
        let c = labeled(&[("1", &["x", "n"], "X"), ("2", &["y", "n"], "Y")]);
        let r = evaluate(&c, &cats, &standard(), None).unwrap();
        assert!(r
            .categories
            .iter()
            .all(|m| m.recall == 1.0 && m.precision == 1.0));

        let c = labeled(&[("1", &["y", "n"], "X"), ("2", &["x", "n"], "Y")]);
        let r = evaluate(&c, &cats, &standard(), Some(2)).unwrap();
        assert!(r
            .categories
            .iter()
            .all(|m| m.recall == 0.0 && m.precision == 0.0));
    }

    #[test]
    fn evaluation_errors() {
        let cats = [cat("X", &["x"])];
        let c = labeled(&[("doc7", &["x"], "Z")]);
        let err = evaluate(&c, &cats, &standard(), None).unwrap_err();
        assert!(err.to_string().contains("doc7"), "{err}");

        let mut unlabeled = Corpus::new();
        unlabeled
            .insert(PositionalDocument::from_terms("d", ["x"]))
            .unwrap();
        assert!(matches!(
            evaluate(&unlabeled, &cats, &standard(), None),
            Err(Error::NoLabels)
        ));
    }

    #[test]
    fn category_file_round_trip() {
        let analyzer = Analyzer::new(StopList::empty(), LightStemmer::arabic_default());
        let text = "# press categories\ncategory: economy\ndescriptors: market, bank\nequivalents: bourse=market\n\ncategory: sport\ndescriptors: الكرة\n";
        let cats = parse_categories(text, &analyzer).unwrap();
        assert_eq!(cats.len(), 2);
        assert_eq!(cats[0].equivalents()["bourse"], "market");
        let ball = analyzer.analyze_term("الكرة").unwrap();
        assert!(cats[1].descriptors().contains(&ball));
        let back = parse_categories(&render_categories(&cats), &analyzer).unwrap();
        assert_eq!(back, cats);
    }

    #[test]
    fn category_file_errors() {
        let a = Analyzer::new(StopList::empty(), LightStemmer::arabic_default());
        let err = parse_categories("descriptors: a\n", &a).unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
        let err = parse_categories("category: x\nequivalents: a\n", &a).unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
        let err = parse_categories("category: x\n", &a).unwrap_err();
        assert!(err.to_string().contains("no descriptors"), "{err}");
        assert!(parse_categories("# nothing\n", &a).is_err());
        assert!(parse_categories("category: x\ncategory: x\n", &a).is_err());
    }
}
