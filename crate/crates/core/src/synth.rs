//! Seeded synthetic labeled corpora.
//!
//! Every document of a category is background noise with a few topical
//! passages: a category descriptor whose surrounding `window` positions are
//! seeded with equivalent terms at `injection_rate`. Stray mentions of
//! descriptors from any category are sprinkled over the whole corpus.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::CategoryModel;
use crate::error::{Error, Result};
use crate::posindex::{Corpus, PositionalDocument};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthCategory {
    pub name: String,
    pub descriptors: Vec<String>,
    /// `equivalent → descriptor`.
    #[serde(default)]
    pub equivalents: BTreeMap<String, String>,
}

/// Generator parameters, readable from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    /// Explicit categories. When empty, `num_categories` categories are
    /// generated with `descriptors_per_category` descriptors and
    /// `equivalents_per_descriptor` equivalents each.
    #[serde(rename = "category")]
    pub categories: Vec<SynthCategory>,
    pub num_categories: usize,
    pub descriptors_per_category: usize,
    pub equivalents_per_descriptor: usize,
    pub docs_per_category: usize,
    pub doc_length: usize,
    /// Half-width of a topical passage, in positions.
    pub window: usize,
    pub passages_per_doc: usize,
    /// Probability that a passage position holds an equivalent term.
    pub injection_rate: f64,
    /// Per-position probability of a stray descriptor of a random category.
    pub stray_rate: f64,
    pub noise_vocabulary: usize,
    /// Fraction of the noise vocabulary shared by all categories.
    pub shared_noise: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            categories: Vec::new(),
            num_categories: 3,
            descriptors_per_category: 4,
            equivalents_per_descriptor: 3,
            docs_per_category: 200,
            doc_length: 200,
            window: 5,
            passages_per_doc: 1,
            injection_rate: 0.5,
            stray_rate: 0.06,
            noise_vocabulary: 600,
            shared_noise: 0.3,
        }
    }
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidSpec(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

impl SynthSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SynthSpec =
            toml::from_str(text).map_err(|e| Error::InvalidSpec(e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.categories.is_empty() && self.num_categories == 0 {
            return Err(Error::InvalidSpec("zero categories".into()));
        }
        if self.categories.is_empty() && self.descriptors_per_category == 0 {
            return Err(Error::InvalidSpec("zero descriptors per category".into()));
        }
        if self.doc_length == 0 {
            return Err(Error::InvalidSpec("zero document length".into()));
        }
        if self.docs_per_category == 0 {
            return Err(Error::InvalidSpec("zero documents per category".into()));
        }
        if self.noise_vocabulary == 0 {
            return Err(Error::InvalidSpec("empty noise vocabulary".into()));
        }
        check_rate("injection_rate", self.injection_rate)?;
        check_rate("stray_rate", self.stray_rate)?;
        check_rate("shared_noise", self.shared_noise)?;
        for c in &self.categories {
            if c.descriptors.is_empty() {
                return Err(Error::InvalidSpec(format!(
                    "category `{}` has no descriptors",
                    c.name
                )));
            }
        }
        Ok(())
    }

    /// Category definitions after auto-generation, validated as models.
    pub fn category_models(&self) -> Result<Vec<CategoryModel>> {
        self.resolved_categories()
            .into_iter()
            .map(|c| {
                CategoryModel::new(c.name.clone(), c.descriptors.clone(), c.equivalents.clone())
                    .map_err(|e| Error::InvalidSpec(e.to_string()))
            })
            .collect()
    }

    fn resolved_categories(&self) -> Vec<SynthCategory> {
        if !self.categories.is_empty() {
            return self.categories.clone();
        }
        (0..self.num_categories)
            .map(|c| {
                let name = format!("cat{c}");
                let descriptors: Vec<String> = (0..self.descriptors_per_category)
                    .map(|d| format!("c{c}d{d}"))
                    .collect();
                let equivalents = descriptors
                    .iter()
                    .enumerate()
                    .flat_map(|(d, desc)| {
                        (0..self.equivalents_per_descriptor)
                            .map(move |e| (format!("c{c}d{d}e{e}"), desc.clone()))
                    })
                    .collect();
                SynthCategory {
                    name,
                    descriptors,
                    equivalents,
                }
            })
            .collect()
    }
}

/// A generated labeled corpus with its category models.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    pub categories: Vec<CategoryModel>,
}

pub fn generate_synthetic_corpus(spec: &SynthSpec, seed: u64) -> Result<SynthCorpus> {
    spec.validate()?;
    let categories = spec.category_models()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n_cat = categories.len();
    let shared_words = ((spec.noise_vocabulary as f64) * spec.shared_noise).round() as usize;
    let private_words = ((spec.noise_vocabulary - shared_words) / n_cat).max(1);
    let shared: Vec<String> = (0..shared_words).map(|i| format!("n{i}")).collect();
    let private: Vec<Vec<String>> = (0..n_cat)
        .map(|c| (0..private_words).map(|i| format!("p{c}n{i}")).collect())
        .collect();
    let all_descriptors: Vec<Vec<&String>> = categories
        .iter()
        .map(|c| c.descriptors().iter().collect())
        .collect();
    // equivalents grouped by their descriptor
    let equivalents_of: Vec<BTreeMap<&str, Vec<&str>>> = categories
        .iter()
        .map(|c| {
            let mut m: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
            for (surface, desc) in c.equivalents() {
                m.entry(desc.as_str()).or_default().push(surface.as_str());
            }
            m
        })
        .collect();

    let digits = (n_cat * spec.docs_per_category).to_string().len();
    let mut corpus = Corpus::new();
    let mut serial = 0usize;
    for (c, model) in categories.iter().enumerate() {
        for _ in 0..spec.docs_per_category {
            let mut terms: Vec<String> = Vec::with_capacity(spec.doc_length);
            for _ in 0..spec.doc_length {
                let use_shared = !shared.is_empty() && rng.gen_bool(spec.shared_noise);
                let pool = if use_shared { &shared } else { &private[c] };
                terms.push(pool.choose(&mut rng).expect("non-empty pool").clone());
            }
            for slot in terms.iter_mut() {
                if rng.gen_bool(spec.stray_rate) {
                    let other = rng.gen_range(0..n_cat);
                    *slot = (*all_descriptors[other]
                        .choose(&mut rng)
                        .expect("descriptors"))
                    .clone();
                }
            }
            for _ in 0..spec.passages_per_doc {
                let center = rng.gen_range(0..spec.doc_length);
                let desc = *all_descriptors[c].choose(&mut rng).expect("descriptors");
                terms[center] = desc.clone();
                let lo = center.saturating_sub(spec.window);
                let hi = (center + spec.window).min(spec.doc_length - 1);
                for (pos, slot) in terms.iter_mut().enumerate().take(hi + 1).skip(lo) {
                    if pos == center {
                        continue;
                    }
                    let Some(pool) = equivalents_of[c].get(desc.as_str()) else {
                        continue;
                    };
                    if rng.gen_bool(spec.injection_rate) {
                        *slot = (*pool.choose(&mut rng).expect("equivalents")).to_string();
                    }
                }
            }
            let doc_id = format!("{}-{serial:0digits$}", model.name());
            serial += 1;
            corpus.insert(PositionalDocument::from_terms(doc_id.clone(), terms))?;
            corpus.set_label(&doc_id, model.name())?;
        }
    }
    Ok(SynthCorpus { corpus, categories })
}
