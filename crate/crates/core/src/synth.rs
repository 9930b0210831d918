//! Synthetic corpora with planted language/category affinities.
//!
//! Each category owns a disjoint set of topic words; a shared background
//! vocabulary supplies noise tokens. A record lists language `L` with
//! probability `affinity[L][c]` for its category `c`, so the ground truth
//! that the metrics should recover is known exactly.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusConfig, DocumentRecord};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synth spec: {0}")]
    Config(String),
    #[error("vocab_size {have} too small: {needed} words needed for topic sets and background")]
    VocabTooSmall { needed: usize, have: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub languages: Vec<String>,
    pub categories: Vec<String>,
    pub years: Vec<i32>,
    pub vocab_size: usize,
    pub topic_words_per_category: usize,
    pub articles_per_category_year: usize,
    pub tokens_per_article: usize,
    /// `language -> category -> inclusion probability`; missing entries are 0.
    #[serde(default)]
    pub affinity: BTreeMap<String, BTreeMap<String, f64>>,
    pub noise: f64,
    pub seed: u64,
}

const HIGH: f64 = 0.9;
const LOW: f64 = 0.05;

impl SynthSpec {
    /// Four languages, five categories, three years. `arts` is shared by
    /// every language and `pets` by none; each language additionally
    /// favours its own subset of the middle three.
    pub fn canonical(seed: u64) -> Self {
        let languages = ["ger", "jpn", "rus", "spa"];
        let categories = ["arts", "cars", "food", "health", "pets"];
        let favoured: [&[&str]; 4] = [
            &["cars"],
            &["food"],
            &["cars", "health"],
            &["food", "health"],
        ];
        let affinity = languages
            .iter()
            .zip(favoured)
            .map(|(lang, fav)| {
                let row = categories
                    .iter()
                    .map(|&c| {
                        let high = c == "arts" || fav.contains(&c);
                        (c.to_string(), if high { HIGH } else { LOW })
                    })
                    .collect();
                (lang.to_string(), row)
            })
            .collect();
        Self {
            languages: languages.iter().map(|s| s.to_string()).collect(),
            categories: categories.iter().map(|s| s.to_string()).collect(),
            years: vec![2016, 2017, 2018],
            vocab_size: 500,
            topic_words_per_category: 50,
            articles_per_category_year: 40,
            tokens_per_article: 100,
            affinity,
            noise: 0.2,
            seed,
        }
    }

    pub fn affinity(&self, language: &str, category: &str) -> f64 {
        self.affinity
            .get(language)
            .and_then(|row| row.get(category))
            .copied()
            .unwrap_or(0.0)
    }

    /// Sets every affinity to `value`.
    pub fn with_uniform_affinity(mut self, value: f64) -> Self {
        self.affinity = self
            .languages
            .iter()
            .map(|l| {
                let row = self.categories.iter().map(|c| (c.clone(), value)).collect();
                (l.clone(), row)
            })
            .collect();
        self
    }

    fn background_size(&self) -> usize {
        self.vocab_size
            .saturating_sub(self.categories.len() * self.topic_words_per_category)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let cfg = |msg: String| Err(SynthError::Config(msg));
        for (name, n) in [
            ("languages", self.languages.len()),
            ("categories", self.categories.len()),
            ("years", self.years.len()),
            ("vocab_size", self.vocab_size),
            ("topic_words_per_category", self.topic_words_per_category),
            ("articles_per_category_year", self.articles_per_category_year),
            ("tokens_per_article", self.tokens_per_article),
        ] {
            if n < 1 {
                return cfg(format!("{name} must be at least 1"));
            }
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return cfg(format!("noise {} outside [0, 1]", self.noise));
        }
        let langs: HashSet<&str> = self.languages.iter().map(String::as_str).collect();
        let cats: HashSet<&str> = self.categories.iter().map(String::as_str).collect();
        if langs.len() != self.languages.len() || cats.len() != self.categories.len() {
            return cfg("duplicate language or category".into());
        }
        if self.years.iter().collect::<HashSet<_>>().len() != self.years.len() {
            return cfg("duplicate year".into());
        }
        let prefixes: HashSet<String> = self.categories.iter().map(|c| topic_prefix(c)).collect();
        if prefixes.len() != self.categories.len() || prefixes.contains("") {
            return cfg("category names must stay distinct after dropping non-alphanumerics".into());
        }
        for (lang, row) in &self.affinity {
            if !langs.contains(lang.as_str()) {
                return cfg(format!("affinity for unknown language {lang:?}"));
            }
            for (cat, &a) in row {
                if !cats.contains(cat.as_str()) {
                    return cfg(format!("affinity for unknown category {cat:?}"));
                }
                if !(0.0..=1.0).contains(&a) {
                    return cfg(format!("affinity({lang}, {cat}) = {a} outside [0, 1]"));
                }
            }
        }
        let topic = self.categories.len() * self.topic_words_per_category;
        let needed = topic + usize::from(self.noise > 0.0);
        if self.vocab_size < needed {
            return Err(SynthError::VocabTooSmall {
                needed,
                have: self.vocab_size,
            });
        }
        Ok(())
    }

    /// A corpus config admitting exactly this spec's languages, categories
    /// and years, with every word kept in the vocabulary.
    pub fn corpus_config(&self) -> CorpusConfig {
        CorpusConfig {
            languages: self.languages.clone(),
            categories: self.categories.clone(),
            year_min: self.years.iter().copied().min().unwrap_or(2000),
            year_max: self.years.iter().copied().max().unwrap_or(2100),
            min_count: 1,
            ..CorpusConfig::default()
        }
    }

    /// Topic words of category `c`, disjoint across categories.
    pub fn topic_words(&self, category: &str) -> Vec<String> {
        let prefix = topic_prefix(category);
        (0..self.topic_words_per_category)
            .map(|j| format!("{prefix}x{j}"))
            .collect()
    }

    pub fn background_words(&self) -> Vec<String> {
        (0..self.background_size()).map(|j| format!("noise{j}")).collect()
    }
}

fn topic_prefix(category: &str) -> String {
    category
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Draws the corpus. Records are ordered by category, then year, then
/// article number; ids are `{category}-{year}-{k}`.
pub fn generate(spec: &SynthSpec) -> Result<Vec<DocumentRecord>, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background = spec.background_words();
    let mut out = Vec::with_capacity(
        spec.categories.len() * spec.years.len() * spec.articles_per_category_year,
    );
    for cat in &spec.categories {
        let topic = spec.topic_words(cat);
        let affinities: Vec<(&String, f64)> =
            spec.languages.iter().map(|l| (l, spec.affinity(l, cat))).collect();
        for &year in &spec.years {
            for k in 0..spec.articles_per_category_year {
                let languages: BTreeSet<String> = affinities
                    .iter()
                    .filter(|(_, a)| rng.random::<f64>() < *a)
                    .map(|(l, _)| (*l).clone())
                    .collect();
                let tokens = (0..spec.tokens_per_article)
                    .map(|_| {
                        if rng.random::<f64>() < spec.noise {
                            background[rng.random_range(0..background.len())].clone()
                        } else {
                            topic[rng.random_range(0..topic.len())].clone()
                        }
                    })
                    .collect();
                out.push(DocumentRecord {
                    id: format!("{cat}-{year}-{k}"),
                    task_category: cat.clone(),
                    year,
                    languages,
                    tokens,
                });
            }
        }
    }
    Ok(out)
}

/// Per language, categories by descending planted affinity, ties broken
/// lexicographically.
pub fn planted_rank_oracle(spec: &SynthSpec) -> BTreeMap<String, Vec<String>> {
    spec.languages
        .iter()
        .map(|lang| {
            let mut cats = spec.categories.clone();
            cats.sort_by(|a, b| {
                spec.affinity(lang, b)
                    .total_cmp(&spec.affinity(lang, a))
                    .then_with(|| a.cmp(b))
            });
            (lang.clone(), cats)
        })
        .collect()
}

pub fn write_jsonl(records: &[DocumentRecord], path: impl AsRef<Path>) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for rec in records {
        writeln!(out, "{}", rec.to_json_line())?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_reader;
    use crate::metrics::task_language_distribution_for;

    fn small(seed: u64) -> SynthSpec {
        SynthSpec {
            articles_per_category_year: 10,
            tokens_per_article: 20,
            ..SynthSpec::canonical(seed)
        }
    }

    #[test]
    fn canonical_is_valid() {
        let spec = SynthSpec::canonical(0);
        spec.validate().unwrap();
        assert_eq!(spec.background_words().len(), 250);
        for l in &spec.languages {
            assert_eq!(spec.affinity(l, "arts"), 0.9);
            assert_eq!(spec.affinity(l, "pets"), 0.05);
        }
    }

    #[test]
    fn noise_free_tokens_stay_on_topic() {
        let spec = SynthSpec { noise: 0.0, ..small(1) };
        for rec in generate(&spec).unwrap() {
            let topic: HashSet<String> = spec.topic_words(&rec.task_category).into_iter().collect();
            assert!(rec.tokens.iter().all(|t| topic.contains(t)));
        }
    }

    #[test]
    fn full_affinity_lists_every_language() {
        let spec = small(2).with_uniform_affinity(1.0);
        let all: BTreeSet<String> = spec.languages.iter().cloned().collect();
        assert!(generate(&spec).unwrap().iter().all(|r| r.languages == all));
    }

    #[test]
    fn zero_affinity_gives_zero_distribution() {
        let spec = small(3).with_uniform_affinity(0.0);
        let corpus = generate(&spec).unwrap();
        assert!(corpus.iter().all(|r| r.languages.is_empty()));
        let table = task_language_distribution_for(&corpus, &spec.languages).unwrap();
        assert_eq!(table.rows(), 4);
        assert!(table.values().iter().all(|v| *v == Some(0.0)));
    }

    #[test]
    fn inclusion_frequency_tracks_affinity() {
        let spec = SynthSpec::canonical(4);
        let corpus = generate(&spec).unwrap();
        for lang in &spec.languages {
            for cat in &spec.categories {
                let cell: Vec<_> = corpus.iter().filter(|r| &r.task_category == cat).collect();
                let hits = cell.iter().filter(|r| r.languages.contains(lang)).count();
                let freq = hits as f64 / cell.len() as f64;
                assert!((freq - spec.affinity(lang, cat)).abs() <= 0.05, "{lang}/{cat}: {freq}");
            }
        }
    }

    #[test]
    fn topic_sets_are_disjoint() {
        let spec = SynthSpec::canonical(0);
        let mut seen = HashSet::new();
        for cat in &spec.categories {
            for w in spec.topic_words(cat) {
                assert!(seen.insert(w));
            }
        }
        for w in spec.background_words() {
            assert!(seen.insert(w));
        }
        assert_eq!(seen.len(), spec.vocab_size);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        assert_eq!(generate(&small(5)).unwrap(), generate(&small(5)).unwrap());
        assert_ne!(generate(&small(5)).unwrap(), generate(&small(6)).unwrap());
    }

    #[test]
    fn vocab_too_small() {
        let spec = SynthSpec { vocab_size: 250, ..SynthSpec::canonical(0) };
        assert_eq!(
            spec.validate(),
            Err(SynthError::VocabTooSmall { needed: 251, have: 250 })
        );
        let exact = SynthSpec { noise: 0.0, ..spec };
        exact.validate().unwrap();
    }

    #[test]
    fn rejects_bad_affinity() {
        let mut spec = SynthSpec::canonical(0);
        spec.affinity.get_mut("spa").unwrap().insert("food".into(), 1.5);
        assert!(matches!(spec.validate(), Err(SynthError::Config(_))));
        let mut spec = SynthSpec::canonical(0);
        spec.affinity.insert("eng".into(), BTreeMap::new());
        assert!(matches!(spec.validate(), Err(SynthError::Config(_))));
    }

    #[test]
    fn oracle_examples() {
        let mut spec = SynthSpec::canonical(0);
        spec.categories = vec!["cars".into(), "food".into()];
        spec.affinity = BTreeMap::from([(
            "spa".to_string(),
            BTreeMap::from([("food".to_string(), 0.9), ("cars".to_string(), 0.1)]),
        )]);
        assert_eq!(planted_rank_oracle(&spec)["spa"], vec!["food", "cars"]);

        let tied = SynthSpec::canonical(0).with_uniform_affinity(0.5);
        for ranks in planted_rank_oracle(&tied).values() {
            assert_eq!(ranks, &tied.categories);
        }
    }

    #[test]
    fn jsonl_round_trips_through_ingest() {
        let spec = small(7);
        let corpus = generate(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        write_jsonl(&corpus, &path).unwrap();
        let text = std::fs::read(&path).unwrap();
        let (back, report) = ingest_reader(&text[..], &spec.corpus_config()).unwrap();
        assert_eq!(report.rejected, 0);
        assert_eq!(back, corpus);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = SynthSpec::canonical(9);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SynthSpec>(&json).unwrap(), spec);
    }
}
