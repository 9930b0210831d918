//! Article records, ingestion, vocabulary and entity catalog.
//!
//! A corpus is a list of [`DocumentRecord`]s, one per yearly snapshot of an
//! article. Each record carries two kinds of entities: the task category of
//! the article in that year and every language it had been translated into.
//! The vocabulary and catalog built here feed the trainer's
//! `(entity, word)` pair stream.

mod catalog;
mod pairs;
mod sampler;
mod tokenize;
mod vocab;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

pub use catalog::{build_entity_catalog, Entity, EntityCatalog};
pub use pairs::{pair_stream, TrainingPair};
pub(crate) use pairs::expand_pairs;
pub use sampler::AliasTable;
pub use tokenize::{tokenize, NUM_TOKEN};
pub use vocab::{build_vocabulary, subsample_keep_prob, Vocabulary, NEG_POWER};

/// The 19 top-level task categories.
pub const DEFAULT_CATEGORIES: [&str; 19] = [
    "arts",
    "cars",
    "computers",
    "education",
    "family",
    "finance",
    "food",
    "health",
    "hobbies",
    "holidays",
    "home",
    "personal",
    "pets",
    "philosophy",
    "relations",
    "sports",
    "travel",
    "work",
    "youth",
];

/// The 17 non-English language codes.
pub const DEFAULT_LANGUAGES: [&str; 17] = [
    "por", "spa", "fre", "dut", "ger", "ita", "cze", "rus", "tur", "ara", "hin", "man", "tha",
    "vie", "ind", "kor", "jpn",
];

const RECORD_FIELDS: [&str; 5] = ["id", "task_category", "year", "languages", "text"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("no word reaches min_count")]
    EmptyVocabulary,
    #[error("invalid corpus config: {0}")]
    Config(String),
}

/// One yearly snapshot of an article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    pub task_category: String,
    pub year: i32,
    pub languages: BTreeSet<String>,
    pub tokens: Vec<String>,
}

impl DocumentRecord {
    pub fn task_year(&self) -> Entity {
        Entity::task_year(&self.task_category, self.year)
    }

    /// The record's entities: its task-year first, then one per language in
    /// lexicographic order.
    pub fn entities(&self) -> impl Iterator<Item = Entity> + '_ {
        std::iter::once(self.task_year()).chain(self.languages.iter().map(Entity::language))
    }

    /// Serializes the record as one corpus-file line. Tokens are joined with
    /// single spaces, which [`tokenize`] maps back to the same tokens for
    /// lowercase alphanumeric words.
    pub fn to_json_line(&self) -> String {
        let value = serde_json::json!({
            "id": self.id,
            "task_category": self.task_category,
            "year": self.year,
            "languages": self.languages,
            "text": self.tokens.join(" "),
        });
        value.to_string()
    }
}

/// Validation and vocabulary settings for a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub languages: Vec<String>,
    pub categories: Vec<String>,
    pub year_min: i32,
    pub year_max: i32,
    pub min_count: u64,
    /// Frequent-word subsampling threshold; `None` disables subsampling.
    pub subsample: Option<f64>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            languages: DEFAULT_LANGUAGES.iter().map(|s| s.to_string()).collect(),
            categories: DEFAULT_CATEGORIES.iter().map(|s| s.to_string()).collect(),
            year_min: 2000,
            year_max: 2100,
            min_count: 5,
            subsample: Some(1e-3),
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.year_min > self.year_max {
            return Err(CorpusError::Config(format!(
                "year_min {} exceeds year_max {}",
                self.year_min, self.year_max
            )));
        }
        if self.min_count < 1 {
            return Err(CorpusError::Config("min_count must be at least 1".into()));
        }
        if let Some(t) = self.subsample {
            if !(t > 0.0) {
                return Err(CorpusError::Config(format!(
                    "subsample threshold must be positive, got {t}"
                )));
            }
        }
        if self.categories.is_empty() {
            return Err(CorpusError::Config("category list is empty".into()));
        }
        Ok(())
    }

    /// Threshold handed to the vocabulary; infinity when subsampling is off.
    pub fn subsample_threshold(&self) -> f64 {
        self.subsample.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    MalformedJson,
    MissingField,
    InvalidField,
    YearOutOfRange,
    UnknownCategory,
    UnknownLanguage,
    NoTokens,
    DuplicateId,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::MalformedJson => "malformed json",
            RejectReason::MissingField => "missing field",
            RejectReason::InvalidField => "invalid field",
            RejectReason::YearOutOfRange => "year out of range",
            RejectReason::UnknownCategory => "unknown category",
            RejectReason::UnknownLanguage => "unknown language",
            RejectReason::NoTokens => "no tokens",
            RejectReason::DuplicateId => "duplicate id",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    /// 1-based line number in the input file.
    pub line: usize,
    pub reason: RejectReason,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub rejected: usize,
    pub rejections: Vec<Rejection>,
    /// Number of lines that carried fields outside the record schema.
    pub unknown_field_warnings: usize,
}

/// Reads a line-delimited JSON corpus file.
pub fn ingest(
    path: impl AsRef<Path>,
    config: &CorpusConfig,
) -> Result<(Vec<DocumentRecord>, IngestReport), CorpusError> {
    let path = path.as_ref();
    let io_err = |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    ingest_reader(BufReader::new(file), config).map_err(io_err)
}

/// Same as [`ingest`] over any buffered reader. Blank lines are skipped.
pub fn ingest_reader<R: BufRead>(
    reader: R,
    config: &CorpusConfig,
) -> std::io::Result<(Vec<DocumentRecord>, IngestReport)> {
    let languages: HashSet<&str> = config.languages.iter().map(String::as_str).collect();
    let categories: HashSet<&str> = config.categories.iter().map(String::as_str).collect();
    let mut seen: HashSet<(String, i32)> = HashSet::new();
    let mut records = Vec::new();
    let mut report = IngestReport::default();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let parsed = parse_line(&line, config, &languages, &categories).and_then(|(rec, extra)| {
            if !seen.insert((rec.id.clone(), rec.year)) {
                return Err((
                    RejectReason::DuplicateId,
                    format!("{} already seen for year {}", rec.id, rec.year),
                ));
            }
            Ok((rec, extra))
        });
        match parsed {
            Ok((rec, extra)) => {
                if extra {
                    log::warn!("line {lineno}: ignoring unknown fields");
                    report.unknown_field_warnings += 1;
                }
                records.push(rec);
                report.accepted += 1;
            }
            Err((reason, detail)) => {
                report.rejected += 1;
                report.rejections.push(Rejection {
                    line: lineno,
                    reason,
                    detail,
                });
            }
        }
    }
    Ok((records, report))
}

type LineResult = Result<(DocumentRecord, bool), (RejectReason, String)>;

fn parse_line(
    line: &str,
    config: &CorpusConfig,
    languages: &HashSet<&str>,
    categories: &HashSet<&str>,
) -> LineResult {
    let value: Value =
        serde_json::from_str(line).map_err(|e| (RejectReason::MalformedJson, e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err((RejectReason::MalformedJson, "line is not a JSON object".into()));
    };
    for field in RECORD_FIELDS {
        if !obj.contains_key(field) {
            return Err((RejectReason::MissingField, field.to_string()));
        }
    }
    let extra = obj.keys().any(|k| !RECORD_FIELDS.contains(&k.as_str()));

    let id = str_field(&obj, "id")?;
    if id.is_empty() {
        return Err((RejectReason::InvalidField, "id is empty".into()));
    }
    let task_category = str_field(&obj, "task_category")?;
    if !categories.contains(task_category.as_str()) {
        return Err((RejectReason::UnknownCategory, task_category));
    }
    let year = obj["year"]
        .as_i64()
        .and_then(|y| i32::try_from(y).ok())
        .ok_or((RejectReason::InvalidField, "year".to_string()))?;
    if year < config.year_min || year > config.year_max {
        return Err((
            RejectReason::YearOutOfRange,
            format!("{year} not in [{}, {}]", config.year_min, config.year_max),
        ));
    }
    let Value::Array(langs) = &obj["languages"] else {
        return Err((RejectReason::InvalidField, "languages".into()));
    };
    let mut lang_set = BTreeSet::new();
    for lang in langs {
        let code = lang
            .as_str()
            .ok_or((RejectReason::InvalidField, "languages".to_string()))?;
        if !languages.contains(code) {
            return Err((RejectReason::UnknownLanguage, code.to_string()));
        }
        lang_set.insert(code.to_string());
    }
    let text = str_field(&obj, "text")?;
    let tokens = tokenize(&text);
    if tokens.is_empty() {
        return Err((RejectReason::NoTokens, "text has no tokens".into()));
    }
    Ok((
        DocumentRecord {
            id,
            task_category,
            year,
            languages: lang_set,
            tokens,
        },
        extra,
    ))
}

fn str_field(obj: &Map<String, Value>, name: &str) -> Result<String, (RejectReason, String)> {
    obj[name]
        .as_str()
        .map(str::to_string)
        .ok_or((RejectReason::InvalidField, name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(lines: &[&str]) -> (Vec<DocumentRecord>, IngestReport) {
        let input = lines.join("\n");
        ingest_reader(input.as_bytes(), &CorpusConfig::default()).unwrap()
    }

    const GOOD: [&str; 3] = [
        r#"{"id":"a1","task_category":"food","year":2018,"languages":["spa"],"text":"Cook rice well"}"#,
        r#"{"id":"a2","task_category":"computers","year":2019,"languages":[],"text":"Fix a laptop"}"#,
        r#"{"id":"a1","task_category":"food","year":2019,"languages":["spa","jpn"],"text":"Cook rice"}"#,
    ];

    #[test]
    fn three_valid_lines() {
        let (records, report) = run(&GOOD);
        assert_eq!(records.len(), 3);
        assert_eq!(report.accepted, 3);
        assert_eq!(report.rejected, 0);
        assert_eq!(records[0].tokens, vec!["cook", "rice", "well"]);
        assert_eq!(records[2].languages.len(), 2);
        assert_eq!(records[1].id, "a2");
    }

    #[test]
    fn missing_category_is_rejected() {
        let (records, report) =
            run(&[r#"{"id":"x","year":2018,"languages":[],"text":"hello there"}"#]);
        assert!(records.is_empty());
        assert_eq!(report.rejections[0].reason, RejectReason::MissingField);
        assert_eq!(report.rejections[0].reason.to_string(), "missing field");
        assert_eq!(report.rejections[0].detail, "task_category");
    }

    #[test]
    fn year_out_of_range_is_rejected() {
        let (_, report) = run(&[
            r#"{"id":"x","task_category":"food","year":1850,"languages":[],"text":"old"}"#,
        ]);
        assert_eq!(report.rejections[0].reason.to_string(), "year out of range");
    }

    #[test]
    fn per_line_rejections_do_not_stop_ingest() {
        let (records, report) = run(&[
            "not json",
            GOOD[0],
            r#"{"id":"y","task_category":"cooking","year":2018,"languages":[],"text":"x"}"#,
            r#"{"id":"z","task_category":"food","year":2018,"languages":["eng"],"text":"x"}"#,
            r#"{"id":"w","task_category":"food","year":2018,"languages":[],"text":"!!!"}"#,
            GOOD[0],
        ]);
        assert_eq!(records.len(), 1);
        let reasons: Vec<_> = report.rejections.iter().map(|r| (r.line, r.reason)).collect();
        assert_eq!(
            reasons,
            vec![
                (1, RejectReason::MalformedJson),
                (3, RejectReason::UnknownCategory),
                (4, RejectReason::UnknownLanguage),
                (5, RejectReason::NoTokens),
                (6, RejectReason::DuplicateId),
            ]
        );
    }

    #[test]
    fn unknown_fields_warn_but_accept() {
        let (records, report) = run(&[
            r#"{"id":"a","task_category":"food","year":2018,"languages":[],"text":"x","views":10}"#,
        ]);
        assert_eq!(records.len(), 1);
        assert_eq!(report.unknown_field_warnings, 1);
    }

    #[test]
    fn unreadable_file_is_fatal() {
        let err = ingest("/nonexistent/corpus.jsonl", &CorpusConfig::default()).unwrap_err();
        assert!(matches!(err, CorpusError::Io { .. }));
    }

    #[test]
    fn json_line_round_trips() {
        let (records, _) = run(&GOOD);
        let line = records[2].to_json_line();
        let (again, _) = run(&[&line]);
        assert_eq!(again[0], records[2]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = CorpusConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.subsample = Some(0.0);
        assert!(cfg.validate().is_err());
        cfg.subsample = None;
        cfg.year_min = 2030;
        cfg.year_max = 2020;
        assert!(cfg.validate().is_err());
    }
}
