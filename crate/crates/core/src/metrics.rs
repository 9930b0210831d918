//! Cross-lingual task analytics over a trained entity space.
//!
//! * **Language inclusivity**: cosine distance between the mean language
//!   vector and each task-year vector. A category whose distance shrinks over
//!   the years is moving toward the language cluster, i.e. becoming more
//!   inclusive.
//! * **Task preference**: per language, cosine distance to each category's
//!   year-averaged vector, and the rank of each category (rank 1 = closest =
//!   most preferred).
//! * **Task-language distribution**: a frequency table straight from the
//!   corpus, the share of each category's articles translated into each
//!   language.
//!
//! Only entity rows are compared; output word vectors never enter a cosine.
//! Distances published in tables are snapped to a fixed grid of
//! [`REPORT_GRID`] so that last-bit arithmetic noise (for instance from
//! uniformly rescaling the embedding) cannot change a reported value.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DocumentRecord, Entity};
use crate::trainer::EmbeddingModel;

/// Spacing of the grid reported distances are rounded to (2^-32).
pub const REPORT_GRID: f64 = 1.0 / 4_294_967_296.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("zero vector")]
    ZeroVector,
    #[error("model has no language entities")]
    NoLanguages,
    #[error("model has no task-year entities")]
    NoTaskYears,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsOptions {
    /// Scale every row to unit length before averaging.
    pub normalize_before_mean: bool,
}

/// Entity embeddings in double precision, detached from the word matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EntitySpace {
    entities: Vec<Entity>,
    dim: usize,
    rows: Vec<f64>,
}

impl EntitySpace {
    pub fn new(entities: Vec<Entity>, dim: usize, rows: Vec<f64>) -> Result<Self, MetricsError> {
        if rows.len() != entities.len() * dim {
            return Err(MetricsError::LengthMismatch(rows.len(), entities.len() * dim));
        }
        Ok(Self { entities, dim, rows })
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    /// Every row multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            entities: self.entities.clone(),
            dim: self.dim,
            rows: self.rows.iter().map(|x| x * alpha).collect(),
        }
    }

    fn language_rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entities.iter().enumerate().filter_map(|(i, e)| match e {
            Entity::Language(code) => Some((code.as_str(), self.row(i))),
            _ => None,
        })
    }

    fn task_rows(&self) -> impl Iterator<Item = (&str, i32, &[f64])> {
        self.entities.iter().enumerate().filter_map(|(i, e)| match e {
            Entity::TaskYear { category, year } => Some((category.as_str(), *year, self.row(i))),
            _ => None,
        })
    }
}

impl From<&EmbeddingModel> for EntitySpace {
    fn from(model: &EmbeddingModel) -> Self {
        Self {
            entities: model.catalog().entities().to_vec(),
            dim: model.dim(),
            rows: model.entity_matrix().iter().map(|&x| x as f64).collect(),
        }
    }
}

/// `1 - a·b / (|a| |b|)`, in `[0, 2]`.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len()));
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(MetricsError::ZeroVector);
    }
    let cos = (dot / (na * nb).sqrt()).clamp(-1.0, 1.0);
    Ok(1.0 - cos)
}

fn snap(x: f64) -> f64 {
    (x / REPORT_GRID).round() * REPORT_GRID
}

fn mean_of<'a>(
    rows: impl Iterator<Item = &'a [f64]>,
    dim: usize,
    opts: MetricsOptions,
) -> Result<Option<Vec<f64>>, MetricsError> {
    let mut acc = vec![0.0; dim];
    let mut count = 0usize;
    for row in rows {
        let scale = if opts.normalize_before_mean {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(MetricsError::ZeroVector);
            }
            1.0 / norm
        } else {
            1.0
        };
        for (a, &x) in acc.iter_mut().zip(row) {
            *a += x * scale;
        }
        count += 1;
    }
    if count == 0 {
        return Ok(None);
    }
    acc.iter_mut().for_each(|a| *a /= count as f64);
    Ok(Some(acc))
}

/// Arithmetic mean of all language rows.
pub fn mean_language_vector(
    space: &EntitySpace,
    opts: MetricsOptions,
) -> Result<Vec<f64>, MetricsError> {
    mean_of(space.language_rows().map(|(_, r)| r), space.dim, opts)?
        .ok_or(MetricsError::NoLanguages)
}

/// Per category, the mean of its task-year rows over all years present.
pub fn mean_task_vectors(
    space: &EntitySpace,
    opts: MetricsOptions,
) -> Result<BTreeMap<String, Vec<f64>>, MetricsError> {
    let mut by_category: BTreeMap<&str, Vec<&[f64]>> = BTreeMap::new();
    for (category, _, row) in space.task_rows() {
        by_category.entry(category).or_default().push(row);
    }
    by_category
        .into_iter()
        .map(|(category, rows)| {
            let mean = mean_of(rows.into_iter(), space.dim, opts)?.expect("non-empty group");
            Ok((category.to_string(), mean))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Inclusivity,
    PreferenceRank,
    PreferenceDistance,
    Distribution,
}

/// Labeled matrix of analysis results. Missing cells are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisTable {
    pub kind: TableKind,
    /// Header of the label column, e.g. `"category"`.
    pub row_header: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    values: Vec<Option<f64>>,
}

impl AnalysisTable {
    pub fn new(
        kind: TableKind,
        row_header: impl Into<String>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        values: Vec<Option<f64>>,
    ) -> Self {
        assert_eq!(values.len(), row_labels.len() * col_labels.len());
        Self {
            kind,
            row_header: row_header.into(),
            row_labels,
            col_labels,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row * self.cols() + col]
    }

    /// Cell lookup by labels.
    pub fn lookup(&self, row: &str, col: &str) -> Option<f64> {
        let r = self.row_labels.iter().position(|l| l == row)?;
        let c = self.col_labels.iter().position(|l| l == col)?;
        self.get(r, c)
    }

    pub fn row_values(&self, row: usize) -> &[Option<f64>] {
        &self.values[row * self.cols()..(row + 1) * self.cols()]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// Checks the value-range invariant for the table's kind.
    pub fn validate(&self) -> Result<(), String> {
        match self.kind {
            TableKind::PreferenceRank => {
                let c = self.cols();
                for (r, label) in self.row_labels.iter().enumerate() {
                    let mut ranks: Vec<f64> = self.row_values(r).iter().flatten().copied().collect();
                    ranks.sort_by(f64::total_cmp);
                    let expect: Vec<f64> = (1..=c).map(|k| k as f64).collect();
                    if ranks != expect {
                        return Err(format!("rank row {label} is not a permutation of 1..{c}"));
                    }
                }
                Ok(())
            }
            kind => {
                let hi = if kind == TableKind::Distribution { 1.0 } else { 2.0 };
                match self.values.iter().flatten().find(|v| !(0.0..=hi).contains(*v)) {
                    Some(v) => Err(format!("{kind:?} value {v} outside [0, {hi}]")),
                    None => Ok(()),
                }
            }
        }
    }

    /// CSV with a header row, the label column first, LF line endings.
    /// Ranks are written as integers, everything else with six significant
    /// digits; missing cells are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_field(&self.row_header));
        for c in &self.col_labels {
            out.push(',');
            out.push_str(&csv_field(c));
        }
        out.push('\n');
        for (r, label) in self.row_labels.iter().enumerate() {
            out.push_str(&csv_field(label));
            for v in self.row_values(r) {
                out.push(',');
                if let Some(v) = v {
                    if self.kind == TableKind::PreferenceRank {
                        write!(out, "{}", *v as i64).unwrap();
                    } else {
                        out.push_str(&format_sig(*v, 6));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Plain decimal notation with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Rows are categories, columns years; cell = cosine distance between the
/// mean language vector and the task-year vector, missing where the
/// task-year is not in the model.
pub fn language_inclusivity(
    space: &EntitySpace,
    opts: MetricsOptions,
) -> Result<AnalysisTable, MetricsError> {
    let mean = mean_language_vector(space, opts)?;
    let cells: BTreeMap<(&str, i32), &[f64]> =
        space.task_rows().map(|(c, y, r)| ((c, y), r)).collect();
    if cells.is_empty() {
        return Err(MetricsError::NoTaskYears);
    }
    let categories: BTreeSet<&str> = cells.keys().map(|k| k.0).collect();
    let years: BTreeSet<i32> = cells.keys().map(|k| k.1).collect();
    let mut values = Vec::with_capacity(categories.len() * years.len());
    for &c in &categories {
        for &y in &years {
            values.push(match cells.get(&(c, y)) {
                Some(row) => Some(snap(cosine_distance(&mean, row)?)),
                None => None,
            });
        }
    }
    Ok(AnalysisTable::new(
        TableKind::Inclusivity,
        "category",
        categories.iter().map(|s| s.to_string()).collect(),
        years.iter().map(|y| y.to_string()).collect(),
        values,
    ))
}

/// Ranks within each row of `distances`: ascending distance, ties broken
/// by column label.
fn rank_rows(distances: &AnalysisTable) -> AnalysisTable {
    let cols = distances.cols();
    let mut values = vec![None; distances.values.len()];
    for r in 0..distances.rows() {
        let row = distances.row_values(r);
        let mut order: Vec<usize> = (0..cols).collect();
        order.sort_by(|&a, &b| {
            let da = row[a].unwrap_or(f64::INFINITY);
            let db = row[b].unwrap_or(f64::INFINITY);
            da.total_cmp(&db)
                .then_with(|| distances.col_labels[a].cmp(&distances.col_labels[b]))
        });
        for (rank, col) in order.into_iter().enumerate() {
            values[r * cols + col] = Some((rank + 1) as f64);
        }
    }
    AnalysisTable {
        kind: TableKind::PreferenceRank,
        row_header: distances.row_header.clone(),
        row_labels: distances.row_labels.clone(),
        col_labels: distances.col_labels.clone(),
        values,
    }
}

/// Returns `(distances, ranks)`; rows are languages, columns categories.
pub fn task_preference(
    space: &EntitySpace,
    opts: MetricsOptions,
) -> Result<(AnalysisTable, AnalysisTable), MetricsError> {
    let tasks = mean_task_vectors(space, opts)?;
    if tasks.is_empty() {
        return Err(MetricsError::NoTaskYears);
    }
    let languages: Vec<(&str, &[f64])> = space.language_rows().collect();
    if languages.is_empty() {
        return Err(MetricsError::NoLanguages);
    }
    let mut values = Vec::with_capacity(languages.len() * tasks.len());
    for (_, lang) in &languages {
        for task in tasks.values() {
            values.push(Some(snap(cosine_distance(lang, task)?)));
        }
    }
    let distances = AnalysisTable::new(
        TableKind::PreferenceDistance,
        "language",
        languages.iter().map(|(l, _)| l.to_string()).collect(),
        tasks.keys().cloned().collect(),
        values,
    );
    let ranks = rank_rows(&distances);
    Ok((distances, ranks))
}

/// Share of each category's articles translated into each language, using
/// the latest snapshot of every article id. Rows are all languages seen in
/// the corpus, columns the categories with at least one article.
pub fn task_language_distribution(corpus: &[DocumentRecord]) -> Result<AnalysisTable, MetricsError> {
    let languages: BTreeSet<&str> = corpus
        .iter()
        .flat_map(|r| r.languages.iter().map(String::as_str))
        .collect();
    distribution_rows(corpus, languages)
}

/// As [`task_language_distribution`], with one row per listed language
/// whether or not it occurs.
pub fn task_language_distribution_for(
    corpus: &[DocumentRecord],
    languages: &[String],
) -> Result<AnalysisTable, MetricsError> {
    let mut rows: BTreeSet<&str> = languages.iter().map(String::as_str).collect();
    rows.extend(corpus.iter().flat_map(|r| r.languages.iter().map(String::as_str)));
    distribution_rows(corpus, rows)
}

fn distribution_rows(
    corpus: &[DocumentRecord],
    languages: BTreeSet<&str>,
) -> Result<AnalysisTable, MetricsError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let mut latest: HashMap<&str, &DocumentRecord> = HashMap::new();
    for rec in corpus {
        latest
            .entry(rec.id.as_str())
            .and_modify(|cur| {
                if rec.year > cur.year {
                    *cur = rec;
                }
            })
            .or_insert(rec);
    }
    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    let mut hits: HashMap<(&str, &str), usize> = HashMap::new();
    for rec in latest.values() {
        *totals.entry(rec.task_category.as_str()).or_default() += 1;
        for lang in &rec.languages {
            *hits.entry((lang.as_str(), rec.task_category.as_str())).or_default() += 1;
        }
    }
    let mut values = Vec::with_capacity(languages.len() * totals.len());
    for &lang in &languages {
        for (&cat, &total) in &totals {
            let n = hits.get(&(lang, cat)).copied().unwrap_or(0);
            values.push(Some(n as f64 / total as f64));
        }
    }
    Ok(AnalysisTable::new(
        TableKind::Distribution,
        "language",
        languages.iter().map(|s| s.to_string()).collect(),
        totals.keys().map(|s| s.to_string()).collect(),
        values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(entries: &[(&str, &[f64])]) -> EntitySpace {
        let dim = entries[0].1.len();
        let mut pairs: Vec<(Entity, Vec<f64>)> = entries
            .iter()
            .map(|(n, r)| (Entity::parse(n).unwrap(), r.to_vec()))
            .collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let rows = pairs.iter().flat_map(|p| p.1.clone()).collect();
        EntitySpace::new(pairs.into_iter().map(|p| p.0).collect(), dim, rows).unwrap()
    }

    const OPTS: MetricsOptions = MetricsOptions {
        normalize_before_mean: false,
    };

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(cosine_distance(&[0.3, -1.7, 2.0], &[0.3, -1.7, 2.0]).unwrap(), 0.0);
        let d = cosine_distance(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((d - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-15);
        assert!((d - 0.29289).abs() < 1e-5);
        assert_eq!(cosine_distance(&[1.0, 0.0], &[-2.0, 0.0]).unwrap(), 2.0);
        assert_eq!(
            cosine_distance(&[0.0, 0.0], &[1.0, 0.0]),
            Err(MetricsError::ZeroVector)
        );
    }

    #[test]
    fn mean_language_examples() {
        let s = space(&[("spa", &[1.0, 0.0]), ("jpn", &[0.0, 1.0]), ("food_2018", &[1.0, 1.0])]);
        assert_eq!(mean_language_vector(&s, OPTS).unwrap(), vec![0.5, 0.5]);
        let single = space(&[("spa", &[0.25, -3.0]), ("food_2018", &[1.0, 1.0])]);
        assert_eq!(mean_language_vector(&single, OPTS).unwrap(), vec![0.25, -3.0]);
        let none = space(&[("food_2018", &[1.0, 1.0])]);
        assert_eq!(mean_language_vector(&none, OPTS), Err(MetricsError::NoLanguages));
    }

    #[test]
    fn opposite_languages_surface_zero_vector() {
        let s = space(&[("spa", &[1.0, 2.0]), ("jpn", &[-1.0, -2.0]), ("food_2018", &[1.0, 1.0])]);
        assert_eq!(mean_language_vector(&s, OPTS).unwrap(), vec![0.0, 0.0]);
        assert_eq!(language_inclusivity(&s, OPTS), Err(MetricsError::ZeroVector));
    }

    #[test]
    fn normalized_mean_differs_from_raw() {
        let s = space(&[("spa", &[10.0, 0.0]), ("jpn", &[0.0, 1.0]), ("food_2018", &[1.0, 1.0])]);
        let raw = mean_language_vector(&s, OPTS).unwrap();
        let unit = mean_language_vector(&s, MetricsOptions { normalize_before_mean: true }).unwrap();
        assert_eq!(raw, vec![5.0, 0.5]);
        assert_eq!(unit, vec![0.5, 0.5]);
    }

    #[test]
    fn inclusivity_cells() {
        let s = space(&[
            ("spa", &[1.0, 0.0]),
            ("jpn", &[0.0, 1.0]),
            ("food_2018", &[1.0, 1.0]),
            ("food_2019", &[1.0, -1.0]),
            ("arts_2019", &[2.0, 2.0]),
        ]);
        let t = language_inclusivity(&s, OPTS).unwrap();
        assert_eq!(t.row_labels, ["arts", "food"]);
        assert_eq!(t.col_labels, ["2018", "2019"]);
        assert_eq!(t.lookup("food", "2018"), Some(0.0));
        assert_eq!(t.lookup("food", "2019"), Some(1.0));
        assert_eq!(t.lookup("arts", "2019"), Some(0.0));
        assert_eq!(t.lookup("arts", "2018"), None);
        t.validate().unwrap();
        assert_eq!(t.to_csv(), "category,2018,2019\narts,,0\nfood,0,1.00000\n");
    }

    #[test]
    fn mean_task_vector_examples() {
        let s = space(&[
            ("spa", &[1.0, 0.0]),
            ("food_2018", &[1.0, 0.0]),
            ("food_2019", &[0.0, 1.0]),
            ("arts_2020", &[0.3, 0.7]),
        ]);
        let m = mean_task_vectors(&s, OPTS).unwrap();
        assert_eq!(m["food"], vec![0.5, 0.5]);
        assert_eq!(m["arts"], vec![0.3, 0.7]);
        let empty = EntitySpace::new(vec![], 2, vec![]).unwrap();
        assert!(mean_task_vectors(&empty, OPTS).unwrap().is_empty());
    }

    #[test]
    fn ranks_ascend_with_distance_and_break_ties_by_name() {
        let d = AnalysisTable::new(
            TableKind::PreferenceDistance,
            "language",
            vec!["spa".into(), "jpn".into()],
            vec!["arts".into(), "food".into()],
            vec![Some(0.2), Some(0.5), Some(0.3), Some(0.3)],
        );
        let r = rank_rows(&d);
        assert_eq!(r.lookup("spa", "arts"), Some(1.0));
        assert_eq!(r.lookup("spa", "food"), Some(2.0));
        assert_eq!(r.lookup("jpn", "arts"), Some(1.0));
        assert_eq!(r.lookup("jpn", "food"), Some(2.0));
        r.validate().unwrap();
        assert_eq!(r.to_csv(), "language,arts,food\nspa,1,2\njpn,1,2\n");
    }

    #[test]
    fn preference_tables() {
        let s = space(&[
            ("spa", &[1.0, 0.1]),
            ("jpn", &[0.1, 1.0]),
            ("food_2018", &[1.0, 0.0]),
            ("food_2019", &[1.0, 0.2]),
            ("computers_2019", &[0.0, 1.0]),
        ]);
        let (dist, rank) = task_preference(&s, OPTS).unwrap();
        assert_eq!(dist.row_labels, ["jpn", "spa"]);
        assert_eq!(dist.col_labels, ["computers", "food"]);
        assert_eq!(rank.lookup("spa", "food"), Some(1.0));
        assert_eq!(rank.lookup("jpn", "computers"), Some(1.0));
        let expect = cosine_distance(&[1.0, 0.1], &[1.0, 0.1]).unwrap();
        assert!((dist.lookup("spa", "food").unwrap() - expect).abs() < 1e-9);
        dist.validate().unwrap();
        rank.validate().unwrap();
    }

    fn rec(id: &str, cat: &str, year: i32, langs: &[&str]) -> DocumentRecord {
        DocumentRecord {
            id: id.into(),
            task_category: cat.into(),
            year,
            languages: langs.iter().map(|s| s.to_string()).collect(),
            tokens: vec!["x".into()],
        }
    }

    #[test]
    fn distribution_examples() {
        let t = task_language_distribution(&[
            rec("a", "food", 2018, &["spa"]),
            rec("b", "food", 2018, &[]),
            rec("c", "arts", 2018, &["spa", "jpn"]),
        ])
        .unwrap();
        assert_eq!(t.lookup("spa", "food"), Some(0.5));
        assert_eq!(t.lookup("jpn", "food"), Some(0.0));
        assert_eq!(t.lookup("jpn", "arts"), Some(1.0));
        assert_eq!(t.lookup("spa", "arts"), Some(1.0));
        t.validate().unwrap();
    }

    #[test]
    fn distribution_uses_latest_snapshot() {
        let t = task_language_distribution(&[
            rec("a", "food", 2019, &["spa", "jpn"]),
            rec("a", "food", 2017, &[]),
            rec("b", "food", 2016, &["jpn"]),
            rec("b", "food", 2018, &[]),
        ])
        .unwrap();
        assert_eq!(t.lookup("spa", "food"), Some(0.5));
        assert_eq!(t.lookup("jpn", "food"), Some(0.5));
    }

    #[test]
    fn distribution_empty_corpus() {
        assert_eq!(task_language_distribution(&[]), Err(MetricsError::EmptyCorpus));
    }

    #[test]
    fn sig_digit_formatting() {
        assert_eq!(format_sig(0.292893218, 6), "0.292893");
        assert_eq!(format_sig(1.0, 6), "1.00000");
        assert_eq!(format_sig(0.05, 6), "0.0500000");
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(123.456789, 6), "123.457");
    }

    #[test]
    fn snapping_stays_within_tolerance() {
        for x in [0.0, 1e-12, 0.123456789123, 1.0, 1.999999999999] {
            assert!((snap(x) - x).abs() <= REPORT_GRID / 2.0);
        }
    }
}
