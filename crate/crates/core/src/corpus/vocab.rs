use std::collections::HashMap;

use super::sampler::AliasTable;
use super::{CorpusError, DocumentRecord};

/// Exponent applied to unigram counts for the negative-sampling distribution.
pub const NEG_POWER: f64 = 0.75;

/// Keep-probability for a word of relative frequency `freq` under
/// threshold `t`: `min(1, (sqrt(f/t) + 1) * t/f)`.
///
/// An infinite `t` disables subsampling (always 1).
pub fn subsample_keep_prob(freq: f64, t: f64) -> Result<f64, CorpusError> {
    if !(freq > 0.0 && freq <= 1.0) {
        return Err(CorpusError::Config(format!(
            "word frequency must be in (0, 1], got {freq}"
        )));
    }
    if !(t > 0.0) {
        return Err(CorpusError::Config(format!(
            "subsample threshold must be positive, got {t}"
        )));
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    Ok((((freq / t).sqrt() + 1.0) * (t / freq)).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    counts: Vec<u64>,
    total_tokens: u64,
    subsample_threshold: f64,
    keep_probs: Vec<f64>,
    neg_table: AliasTable,
}

impl Vocabulary {
    /// Builds a vocabulary from `(word, count)` pairs that already satisfy
    /// the retention rule. Order is normalized to descending count, ties
    /// lexicographic.
    pub fn from_counts(
        mut entries: Vec<(String, u64)>,
        t: f64,
    ) -> Result<Self, CorpusError> {
        if !(t > 0.0) {
            return Err(CorpusError::Config(format!(
                "subsample threshold must be positive, got {t}"
            )));
        }
        if entries.is_empty() {
            return Err(CorpusError::EmptyVocabulary);
        }
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let total_tokens: u64 = entries.iter().map(|(_, c)| c).sum();
        let counts: Vec<u64> = entries.iter().map(|(_, c)| *c).collect();
        let keep_probs = counts
            .iter()
            .map(|&c| subsample_keep_prob(c as f64 / total_tokens as f64, t))
            .collect::<Result<Vec<_>, _>>()?;
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(NEG_POWER)).collect();
        let neg_table = AliasTable::new(&weights).ok_or(CorpusError::EmptyVocabulary)?;
        let words: Vec<String> = entries.into_iter().map(|(w, _)| w).collect();
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Ok(Self {
            words,
            index,
            counts,
            total_tokens,
            subsample_threshold: t,
            keep_probs,
            neg_table,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, idx: usize) -> &str {
        &self.words[idx]
    }

    pub fn index_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.index_of(word).map(|i| self.counts[i as usize])
    }

    /// Token count over retained words.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn subsample_threshold(&self) -> f64 {
        self.subsample_threshold
    }

    pub fn keep_prob(&self, idx: usize) -> f64 {
        self.keep_probs[idx]
    }

    /// Unigram^0.75 sampler over word indices.
    pub fn neg_table(&self) -> &AliasTable {
        &self.neg_table
    }

    /// Maps tokens to word indices, dropping out-of-vocabulary tokens.
    pub fn lookup<'a, I>(&'a self, tokens: I) -> impl Iterator<Item = u32> + 'a
    where
        I: IntoIterator<Item = &'a String> + 'a,
    {
        tokens.into_iter().filter_map(|t| self.index_of(t))
    }
}

/// Counts every token in the corpus and keeps words seen at least
/// `min_count` times.
pub fn build_vocabulary(
    corpus: &[DocumentRecord],
    min_count: u64,
    t: f64,
) -> Result<Vocabulary, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    if min_count < 1 {
        return Err(CorpusError::Config("min_count must be at least 1".into()));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for token in corpus.iter().flat_map(|r| &r.tokens) {
        *counts.entry(token.as_str()).or_default() += 1;
    }
    let entries = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(w, c)| (w.to_string(), c))
        .collect();
    Vocabulary::from_counts(entries, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn corpus(tokens: &[&str]) -> Vec<DocumentRecord> {
        vec![DocumentRecord {
            id: "d".into(),
            task_category: "food".into(),
            year: 2018,
            languages: Default::default(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
        }]
    }

    #[test]
    fn min_count_filters() {
        let v = build_vocabulary(&corpus(&["a", "b", "a", "a"]), 2, 1e-3).unwrap();
        assert_eq!(v.words(), ["a"]);
        assert_eq!(v.count("a"), Some(3));
        assert_eq!(v.total_tokens(), 3);
    }

    #[test]
    fn min_count_one_keeps_everything() {
        let v = build_vocabulary(&corpus(&["x", "y", "z", "x", "w"]), 1, 1e-3).unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn ordering_by_count_then_lexicographic() {
        let v = build_vocabulary(&corpus(&["c", "b", "a", "b", "d", "d"]), 1, 1e-3).unwrap();
        assert_eq!(v.words(), ["b", "d", "a", "c"]);
        assert_eq!(v.index_of("a"), Some(2));
    }

    #[test]
    fn neg_table_probabilities() {
        let v = Vocabulary::from_counts(
            vec![("a".into(), 2), ("b".into(), 1), ("c".into(), 1)],
            1e-3,
        )
        .unwrap();
        // 2^0.75 / (2^0.75 + 2) and 1 / (2^0.75 + 2)
        let p = v.neg_table().target_probabilities();
        assert!(close(p[0], 0.456786, 1e-6));
        assert!(close(p[1], 0.271607, 1e-6));
        assert!(close(p[2], 0.271607, 1e-6));
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(
            build_vocabulary(&[], 1, 1e-3),
            Err(CorpusError::EmptyCorpus)
        ));
        assert!(matches!(
            build_vocabulary(&corpus(&["a"]), 5, 1e-3),
            Err(CorpusError::EmptyVocabulary)
        ));
    }

    #[test]
    fn deterministic() {
        let c = corpus(&["q", "r", "q", "s", "t", "t", "q"]);
        assert_eq!(
            build_vocabulary(&c, 1, 1e-3).unwrap(),
            build_vocabulary(&c, 1, 1e-3).unwrap()
        );
    }

    #[test]
    fn keep_prob_values() {
        assert!(close(subsample_keep_prob(0.01, 0.001).unwrap(), 0.41623, 1e-5));
        assert_eq!(subsample_keep_prob(0.001, 0.001).unwrap(), 1.0);
        assert!(close(subsample_keep_prob(1.0, 0.001).unwrap(), 0.03262, 1e-5));
        assert_eq!(subsample_keep_prob(0.5, f64::INFINITY).unwrap(), 1.0);
        assert!(subsample_keep_prob(0.0, 0.001).is_err());
        assert!(subsample_keep_prob(-0.1, 0.001).is_err());
    }

    #[test]
    fn keep_prob_monotone_above_threshold() {
        let t = 1e-3;
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let f = t + (1.0 - t) * i as f64 / 999.0;
            let p = subsample_keep_prob(f, t).unwrap();
            assert!(p <= prev);
            prev = p;
        }
    }

    #[test]
    fn sampler_fidelity_small_vocab() {
        let v = Vocabulary::from_counts(
            vec![("a".into(), 50), ("b".into(), 30), ("c".into(), 15), ("d".into(), 5)],
            1e-3,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = [0u32; 4];
        for _ in 0..100_000 {
            hits[v.neg_table().sample(&mut rng)] += 1;
        }
        let l1: f64 = hits
            .iter()
            .zip(v.neg_table().target_probabilities())
            .map(|(h, p)| (*h as f64 / 1e5 - p).abs())
            .sum();
        assert!(l1 < 0.01, "l1 = {l1}");
    }
}
