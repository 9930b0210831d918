use rand::Rng;

use super::{DocumentRecord, EntityCatalog, Vocabulary};

/// One `(entity, word)` training example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainingPair {
    pub entity: u32,
    pub word: u32,
    /// Position of this pair within the record's full entity x in-vocab-token
    /// grid, counting slots removed by subsampling. Used by the trainer's
    /// learning-rate schedule.
    pub slot: u64,
}

/// Draws the subsampling decision for each in-vocabulary token.
///
/// Returns `(position, word)` for the survivors, where `position` indexes the
/// in-vocabulary token list. Words whose keep-probability is 1 never consume
/// randomness.
pub(crate) fn surviving_tokens<R: Rng + ?Sized>(
    words: &[u32],
    vocab: &Vocabulary,
    rng: &mut R,
) -> Vec<(u32, u32)> {
    words
        .iter()
        .enumerate()
        .filter(|&(_, &w)| {
            let keep = vocab.keep_prob(w as usize);
            keep >= 1.0 || rng.random::<f64>() < keep
        })
        .map(|(pos, &w)| (pos as u32, w))
        .collect()
}

/// Expands a record into training pairs: every entity of the record paired
/// with every token that is in the vocabulary and survives subsampling.
///
/// Pairs are grouped by entity (task-year first, then languages in
/// lexicographic order). Tokens missing from the vocabulary, and entities
/// missing from the catalog, are skipped.
pub fn pair_stream<R: Rng + ?Sized>(
    record: &DocumentRecord,
    vocab: &Vocabulary,
    catalog: &EntityCatalog,
    rng: &mut R,
) -> Vec<TrainingPair> {
    let words: Vec<u32> = vocab.lookup(&record.tokens).collect();
    let entities: Vec<u32> = record
        .entities()
        .filter_map(|e| catalog.index_of(&e))
        .map(|i| i as u32)
        .collect();
    expand_pairs(&entities, &words, vocab, rng)
}

/// Pair expansion over pre-resolved entity and word indices.
pub(crate) fn expand_pairs<R: Rng + ?Sized>(
    entities: &[u32],
    words: &[u32],
    vocab: &Vocabulary,
    rng: &mut R,
) -> Vec<TrainingPair> {
    let survivors = surviving_tokens(words, vocab, rng);
    let width = words.len() as u64;
    let mut pairs = Vec::with_capacity(entities.len() * survivors.len());
    for (row, &entity) in entities.iter().enumerate() {
        pairs.extend(survivors.iter().map(|&(pos, word)| TrainingPair {
            entity,
            word,
            slot: row as u64 * width + pos as u64,
        }));
    }
    pairs
}
