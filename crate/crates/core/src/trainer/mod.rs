//! Entity-embedding trainer.
//!
//! The network has one hidden layer: an entity (a language or a task-year)
//! selects a row of the `E x N` entity matrix, and the `N x V` output matrix
//! scores every vocabulary word. Each `(entity, word)` pair drawn from an
//! article asks the entity to predict that article word.
//!
//! Two objectives are available. [`TrainMode::NegativeSampling`] is the
//! production objective: logistic loss on the true word against `k` words
//! drawn from the unigram^0.75 table. [`TrainMode::ExactSoftmax`] uses the
//! full-vocabulary softmax and is only practical for tiny vocabularies; it
//! serves as an oracle for the sampled objective.
//!
//! With `threads = 1` training is sequential and bit-reproducible for a given
//! seed. With more threads, workers update the shared matrices without locks
//! and the result depends on scheduling.

pub mod io;
mod loss;
mod model;

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{expand_pairs, DocumentRecord, EntityCatalog, TrainingPair, Vocabulary};

pub use loss::{pair_loss_ns, sigmoid, softmax_into, softmax_nll, NsLoss, LOG_FLOOR};
pub use model::{init_model, EmbeddingModel};

/// Attempts per negative before the pair is skipped.
pub const MAX_NEGATIVE_ATTEMPTS: usize = 100;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("empty catalog or vocabulary")]
    EmptyInput,
    #[error("no trainable tokens")]
    NoTrainableTokens,
    #[error("non-finite loss in epoch {epoch} at record {record}")]
    NonFinite { epoch: usize, record: String },
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    NegativeSampling,
    ExactSoftmax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub lr0: f64,
    pub lr_min: f64,
    pub seed: u64,
    pub mode: TrainMode,
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 100,
            epochs: 5,
            negatives: 5,
            lr0: 0.025,
            lr_min: 1e-4,
            seed: 42,
            mode: TrainMode::NegativeSampling,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let fail = |msg: String| Err(TrainError::Config(msg));
        if self.dim < 2 {
            return fail(format!("dim must be at least 2, got {}", self.dim));
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1".into());
        }
        if self.mode == TrainMode::NegativeSampling && self.negatives < 1 {
            return fail("negatives must be at least 1".into());
        }
        if !(self.lr_min > 0.0 && self.lr0 > self.lr_min && self.lr0.is_finite()) {
            return fail(format!(
                "need lr0 > lr_min > 0, got lr0={} lr_min={}",
                self.lr0, self.lr_min
            ));
        }
        if self.threads < 1 {
            return fail("threads must be at least 1".into());
        }
        Ok(())
    }

    /// `max(lr_min, lr0 * (1 - slot/total))`.
    pub fn learning_rate(&self, slot: u64, total: u64) -> f64 {
        (self.lr0 * (1.0 - slot as f64 / total as f64)).max(self.lr_min)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Negative sampling: mean pair loss seen during each epoch.
    /// Exact softmax: total corpus loss evaluated after each epoch.
    pub epoch_losses: Vec<f64>,
    pub pairs_trained: u64,
    /// Pairs dropped because no valid negative could be drawn.
    pub pairs_skipped: u64,
    /// Length of the learning-rate schedule (entity x in-vocab token slots
    /// over all epochs, before subsampling).
    pub scheduled_pairs: u64,
}

impl TrainReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.epoch_losses.last().copied()
    }
}

/// Observer called with `(slot, learning_rate)` before every update.
pub type LrHook<'a> = &'a (dyn Fn(u64, f64) + Sync);

struct Prepared<'a> {
    id: &'a str,
    entities: Vec<u32>,
    words: Vec<u32>,
}

impl Prepared<'_> {
    fn slots(&self) -> u64 {
        (self.entities.len() * self.words.len()) as u64
    }
}

fn prepare<'a>(
    corpus: &'a [DocumentRecord],
    vocab: &Vocabulary,
    catalog: &EntityCatalog,
) -> Vec<Prepared<'a>> {
    corpus
        .iter()
        .map(|r| Prepared {
            id: &r.id,
            entities: r
                .entities()
                .filter_map(|e| catalog.index_of(&e))
                .map(|i| i as u32)
                .collect(),
            words: vocab.lookup(&r.tokens).collect(),
        })
        .collect()
}

/// Word indices of `record`'s in-vocabulary tokens.
pub fn record_word_indices(record: &DocumentRecord, vocab: &Vocabulary) -> Vec<u32> {
    vocab.lookup(&record.tokens).collect()
}

pub fn train(
    corpus: &[DocumentRecord],
    vocab: &Vocabulary,
    catalog: &EntityCatalog,
    config: &TrainConfig,
) -> Result<(EmbeddingModel, TrainReport), TrainError> {
    train_with_hook(corpus, vocab, catalog, config, None)
}

pub fn train_with_hook(
    corpus: &[DocumentRecord],
    vocab: &Vocabulary,
    catalog: &EntityCatalog,
    config: &TrainConfig,
    hook: Option<LrHook<'_>>,
) -> Result<(EmbeddingModel, TrainReport), TrainError> {
    let mut model = init_model(catalog, vocab, config)?;
    let prepared = prepare(corpus, vocab, catalog);
    let per_epoch: u64 = prepared.iter().map(Prepared::slots).sum();
    if per_epoch == 0 {
        return Err(TrainError::NoTrainableTokens);
    }
    let mut report = TrainReport {
        scheduled_pairs: per_epoch * config.epochs as u64,
        ..TrainReport::default()
    };
    match config.mode {
        TrainMode::NegativeSampling => {
            train_ns(&mut model, &prepared, vocab, config, hook, &mut report)?
        }
        TrainMode::ExactSoftmax => {
            if config.threads > 1 {
                log::warn!("exact softmax mode trains single-threaded");
            }
            train_softmax(&mut model, &prepared, config, hook, &mut report)?
        }
    }
    debug_assert!(model.is_finite());
    Ok((model, report))
}

fn epoch_order(n: usize, seed: u64, epoch: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX - epoch as u64);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    order
}

fn worker_rng(seed: u64, epoch: usize, threads: usize, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 + (epoch * threads + worker) as u64);
    rng
}

/// Matrix shared between workers. Updates are relaxed load/store pairs, so
/// concurrent writers may overwrite each other's contributions.
struct SharedMatrix {
    data: Vec<AtomicU32>,
    dim: usize,
}

impl SharedMatrix {
    fn new(values: &[f32], dim: usize) -> Self {
        Self {
            data: values.iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
            dim,
        }
    }

    fn into_vec(self) -> Vec<f32> {
        self.data
            .into_iter()
            .map(|a| f32::from_bits(a.into_inner()))
            .collect()
    }

    fn read_row(&self, row: u32, out: &mut [f32]) {
        let start = row as usize * self.dim;
        for (o, a) in out.iter_mut().zip(&self.data[start..start + self.dim]) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    /// `row += scale * x`
    fn add_row(&self, row: u32, scale: f32, x: &[f32]) {
        let start = row as usize * self.dim;
        for (a, &xi) in self.data[start..start + self.dim].iter().zip(x) {
            let cur = f32::from_bits(a.load(Ordering::Relaxed));
            a.store((cur + scale * xi).to_bits(), Ordering::Relaxed);
        }
    }
}

struct NsScratch {
    entity: Vec<f32>,
    outputs: Vec<f32>,
    grads: Vec<f32>,
    targets: Vec<u32>,
    accum: Vec<f32>,
}

impl NsScratch {
    fn new(dim: usize, negatives: usize) -> Self {
        Self {
            entity: vec![0.0; dim],
            outputs: vec![0.0; dim * (negatives + 1)],
            grads: Vec::with_capacity(negatives + 1),
            targets: Vec::with_capacity(negatives + 1),
            accum: vec![0.0; dim],
        }
    }
}

struct NsContext<'a> {
    entities: &'a SharedMatrix,
    words: &'a SharedMatrix,
    vocab: &'a Vocabulary,
    negatives: usize,
    dim: usize,
}

impl NsContext<'_> {
    /// One SGD step on the negative-sampling loss of `pair`. Returns the
    /// pair's loss before the update, or `None` when the pair was skipped.
    fn step(&self, pair: TrainingPair, lr: f32, rng: &mut ChaCha8Rng, s: &mut NsScratch) -> Option<f64> {
        let table = self.vocab.neg_table();
        s.targets.clear();
        s.targets.push(pair.word);
        for _ in 0..self.negatives {
            let draw = (0..MAX_NEGATIVE_ATTEMPTS)
                .map(|_| table.sample(rng) as u32)
                .find(|&w| w != pair.word)?;
            s.targets.push(draw);
        }

        let dim = self.dim;
        self.entities.read_row(pair.entity, &mut s.entity);
        s.grads.clear();
        let mut loss = 0.0f64;
        for (i, &t) in s.targets.iter().enumerate() {
            let u = &mut s.outputs[i * dim..(i + 1) * dim];
            self.words.read_row(t, u);
            let score: f32 = s.entity.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
            let score = score as f64;
            if !score.is_finite() {
                // the log floor would otherwise mask a diverged row
                loss = f64::NAN;
            }
            let (label, p) = if i == 0 {
                (1.0, sigmoid(score))
            } else {
                (0.0, sigmoid(-score))
            };
            loss -= p.max(LOG_FLOOR).ln();
            // negative gradient of the loss with respect to the score
            s.grads.push((label - sigmoid(score)) as f32);
        }

        s.accum.iter_mut().for_each(|a| *a = 0.0);
        for (i, &g) in s.grads.iter().enumerate() {
            let u = &s.outputs[i * dim..(i + 1) * dim];
            for (a, &ui) in s.accum.iter_mut().zip(u) {
                *a += g * ui;
            }
        }
        for (&t, &g) in s.targets.iter().zip(&s.grads) {
            self.words.add_row(t, lr * g, &s.entity);
        }
        self.entities.add_row(pair.entity, lr, &s.accum);
        Some(loss)
    }
}

#[derive(Default)]
struct WorkerTotals {
    loss: f64,
    trained: u64,
    skipped: u64,
}

#[allow(clippy::too_many_arguments)]
fn ns_worker(
    ctx: &NsContext<'_>,
    records: &[Prepared<'_>],
    order: &[usize],
    config: &TrainConfig,
    total: u64,
    progress: &AtomicU64,
    mut rng: ChaCha8Rng,
    epoch: usize,
    hook: Option<LrHook<'_>>,
) -> Result<WorkerTotals, TrainError> {
    let mut scratch = NsScratch::new(ctx.dim, ctx.negatives);
    let mut totals = WorkerTotals::default();
    for &idx in order {
        let rec = &records[idx];
        let base = progress.fetch_add(rec.slots(), Ordering::Relaxed);
        for pair in expand_pairs(&rec.entities, &rec.words, ctx.vocab, &mut rng) {
            let slot = base + pair.slot;
            let lr = config.learning_rate(slot, total);
            if let Some(h) = hook {
                h(slot, lr);
            }
            match ctx.step(pair, lr as f32, &mut rng, &mut scratch) {
                Some(loss) if loss.is_finite() => {
                    totals.loss += loss;
                    totals.trained += 1;
                }
                Some(_) => {
                    return Err(TrainError::NonFinite {
                        epoch,
                        record: rec.id.to_string(),
                    })
                }
                None => totals.skipped += 1,
            }
        }
    }
    Ok(totals)
}

fn train_ns(
    model: &mut EmbeddingModel,
    records: &[Prepared<'_>],
    vocab: &Vocabulary,
    config: &TrainConfig,
    hook: Option<LrHook<'_>>,
    report: &mut TrainReport,
) -> Result<(), TrainError> {
    let dim = model.dim();
    let (ent, words) = model.matrices_mut();
    let entities = SharedMatrix::new(ent, dim);
    let outputs = SharedMatrix::new(words, dim);
    let ctx = NsContext {
        entities: &entities,
        words: &outputs,
        vocab,
        negatives: config.negatives,
        dim,
    };
    let total = report.scheduled_pairs;
    let progress = AtomicU64::new(0);
    let threads = config.threads.min(records.len()).max(1);

    for epoch in 0..config.epochs {
        let order = epoch_order(records.len(), config.seed, epoch);
        let results: Vec<Result<WorkerTotals, TrainError>> = if threads == 1 {
            let rng = worker_rng(config.seed, epoch, 1, 0);
            vec![ns_worker(&ctx, records, &order, config, total, &progress, rng, epoch, hook)]
        } else {
            let chunk = order.len().div_ceil(threads);
            std::thread::scope(|scope| {
                let handles: Vec<_> = order
                    .chunks(chunk)
                    .enumerate()
                    .map(|(w, part)| {
                        let rng = worker_rng(config.seed, epoch, threads, w);
                        let ctx = &ctx;
                        let progress = &progress;
                        scope.spawn(move || {
                            ns_worker(ctx, records, part, config, total, progress, rng, epoch, hook)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .collect()
            })
        };
        let mut epoch_loss = 0.0;
        let mut epoch_pairs = 0;
        for r in results {
            let t = r?;
            epoch_loss += t.loss;
            epoch_pairs += t.trained;
            report.pairs_skipped += t.skipped;
        }
        report.pairs_trained += epoch_pairs;
        let mean = if epoch_pairs > 0 {
            epoch_loss / epoch_pairs as f64
        } else {
            0.0
        };
        log::debug!("epoch {epoch}: mean pair loss {mean:.6} over {epoch_pairs} pairs");
        report.epoch_losses.push(mean);
    }

    let (ent, words) = model.matrices_mut();
    *ent = entities.into_vec();
    *words = outputs.into_vec();
    if !model.is_finite() {
        return Err(TrainError::NonFinite {
            epoch: config.epochs - 1,
            record: "<final matrices>".into(),
        });
    }
    Ok(())
}

/// Mean full-softmax negative log-likelihood of `words` given `entity`.
pub fn doc_loss_softmax(model: &EmbeddingModel, entity: usize, words: &[u32]) -> Result<f64, TrainError> {
    if words.is_empty() {
        return Err(TrainError::NoTrainableTokens);
    }
    let logits = entity_logits(model, entity);
    Ok(softmax_nll(&logits, words))
}

fn entity_logits(model: &EmbeddingModel, entity: usize) -> Vec<f64> {
    let v = model.entity_row(entity);
    (0..model.vocab_len())
        .map(|w| {
            model
                .word_vector(w)
                .iter()
                .zip(v)
                .map(|(&a, &b)| a as f64 * b as f64)
                .sum()
        })
        .collect()
}

/// One gradient step on [`doc_loss_softmax`] for a single entity.
fn softmax_step(model: &mut EmbeddingModel, entity: usize, words: &[u32], lr: f64, probs: &mut [f64]) {
    let dim = model.dim();
    let logits = entity_logits(model, entity);
    softmax_into(&logits, probs);
    // d loss / d logit_j = p_j - (count of j in words) / |words|
    let weight = 1.0 / words.len() as f64;
    for &w in words {
        probs[w as usize] -= weight;
    }
    let v: Vec<f64> = model.entity_row(entity).iter().map(|&x| x as f64).collect();
    let mut grad_v = vec![0.0f64; dim];
    let (ent, outputs) = model.matrices_mut();
    for (u, &g) in outputs.chunks_exact_mut(dim).zip(probs.iter()) {
        for ((gv, ui), &vi) in grad_v.iter_mut().zip(u.iter_mut()).zip(&v) {
            *gv += g * *ui as f64;
            *ui = (*ui as f64 - lr * g * vi) as f32;
        }
    }
    for (x, g) in ent[entity * dim..(entity + 1) * dim].iter_mut().zip(grad_v) {
        *x = (*x as f64 - lr * g) as f32;
    }
}

fn train_softmax(
    model: &mut EmbeddingModel,
    records: &[Prepared<'_>],
    config: &TrainConfig,
    hook: Option<LrHook<'_>>,
    report: &mut TrainReport,
) -> Result<(), TrainError> {
    let total = report.scheduled_pairs;
    let mut progress = 0u64;
    let mut probs = vec![0.0; model.vocab_len()];
    for epoch in 0..config.epochs {
        for idx in epoch_order(records.len(), config.seed, epoch) {
            let rec = &records[idx];
            let width = rec.words.len() as u64;
            if width > 0 {
                for (row, &e) in rec.entities.iter().enumerate() {
                    let slot = progress + row as u64 * width;
                    let lr = config.learning_rate(slot, total);
                    if let Some(h) = hook {
                        h(slot, lr);
                    }
                    softmax_step(model, e as usize, &rec.words, lr, &mut probs);
                    report.pairs_trained += width;
                }
            }
            progress += rec.slots();
        }

        let mut corpus_loss = 0.0;
        for rec in records.iter().filter(|r| !r.words.is_empty()) {
            for &e in &rec.entities {
                corpus_loss += doc_loss_softmax(model, e as usize, &rec.words)?;
            }
            if !corpus_loss.is_finite() {
                return Err(TrainError::NonFinite {
                    epoch,
                    record: rec.id.to_string(),
                });
            }
        }
        log::debug!("epoch {epoch}: total softmax loss {corpus_loss:.6}");
        report.epoch_losses.push(corpus_loss);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, DocumentRecord};
    use std::sync::Mutex;

    fn toy_corpus() -> Vec<DocumentRecord> {
        let mk = |id: &str, cat: &str, year, langs: &[&str], text: &str| DocumentRecord {
            id: id.into(),
            task_category: cat.into(),
            year,
            languages: langs.iter().map(|s| s.to_string()).collect(),
            tokens: text.split(' ').map(String::from).collect(),
        };
        vec![
            mk("a", "food", 2018, &["spa"], "cook rice cook pan salt"),
            mk("b", "food", 2019, &["spa", "jpn"], "cook pan salt rice oven"),
            mk("c", "computers", 2018, &["jpn"], "laptop screen code fix laptop"),
            mk("d", "computers", 2019, &[], "code screen fix laptop install"),
        ]
    }

    fn setup(config: &TrainConfig) -> (Vec<DocumentRecord>, Vocabulary, EntityCatalog, TrainConfig) {
        let corpus = toy_corpus();
        let vocab = build_vocabulary(&corpus, 1, f64::INFINITY).unwrap();
        let catalog = EntityCatalog::build(&corpus).unwrap();
        (corpus, vocab, catalog, config.clone())
    }

    fn small() -> TrainConfig {
        TrainConfig {
            dim: 8,
            epochs: 3,
            negatives: 3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn config_invariants() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { epochs: 0, ..TrainConfig::default() },
            TrainConfig { dim: 1, ..TrainConfig::default() },
            TrainConfig { negatives: 0, ..TrainConfig::default() },
            TrainConfig { lr0: 1e-5, ..TrainConfig::default() },
            TrainConfig { lr_min: 0.0, ..TrainConfig::default() },
            TrainConfig { threads: 0, ..TrainConfig::default() },
        ] {
            assert!(matches!(bad.validate(), Err(TrainError::Config(_))), "{bad:?}");
        }
        let softmax = TrainConfig {
            negatives: 0,
            mode: TrainMode::ExactSoftmax,
            ..TrainConfig::default()
        };
        assert!(softmax.validate().is_ok());
    }

    #[test]
    fn sequential_training_is_bit_deterministic() {
        let (corpus, vocab, catalog, cfg) = setup(&small());
        let (a, ra) = train(&corpus, &vocab, &catalog, &cfg).unwrap();
        let (b, rb) = train(&corpus, &vocab, &catalog, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert!(a.is_finite());
        assert_eq!(ra.pairs_trained, ra.scheduled_pairs);
    }

    #[test]
    fn learning_rate_schedule_matches_formula() {
        let (corpus, vocab, catalog, cfg) = setup(&small());
        let seen = Mutex::new(Vec::new());
        let hook = |slot: u64, lr: f64| seen.lock().unwrap().push((slot, lr));
        let (_, report) = train_with_hook(&corpus, &vocab, &catalog, &cfg, Some(&hook)).unwrap();
        let seen = seen.into_inner().unwrap();
        assert_eq!(seen.len() as u64, report.scheduled_pairs);
        let total = report.scheduled_pairs as f64;
        let mut slots: Vec<u64> = seen.iter().map(|s| s.0).collect();
        slots.sort_unstable();
        assert_eq!(slots, (0..report.scheduled_pairs).collect::<Vec<_>>());
        for (slot, lr) in seen {
            let expect = (cfg.lr0 * (1.0 - slot as f64 / total)).max(cfg.lr_min);
            assert_eq!(lr, expect);
        }
    }

    #[test]
    fn floor_applies_late_in_schedule() {
        let cfg = TrainConfig::default();
        assert_eq!(cfg.learning_rate(999, 1000), 1e-4);
        assert_eq!(cfg.learning_rate(0, 1000), 0.025);
    }

    #[test]
    fn softmax_mode_reduces_loss() {
        let cfg = TrainConfig {
            mode: TrainMode::ExactSoftmax,
            epochs: 30,
            lr0: 0.5,
            ..small()
        };
        let (corpus, vocab, catalog, cfg) = setup(&cfg);
        let (model, report) = train(&corpus, &vocab, &catalog, &cfg).unwrap();
        assert!(model.is_finite());
        assert!(report.epoch_losses.last() < report.epoch_losses.first());
    }

    #[test]
    fn doc_loss_needs_tokens() {
        let (corpus, vocab, catalog, cfg) = setup(&small());
        let model = init_model(&catalog, &vocab, &cfg).unwrap();
        assert!(matches!(
            doc_loss_softmax(&model, 0, &[]),
            Err(TrainError::NoTrainableTokens)
        ));
        // zero word matrix: every logit equal
        let words = record_word_indices(&corpus[0], &vocab);
        let loss = doc_loss_softmax(&model, 0, &words).unwrap();
        assert!((loss - (vocab.len() as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn ns_step_matches_analytic_gradient() {
        let (_, vocab, catalog, cfg) = setup(&small());
        let dim = cfg.dim;
        let mut model = init_model(&catalog, &vocab, &cfg).unwrap();
        let (_, words) = model.matrices_mut();
        for (i, x) in words.iter_mut().enumerate() {
            *x = ((i * 37 % 11) as f32 - 5.0) * 0.05;
        }
        let entities = SharedMatrix::new(model.entity_matrix(), dim);
        let outputs = SharedMatrix::new(model.word_vectors(), dim);
        let ctx = NsContext {
            entities: &entities,
            words: &outputs,
            vocab: &vocab,
            negatives: 3,
            dim,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pair = TrainingPair { entity: 1, word: 2, slot: 0 };
        let mut scratch = NsScratch::new(dim, 3);
        let lr = 0.1f32;
        let loss = ctx.step(pair, lr, &mut rng, &mut scratch).unwrap();

        let f64s = |x: &[f32]| x.iter().map(|&v| v as f64).collect::<Vec<_>>();
        let v = f64s(model.entity_row(1));
        let us: Vec<Vec<f64>> = scratch.targets.iter().map(|&t| f64s(model.word_vector(t as usize))).collect();
        let negs: Vec<&[f64]> = us[1..].iter().map(Vec::as_slice).collect();
        let analytic = pair_loss_ns(&v, &us[0], &negs);
        assert!((analytic.loss - loss).abs() < 1e-5);

        let updated = entities.into_vec();
        for (n, g) in analytic.grad_entity.iter().enumerate() {
            let expect = v[n] - lr as f64 * g;
            assert!((updated[dim + n] as f64 - expect).abs() < 1e-6);
        }
        let updated_words = outputs.into_vec();
        let mut expect_pos = us[0].clone();
        for (t, grads) in scratch.targets.iter().zip(
            std::iter::once(&analytic.grad_positive).chain(&analytic.grad_negatives),
        ) {
            if *t == 2 {
                for (e, g) in expect_pos.iter_mut().zip(grads) {
                    *e -= lr as f64 * g;
                }
            }
        }
        for n in 0..dim {
            assert!((updated_words[2 * dim + n] as f64 - expect_pos[n]).abs() < 1e-6);
        }
    }

    #[test]
    fn multi_threaded_training_stays_finite() {
        let cfg = TrainConfig {
            threads: 3,
            epochs: 5,
            ..small()
        };
        let (corpus, vocab, catalog, cfg) = setup(&cfg);
        let (model, report) = train(&corpus, &vocab, &catalog, &cfg).unwrap();
        assert!(model.is_finite());
        assert_eq!(report.epoch_losses.len(), 5);
    }

    #[test]
    fn single_word_vocab_skips_every_pair() {
        let corpus = vec![DocumentRecord {
            id: "x".into(),
            task_category: "food".into(),
            year: 2018,
            languages: Default::default(),
            tokens: vec!["only".into(); 3],
        }];
        let vocab = build_vocabulary(&corpus, 1, f64::INFINITY).unwrap();
        let catalog = EntityCatalog::build(&corpus).unwrap();
        let (model, report) = train(&corpus, &vocab, &catalog, &small()).unwrap();
        assert_eq!(report.pairs_trained, 0);
        assert_eq!(report.pairs_skipped, report.scheduled_pairs);
        assert!(model.word_vectors().iter().all(|&x| x == 0.0));
    }
}
