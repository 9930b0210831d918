//! Shared fixtures for the benchmarks.

use ent2vec::corpus::EntityCatalog;
use ent2vec::{
    build_entity_catalog, build_vocabulary, generate, train, DocumentRecord, EmbeddingModel,
    SynthSpec, TrainConfig, Vocabulary,
};

pub struct Fixture {
    pub corpus: Vec<DocumentRecord>,
    pub vocab: Vocabulary,
    pub catalog: EntityCatalog,
}

/// Canonical synthetic corpus scaled to `articles` per category-year.
pub fn fixture(articles: usize) -> Fixture {
    let spec = SynthSpec {
        articles_per_category_year: articles,
        ..SynthSpec::canonical(1)
    };
    let corpus = generate(&spec).expect("valid spec");
    let cc = spec.corpus_config();
    let vocab = build_vocabulary(&corpus, cc.min_count, cc.subsample_threshold()).expect("vocabulary");
    let catalog = build_entity_catalog(&corpus).expect("catalog");
    Fixture { corpus, vocab, catalog }
}

pub fn trained_model(fixture: &Fixture, dim: usize) -> EmbeddingModel {
    let config = TrainConfig {
        dim,
        epochs: 1,
        ..TrainConfig::default()
    };
    train(&fixture.corpus, &fixture.vocab, &fixture.catalog, &config)
        .expect("training")
        .0
}
