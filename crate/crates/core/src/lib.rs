//! Entity embeddings for languages and yearly task categories of how-to
//! articles, plus the analyses built on them.
//!
//! Pipeline: [`corpus::ingest`] a JSONL corpus, build a [`Vocabulary`] and an
//! [`EntityCatalog`], [`train`] an [`EmbeddingModel`], then compute
//! [`AnalysisTable`]s with [`metrics`] or a 2-D map with [`projection`].
//! [`synth`] produces corpora with known ground truth.

pub mod corpus;
pub mod metrics;
pub mod projection;
pub mod synth;
pub mod trainer;

pub use corpus::{
    build_entity_catalog, build_vocabulary, ingest, CorpusConfig, CorpusError, DocumentRecord,
    Entity, EntityCatalog, IngestReport, Vocabulary,
};
pub use metrics::{
    language_inclusivity, task_language_distribution, task_preference, AnalysisTable,
    EntitySpace, MetricsError, MetricsOptions, TableKind,
};
pub use projection::{tsne, Projection2D, ProjectionError, TsneConfig};
pub use synth::{generate, planted_rank_oracle, SynthError, SynthSpec};
pub use trainer::io::{load_model, save_model, ModelIoError};
pub use trainer::{train, EmbeddingModel, TrainConfig, TrainError, TrainMode, TrainReport};
