use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{TrainConfig, TrainError};
use crate::corpus::{EntityCatalog, Vocabulary};

/// Trained entity and word matrices.
///
/// The entity matrix is stored row-major `E x N` (row `e` is the embedding of
/// catalog entity `e`). The output word matrix is logically `N x V`; it is
/// held transposed (`V x N`, one contiguous output vector per word) and
/// exposed in `N x V` order through [`EmbeddingModel::word_matrix_nv`].
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    catalog: EntityCatalog,
    words: Vec<String>,
    dim: usize,
    entity_matrix: Vec<f32>,
    word_vectors: Vec<f32>,
}

impl EmbeddingModel {
    pub fn from_parts(
        catalog: EntityCatalog,
        words: Vec<String>,
        dim: usize,
        entity_matrix: Vec<f32>,
        word_vectors: Vec<f32>,
    ) -> Result<Self, TrainError> {
        if dim < 2 {
            return Err(TrainError::Shape(format!("dimension {dim} < 2")));
        }
        if entity_matrix.len() != catalog.len() * dim {
            return Err(TrainError::Shape(format!(
                "entity matrix has {} values, expected {} x {dim}",
                entity_matrix.len(),
                catalog.len()
            )));
        }
        if word_vectors.len() != words.len() * dim {
            return Err(TrainError::Shape(format!(
                "word matrix has {} values, expected {dim} x {}",
                word_vectors.len(),
                words.len()
            )));
        }
        Ok(Self {
            catalog,
            words,
            dim,
            entity_matrix,
            word_vectors,
        })
    }

    pub fn catalog(&self) -> &EntityCatalog {
        &self.catalog
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entity_count(&self) -> usize {
        self.catalog.len()
    }

    pub fn vocab_len(&self) -> usize {
        self.words.len()
    }

    /// Row-major `E x N`.
    pub fn entity_matrix(&self) -> &[f32] {
        &self.entity_matrix
    }

    pub fn entity_matrix_mut(&mut self) -> &mut [f32] {
        &mut self.entity_matrix
    }

    pub fn entity_row(&self, e: usize) -> &[f32] {
        &self.entity_matrix[e * self.dim..(e + 1) * self.dim]
    }

    /// Output vector of word `w` (column `w` of the `N x V` matrix).
    pub fn word_vector(&self, w: usize) -> &[f32] {
        &self.word_vectors[w * self.dim..(w + 1) * self.dim]
    }

    /// Output vectors, row-major `V x N`.
    pub fn word_vectors(&self) -> &[f32] {
        &self.word_vectors
    }

    pub(crate) fn matrices_mut(&mut self) -> (&mut Vec<f32>, &mut Vec<f32>) {
        (&mut self.entity_matrix, &mut self.word_vectors)
    }

    /// The output matrix in row-major `N x V` order.
    pub fn word_matrix_nv(&self) -> Vec<f32> {
        let v = self.words.len();
        let mut out = vec![0.0; self.dim * v];
        for (w, column) in self.word_vectors.chunks_exact(self.dim).enumerate() {
            for (n, &x) in column.iter().enumerate() {
                out[n * v + w] = x;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.entity_matrix
            .iter()
            .chain(&self.word_vectors)
            .all(|x| x.is_finite())
    }
}

/// Entity rows i.i.d. uniform in `[-0.5/N, 0.5/N]`, word matrix zero.
pub fn init_model(
    catalog: &EntityCatalog,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingModel, TrainError> {
    config.validate()?;
    if catalog.is_empty() || vocab.is_empty() {
        return Err(TrainError::EmptyInput);
    }
    let dim = config.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let entity_matrix = (0..catalog.len() * dim)
        .map(|_| (rng.random::<f32>() - 0.5) / dim as f32)
        .collect();
    EmbeddingModel::from_parts(
        catalog.clone(),
        vocab.words().to_vec(),
        dim,
        entity_matrix,
        vec![0.0; vocab.len() * dim],
    )
}
