//! Binary model file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "ENT2VEC1"            8 bytes
//! format version              u32
//! E, N, V                     u32 each
//! entity names                E x (u32 byte length + UTF-8), catalog order
//! words                       V x (u32 byte length + UTF-8), vocab order
//! entity matrix               E*N f32, row-major E x N
//! word matrix                 N*V f32, row-major N x V
//! CRC32 of all prior bytes    u32
//! ```

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::EmbeddingModel;
use crate::corpus::{Entity, EntityCatalog};

pub const MAGIC: &[u8; 8] = b"ENT2VEC1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("model i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic")]
    BadMagic,
    #[error("version mismatch: file has {found}, expected {FORMAT_VERSION}")]
    VersionMismatch { found: u32 },
    #[error("truncated payload")]
    Truncated,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("checksum mismatch")]
    Checksum,
    #[error("malformed model file: {0}")]
    Malformed(String),
}

impl ModelIoError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            ModelIoError::Io(_) => "io",
            ModelIoError::BadMagic => "bad_magic",
            ModelIoError::VersionMismatch { .. } => "version_mismatch",
            ModelIoError::Truncated => "truncated_payload",
            ModelIoError::DimensionMismatch(_) => "dimension_mismatch",
            ModelIoError::Checksum => "checksum_mismatch",
            ModelIoError::Malformed(_) => "malformed",
        }
    }
}

fn put_u32(buf: &mut Vec<u8>, x: u32) {
    buf.extend_from_slice(&x.to_le_bytes());
}

fn put_str(buf: &mut Vec<u8>, s: &str) {
    put_u32(buf, s.len() as u32);
    buf.extend_from_slice(s.as_bytes());
}

pub fn to_bytes(model: &EmbeddingModel) -> Vec<u8> {
    let (e, n, v) = (model.entity_count(), model.dim(), model.vocab_len());
    let mut buf = Vec::with_capacity(32 + 4 * (e * n + n * v));
    buf.extend_from_slice(MAGIC);
    put_u32(&mut buf, FORMAT_VERSION);
    for dim in [e, n, v] {
        put_u32(&mut buf, dim as u32);
    }
    for entity in model.catalog().entities() {
        put_str(&mut buf, &entity.to_string());
    }
    for word in model.words() {
        put_str(&mut buf, word);
    }
    for x in model.entity_matrix().iter().chain(&model.word_matrix_nv()) {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    let crc = crc32fast::hash(&buf);
    put_u32(&mut buf, crc);
    buf
}

pub fn save_model(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<(), ModelIoError> {
    fs::write(path, to_bytes(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<EmbeddingModel, ModelIoError> {
    from_bytes(&fs::read(path)?)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelIoError> {
        let end = self.pos.checked_add(n).ok_or(ModelIoError::Truncated)?;
        let out = self.bytes.get(self.pos..end).ok_or(ModelIoError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, ModelIoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, ModelIoError> {
        let len = self.u32()? as usize;
        String::from_utf8(self.take(len)?.to_vec())
            .map_err(|_| ModelIoError::Malformed("invalid UTF-8 in name table".into()))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<EmbeddingModel, ModelIoError> {
    let prefix = &bytes[..bytes.len().min(MAGIC.len())];
    if prefix != &MAGIC[..prefix.len()] {
        return Err(ModelIoError::BadMagic);
    }
    let mut r = Reader { bytes, pos: 0 };
    r.take(MAGIC.len())?;
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(ModelIoError::VersionMismatch { found: version });
    }
    let e = r.u32()? as usize;
    let n = r.u32()? as usize;
    let v = r.u32()? as usize;
    if e == 0 || v == 0 || n < 2 {
        return Err(ModelIoError::DimensionMismatch(format!(
            "E={e} N={n} V={v}"
        )));
    }

    let mut entities = Vec::with_capacity(e.min(1 << 16));
    for _ in 0..e {
        let name = r.string()?;
        entities.push(
            Entity::parse(&name)
                .ok_or_else(|| ModelIoError::Malformed(format!("bad entity name {name:?}")))?,
        );
    }
    let mut words = Vec::with_capacity(v.min(1 << 16));
    for _ in 0..v {
        words.push(r.string()?);
    }

    let floats = e
        .checked_mul(n)
        .and_then(|a| n.checked_mul(v).and_then(|b| a.checked_add(b)))
        .ok_or_else(|| ModelIoError::DimensionMismatch("matrix size overflows".into()))?;
    let expected = floats * 4 + 4;
    match r.remaining() {
        have if have < expected => return Err(ModelIoError::Truncated),
        have if have > expected => {
            return Err(ModelIoError::DimensionMismatch(format!(
                "{} bytes of payload for E={e} N={n} V={v}, expected {expected}",
                have
            )))
        }
        _ => {}
    }
    let body_end = bytes.len() - 4;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
    if crc32fast::hash(&bytes[..body_end]) != stored {
        return Err(ModelIoError::Checksum);
    }

    let mut read_f32s = |count: usize| -> Result<Vec<f32>, ModelIoError> {
        Ok(r.take(count * 4)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    };
    let entity_matrix = read_f32s(e * n)?;
    let nv = read_f32s(n * v)?;
    let mut word_vectors = vec![0.0; v * n];
    for (row, chunk) in nv.chunks_exact(v).enumerate() {
        for (w, &x) in chunk.iter().enumerate() {
            word_vectors[w * n + row] = x;
        }
    }

    let catalog = EntityCatalog::from_sorted(entities)
        .ok_or_else(|| ModelIoError::Malformed("entity table not in catalog order".into()))?;
    EmbeddingModel::from_parts(catalog, words, n, entity_matrix, word_vectors)
        .map_err(|err| ModelIoError::DimensionMismatch(err.to_string()))
}
