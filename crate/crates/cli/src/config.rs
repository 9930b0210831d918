//! JSON config file mirroring the command-line flags. Flags win.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub languages: Option<Vec<String>>,
    pub categories: Option<Vec<String>>,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub min_count: Option<u64>,
    /// `0` disables subsampling.
    pub subsample: Option<f64>,

    pub dim: Option<usize>,
    pub epochs: Option<usize>,
    pub negatives: Option<usize>,
    pub lr: Option<f64>,
    pub lr_min: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub mode: Option<String>,

    pub normalize: Option<bool>,

    pub perplexity: Option<f64>,
    pub iters: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }
}
