//! Run configuration: built-in defaults, overridden by an optional TOML
//! file, overridden by command-line flags. The effective values are echoed
//! into every report so defaulted fields stay visible.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use qxai_core::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train_images: Option<PathBuf>,
    pub train_labels: Option<PathBuf>,
    pub test_images: Option<PathBuf>,
    pub test_labels: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub pca_k: usize,
    pub train_fraction: f64,
    pub qbm_epochs: usize,
    pub qbm_lr: f64,
    /// None = full batch.
    pub qbm_batch: Option<usize>,
    pub layers: usize,
    pub entangle_range: usize,
    pub cbm_epochs: usize,
    pub cbm_lr: f64,
    pub cbm_hidden: usize,
    pub perplexity: f64,
    pub tsne_iterations: usize,
    pub tsne_lr: f64,
    pub qbm_binary_input: bool,
    /// Debug: dump the circuit amplitudes of the first test sample as CSV.
    pub dump_amplitudes: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train_images: None,
            train_labels: None,
            test_images: None,
            test_labels: None,
            out: PathBuf::from("out"),
            seed: 42,
            pca_k: 4,
            train_fraction: 0.8,
            qbm_epochs: 50,
            qbm_lr: 0.01,
            qbm_batch: Some(32),
            layers: 2,
            entangle_range: 1,
            cbm_epochs: 50,
            cbm_lr: 0.01,
            cbm_hidden: 2,
            perplexity: 30.0,
            tsne_iterations: 500,
            tsne_lr: 200.0,
            qbm_binary_input: false,
            dump_amplitudes: false,
        }
    }
}

/// TOML layer: every field optional, section layout mirrors the pipeline
/// stages.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub train_images: Option<PathBuf>,
    pub train_labels: Option<PathBuf>,
    pub test_images: Option<PathBuf>,
    pub test_labels: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub pca_k: Option<usize>,
    pub train_fraction: Option<f64>,
    #[serde(default)]
    pub qbm: QbmFileConfig,
    #[serde(default)]
    pub cbm: CbmFileConfig,
    #[serde(default)]
    pub tsne: TsneFileConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QbmFileConfig {
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    /// 0 means full batch.
    pub batch_size: Option<usize>,
    pub layers: Option<usize>,
    pub entangle_range: Option<usize>,
    pub binary_input: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CbmFileConfig {
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub hidden_units: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsneFileConfig {
    pub perplexity: Option<f64>,
    pub iterations: Option<usize>,
    pub learning_rate: Option<f64>,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Defaults overlaid with the file layer.
    #[allow(clippy::field_reassign_with_default)]
    pub fn from_file_layer(file: &FileConfig) -> Self {
        let mut cfg = Self::default();
        cfg.train_images = file.train_images.clone();
        cfg.train_labels = file.train_labels.clone();
        cfg.test_images = file.test_images.clone();
        cfg.test_labels = file.test_labels.clone();
        if let Some(v) = &file.out {
            cfg.out = v.clone();
        }
        if let Some(v) = file.seed {
            cfg.seed = v;
        }
        if let Some(v) = file.pca_k {
            cfg.pca_k = v;
        }
        if let Some(v) = file.train_fraction {
            cfg.train_fraction = v;
        }
        if let Some(v) = file.qbm.epochs {
            cfg.qbm_epochs = v;
        }
        if let Some(v) = file.qbm.lr {
            cfg.qbm_lr = v;
        }
        if let Some(v) = file.qbm.batch_size {
            cfg.qbm_batch = if v == 0 { None } else { Some(v) };
        }
        if let Some(v) = file.qbm.layers {
            cfg.layers = v;
        }
        if let Some(v) = file.qbm.entangle_range {
            cfg.entangle_range = v;
        }
        if let Some(v) = file.qbm.binary_input {
            cfg.qbm_binary_input = v;
        }
        if let Some(v) = file.cbm.epochs {
            cfg.cbm_epochs = v;
        }
        if let Some(v) = file.cbm.lr {
            cfg.cbm_lr = v;
        }
        if let Some(v) = file.cbm.hidden_units {
            cfg.cbm_hidden = v;
        }
        if let Some(v) = file.tsne.perplexity {
            cfg.perplexity = v;
        }
        if let Some(v) = file.tsne.iterations {
            cfg.tsne_iterations = v;
        }
        if let Some(v) = file.tsne.learning_rate {
            cfg.tsne_lr = v;
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.qbm_lr <= 0.0 || self.cbm_lr <= 0.0 || self.tsne_lr <= 0.0 {
            return Err(Error::InvalidConfig("learning rates must be positive".into()));
        }
        if self.pca_k == 0 {
            return Err(Error::InvalidConfig("pca_k must be at least 1".into()));
        }
        if self.layers == 0 {
            return Err(Error::InvalidConfig("layers must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(
                "train_fraction must lie strictly between 0 and 1".into(),
            ));
        }
        Ok(())
    }

    /// Deterministic echo of every effective field.
    pub fn echo(&self) -> String {
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map_or("none".to_string(), |v| v.display().to_string())
        };
        let mut s = String::new();
        s.push_str("[config]\n");
        s.push_str(&format!("train_images = {}\n", path(&self.train_images)));
        s.push_str(&format!("train_labels = {}\n", path(&self.train_labels)));
        s.push_str(&format!("test_images = {}\n", path(&self.test_images)));
        s.push_str(&format!("test_labels = {}\n", path(&self.test_labels)));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("pca_k = {}\n", self.pca_k));
        s.push_str(&format!("train_fraction = {}\n", self.train_fraction));
        s.push_str(&format!("qbm_epochs = {}\n", self.qbm_epochs));
        s.push_str(&format!("qbm_lr = {}\n", self.qbm_lr));
        s.push_str(&format!(
            "qbm_batch_size = {}\n",
            self.qbm_batch.map_or("full".to_string(), |b| b.to_string())
        ));
        s.push_str(&format!("qbm_layers = {}\n", self.layers));
        s.push_str(&format!("qbm_entangle_range = {}\n", self.entangle_range));
        s.push_str(&format!("qbm_binary_input = {}\n", self.qbm_binary_input));
        s.push_str(&format!("cbm_epochs = {}\n", self.cbm_epochs));
        s.push_str(&format!("cbm_lr = {}\n", self.cbm_lr));
        s.push_str(&format!("cbm_hidden_units = {}\n", self.cbm_hidden));
        s.push_str(&format!("tsne_perplexity = {}\n", self.perplexity));
        s.push_str(&format!("tsne_iterations = {}\n", self.tsne_iterations));
        s.push_str(&format!("tsne_learning_rate = {}\n", self.tsne_lr));
        s
    }

    pub fn qbm_config(&self) -> qxai_core::QbmConfig64 {
        qxai_core::QbmConfig64 {
            epochs: self.qbm_epochs,
            lr: self.qbm_lr,
            batch_size: self.qbm_batch,
            layers: self.layers,
            entangle_range: self.entangle_range,
            seed: self.seed,
        }
    }

    pub fn cbm_config(&self) -> qxai_core::CbmConfig64 {
        qxai_core::CbmConfig64 {
            epochs: self.cbm_epochs,
            lr: self.cbm_lr,
            n_hidden: self.cbm_hidden,
            seed: self.seed,
        }
    }

    pub fn tsne_config(&self) -> qxai_core::TsneConfig64 {
        qxai_core::TsneConfig64 {
            perplexity: self.perplexity,
            iterations: self.tsne_iterations,
            learning_rate: self.tsne_lr,
            seed: self.seed,
        }
    }
}
