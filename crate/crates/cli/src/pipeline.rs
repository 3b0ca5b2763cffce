//! Pipeline stages behind the subcommands. Every stage reads and writes
//! artifacts under the configured output directory, so stages can run
//! on their own or chained by `run_all`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qxai_core::artifact::{self, fingerprint_hex};
use qxai_core::cbm::{classify_accuracy, train_cbm};
use qxai_core::ingest::{filter_binary, load_idx_images, load_idx_labels, split, RawDataset};
use qxai_core::pca::{binarize, fit_pca, fit_thresholds, transform};
use qxai_core::qbm::{evaluate_accuracy, train};
use qxai_core::synth::{generate_idx, SynthConfig};
use qxai_core::tsne::{latent_states, silhouette, tsne};
use qxai_core::xai::{cbm_attribution, compare, qbm_saliency, shapley_baseline, ComparisonSummary};
use qxai_core::{
    AttributionReport64, BinaryDataset64, Error, Matrix, QbmModel64, ReducedDataset64, Result,
};

use crate::config::RunConfig;
use crate::report;

pub const PCA_MODEL_FILE: &str = "pca_model.bin";
pub const TRAIN_REDUCED_FILE: &str = "train_reduced.bin";
pub const TEST_REDUCED_FILE: &str = "test_reduced.bin";
pub const TRAIN_BITS_FILE: &str = "train_bits.bin";
pub const TEST_BITS_FILE: &str = "test_bits.bin";
pub const QBM_MODEL_FILE: &str = "qbm_model.bin";
pub const CBM_MODEL_FILE: &str = "cbm_model.bin";
pub const RUN_REPORT_FILE: &str = "report.txt";
pub const TIMINGS_FILE: &str = "timings.csv";

#[derive(Debug, Clone)]
pub struct PrepareSummary {
    pub train_rows: usize,
    pub test_rows: usize,
    pub train_class_counts: (usize, usize),
    pub test_class_counts: (usize, usize),
    pub split_mode: String,
    pub eigenvalues: Vec<f64>,
    pub artifact_hashes: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub model: String,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub loss_first: Option<f64>,
    pub loss_last: Option<f64>,
    pub model_hash: String,
}

#[derive(Debug, Clone)]
pub struct ExplainSummary {
    pub qbm: AttributionReport64,
    pub cbm: AttributionReport64,
    pub comparison: ComparisonSummary<f64>,
}

#[derive(Debug, Clone)]
pub struct TsneSummary {
    pub silhouette: f64,
    pub kl_first: f64,
    pub kl_last: f64,
    pub embedded_rows: usize,
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn class_counts(labels: &[u8]) -> (usize, usize) {
    let ones = labels.iter().filter(|&&l| l == 1).count();
    (labels.len() - ones, ones)
}

fn required_path(path: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    path.clone()
        .ok_or_else(|| Error::InvalidConfig(format!("{what} path is required for this command")))
}

/// Ingest, filter to the two digits, split, fit PCA, binarize, and write
/// the five data artifacts. Deterministic for fixed inputs and seed.
pub fn cmd_prepare(cfg: &RunConfig) -> Result<PrepareSummary> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out)?;

    let train_images_path = required_path(&cfg.train_images, "train-images")?;
    let train_labels_path = required_path(&cfg.train_labels, "train-labels")?;
    let images: Matrix<f64> = load_idx_images(&train_images_path)?;
    let labels = load_idx_labels(&train_labels_path)?;
    let pool = filter_binary(&images, &labels, (0, 1))?;

    let (train_raw, test_raw, split_mode): (RawDataset<f64>, RawDataset<f64>, String) =
        match (&cfg.test_images, &cfg.test_labels) {
            (Some(ti), Some(tl)) => {
                let test_images: Matrix<f64> = load_idx_images(ti)?;
                let test_labels = load_idx_labels(tl)?;
                let test = filter_binary(&test_images, &test_labels, (0, 1))?;
                (pool, test, "separate-files".to_string())
            }
            (None, None) => {
                let (train, test) = split(&pool, cfg.train_fraction, cfg.seed)?;
                (
                    train,
                    test,
                    format!("seeded-split fraction={}", cfg.train_fraction),
                )
            }
            _ => {
                return Err(Error::InvalidConfig(
                    "test images and labels must be given together".into(),
                ))
            }
        };

    let pca = fit_pca(&train_raw.images, cfg.pca_k)?;
    let fp = pca.fingerprint();
    let train_z = transform(&pca, &train_raw.images)?;
    let test_z = transform(&pca, &test_raw.images)?;
    let thresholds = fit_thresholds(&train_z)?;

    let train_reduced = ReducedDataset64 {
        features: train_z.clone(),
        labels: train_raw.labels.clone(),
        model_fingerprint: fp,
    };
    let test_reduced = ReducedDataset64 {
        features: test_z.clone(),
        labels: test_raw.labels.clone(),
        model_fingerprint: fp,
    };
    let train_bits = BinaryDataset64 {
        bits: binarize(&train_z, &thresholds)?,
        thresholds: thresholds.clone(),
        labels: train_raw.labels.clone(),
    };
    let test_bits = BinaryDataset64 {
        bits: binarize(&test_z, &thresholds)?,
        thresholds,
        labels: test_raw.labels.clone(),
    };

    let blobs = [
        (PCA_MODEL_FILE, artifact::encode_pca(&pca)),
        (TRAIN_REDUCED_FILE, artifact::encode_reduced(&train_reduced)),
        (TEST_REDUCED_FILE, artifact::encode_reduced(&test_reduced)),
        (TRAIN_BITS_FILE, artifact::encode_binary(&train_bits)),
        (TEST_BITS_FILE, artifact::encode_binary(&test_bits)),
    ];
    let mut artifact_hashes = Vec::new();
    for (name, bytes) in &blobs {
        artifact::write_file(&cfg.out.join(name), bytes)?;
        artifact_hashes.push((name.to_string(), fingerprint_hex(bytes)));
    }

    let summary = PrepareSummary {
        train_rows: train_reduced.len(),
        test_rows: test_reduced.len(),
        train_class_counts: class_counts(&train_reduced.labels),
        test_class_counts: class_counts(&test_reduced.labels),
        split_mode,
        eigenvalues: pca.eigenvalues.clone(),
        artifact_hashes,
    };
    write_text(
        &cfg.out.join("prepare_report.txt"),
        &report::render_prepare(cfg, &summary),
    )?;
    Ok(summary)
}

fn read_reduced(out: &Path, name: &str) -> Result<ReducedDataset64> {
    let path = out.join(name);
    let bytes = artifact::read_file(&path)?;
    artifact::decode_reduced(&bytes).map_err(|reason| artifact::decode_err(&path, reason))
}

fn read_bits(out: &Path, name: &str) -> Result<BinaryDataset64> {
    let path = out.join(name);
    let bytes = artifact::read_file(&path)?;
    artifact::decode_binary(&bytes).map_err(|reason| artifact::decode_err(&path, reason))
}

fn read_qbm(out: &Path) -> Result<QbmModel64> {
    let path = out.join(QBM_MODEL_FILE);
    let bytes = artifact::read_file(&path)?;
    let (model, _config) =
        artifact::decode_qbm(&bytes).map_err(|reason| artifact::decode_err(&path, reason))?;
    Ok(model)
}

/// The features the QBM consumes: continuous projections by default, the
/// thresholded bits (as reals) behind `--qbm-binary-input`.
fn qbm_features(cfg: &RunConfig, which: &str) -> Result<ReducedDataset64> {
    if cfg.qbm_binary_input {
        let name = if which == "train" { TRAIN_BITS_FILE } else { TEST_BITS_FILE };
        let bits = read_bits(&cfg.out, name)?;
        let rows = bits
            .bits
            .row_iter()
            .map(|r| r.iter().map(|&b| f64::from(b)).collect())
            .collect();
        Ok(ReducedDataset64 {
            features: Matrix::from_rows(rows)?,
            labels: bits.labels,
            model_fingerprint: 0,
        })
    } else {
        let name = if which == "train" { TRAIN_REDUCED_FILE } else { TEST_REDUCED_FILE };
        read_reduced(&cfg.out, name)
    }
}

pub fn cmd_train_qbm(cfg: &RunConfig) -> Result<TrainSummary> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out)?;
    let train_data = qbm_features(cfg, "train")?;
    let test_data = qbm_features(cfg, "test")?;

    let (model, mut train_report) = train(&train_data, &cfg.qbm_config())?;
    let test_accuracy = evaluate_accuracy(&model, &test_data)?;
    train_report.final_test_accuracy = Some(test_accuracy);

    let bytes = artifact::encode_qbm(&model, &cfg.qbm_config());
    artifact::write_file(&cfg.out.join(QBM_MODEL_FILE), &bytes)?;
    if cfg.dump_amplitudes {
        if let Some(first) = test_data.features.row_iter().next() {
            let angles = model.scale(first)?;
            let mut state = qxai_core::qsim::angle_embed(&angles)?;
            qxai_core::qsim::apply_entangling_layers(&mut state, &model.circuit)?;
            write_text(&cfg.out.join("amplitudes.csv"), &state.amplitudes_csv())?;
        }
    }
    let summary = TrainSummary {
        model: "qbm".into(),
        train_accuracy: train_report.final_train_accuracy,
        test_accuracy,
        loss_first: train_report.loss_history.first().copied(),
        loss_last: train_report.loss_history.last().copied(),
        model_hash: fingerprint_hex(&bytes),
    };
    write_text(
        &cfg.out.join("qbm_train_report.txt"),
        &report::render_train(cfg, &summary, &train_report),
    )?;
    write_text(
        &cfg.out.join("qbm_loss.csv"),
        &report::history_csv("epoch,loss", &train_report.loss_history),
    )?;
    Ok(summary)
}

pub fn cmd_train_cbm(cfg: &RunConfig) -> Result<TrainSummary> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out)?;
    let train_data = read_bits(&cfg.out, TRAIN_BITS_FILE)?;
    let test_data = read_bits(&cfg.out, TEST_BITS_FILE)?;

    let (params, readout, mut train_report) = train_cbm(&train_data, &cfg.cbm_config())?;
    let test_accuracy = classify_accuracy(&params, &readout, &test_data)?;
    train_report.final_test_accuracy = Some(test_accuracy);

    let bytes = artifact::encode_cbm(&params, &readout, &cfg.cbm_config());
    artifact::write_file(&cfg.out.join(CBM_MODEL_FILE), &bytes)?;
    let summary = TrainSummary {
        model: "cbm".into(),
        train_accuracy: train_report.final_train_accuracy,
        test_accuracy,
        loss_first: train_report.loss_history.first().copied(),
        loss_last: train_report.loss_history.last().copied(),
        model_hash: fingerprint_hex(&bytes),
    };
    write_text(
        &cfg.out.join("cbm_train_report.txt"),
        &report::render_train(cfg, &summary, &train_report),
    )?;
    write_text(
        &cfg.out.join("cbm_recon.csv"),
        &report::history_csv("epoch,reconstruction_error", &train_report.loss_history),
    )?;
    Ok(summary)
}

pub fn cmd_explain(cfg: &RunConfig) -> Result<ExplainSummary> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out)?;
    let qbm_model = read_qbm(&cfg.out)?;
    let cbm_path = cfg.out.join(CBM_MODEL_FILE);
    let cbm_bytes = artifact::read_file(&cbm_path)?;
    let (params, readout, _config) = artifact::decode_cbm(&cbm_bytes)
        .map_err(|reason| artifact::decode_err(&cbm_path, reason))?;

    let test_features = qbm_features(cfg, "test")?;
    let train_bits = read_bits(&cfg.out, TRAIN_BITS_FILE)?;
    let test_bits = read_bits(&cfg.out, TEST_BITS_FILE)?;

    let qbm_report = qbm_saliency(&qbm_model, &test_features)?;
    let baseline = shapley_baseline::<f64>(&train_bits.bits)?;
    let cbm_report = cbm_attribution(&params, &readout, &test_bits, &baseline)?;
    let comparison = compare(&qbm_report, &cbm_report)?;

    write_text(
        &cfg.out.join("attribution_qbm.csv"),
        &report::attribution_csv(&qbm_report),
    )?;
    write_text(
        &cfg.out.join("attribution_cbm.csv"),
        &report::attribution_csv(&cbm_report),
    )?;
    let summary = ExplainSummary {
        qbm: qbm_report,
        cbm: cbm_report,
        comparison,
    };
    write_text(
        &cfg.out.join("explain_report.txt"),
        &report::render_explain(cfg, &summary),
    )?;
    if summary.qbm.degenerate || summary.cbm.degenerate {
        return Err(Error::DegenerateAttribution);
    }
    Ok(summary)
}

pub fn cmd_tsne(cfg: &RunConfig) -> Result<TsneSummary> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out)?;
    let qbm_model = read_qbm(&cfg.out)?;
    let test_features = qbm_features(cfg, "test")?;

    let latents = latent_states(&qbm_model, &test_features)?;
    let embedding = tsne(&latents, &cfg.tsne_config())?;
    let score = silhouette(&embedding.points, &test_features.labels)?;

    write_text(
        &cfg.out.join("embedding.csv"),
        &report::embedding_csv(&embedding.points, &test_features.labels),
    )?;
    write_text(
        &cfg.out.join("kl_history.csv"),
        &report::history_csv("iteration,kl", &embedding.kl_history),
    )?;
    let summary = TsneSummary {
        silhouette: score,
        kl_first: embedding.kl_history.first().copied().unwrap_or(f64::NAN),
        kl_last: embedding.kl_history.last().copied().unwrap_or(f64::NAN),
        embedded_rows: latents.rows(),
    };
    write_text(
        &cfg.out.join("tsne_report.txt"),
        &report::render_tsne(cfg, &summary),
    )?;
    Ok(summary)
}

/// prepare -> train both -> explain -> tsne, consolidated into one report.
/// Stage wall-clock goes to a sidecar CSV so the report itself reproduces
/// bit-identically for a fixed config and seed.
pub fn cmd_run_all(cfg: &RunConfig) -> Result<PathBuf> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out)?;
    let mut timings: Vec<(&str, f64)> = Vec::new();
    let mut timed = |name: &'static str, t: Instant| {
        timings.push((name, t.elapsed().as_secs_f64()));
    };

    let t = Instant::now();
    let prepare = cmd_prepare(cfg)?;
    timed("prepare", t);
    let t = Instant::now();
    let qbm = cmd_train_qbm(cfg)?;
    timed("train-qbm", t);
    let t = Instant::now();
    let cbm = cmd_train_cbm(cfg)?;
    timed("train-cbm", t);
    let t = Instant::now();
    let explain = cmd_explain(cfg)?;
    timed("explain", t);
    let t = Instant::now();
    let embedding = cmd_tsne(cfg)?;
    timed("tsne", t);

    let report_text = report::render_run_report(cfg, &prepare, &qbm, &cbm, &explain, &embedding);
    let report_path = cfg.out.join(RUN_REPORT_FILE);
    write_text(&report_path, &report_text)?;

    let mut timing_csv = String::from("stage,seconds\n");
    for (stage, secs) in &timings {
        timing_csv.push_str(&format!("{stage},{secs:.3}\n"));
    }
    write_text(&cfg.out.join(TIMINGS_FILE), &timing_csv)?;
    Ok(report_path)
}

/// Write a synthetic IDX pool for offline experiments.
pub fn cmd_synth_data(out: &Path, count: usize, seed: u64) -> Result<(PathBuf, PathBuf)> {
    ensure_out_dir(out)?;
    let (images, labels) = generate_idx(&SynthConfig {
        n_images: count,
        seed,
    });
    let images_path = out.join("synth-images-idx3-ubyte");
    let labels_path = out.join("synth-labels-idx1-ubyte");
    artifact::write_file(&images_path, &images)?;
    artifact::write_file(&labels_path, &labels)?;
    Ok((images_path, labels_path))
}
