//! Structured-text reports and CSV plot data. Rendering is fully
//! deterministic: identical inputs produce identical bytes.

use qxai_core::qbm::TrainReport;
use qxai_core::{AttributionReport64, Matrix};

use crate::config::RunConfig;
use crate::pipeline::{ExplainSummary, PrepareSummary, TrainSummary, TsneSummary};

pub const REPORT_FORMAT_VERSION: u32 = 1;

fn feature_name(i: usize) -> String {
    format!("PC{i}")
}

pub fn history_csv(header: &str, values: &[f64]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

pub fn attribution_csv(report: &AttributionReport64) -> String {
    let mut out = String::from("feature,raw_score,probability\n");
    for (i, (raw, prob)) in report
        .raw_scores
        .iter()
        .zip(&report.distribution)
        .enumerate()
    {
        out.push_str(&format!("{},{raw},{prob}\n", feature_name(i)));
    }
    out
}

pub fn embedding_csv(points: &Matrix<f64>, labels: &[u8]) -> String {
    let mut out = String::from("sample_id,x,y,label\n");
    for (i, (row, label)) in points.row_iter().zip(labels).enumerate() {
        out.push_str(&format!("{i},{},{},{label}\n", row[0], row[1]));
    }
    out
}

fn header(kind: &str) -> String {
    format!("# qxai {kind} report\nformat_version = {REPORT_FORMAT_VERSION}\n")
}

pub fn render_prepare(cfg: &RunConfig, summary: &PrepareSummary) -> String {
    let mut s = header("prepare");
    s.push_str(&cfg.echo());
    s.push_str("[data]\n");
    s.push_str(&format!("split_mode = {}\n", summary.split_mode));
    s.push_str(&format!("train_rows = {}\n", summary.train_rows));
    s.push_str(&format!("test_rows = {}\n", summary.test_rows));
    s.push_str(&format!(
        "train_class_counts = {}/{}\n",
        summary.train_class_counts.0, summary.train_class_counts.1
    ));
    s.push_str(&format!(
        "test_class_counts = {}/{}\n",
        summary.test_class_counts.0, summary.test_class_counts.1
    ));
    for (i, ev) in summary.eigenvalues.iter().enumerate() {
        s.push_str(&format!("eigenvalue_{i} = {ev}\n"));
    }
    s.push_str("[artifacts]\n");
    for (name, hash) in &summary.artifact_hashes {
        s.push_str(&format!("{name} = {hash}\n"));
    }
    s
}

pub fn render_train(cfg: &RunConfig, summary: &TrainSummary, report: &TrainReport<f64>) -> String {
    let mut s = header(&format!("train-{}", summary.model));
    s.push_str(&cfg.echo());
    s.push_str(&format!("[{}]\n", summary.model));
    s.push_str(&format!("seed = {}\n", report.seed));
    for (key, value) in &report.hyperparameters {
        s.push_str(&format!("hyperparameter_{key} = {value}\n"));
    }
    s.push_str(&format!("train_accuracy = {}\n", summary.train_accuracy));
    s.push_str(&format!("test_accuracy = {}\n", summary.test_accuracy));
    if let (Some(first), Some(last)) = (summary.loss_first, summary.loss_last) {
        s.push_str(&format!("loss_first = {first}\n"));
        s.push_str(&format!("loss_last = {last}\n"));
    }
    s.push_str(&format!("epochs_recorded = {}\n", report.loss_history.len()));
    s.push_str(&format!("model_artifact = {}\n", summary.model_hash));
    s
}

fn attribution_block(tag: &str, report: &AttributionReport64) -> String {
    let mut s = format!("[attribution.{tag}]\n");
    s.push_str(&format!("entropy_nats = {}\n", report.entropy_nats));
    s.push_str(&format!("degenerate = {}\n", report.degenerate));
    s.push_str("feature raw_score probability\n");
    for (i, (raw, prob)) in report
        .raw_scores
        .iter()
        .zip(&report.distribution)
        .enumerate()
    {
        s.push_str(&format!("{} {raw} {prob}\n", feature_name(i)));
    }
    s
}

fn ranking_line(ranking: &[usize]) -> String {
    ranking
        .iter()
        .map(|&i| feature_name(i))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn render_explain(cfg: &RunConfig, summary: &ExplainSummary) -> String {
    let mut s = header("explain");
    s.push_str(&cfg.echo());
    s.push_str(&attribution_block("qbm", &summary.qbm));
    s.push_str(&attribution_block("cbm", &summary.cbm));
    s.push_str("[comparison]\n");
    s.push_str(&format!(
        "entropy_delta = {}\n",
        summary.comparison.entropy_delta
    ));
    s.push_str(&format!(
        "qbm_active_ingredients = {}\n",
        ranking_line(&summary.comparison.qbm_ranking)
    ));
    s.push_str(&format!(
        "cbm_active_ingredients = {}\n",
        ranking_line(&summary.comparison.cbm_ranking)
    ));
    s
}

pub fn render_tsne(cfg: &RunConfig, summary: &TsneSummary) -> String {
    let mut s = header("tsne");
    s.push_str(&cfg.echo());
    s.push_str("[tsne]\n");
    s.push_str(&format!("embedded_rows = {}\n", summary.embedded_rows));
    s.push_str(&format!("silhouette = {}\n", summary.silhouette));
    s.push_str(&format!("kl_first = {}\n", summary.kl_first));
    s.push_str(&format!("kl_last = {}\n", summary.kl_last));
    s
}

pub fn render_run_report(
    cfg: &RunConfig,
    prepare: &PrepareSummary,
    qbm: &TrainSummary,
    cbm: &TrainSummary,
    explain: &ExplainSummary,
    embedding: &TsneSummary,
) -> String {
    let mut s = header("run");
    s.push_str(&cfg.echo());

    s.push_str("[data]\n");
    s.push_str(&format!("split_mode = {}\n", prepare.split_mode));
    s.push_str(&format!("train_rows = {}\n", prepare.train_rows));
    s.push_str(&format!("test_rows = {}\n", prepare.test_rows));
    s.push_str(&format!(
        "train_class_counts = {}/{}\n",
        prepare.train_class_counts.0, prepare.train_class_counts.1
    ));
    s.push_str(&format!(
        "test_class_counts = {}/{}\n",
        prepare.test_class_counts.0, prepare.test_class_counts.1
    ));

    s.push_str("[results]\n");
    s.push_str(&format!("qbm_train_accuracy = {}\n", qbm.train_accuracy));
    s.push_str(&format!("qbm_test_accuracy = {}\n", qbm.test_accuracy));
    s.push_str(&format!("cbm_train_accuracy = {}\n", cbm.train_accuracy));
    s.push_str(&format!("cbm_test_accuracy = {}\n", cbm.test_accuracy));
    s.push_str(&format!(
        "qbm_saliency_entropy_nats = {}\n",
        explain.qbm.entropy_nats
    ));
    s.push_str(&format!(
        "cbm_shapley_entropy_nats = {}\n",
        explain.cbm.entropy_nats
    ));
    s.push_str(&format!("silhouette = {}\n", embedding.silhouette));

    s.push_str(&attribution_block("qbm", &explain.qbm));
    s.push_str(&attribution_block("cbm", &explain.cbm));
    s.push_str("[comparison]\n");
    s.push_str(&format!(
        "entropy_delta = {}\n",
        explain.comparison.entropy_delta
    ));
    s.push_str(&format!(
        "qbm_active_ingredients = {}\n",
        ranking_line(&explain.comparison.qbm_ranking)
    ));
    s.push_str(&format!(
        "cbm_active_ingredients = {}\n",
        ranking_line(&explain.comparison.cbm_ranking)
    ));

    s.push_str("[tsne]\n");
    s.push_str(&format!("embedded_rows = {}\n", embedding.embedded_rows));
    s.push_str(&format!("kl_first = {}\n", embedding.kl_first));
    s.push_str(&format!("kl_last = {}\n", embedding.kl_last));

    s.push_str("[artifacts]\n");
    for (name, hash) in &prepare.artifact_hashes {
        s.push_str(&format!("{name} = {hash}\n"));
    }
    s.push_str(&format!("qbm_model.bin = {}\n", qbm.model_hash));
    s.push_str(&format!("cbm_model.bin = {}\n", cbm.model_hash));
    s
}
