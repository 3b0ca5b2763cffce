use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qxai_cli::config::{load_file_config, FileConfig, RunConfig};
use qxai_cli::pipeline;

/// Hybrid quantum classifier vs classical RBM baseline: train both on
/// PCA-reduced binary digit data, then compare accuracy, feature
/// attributions, attribution entropy, and latent-space separation.
///
/// Exit codes: 0 success; 2 i/o; 3 malformed file or artifact; 4 degenerate
/// data; 5 dimension or index misuse; 6 missing artifact; 7 numerical
/// failure; 8 invalid configuration.
#[derive(Parser)]
#[command(name = "qxai", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// TOML config file; command-line flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts and reports
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root seed for splits, initialization, Gibbs sampling, and t-SNE
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Training IDX image file
    #[arg(long, global = true)]
    train_images: Option<PathBuf>,
    /// Training IDX label file
    #[arg(long, global = true)]
    train_labels: Option<PathBuf>,
    /// Held-out IDX image file (omit to split the training pool)
    #[arg(long, global = true)]
    test_images: Option<PathBuf>,
    /// Held-out IDX label file
    #[arg(long, global = true)]
    test_labels: Option<PathBuf>,
    /// Epochs for both models
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Learning rate for both models
    #[arg(long, global = true)]
    lr: Option<f64>,
    /// Entangling layer count of the quantum circuit
    #[arg(long, global = true)]
    layers: Option<usize>,
    /// t-SNE perplexity
    #[arg(long, global = true)]
    perplexity: Option<f64>,
    /// Feed the thresholded bits (not continuous projections) to the QBM
    #[arg(long, global = true)]
    qbm_binary_input: bool,
    /// Debug: dump the trained circuit's state amplitudes for the first
    /// test sample to amplitudes.csv
    #[arg(long, global = true)]
    dump_amplitudes: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse IDX data, filter digits 0/1, fit PCA, binarize, write artifacts
    Prepare(CommonArgs),
    /// Train the hybrid quantum classifier on prepared artifacts
    TrainQbm(CommonArgs),
    /// Train the classical RBM baseline on prepared artifacts
    TrainCbm(CommonArgs),
    /// Emit attribution reports, entropies, and the model comparison
    Explain(CommonArgs),
    /// Embed the test latent states to 2-D and score class separation
    Tsne(CommonArgs),
    /// Full pipeline: prepare, train both, explain, tsne, one report
    RunAll(CommonArgs),
    /// Generate a synthetic ring/stroke digit pool as IDX files
    SynthData {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of images in the pool
        #[arg(long, default_value_t = 2500)]
        count: usize,
    },
}

fn effective_config(args: &CommonArgs) -> Result<RunConfig, qxai_core::Error> {
    let file_layer = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };
    let mut cfg = RunConfig::from_file_layer(&file_layer);
    if let Some(v) = &args.out {
        cfg.out = v.clone();
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.train_images {
        cfg.train_images = Some(v.clone());
    }
    if let Some(v) = &args.train_labels {
        cfg.train_labels = Some(v.clone());
    }
    if let Some(v) = &args.test_images {
        cfg.test_images = Some(v.clone());
    }
    if let Some(v) = &args.test_labels {
        cfg.test_labels = Some(v.clone());
    }
    if let Some(v) = args.epochs {
        cfg.qbm_epochs = v;
        cfg.cbm_epochs = v;
    }
    if let Some(v) = args.lr {
        cfg.qbm_lr = v;
        cfg.cbm_lr = v;
    }
    if let Some(v) = args.layers {
        cfg.layers = v;
    }
    if let Some(v) = args.perplexity {
        cfg.perplexity = v;
    }
    if args.qbm_binary_input {
        cfg.qbm_binary_input = true;
    }
    if args.dump_amplitudes {
        cfg.dump_amplitudes = true;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), qxai_core::Error> {
    match cli.command {
        Command::Prepare(args) => {
            let cfg = effective_config(&args)?;
            let summary = pipeline::cmd_prepare(&cfg)?;
            println!(
                "prepared {} train / {} test rows into {}",
                summary.train_rows,
                summary.test_rows,
                cfg.out.display()
            );
        }
        Command::TrainQbm(args) => {
            let cfg = effective_config(&args)?;
            let summary = pipeline::cmd_train_qbm(&cfg)?;
            println!(
                "qbm trained: train accuracy {:.4}, test accuracy {:.4}",
                summary.train_accuracy, summary.test_accuracy
            );
        }
        Command::TrainCbm(args) => {
            let cfg = effective_config(&args)?;
            let summary = pipeline::cmd_train_cbm(&cfg)?;
            println!(
                "cbm trained: train accuracy {:.4}, test accuracy {:.4}",
                summary.train_accuracy, summary.test_accuracy
            );
        }
        Command::Explain(args) => {
            let cfg = effective_config(&args)?;
            let summary = pipeline::cmd_explain(&cfg)?;
            println!(
                "attribution entropies: qbm {:.4} nats, cbm {:.4} nats",
                summary.qbm.entropy_nats, summary.cbm.entropy_nats
            );
        }
        Command::Tsne(args) => {
            let cfg = effective_config(&args)?;
            let summary = pipeline::cmd_tsne(&cfg)?;
            println!(
                "embedded {} rows, silhouette {:.4}",
                summary.embedded_rows, summary.silhouette
            );
        }
        Command::RunAll(args) => {
            let cfg = effective_config(&args)?;
            let report_path = pipeline::cmd_run_all(&cfg)?;
            println!("run complete, report at {}", report_path.display());
        }
        Command::SynthData { common, count } => {
            let cfg = effective_config(&common)?;
            let (images, labels) = pipeline::cmd_synth_data(&cfg.out, count, cfg.seed)?;
            println!(
                "wrote {} images to {} and labels to {}",
                count,
                images.display(),
                labels.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
