//! `rfzt`: spectra, PCA, training, evaluation, attribution and
//! continuous-authentication simulation from one binary.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rfzt::Error;

use config::PipelineConfig;

#[derive(Debug, Parser)]
#[command(name = "rfzt", version, about = "RF-based UAV classification and continuous authentication")]
struct Cli {
    /// TOML configuration file; flags override it field by field.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Root seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a labelled synthetic recording set.
    Synth(SynthArgs),
    /// Turn paired recordings into a stitched-spectrum corpus CSV.
    Preprocess(PreprocessArgs),
    /// Fit PCA on a corpus and save the projection.
    Pca(PcaArgs),
    /// Train a classifier on a whole corpus.
    Train(TrainArgs),
    /// Stratified k-fold evaluation with reports.
    Evaluate(EvaluateArgs),
    /// Attribute one prediction to its input features.
    Explain(ExplainArgs),
    /// Replay a feature stream through a continuous-authentication session.
    AuthSim(AuthSimArgs),
    /// Summarise per-instance inference time from evaluation reports.
    Timing(TimingArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Output directory (receives L/, H/ and manifest.csv).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long)]
    segment_len: Option<usize>,
    /// Replace an existing output directory.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// Recording directory: L/ and H/ subdirectories, or both halves side by side.
    #[arg(long)]
    input: PathBuf,
    /// Corpus CSV to write.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    fft_bins: Option<usize>,
    #[arg(long)]
    stitch_q: Option<usize>,
    #[arg(long)]
    sub_segments: Option<usize>,
}

#[derive(Debug, Args)]
struct PcaArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Where to write the fitted projection.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fraction of variance to retain.
    #[arg(long)]
    target: Option<f64>,
    /// Scale features to unit variance before fitting.
    #[arg(long)]
    standardize: bool,
}

#[derive(Debug, Args)]
struct TrainFlags {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Hidden layer widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Project features through this saved PCA first.
    #[arg(long)]
    pca_model: Option<PathBuf>,
    /// Where to write the trained model.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    train: TrainFlags,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Put PCA with this variance target in front of the classifier.
    #[arg(long, value_name = "TARGET")]
    pca: Option<f64>,
    #[arg(long)]
    folds: Option<usize>,
    /// Fit PCA once on the full corpus instead of per fold.
    #[arg(long)]
    paper_compat: bool,
    #[arg(long)]
    standardize: bool,
    /// Directory for report.json, report.txt and confusion.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    train: TrainFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    ShapExact,
    ShapSample,
    Lime,
}

#[derive(Debug, Args)]
struct ExplainArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    pca_model: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::ShapSample)]
    method: Method,
    /// Row of the corpus to explain.
    #[arg(long, default_value_t = 0)]
    instance: usize,
    /// Class to explain (name or code); defaults to the predicted class.
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
    /// Background rows drawn from the corpus.
    #[arg(long)]
    background: Option<usize>,
    /// Features in the exact game, comma separated.
    #[arg(long, value_delimiter = ',')]
    features: Option<Vec<usize>>,
    #[arg(long)]
    kernel_width: Option<f64>,
    #[arg(long)]
    perturbations: Option<usize>,
    /// Write the explanation as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AuthSimArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    pca_model: Option<PathBuf>,
    /// Corpus CSV whose rows arrive one per tick.
    #[arg(long)]
    stream: PathBuf,
    /// Class the session is enrolled as.
    #[arg(long)]
    enrolled: String,
    #[arg(long)]
    threshold: Option<f64>,
    /// Seconds between verifications.
    #[arg(long)]
    interval: Option<f64>,
    #[arg(long)]
    revoke_after: Option<u32>,
    #[arg(long, default_value = "session-0")]
    session_id: String,
    /// Write the JSON-lines log here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TimingArgs {
    /// Evaluation reports to summarise; defaults to <reports>/report.json.
    #[arg(long, num_args = 1..)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_USAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let record = serde_json::json!({ "error": "usage", "message": e.kind().to_string() });
            eprintln!("{record}");
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut record = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            if let Error::Config { field, .. } = &e {
                record["field"] = serde_json::json!(field);
            }
            eprintln!("{record}");
            ExitCode::from(match e {
                Error::Config { .. } => EXIT_CONFIG,
                _ => EXIT_RUNTIME,
            })
        }
    }
}

fn run(cli: Cli) -> rfzt::Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    cfg.apply_env(|k| std::env::var(k).ok());
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match cli.command {
        Command::Synth(a) => {
            set(&mut cfg.synth.per_class, a.per_class);
            set(&mut cfg.synth.segment_len, a.segment_len);
            finish(&mut cfg)?;
            commands::synth(&cfg, &a.out, a.force)
        }
        Command::Preprocess(a) => {
            set_path(&mut cfg.paths.corpus, a.out);
            set(&mut cfg.spectral.fft_bins, a.fft_bins);
            set(&mut cfg.spectral.stitch_q, a.stitch_q);
            set(&mut cfg.spectral.sub_segments, a.sub_segments);
            finish(&mut cfg)?;
            commands::preprocess(&cfg, &a.input)
        }
        Command::Pca(a) => {
            set_path(&mut cfg.paths.corpus, a.corpus);
            set_path(&mut cfg.paths.pca_model, a.out);
            set(&mut cfg.pca.target, a.target);
            cfg.pca.standardize |= a.standardize;
            finish(&mut cfg)?;
            commands::pca(&cfg)
        }
        Command::Train(a) => {
            set_path(&mut cfg.paths.corpus, a.corpus);
            set_path(&mut cfg.paths.pca_model, a.pca_model.clone());
            set_path(&mut cfg.paths.model, a.out);
            apply_train_flags(&mut cfg, a.train);
            finish(&mut cfg)?;
            commands::train(&cfg, a.pca_model.is_some())
        }
        Command::Evaluate(a) => {
            set_path(&mut cfg.paths.corpus, a.corpus);
            set_path(&mut cfg.paths.reports, a.out_dir);
            if let Some(t) = a.pca {
                cfg.pca.enabled = true;
                cfg.pca.target = t;
            }
            set(&mut cfg.train.folds, a.folds);
            cfg.pca.paper_compat |= a.paper_compat;
            cfg.pca.standardize |= a.standardize;
            apply_train_flags(&mut cfg, a.train);
            finish(&mut cfg)?;
            commands::evaluate(&cfg)
        }
        Command::Explain(a) => {
            set_path(&mut cfg.paths.model, a.model);
            set_path(&mut cfg.paths.pca_model, a.pca_model.clone());
            set_path(&mut cfg.paths.corpus, a.corpus);
            set(&mut cfg.explain.samples, a.samples);
            set(&mut cfg.explain.top_k, a.top_k);
            set(&mut cfg.explain.background, a.background);
            set(&mut cfg.explain.perturbations, a.perturbations);
            if a.features.is_some() {
                cfg.explain.features = a.features;
            }
            if a.kernel_width.is_some() {
                cfg.explain.kernel_width = a.kernel_width;
            }
            finish(&mut cfg)?;
            let request = commands::ExplainRequest {
                method: match a.method {
                    Method::ShapExact => commands::ExplainMethod::ShapExact,
                    Method::ShapSample => commands::ExplainMethod::ShapSample,
                    Method::Lime => commands::ExplainMethod::Lime,
                },
                instance: a.instance,
                class: a.class.as_deref().map(str::parse).transpose()?,
                use_pca: a.pca_model.is_some(),
                out: a.out,
            };
            commands::explain(&cfg, &request)
        }
        Command::AuthSim(a) => {
            set_path(&mut cfg.paths.model, a.model);
            set_path(&mut cfg.paths.pca_model, a.pca_model.clone());
            set(&mut cfg.auth.confidence_threshold, a.threshold);
            set(&mut cfg.auth.interval_seconds, a.interval);
            set(&mut cfg.auth.revoke_after, a.revoke_after);
            finish(&mut cfg)?;
            let request = commands::AuthRequest {
                stream: a.stream,
                enrolled: a.enrolled.parse()?,
                session_id: a.session_id,
                use_pca: a.pca_model.is_some(),
                out: a.out,
            };
            commands::auth_sim(&cfg, &request)
        }
        Command::Timing(a) => {
            finish(&mut cfg)?;
            commands::timing(&cfg, &a.reports, a.out.as_deref())
        }
    }
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn set_path(slot: &mut Option<PathBuf>, flag: Option<PathBuf>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn apply_train_flags(cfg: &mut PipelineConfig, f: TrainFlags) {
    set(&mut cfg.train.epochs, f.epochs);
    set(&mut cfg.train.batch_size, f.batch_size);
    set(&mut cfg.train.learning_rate, f.learning_rate);
    set(&mut cfg.train.hidden_widths, f.hidden);
}

/// Propagates the root seed and validates the merged configuration.
fn finish(cfg: &mut PipelineConfig) -> rfzt::Result<()> {
    cfg.train.seed = cfg.seed;
    cfg.validate()
}
