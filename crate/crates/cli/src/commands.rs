//! Subcommand bodies.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rfzt::explain::{
    default_kernel_width, lime_explain, map_to_bins, rank_table, shap_exact, shap_sampled, FeatureStats,
    LimeExplanation, ShapExplanation,
};
use rfzt::mlp::Predictor;
use rfzt::rf_ingest::{default_profiles, load_archive, split_pairs, synth_generate, write_pairs};
use rfzt::training::EvalReport;
use rfzt::zta::{run_session, Evidence, SessionState, SimulatedClock};
use rfzt::{seed, ClassLabel, Error, LabeledSpectrumSet, MlpModel, PcaModel, Result};
use serde::Serialize;

use crate::config::{require, PipelineConfig};
use crate::output::{build_dir_atomic, write_atomic, write_json};

pub fn synth(cfg: &PipelineConfig, out: &Path, force: bool) -> Result<()> {
    let profiles = default_profiles(cfg.synth.segment_len, cfg.spectral.fft_bins);
    let pairs = synth_generate(&profiles, cfg.synth.per_class, cfg.seed)?;
    build_dir_atomic(out, force, |dir| write_pairs(dir, &pairs))?;
    println!("wrote {} segment pairs to {}", pairs.len(), out.display());
    Ok(())
}

pub fn preprocess(cfg: &PipelineConfig, input: &Path) -> Result<()> {
    let out = require(&cfg.paths.corpus, "out")?;
    let mut pairs = load_archive(input)?;
    if cfg.spectral.sub_segments > 1 {
        pairs = split_pairs(&pairs, cfg.spectral.sub_segments)?;
    }
    let data = rfzt::spectral::preprocess(&pairs, cfg.spectral.spectral())?;
    let mut buf = Vec::new();
    data.write_csv(&mut buf).map_err(|e| Error::io(&out, e))?;
    write_atomic(&out, &buf)?;
    println!(
        "wrote {} instances x {} features to {}",
        data.len(),
        data.feature_count(),
        out.display()
    );
    Ok(())
}

fn load_corpus(cfg: &PipelineConfig) -> Result<LabeledSpectrumSet> {
    LabeledSpectrumSet::load_csv(&require(&cfg.paths.corpus, "corpus")?)
}

fn load_pca(cfg: &PipelineConfig, wanted: bool) -> Result<Option<PcaModel>> {
    match (&cfg.paths.pca_model, wanted) {
        (Some(p), true) => Ok(Some(PcaModel::load(p)?)),
        _ => Ok(None),
    }
}

pub fn pca(cfg: &PipelineConfig) -> Result<()> {
    let data = load_corpus(cfg)?;
    let out = require(&cfg.paths.pca_model, "out")?;
    let model = PcaModel::fit(data.features_f64().view(), cfg.pca.target, cfg.pca.standardize)?;
    write_atomic(&out, model.to_json().as_bytes())?;
    println!(
        "kept {} of {} components ({:.4} of variance), saved to {}",
        model.component_count(),
        model.input_dim(),
        model.retained_ratio(),
        out.display()
    );
    Ok(())
}

pub fn train(cfg: &PipelineConfig, use_pca: bool) -> Result<()> {
    let data = load_corpus(cfg)?;
    let out = require(&cfg.paths.model, "out")?;
    let pca = load_pca(cfg, use_pca)?;
    let x = data.features_f64();
    let input = match &pca {
        Some(p) => p.transform(x.view())?,
        None => x,
    };
    let outcome = rfzt::train(input.view(), data.labels(), &cfg.train)?;
    write_atomic(&out, outcome.model.to_json().as_bytes())?;
    let acc = rfzt::training::accuracy_on(&outcome.model, None, input.view(), data.labels())?;
    println!(
        "trained {} epochs, final loss {:.3e}, training accuracy {:.2}%, saved to {}",
        outcome.loss_history.len(),
        outcome.loss_history.last().copied().unwrap_or(f64::NAN),
        acc * 100.0,
        out.display()
    );
    Ok(())
}

fn reports_dir(cfg: &PipelineConfig) -> PathBuf {
    cfg.paths.reports.clone().unwrap_or_else(|| PathBuf::from("reports"))
}

pub fn evaluate(cfg: &PipelineConfig) -> Result<()> {
    let data = load_corpus(cfg)?;
    let report = rfzt::evaluate_cv(&data, &cfg.train, cfg.pca.settings())?;
    let dir = reports_dir(cfg);
    write_json(&dir.join("report.json"), &report)?;
    let table = report.to_table();
    write_atomic(&dir.join("report.txt"), table.as_bytes())?;
    write_atomic(&dir.join("confusion.csv"), report.confusion.to_csv().as_bytes())?;
    print!("{table}");
    Ok(())
}

/// Classifier behind an optional projection, seen as one predictor.
struct Pipeline<'a> {
    pca: Option<&'a PcaModel>,
    mlp: &'a MlpModel,
}

impl Predictor for Pipeline<'_> {
    fn input_dim(&self) -> usize {
        self.pca.map_or(self.mlp.input_dim(), PcaModel::input_dim)
    }

    fn output_dim(&self) -> usize {
        self.mlp.class_count()
    }

    fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        match self.pca {
            Some(p) => self.mlp.predict_batch(p.transform(x)?.view()),
            None => self.mlp.predict_batch(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplainMethod {
    ShapExact,
    ShapSample,
    Lime,
}

pub struct ExplainRequest {
    pub method: ExplainMethod,
    pub instance: usize,
    pub class: Option<ClassLabel>,
    pub use_pca: bool,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Attribution {
    Shap(ShapExplanation),
    Lime(LimeExplanation),
}

#[derive(Serialize)]
struct ExplainRecord {
    instance: usize,
    true_label: ClassLabel,
    predicted: ClassLabel,
    method: ExplainMethod,
    /// Attributions live in the classifier's input space (PCA components when a projection is used).
    explanation: Attribution,
    /// SHAP attributions spread back over spectrum bins; present only with a projection.
    bin_attribution: Option<Vec<f64>>,
}

pub fn explain(cfg: &PipelineConfig, req: &ExplainRequest) -> Result<()> {
    let data = load_corpus(cfg)?;
    let mlp = MlpModel::load(&require(&cfg.paths.model, "model")?)?;
    let pca = load_pca(cfg, req.use_pca)?;
    if req.instance >= data.len() {
        return Err(Error::config(
            "instance",
            format!("corpus has {} rows, got index {}", data.len(), req.instance),
        ));
    }
    let x = data.features_f64();
    let inputs = match &pca {
        Some(p) => p.transform(x.view())?,
        None => x,
    };
    let instance = inputs.row(req.instance).to_vec();
    let predicted = mlp.predict(&instance)?;
    let predicted_label = ClassLabel::from_code(predicted.predicted).expect("four-class model");
    let class = req.class.map_or(predicted.predicted, ClassLabel::code);

    let mut order: Vec<usize> = (0..inputs.nrows()).collect();
    order.shuffle(&mut seed::rng(seed::derive(cfg.seed, "explain/background")));
    order.truncate(cfg.explain.background.min(order.len()));
    let background = inputs.select(Axis(0), &order);
    let d = inputs.ncols();
    let stage_seed = seed::derive(cfg.seed, "explain/sampling");

    let (explanation, values) = match req.method {
        ExplainMethod::ShapExact => {
            let features = cfg
                .explain
                .features
                .clone()
                .unwrap_or_else(|| (0..d.min(10)).collect());
            if let Some(&bad) = features.iter().find(|&&j| j >= d) {
                return Err(Error::config("features", format!("index {bad} out of range for {d} inputs")));
            }
            let e = shap_exact(&mlp, &instance, background.view(), class, &features)?;
            let v = e.phi.clone();
            (Attribution::Shap(e), v)
        }
        ExplainMethod::ShapSample => {
            let e = shap_sampled(&mlp, &instance, background.view(), class, cfg.explain.samples, stage_seed)?;
            let v = e.phi.clone();
            (Attribution::Shap(e), v)
        }
        ExplainMethod::Lime => {
            if req.class.is_some_and(|c| c.code() != predicted.predicted) {
                return Err(Error::config("class", "lime explains the predicted class only"));
            }
            let stats = FeatureStats::from_data(inputs.view())?;
            let width = cfg.explain.kernel_width.unwrap_or_else(|| default_kernel_width(d));
            let e = lime_explain(
                &mlp,
                &instance,
                &stats,
                width,
                cfg.explain.top_k.min(d),
                cfg.explain.perturbations,
                stage_seed,
            )?;
            let v = e.coefficients.clone();
            (Attribution::Lime(e), v)
        }
    };
    let bin_attribution = match (&pca, &explanation) {
        (Some(p), Attribution::Shap(e)) => Some(map_to_bins(&e.phi, p)?),
        _ => None,
    };

    let mut text = rank_table(
        &format!(
            "instance {} (true {}, predicted {} at {:.3}), explaining class {}",
            req.instance,
            data.labels()[req.instance],
            predicted_label,
            predicted.confidence,
            ClassLabel::from_code(class).expect("valid class")
        ),
        &values,
        cfg.explain.top_k,
    );
    if let Some(bins) = &bin_attribution {
        text.push('\n');
        text.push_str(&rank_table("spectrum bins", bins, cfg.explain.top_k));
    }
    print!("{text}");

    if let Some(out) = &req.out {
        let record = ExplainRecord {
            instance: req.instance,
            true_label: data.labels()[req.instance],
            predicted: predicted_label,
            method: req.method,
            explanation,
            bin_attribution,
        };
        write_json(out, &record)?;
    }
    Ok(())
}

pub struct AuthRequest {
    pub stream: PathBuf,
    pub enrolled: ClassLabel,
    pub session_id: String,
    pub use_pca: bool,
    pub out: Option<PathBuf>,
}

pub fn auth_sim(cfg: &PipelineConfig, req: &AuthRequest) -> Result<()> {
    let mlp = MlpModel::load(&require(&cfg.paths.model, "model")?)?;
    let pca = load_pca(cfg, req.use_pca)?;
    let model = Pipeline {
        pca: pca.as_ref(),
        mlp: &mlp,
    };
    let stream = LabeledSpectrumSet::load_csv(&req.stream)?;
    let evidence = stream
        .features_f64()
        .rows()
        .into_iter()
        .map(|r| Evidence::Features(r.to_vec()))
        .collect::<Vec<_>>();
    let policy = &cfg.auth;
    let state = SessionState::open(req.session_id.clone(), req.enrolled, policy, 0.0)?;
    let mut clock = SimulatedClock::new(policy.interval_seconds, policy.interval_seconds);
    let log = run_session(state, evidence, &model, policy, &mut clock)?;
    let mut lines = String::new();
    for entry in &log.entries {
        let line = serde_json::to_string(entry).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(lines, "{line}").expect("string write");
    }
    match &req.out {
        Some(path) => {
            write_atomic(path, lines.as_bytes())?;
            println!(
                "{} decisions, final trust {:?}, log written to {}",
                log.entries.len(),
                log.final_state.trust,
                path.display()
            );
        }
        None => print!("{lines}"),
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TimingRow {
    source: PathBuf,
    pca_components: Option<usize>,
    /// One timing sample per stage per evaluated instance.
    samples_per_stage: u64,
    mean_projection_ms: f64,
    mean_classifier_ms: f64,
    mean_total_ms: f64,
}

#[derive(Debug, Serialize)]
struct TimingComparison {
    classifier_ms_with_pca: f64,
    classifier_ms_without_pca: f64,
    pca_classifier_faster: bool,
    total_ms_with_pca: f64,
    total_ms_without_pca: f64,
}

#[derive(Debug, Serialize)]
struct TimingReport {
    schema_version: u32,
    runs: Vec<TimingRow>,
    comparison: Option<TimingComparison>,
    notices: Vec<String>,
}

fn timing_row(source: &Path, r: &EvalReport) -> TimingRow {
    let components: Vec<usize> = r.per_fold.iter().filter_map(|f| f.pca_components).collect();
    TimingRow {
        source: source.to_path_buf(),
        pca_components: (!components.is_empty())
            .then(|| (components.iter().sum::<usize>() as f64 / components.len() as f64).round() as usize),
        samples_per_stage: r.timing.instances,
        mean_projection_ms: r.timing.mean_projection_ms(),
        mean_classifier_ms: r.timing.mean_classifier_ms(),
        mean_total_ms: r.timing.mean_projection_ms() + r.timing.mean_classifier_ms(),
    }
}

pub fn timing(cfg: &PipelineConfig, reports: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let dir = reports_dir(cfg);
    let sources = if reports.is_empty() {
        vec![dir.join("report.json")]
    } else {
        reports.to_vec()
    };
    let mut runs = Vec::new();
    let mut notices = Vec::new();
    for src in &sources {
        match std::fs::read_to_string(src) {
            Ok(text) => match serde_json::from_str::<EvalReport>(&text) {
                Ok(r) => runs.push(timing_row(src, &r)),
                Err(e) => notices.push(format!("{}: not an evaluation report ({e})", src.display())),
            },
            Err(_) => notices.push(format!("{}: missing; run `rfzt evaluate` first", src.display())),
        }
    }
    if runs.is_empty() {
        notices.push("no evaluation artifacts found; the report is empty".into());
    }
    let with = runs.iter().find(|r| r.pca_components.is_some());
    let without = runs.iter().find(|r| r.pca_components.is_none());
    let comparison = match (with, without) {
        (Some(a), Some(b)) => Some(TimingComparison {
            classifier_ms_with_pca: a.mean_classifier_ms,
            classifier_ms_without_pca: b.mean_classifier_ms,
            pca_classifier_faster: a.mean_classifier_ms < b.mean_classifier_ms,
            total_ms_with_pca: a.mean_total_ms,
            total_ms_without_pca: b.mean_total_ms,
        }),
        _ => None,
    };
    let report = TimingReport {
        schema_version: 1,
        runs,
        comparison,
        notices,
    };

    let mut text = format!(
        "{:<40} {:>10} {:>8} {:>14} {:>14}\n",
        "report", "components", "samples", "projection ms", "classifier ms"
    );
    for r in &report.runs {
        writeln!(
            text,
            "{:<40} {:>10} {:>8} {:>14.4} {:>14.4}",
            r.source.display(),
            r.pca_components.map_or("-".into(), |c| c.to_string()),
            r.samples_per_stage,
            r.mean_projection_ms,
            r.mean_classifier_ms
        )
        .expect("string write");
    }
    if let Some(c) = &report.comparison {
        writeln!(
            text,
            "classifier with PCA is {} ({:.4} vs {:.4} ms per instance)",
            if c.pca_classifier_faster { "faster" } else { "not faster" },
            c.classifier_ms_with_pca,
            c.classifier_ms_without_pca
        )
        .expect("string write");
    }
    for n in &report.notices {
        writeln!(text, "note: {n}").expect("string write");
    }
    print!("{text}");
    write_json(&out.map_or_else(|| dir.join("timing.json"), Path::to_path_buf), &report)
}
