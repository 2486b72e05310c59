//! Mini-batch Adam training, stratified k-fold evaluation and
//! classification metrics.

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::{one_hot, row_losses, Gradients, MlpModel};
use crate::pca::PcaModel;
use crate::rf_ingest::{ClassLabel, LabeledSpectrumSet, CLASS_COUNT};
use crate::seed;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub hidden_widths: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub folds: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_widths: vec![256, 128, 64],
            epochs: 200,
            batch_size: 10,
            folds: 10,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::config("epochs", "must be at least 1"));
        }
        if self.batch_size < 1 {
            return Err(Error::config("batch_size", "must be at least 1"));
        }
        if self.folds < 2 {
            return Err(Error::config("folds", "must be at least 2"));
        }
        if self.hidden_widths.contains(&0) {
            return Err(Error::config("hidden_widths", "every hidden width must be positive"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning_rate", "must be finite and non-negative"));
        }
        for (field, beta) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::config(field, "must be in [0, 1)"));
            }
        }
        if !(self.adam_epsilon > 0.0 && self.adam_epsilon.is_finite()) {
            return Err(Error::config("adam_epsilon", "must be positive"));
        }
        Ok(())
    }
}

/// Adam optimiser state with bias-corrected moments.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    moments: Vec<[(Array2<f64>, Array1<f64>); 2]>,
}

impl Adam {
    pub fn new(model: &MlpModel, config: &TrainConfig) -> Self {
        let moments = model
            .layers()
            .iter()
            .map(|l| {
                let zero = || (Array2::zeros(l.weights.raw_dim()), Array1::zeros(l.bias.len()));
                [zero(), zero()]
            })
            .collect();
        Self {
            lr: config.learning_rate,
            beta1: config.adam_beta1,
            beta2: config.adam_beta2,
            eps: config.adam_epsilon,
            step: 0,
            moments,
        }
    }

    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients) {
        self.step += 1;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let c1 = 1.0 - b1.powi(self.step);
        let c2 = 1.0 - b2.powi(self.step);
        let lr = self.lr;
        for ((layer, (gw, gb)), [m, v]) in model.layers_mut().iter_mut().zip(&grads.layers).zip(&mut self.moments) {
            Zip::from(&mut layer.weights)
                .and(gw)
                .and(&mut m.0)
                .and(&mut v.0)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                });
            Zip::from(&mut layer.bias)
                .and(gb)
                .and(&mut m.1)
                .and(&mut v.1)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    *w -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
                });
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Mean per-sample loss of each epoch.
    pub loss_history: Vec<f64>,
}

/// Trains a fresh network on `features` for `config.epochs` epochs.
///
/// Rows are reshuffled every epoch from a seed derived from the epoch index.
/// The epoch loss is accumulated per sample and summed in index order, so it
/// does not depend on the shuffle.
pub fn train(features: ArrayView2<'_, f64>, labels: &[ClassLabel], config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let n = features.nrows();
    if n != labels.len() {
        return Err(Error::Dimension {
            expected: n,
            actual: labels.len(),
            context: "feature rows vs labels",
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput("no training rows"));
    }
    let model = MlpModel::init(
        features.ncols(),
        &config.hidden_widths,
        CLASS_COUNT,
        seed::derive(config.seed, "mlp/init"),
    )?;
    train_from(model, features, labels, config)
}

/// Continues training an existing model.
pub fn train_from(
    mut model: MlpModel,
    features: ArrayView2<'_, f64>,
    labels: &[ClassLabel],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    let n = features.nrows();
    let targets: Vec<usize> = labels.iter().map(|l| l.code()).collect();
    let mut adam = Adam::new(&model, config);
    let mut order: Vec<usize> = (0..n).collect();
    let mut losses = vec![0.0; n];
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let mut rng = seed::rng(seed::derive_indexed(config.seed, "train/shuffle", epoch as u64));
        order.sort_unstable();
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let xb = features.select(Axis(0), batch);
            let tb: Vec<usize> = batch.iter().map(|&i| targets[i]).collect();
            let cache = model.forward_batch(xb.view()).map_err(|e| match e {
                Error::NonFinite(_) => Error::NonFiniteLoss { epoch },
                other => other,
            })?;
            for (&i, l) in batch.iter().zip(row_losses(cache.output(), &tb)) {
                losses[i] = l;
            }
            let grads = model.backward(&cache, one_hot(&tb, CLASS_COUNT).view())?;
            adam.step(&mut model, &grads);
        }
        let mean = losses.iter().sum::<f64>() / n as f64;
        if !mean.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        history.push(mean);
    }
    Ok(TrainOutcome {
        model,
        loss_history: history,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits indices into `k` folds preserving class proportions.
///
/// Each class's indices are shuffled and dealt round-robin, starting where
/// the previous class stopped so fold sizes stay balanced. Every fold holds
/// `⌊n_c/k⌋` or `⌈n_c/k⌉` members of class `c`.
pub fn stratified_kfold(labels: &[ClassLabel], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::config("folds", "must be at least 2"));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); CLASS_COUNT];
    for (i, l) in labels.iter().enumerate() {
        by_class[l.code()].push(i);
    }
    let mut fold_of = vec![0usize; labels.len()];
    let mut offset = 0;
    for (class, members) in by_class.iter_mut().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::InsufficientClass {
                class,
                count: members.len(),
                k,
            });
        }
        let mut rng = seed::rng(seed::derive_indexed(seed, "kfold/class", class as u64));
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            fold_of[i] = (offset + j) % k;
        }
        offset = (offset + members.len()) % k;
    }
    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..labels.len()).partition(|&i| fold_of[i] == f);
            Fold { train, test }
        })
        .collect())
}

/// Square confusion matrix, rows = true class, columns = predicted class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub precision_macro: f64,
    pub recall_macro: f64,
    pub f1_macro: f64,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        Self {
            counts: vec![vec![0; classes]; classes],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let c = counts.len();
        if counts.iter().any(|r| r.len() != c) {
            return Err(Error::DegenerateInput("confusion matrix must be square".into()));
        }
        Ok(Self { counts })
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.trace(), self.total())
    }

    /// Per-class precision/recall/F1; an empty denominator yields 0.
    pub fn per_class(&self) -> Vec<ClassMetrics> {
        (0..self.classes())
            .map(|c| {
                let tp = self.counts[c][c];
                let support: u64 = self.counts[c].iter().sum();
                let predicted: u64 = self.counts.iter().map(|r| r[c]).sum();
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                ClassMetrics {
                    precision,
                    recall,
                    f1,
                    support,
                }
            })
            .collect()
    }

    pub fn summary(&self) -> MetricSummary {
        let per = self.per_class();
        let c = per.len().max(1) as f64;
        MetricSummary {
            accuracy: self.accuracy(),
            precision_macro: per.iter().map(|m| m.precision).sum::<f64>() / c,
            recall_macro: per.iter().map(|m| m.recall).sum::<f64>() / c,
            f1_macro: per.iter().map(|m| m.f1).sum::<f64>() / c,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\predicted");
        for c in 0..self.classes() {
            out.push(',');
            out.push_str(&class_name(c));
        }
        out.push('\n');
        for (t, row) in self.counts.iter().enumerate() {
            out.push_str(&class_name(t));
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

fn class_name(c: usize) -> String {
    ClassLabel::from_code(c).map_or_else(|| format!("class{c}"), |l| l.name().to_string())
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Where the PCA reduction is fitted during cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PcaFitScope {
    /// Fit on each fold's training rows only.
    #[default]
    PerFold,
    /// Fit once on the full corpus before splitting.
    FullData,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaSettings {
    pub variance_target: f64,
    pub standardize: bool,
    pub scope: PcaFitScope,
}

impl PcaSettings {
    pub fn new(variance_target: f64) -> Self {
        Self {
            variance_target,
            standardize: false,
            scope: PcaFitScope::PerFold,
        }
    }
}

/// Per-instance wall-clock inference cost, split by stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct InferenceTiming {
    pub instances: u64,
    pub projection_ms_total: f64,
    pub classifier_ms_total: f64,
}

impl InferenceTiming {
    pub fn merge(&mut self, other: &InferenceTiming) {
        self.instances += other.instances;
        self.projection_ms_total += other.projection_ms_total;
        self.classifier_ms_total += other.classifier_ms_total;
    }

    pub fn mean_projection_ms(&self) -> f64 {
        self.projection_ms_total / self.instances.max(1) as f64
    }

    pub fn mean_classifier_ms(&self) -> f64 {
        self.classifier_ms_total / self.instances.max(1) as f64
    }
}

/// Times projection and classification one instance at a time.
pub fn time_inference(
    model: &MlpModel,
    pca: Option<&PcaModel>,
    rows: ArrayView2<'_, f64>,
) -> Result<(Vec<usize>, InferenceTiming)> {
    let mut timing = InferenceTiming::default();
    let mut predicted = Vec::with_capacity(rows.nrows());
    for row in rows.rows() {
        let row = row.insert_axis(Axis(0));
        let t0 = Instant::now();
        let features = match pca {
            Some(p) => p.transform(row)?,
            None => row.to_owned(),
        };
        let t1 = Instant::now();
        let out = model.forward_batch(features.view())?;
        let t2 = Instant::now();
        let pred = crate::mlp::Prediction::from_probabilities(out.output().row(0).to_vec());
        predicted.push(pred.predicted);
        timing.instances += 1;
        timing.projection_ms_total += (t1 - t0).as_secs_f64() * 1e3;
        timing.classifier_ms_total += (t2 - t1).as_secs_f64() * 1e3;
    }
    Ok((predicted, timing))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub pca_components: Option<usize>,
    pub final_loss: f64,
    pub metrics: MetricSummary,
    pub confusion: ConfusionMatrix,
    pub timing: InferenceTiming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub instances: usize,
    pub input_features: usize,
    pub pca: Option<PcaSettings>,
    pub config: TrainConfig,
    /// Pooled over all folds.
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision_macro: f64,
    pub recall_macro: f64,
    pub f1_macro: f64,
    pub per_class: Vec<ClassMetrics>,
    /// Unweighted mean of the per-fold metrics.
    pub fold_mean: MetricSummary,
    pub per_fold: Vec<FoldReport>,
    pub timing: InferenceTiming,
}

impl EvalReport {
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "instances {}  features {}  folds {}\n",
            self.instances,
            self.input_features,
            self.per_fold.len()
        ));
        if let Some(p) = &self.pca {
            let comps: Vec<String> = self
                .per_fold
                .iter()
                .map(|f| f.pca_components.map_or("-".into(), |c| c.to_string()))
                .collect();
            s.push_str(&format!(
                "pca target {:.3} ({:?}{}), components per fold: {}\n",
                p.variance_target,
                p.scope,
                if p.standardize { ", standardized" } else { "" },
                comps.join(" ")
            ));
        }
        s.push_str("\n              pooled   fold-mean\n");
        let rows = [
            ("accuracy", self.accuracy, self.fold_mean.accuracy),
            ("precision", self.precision_macro, self.fold_mean.precision_macro),
            ("recall", self.recall_macro, self.fold_mean.recall_macro),
            ("f1", self.f1_macro, self.fold_mean.f1_macro),
        ];
        for (name, pooled, mean) in rows {
            s.push_str(&format!("{name:<12} {:>7.2}%  {:>7.2}%\n", pooled * 100.0, mean * 100.0));
        }
        s.push_str("\nconfusion (rows = true, columns = predicted)\n");
        s.push_str(&format!("{:<10}", ""));
        for c in 0..self.confusion.classes() {
            s.push_str(&format!("{:>9}", class_name(c)));
        }
        s.push('\n');
        for (t, row) in self.confusion.counts.iter().enumerate() {
            s.push_str(&format!("{:<10}", class_name(t)));
            for v in row {
                s.push_str(&format!("{v:>9}"));
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "\nper-instance inference: projection {:.4} ms, classifier {:.4} ms\n",
            self.timing.mean_projection_ms(),
            self.timing.mean_classifier_ms()
        ));
        s
    }
}

/// Stratified k-fold evaluation with optional PCA in front of the classifier.
///
/// Folds are independent and run in parallel; each gets its own training
/// seed derived from the fold index. Metrics are reported both pooled over
/// the aggregated confusion matrix and as per-fold means.
pub fn evaluate_cv(data: &LabeledSpectrumSet, config: &TrainConfig, pca: Option<PcaSettings>) -> Result<EvalReport> {
    config.validate()?;
    data.require_all_classes()?;
    let features = data.features_f64();
    let labels = data.labels();
    let folds = stratified_kfold(labels, config.folds, seed::derive(config.seed, "kfold"))?;

    let global_pca = match pca {
        Some(p) if p.scope == PcaFitScope::FullData => {
            Some(PcaModel::fit(features.view(), p.variance_target, p.standardize)?)
        }
        _ => None,
    };

    let fold_reports: Vec<FoldReport> = folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| {
            let train_x = features.select(Axis(0), &fold.train);
            let test_x = features.select(Axis(0), &fold.test);
            let train_y: Vec<ClassLabel> = fold.train.iter().map(|&i| labels[i]).collect();

            let fold_pca = match (pca, &global_pca) {
                (_, Some(g)) => Some(g.clone()),
                (Some(p), None) => Some(PcaModel::fit(train_x.view(), p.variance_target, p.standardize)?),
                (None, None) => None,
            };
            let train_in = match &fold_pca {
                Some(p) => p.transform(train_x.view())?,
                None => train_x,
            };
            let fold_config = TrainConfig {
                seed: seed::derive_indexed(config.seed, "cv/fold", f as u64),
                ..config.clone()
            };
            let outcome = train(train_in.view(), &train_y, &fold_config)?;
            let (predicted, timing) = time_inference(&outcome.model, fold_pca.as_ref(), test_x.view())?;

            let mut confusion = ConfusionMatrix::new(CLASS_COUNT);
            for (&i, &p) in fold.test.iter().zip(&predicted) {
                confusion.record(labels[i].code(), p);
            }
            Ok(FoldReport {
                fold: f,
                train_size: fold.train.len(),
                test_size: fold.test.len(),
                pca_components: fold_pca.as_ref().map(PcaModel::component_count),
                final_loss: *outcome.loss_history.last().expect("epochs >= 1"),
                metrics: confusion.summary(),
                confusion,
                timing,
            })
        })
        .collect::<Result<_>>()?;

    let mut confusion = ConfusionMatrix::new(CLASS_COUNT);
    let mut timing = InferenceTiming::default();
    for r in &fold_reports {
        confusion.merge(&r.confusion);
        timing.merge(&r.timing);
    }
    let pooled = confusion.summary();
    let k = fold_reports.len() as f64;
    let mean_of = |get: fn(&MetricSummary) -> f64| fold_reports.iter().map(|r| get(&r.metrics)).sum::<f64>() / k;
    let fold_mean = MetricSummary {
        accuracy: mean_of(|m| m.accuracy),
        precision_macro: mean_of(|m| m.precision_macro),
        recall_macro: mean_of(|m| m.recall_macro),
        f1_macro: mean_of(|m| m.f1_macro),
    };

    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        instances: data.len(),
        input_features: data.feature_count(),
        pca,
        config: config.clone(),
        per_class: confusion.per_class(),
        accuracy: pooled.accuracy,
        precision_macro: pooled.precision_macro,
        recall_macro: pooled.recall_macro,
        f1_macro: pooled.f1_macro,
        confusion,
        fold_mean,
        per_fold: fold_reports,
        timing,
    })
}

/// Accuracy of `model` (optionally behind `pca`) on a labelled set.
pub fn accuracy_on(model: &MlpModel, pca: Option<&PcaModel>, x: ArrayView2<'_, f64>, labels: &[ClassLabel]) -> Result<f64> {
    let input = match pca {
        Some(p) => p.transform(x)?,
        None => x.to_owned(),
    };
    let out = model.forward_batch(input.view())?;
    let correct = out
        .output()
        .rows()
        .into_iter()
        .zip(labels)
        .filter(|(row, l)| crate::mlp::Prediction::from_probabilities(row.to_vec()).predicted == l.code())
        .count();
    Ok(correct as f64 / labels.len().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::{Bebop as B, NoDrone as A};

    #[test]
    fn hand_confusion_metrics() {
        let cm = ConfusionMatrix::from_counts(vec![vec![2, 0], vec![1, 1]]).unwrap();
        let s = cm.summary();
        assert_eq!(s.accuracy, 0.75);
        assert!((s.precision_macro - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.recall_macro, 0.75);
    }

    #[test]
    fn unpredicted_class_scores_zero_precision() {
        let cm = ConfusionMatrix::from_counts(vec![vec![3, 0], vec![2, 0]]).unwrap();
        let per = cm.per_class();
        assert_eq!(per[1].precision, 0.0);
        assert_eq!(per[1].f1, 0.0);
    }

    #[test]
    fn balanced_folds_get_one_of_each() {
        let labels: Vec<ClassLabel> = ClassLabel::ALL.iter().flat_map(|&c| std::iter::repeat_n(c, 10)).collect();
        let folds = stratified_kfold(&labels, 10, 1).unwrap();
        for f in &folds {
            let mut counts = [0; 4];
            for &i in &f.test {
                counts[labels[i].code()] += 1;
            }
            assert_eq!(counts, [1, 1, 1, 1]);
        }
    }

    #[test]
    fn two_class_five_fold() {
        let labels: Vec<ClassLabel> = [vec![A; 5], vec![B; 5]].concat();
        for f in stratified_kfold(&labels, 5, 3).unwrap() {
            let a = f.test.iter().filter(|&&i| labels[i] == A).count();
            assert_eq!((a, f.test.len() - a), (1, 1));
        }
    }

    #[test]
    fn uneven_classes_partition() {
        let labels: Vec<ClassLabel> = [vec![A; 7], vec![B; 5]].concat();
        let folds = stratified_kfold(&labels, 5, 9).unwrap();
        let mut seen = vec![false; 12];
        for f in &folds {
            let a = f.test.iter().filter(|&&i| labels[i] == A).count();
            let b = f.test.len() - a;
            assert!((1..=2).contains(&a));
            assert_eq!(b, 1);
            for &i in &f.test {
                assert!(!seen[i]);
                seen[i] = true;
            }
            assert_eq!(f.train.len() + f.test.len(), 12);
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn too_few_members_is_an_error() {
        let labels = [vec![A; 3], vec![B; 10]].concat();
        assert!(matches!(
            stratified_kfold(&labels, 5, 0),
            Err(Error::InsufficientClass { class: 0, count: 3, k: 5 })
        ));
    }

    #[test]
    fn config_validation_names_field() {
        let cfg = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "batch_size"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
