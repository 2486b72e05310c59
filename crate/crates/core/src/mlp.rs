//! Fully connected classifier: ReLU hidden layers, softmax output,
//! categorical cross-entropy and exact backpropagated gradients.
//!
//! Weight matrices are stored `out x in`, so layer `l` computes
//! `z_l = f_l(W_l z_{l-1} + b_l)`. Batched routines treat rows as instances.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rf_ingest::ClassLabel;
use crate::seed;

pub const MLP_FORMAT_VERSION: u32 = 1;

/// Lower clamp applied to probabilities inside the log of the loss.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Softmax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl LayerParams {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>, activation: Activation) -> Result<Self> {
        if weights.nrows() != bias.len() {
            return Err(Error::Dimension {
                expected: weights.nrows(),
                actual: bias.len(),
                context: "bias length vs weight rows",
            });
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("layer parameters"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }
}

pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(logits: &mut Array2<f64>) {
    for mut row in logits.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
}

/// Class probabilities for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probabilities: Vec<f64>,
    pub predicted: usize,
    pub confidence: f64,
}

impl Prediction {
    /// Argmax with ties going to the lowest index.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Self {
        let mut predicted = 0;
        for (i, &p) in probabilities.iter().enumerate() {
            if p > probabilities[predicted] {
                predicted = i;
            }
        }
        let confidence = probabilities.get(predicted).copied().unwrap_or(f64::NAN);
        Self {
            probabilities,
            predicted,
            confidence,
        }
    }

    pub fn label(&self) -> Option<ClassLabel> {
        ClassLabel::from_code(self.predicted)
    }
}

/// Anything that maps feature rows to per-class scores.
pub trait Predictor: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>>;

    fn predict_one(&self, x: &[f64]) -> Result<Prediction> {
        let row = ArrayView2::from_shape((1, x.len()), x).expect("one row");
        let out = self.predict_batch(row)?;
        Ok(Prediction::from_probabilities(out.row(0).to_vec()))
    }
}

/// Intermediate values from a batched forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `inputs[l]` is the input to layer `l` (batch x in).
    inputs: Vec<Array2<f64>>,
    /// `pre[l]` is `W_l x + b_l` before activation (batch x out).
    pre: Vec<Array2<f64>>,
    /// Softmax output (batch x C).
    output: Array2<f64>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        &self.output
    }

    pub fn batch_size(&self) -> usize {
        self.output.nrows()
    }
}

/// Per-layer weight and bias gradients, aligned with the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<LayerParams>,
}

impl MlpModel {
    pub fn new(layers: Vec<LayerParams>) -> Result<Self> {
        let Some(last) = layers.last() else {
            return Err(Error::EmptyInput("model needs at least one layer"));
        };
        if last.activation != Activation::Softmax {
            return Err(Error::config("activation", "output layer must be softmax"));
        }
        if layers[..layers.len() - 1].iter().any(|l| l.activation != Activation::Relu) {
            return Err(Error::config("activation", "hidden layers must be ReLU"));
        }
        for pair in layers.windows(2) {
            if pair[1].input_dim() != pair[0].output_dim() {
                return Err(Error::Dimension {
                    expected: pair[0].output_dim(),
                    actual: pair[1].input_dim(),
                    context: "consecutive layer widths",
                });
            }
        }
        Ok(Self { layers })
    }

    /// Seeded initialisation: He-uniform for ReLU layers, Glorot-uniform for
    /// the softmax layer, zero biases.
    pub fn init(input_dim: usize, hidden: &[usize], classes: usize, seed: u64) -> Result<Self> {
        if input_dim == 0 || classes < 2 || hidden.contains(&0) {
            return Err(Error::config("hidden_widths", "layer widths must be positive and classes >= 2"));
        }
        let mut rng = seed::rng(seed);
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden);
        dims.push(classes);
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for (l, w) in dims.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let is_output = l == dims.len() - 2;
            let limit = if is_output {
                (6.0 / (fan_in + fan_out) as f64).sqrt()
            } else {
                (6.0 / fan_in as f64).sqrt()
            };
            let weights = Array2::from_shape_simple_fn((fan_out, fan_in), || rng.random_range(-limit..limit));
            let activation = if is_output {
                Activation::Softmax
            } else {
                Activation::Relu
            };
            layers.push(LayerParams::new(weights, Array1::zeros(fan_out), activation)?);
        }
        Self::new(layers)
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [LayerParams] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn class_count(&self) -> usize {
        self.layers.last().expect("non-empty").output_dim()
    }

    /// `[input, hidden..., classes]`.
    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(LayerParams::output_dim))
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Batched forward pass keeping everything backprop needs.
    pub fn forward_batch(&self, x: ArrayView2<'_, f64>) -> Result<ForwardCache> {
        if x.ncols() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                actual: x.ncols(),
                context: "forward input width",
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("forward input"));
        }
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut current = x.to_owned();
        for layer in &self.layers {
            let z = current.dot(&layer.weights.t()) + &layer.bias;
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("layer pre-activation"));
            }
            let next = match layer.activation {
                Activation::Relu => z.mapv(relu),
                Activation::Softmax => {
                    let mut p = z.clone();
                    softmax_rows(&mut p);
                    p
                }
            };
            inputs.push(current);
            pre.push(z);
            current = next;
        }
        Ok(ForwardCache {
            inputs,
            pre,
            output: current,
        })
    }

    /// Single-instance forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<(Prediction, ForwardCache)> {
        let row = ArrayView2::from_shape((1, x.len()), x).expect("one row");
        let cache = self.forward_batch(row)?;
        let pred = Prediction::from_probabilities(cache.output.row(0).to_vec());
        Ok((pred, cache))
    }

    /// Gradients of the batch-mean cross-entropy with respect to every parameter.
    ///
    /// The softmax/cross-entropy pair is differentiated jointly: the output
    /// delta is `(p - y) / batch`.
    pub fn backward(&self, cache: &ForwardCache, targets: ArrayView2<'_, f64>) -> Result<Gradients> {
        if cache.inputs.len() != self.layers.len() {
            return Err(Error::StaleCache(format!(
                "cache has {} layers, model has {}",
                cache.inputs.len(),
                self.layers.len()
            )));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if cache.inputs[l].ncols() != layer.input_dim() || cache.pre[l].ncols() != layer.output_dim() {
                return Err(Error::StaleCache(format!("layer {l} widths differ from the model")));
            }
        }
        if targets.dim() != cache.output.dim() {
            return Err(Error::Dimension {
                expected: cache.output.len(),
                actual: targets.len(),
                context: "target matrix vs batch output",
            });
        }
        let batch = cache.batch_size() as f64;
        let mut delta = (&cache.output - &targets) / batch;
        let mut grads = Vec::with_capacity(self.layers.len());
        for l in (0..self.layers.len()).rev() {
            let grad_w = delta.t().dot(&cache.inputs[l]);
            let grad_b = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut upstream = delta.dot(&self.layers[l].weights);
                ndarray::Zip::from(&mut upstream)
                    .and(&cache.pre[l - 1])
                    .for_each(|g, &z| {
                        if z <= 0.0 {
                            *g = 0.0;
                        }
                    });
                delta = upstream;
            }
            grads.push((grad_w, grad_b));
        }
        grads.reverse();
        Ok(Gradients { layers: grads })
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        Ok(self.forward(x)?.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MlpFile::from(self)).expect("model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MlpFile = serde_json::from_str(text).map_err(|e| Error::Format(format!("model bundle: {e}")))?;
        file.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

impl Predictor for MlpModel {
    fn input_dim(&self) -> usize {
        MlpModel::input_dim(self)
    }

    fn output_dim(&self) -> usize {
        self.class_count()
    }

    fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        Ok(self.forward_batch(x)?.output)
    }
}

/// `-(1/N) Σ_i Σ_j y_ij ln(clamp(p_ij))`.
pub fn cross_entropy_loss(predictions: ArrayView2<'_, f64>, one_hot: ArrayView2<'_, f64>) -> Result<f64> {
    if predictions.dim() != one_hot.dim() {
        return Err(Error::Dimension {
            expected: predictions.len(),
            actual: one_hot.len(),
            context: "prediction vs label matrix",
        });
    }
    if predictions.nrows() == 0 {
        return Err(Error::EmptyInput("no samples for loss"));
    }
    for (i, (p, y)) in predictions.rows().into_iter().zip(one_hot.rows()).enumerate() {
        let ones = y.iter().filter(|&&v| v == 1.0).count();
        if ones != 1 || y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::DegenerateInput(format!("label row {i} is not one-hot")));
        }
        if (p.sum() - 1.0).abs() > 1e-6 {
            return Err(Error::DegenerateInput(format!("prediction row {i} does not sum to 1")));
        }
    }
    let total: f64 = predictions
        .iter()
        .zip(one_hot.iter())
        .filter(|(_, &y)| y != 0.0)
        .map(|(&p, &y)| y * p.clamp(PROB_FLOOR, 1.0).ln())
        .sum();
    Ok(-total / predictions.nrows() as f64 + 0.0)
}

/// Per-row loss without validation, used inside the training loop.
pub(crate) fn row_losses(predictions: &Array2<f64>, targets: &[usize]) -> Vec<f64> {
    targets
        .iter()
        .enumerate()
        .map(|(i, &t)| -predictions[[i, t]].clamp(PROB_FLOOR, 1.0).ln())
        .collect()
}

pub fn one_hot(targets: &[usize], classes: usize) -> Array2<f64> {
    let mut y = Array2::zeros((targets.len(), classes));
    for (i, &t) in targets.iter().enumerate() {
        y[[i, t]] = 1.0;
    }
    y
}

#[derive(Serialize, Deserialize)]
struct MlpFile {
    format_version: u32,
    kind: String,
    layer_dims: Vec<usize>,
    activations: Vec<Activation>,
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    /// Row-major `out x in`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl From<&MlpModel> for MlpFile {
    fn from(m: &MlpModel) -> Self {
        Self {
            format_version: MLP_FORMAT_VERSION,
            kind: "mlp".into(),
            layer_dims: m.layer_dims(),
            activations: m.layers.iter().map(|l| l.activation).collect(),
            layers: m
                .layers
                .iter()
                .map(|l| LayerFile {
                    weights: l.weights.iter().copied().collect(),
                    bias: l.bias.to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<MlpFile> for MlpModel {
    type Error = Error;

    fn try_from(f: MlpFile) -> Result<Self> {
        if f.format_version != MLP_FORMAT_VERSION || f.kind != "mlp" {
            return Err(Error::Format(format!(
                "expected mlp bundle version {MLP_FORMAT_VERSION}, found {} version {}",
                f.kind, f.format_version
            )));
        }
        if f.layer_dims.len() != f.layers.len() + 1 || f.activations.len() != f.layers.len() {
            return Err(Error::Format("layer count disagrees with layer_dims/activations".into()));
        }
        let mut layers = Vec::with_capacity(f.layers.len());
        for (l, (lf, act)) in f.layers.into_iter().zip(f.activations).enumerate() {
            let (inp, out) = (f.layer_dims[l], f.layer_dims[l + 1]);
            let weights = Array2::from_shape_vec((out, inp), lf.weights)
                .map_err(|_| Error::Format(format!("layer {l} weights do not match {out}x{inp}")))?;
            if lf.bias.len() != out {
                return Err(Error::Format(format!("layer {l} bias length {} != {out}", lf.bias.len())));
            }
            layers.push(LayerParams::new(weights, Array1::from(lf.bias), act)?);
        }
        MlpModel::new(layers)
    }
}
