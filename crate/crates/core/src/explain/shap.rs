//! Shapley attributions for a fixed model.
//!
//! The value of a coalition `S` is the model output with features outside
//! `S` replaced by background rows, averaged over the background
//! (interventional expectation). Exact mode enumerates every subset of a
//! chosen feature list; sampled mode averages marginal contributions along
//! random feature orderings.

use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::Predictor;
use crate::seed;

pub const MAX_EXACT_FEATURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapMethod {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapExplanation {
    /// One attribution per input feature; zero for features not explained.
    pub phi: Vec<f64>,
    pub base_value: f64,
    /// Model output for `class_explained` on the instance.
    pub model_output: f64,
    pub class_explained: usize,
    pub method: ShapMethod,
    /// Orderings drawn; 0 for exact enumeration.
    pub sample_count: usize,
    /// Features that took part in the game.
    pub features: Vec<usize>,
}

impl ShapExplanation {
    pub fn phi_sum(&self) -> f64 {
        self.phi.iter().sum()
    }

    /// Features ranked by |phi|, ties to the lower index.
    pub fn ranking(&self) -> Vec<usize> {
        rank_by_magnitude(&self.phi)
    }
}

pub(crate) fn rank_by_magnitude(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    idx
}

fn check_inputs<P: Predictor + ?Sized>(
    model: &P,
    instance: &[f64],
    background: ArrayView2<'_, f64>,
    class_idx: usize,
) -> Result<()> {
    if instance.len() != model.input_dim() {
        return Err(Error::Dimension {
            expected: model.input_dim(),
            actual: instance.len(),
            context: "instance width",
        });
    }
    if background.nrows() == 0 {
        return Err(Error::EmptyInput("background set"));
    }
    if background.ncols() != model.input_dim() {
        return Err(Error::Dimension {
            expected: model.input_dim(),
            actual: background.ncols(),
            context: "background width",
        });
    }
    if class_idx >= model.output_dim() {
        return Err(Error::Dimension {
            expected: model.output_dim(),
            actual: class_idx,
            context: "class index",
        });
    }
    Ok(())
}

fn mean_output<P: Predictor + ?Sized>(model: &P, rows: ArrayView2<'_, f64>, class_idx: usize) -> Result<f64> {
    let out = model.predict_batch(rows)?;
    Ok(out.column(class_idx).iter().sum::<f64>() / rows.nrows() as f64)
}

/// Shapley weight `|S|! (n - |S| - 1)! / n!` for a coalition of size `s`.
pub fn shapley_weight(n: usize, s: usize) -> f64 {
    // n * C(n-1, s) computed in floating point; exact for n <= 20.
    let mut binom = 1.0f64;
    for j in 0..s {
        binom = binom * (n - 1 - j) as f64 / (j + 1) as f64;
    }
    1.0 / (n as f64 * binom)
}

/// Exact Shapley values over `feature_subset`, holding other features at the instance.
pub fn shap_exact<P: Predictor + ?Sized>(
    model: &P,
    instance: &[f64],
    background: ArrayView2<'_, f64>,
    class_idx: usize,
    feature_subset: &[usize],
) -> Result<ShapExplanation> {
    check_inputs(model, instance, background, class_idx)?;
    let n = feature_subset.len();
    if n > MAX_EXACT_FEATURES {
        return Err(Error::SubsetTooLarge {
            requested: n,
            max: MAX_EXACT_FEATURES,
        });
    }
    if let Some(&bad) = feature_subset.iter().find(|&&j| j >= instance.len()) {
        return Err(Error::Dimension {
            expected: instance.len(),
            actual: bad,
            context: "feature index",
        });
    }
    let mut dedup = feature_subset.to_vec();
    dedup.sort_unstable();
    dedup.dedup();
    if dedup.len() != n {
        return Err(Error::DegenerateInput("feature subset contains duplicates".into()));
    }

    let b = background.nrows();
    let d = instance.len();
    // Each coalition is evaluated as its own batch of `b` rows so a row's
    // arithmetic never depends on which coalition it belongs to.
    let mut rows = Array2::zeros((b, d));
    let mut value = vec![0.0; 1 << n];
    for (mask, v) in value.iter_mut().enumerate() {
        for (r, mut row) in rows.rows_mut().into_iter().enumerate() {
            row.assign(&ndarray::ArrayView1::from(instance));
            for (bit, &j) in feature_subset.iter().enumerate() {
                if mask & (1 << bit) == 0 {
                    row[j] = background[[r, j]];
                }
            }
        }
        *v = mean_output(model, rows.view(), class_idx)?;
    }

    let mut phi = vec![0.0; d];
    let weights: Vec<f64> = (0..n.max(1)).map(|s| shapley_weight(n, s)).collect();
    for (bit, &j) in feature_subset.iter().enumerate() {
        let mut acc = 0.0;
        for mask in 0..(1usize << n) {
            if mask & (1 << bit) != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            acc += weights[s] * (value[mask | (1 << bit)] - value[mask]);
        }
        phi[j] = acc;
    }

    Ok(ShapExplanation {
        phi,
        base_value: value[0],
        model_output: value[(1 << n) - 1],
        class_explained: class_idx,
        method: ShapMethod::Exact,
        sample_count: 0,
        features: feature_subset.to_vec(),
    })
}

/// Permutation-sampling estimate of Shapley values over all features.
///
/// Each draw picks a random ordering and a random background row, then walks
/// the ordering switching features from the background row to the instance
/// and credits each step's output change to the switched feature.
pub fn shap_sampled<P: Predictor + ?Sized>(
    model: &P,
    instance: &[f64],
    background: ArrayView2<'_, f64>,
    class_idx: usize,
    n_samples: usize,
    seed: u64,
) -> Result<ShapExplanation> {
    check_inputs(model, instance, background, class_idx)?;
    if n_samples == 0 {
        return Err(Error::config("samples", "must be at least 1"));
    }
    let d = instance.len();
    let mut rng = seed::rng(seed::derive(seed, "shap/sampled"));
    let mut order: Vec<usize> = (0..d).collect();
    let mut phi = vec![0.0; d];
    let mut path = Array2::zeros((d + 1, d));
    for _ in 0..n_samples {
        order.shuffle(&mut rng);
        let r = rng.random_range(0..background.nrows());
        path.row_mut(0).assign(&background.row(r));
        for (step, &j) in order.iter().enumerate() {
            let (prev, mut next) = path.multi_slice_mut((ndarray::s![step, ..], ndarray::s![step + 1, ..]));
            next.assign(&prev);
            next[j] = instance[j];
        }
        let out = model.predict_batch(path.view())?;
        for (step, &j) in order.iter().enumerate() {
            phi[j] += out[[step + 1, class_idx]] - out[[step, class_idx]];
        }
    }
    let inv = 1.0 / n_samples as f64;
    phi.iter_mut().for_each(|p| *p *= inv);

    let base_value = mean_output(model, background, class_idx)?;
    let x = ArrayView2::from_shape((1, d), instance).expect("one row");
    let model_output = model.predict_batch(x)?[[0, class_idx]];
    Ok(ShapExplanation {
        phi,
        base_value,
        model_output,
        class_explained: class_idx,
        method: ShapMethod::Sampled,
        sample_count: n_samples,
        features: (0..d).collect(),
    })
}
