//! Local weighted-linear surrogate explanations.
//!
//! Perturbations are drawn around the instance from per-feature Gaussian
//! spreads and weighted by `exp(-d² / width²)`, with `d` the Euclidean
//! distance in standardised units. A ridge fit over all features picks the
//! `top_k` largest standardised coefficients; an exact weighted least-squares
//! refit on those features gives the reported surrogate.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ArrayView2, Axis};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::{Prediction, Predictor};
use crate::seed;

/// Per-feature location and spread used to scale perturbations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureStats {
    pub fn from_data(data: ArrayView2<'_, f64>) -> Result<Self> {
        let n = data.nrows();
        if n < 2 {
            return Err(Error::DegenerateData("feature statistics need at least 2 rows".into()));
        }
        let mean = data.mean_axis(Axis(0)).expect("n >= 2");
        let std = data.var_axis(Axis(0), 1.0).mapv(f64::sqrt);
        Ok(Self {
            mean: mean.to_vec(),
            std: std.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.std.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimeExplanation {
    /// Surrogate slope per input feature (model units per feature unit); zero
    /// outside `selected`.
    pub coefficients: Vec<f64>,
    /// Surrogate value at the instance.
    pub intercept: f64,
    pub kernel_width: f64,
    /// Kernel-weighted coefficient of determination of the surrogate.
    pub r_squared: f64,
    pub top_k: usize,
    pub selected: Vec<usize>,
    pub class_explained: usize,
    pub model_output: f64,
    pub n_perturbations: usize,
}

/// Proximity kernel `exp(-d² / width²)`.
pub fn kernel_weight(distance: f64, kernel_width: f64) -> f64 {
    (-(distance * distance) / (kernel_width * kernel_width)).exp()
}

/// Default kernel width `0.75 * sqrt(D)`.
pub fn default_kernel_width(dim: usize) -> f64 {
    0.75 * (dim as f64).sqrt()
}

/// Explains the instance's winning class with a sparse local linear surrogate.
#[allow(clippy::too_many_arguments)]
pub fn lime_explain<P: Predictor + ?Sized>(
    model: &P,
    instance: &[f64],
    stats: &FeatureStats,
    kernel_width: f64,
    top_k: usize,
    n_perturbations: usize,
    seed: u64,
) -> Result<LimeExplanation> {
    let d = model.input_dim();
    if instance.len() != d || stats.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            actual: if instance.len() != d { instance.len() } else { stats.dim() },
            context: "instance / feature statistics width",
        });
    }
    if !(kernel_width > 0.0 && kernel_width.is_finite()) {
        return Err(Error::config("kernel_width", "must be positive"));
    }
    if top_k == 0 {
        return Err(Error::config("top_k", "must be at least 1"));
    }
    if n_perturbations < top_k + 2 {
        return Err(Error::config(
            "n_perturbations",
            format!("must be at least top_k + 2 = {}", top_k + 2),
        ));
    }

    let x0 = ArrayView2::from_shape((1, d), instance).expect("one row");
    let pred = Prediction::from_probabilities(model.predict_batch(x0)?.row(0).to_vec());
    let class = pred.predicted;

    // Standardised offsets; row 0 is the instance itself.
    let candidates: Vec<usize> = (0..d).filter(|&j| stats.std[j] > 0.0).collect();
    let mut rng = seed::rng(seed::derive(seed, "lime/perturb"));
    let mut offsets = Array2::<f64>::zeros((n_perturbations, d));
    for mut row in offsets.rows_mut().into_iter().skip(1) {
        for &j in &candidates {
            row[j] = StandardNormal.sample(&mut rng);
        }
    }
    let mut samples = offsets.clone();
    for mut row in samples.rows_mut() {
        for j in 0..d {
            row[j] = instance[j] + stats.std[j] * row[j];
        }
    }
    let outputs = model.predict_batch(samples.view())?;
    let y: Vec<f64> = outputs.column(class).to_vec();
    let w: Vec<f64> = offsets
        .rows()
        .into_iter()
        .map(|r| kernel_weight(r.dot(&r).sqrt(), kernel_width))
        .collect();

    let selected = if candidates.len() <= top_k {
        candidates.clone()
    } else {
        let beta = weighted_ridge(&offsets, &candidates, &y, &w)?;
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| beta[b].abs().total_cmp(&beta[a].abs()).then(a.cmp(&b)));
        let mut chosen: Vec<usize> = order[..top_k].iter().map(|&i| candidates[i]).collect();
        chosen.sort_unstable();
        chosen
    };

    let (intercept, beta, r_squared) = weighted_least_squares(&offsets, &selected, &y, &w)?;
    let mut coefficients = vec![0.0; d];
    for (&j, b) in selected.iter().zip(beta) {
        coefficients[j] = b / stats.std[j];
    }
    Ok(LimeExplanation {
        coefficients,
        intercept,
        kernel_width,
        r_squared,
        top_k,
        selected,
        class_explained: class,
        model_output: pred.probabilities[class],
        n_perturbations,
    })
}

fn weighted_mean(values: impl Iterator<Item = f64>, w: &[f64], w_sum: f64) -> f64 {
    values.zip(w).map(|(v, wi)| v * wi).sum::<f64>() / w_sum
}

/// Ridge slopes on weighted-centred columns, for ranking only.
fn weighted_ridge(offsets: &Array2<f64>, cols: &[usize], y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let w_sum: f64 = w.iter().sum();
    let x = offsets.select(Axis(1), cols);
    let means: Vec<f64> = x
        .columns()
        .into_iter()
        .map(|c| weighted_mean(c.iter().copied(), w, w_sum))
        .collect();
    let y_mean = weighted_mean(y.iter().copied(), w, w_sum);
    let mut xs = x;
    for (i, mut row) in xs.rows_mut().into_iter().enumerate() {
        let sw = w[i].sqrt();
        for (v, m) in row.iter_mut().zip(&means) {
            *v = (*v - m) * sw;
        }
    }
    let ys: Vec<f64> = y.iter().zip(w).map(|(v, wi)| (v - y_mean) * wi.sqrt()).collect();
    let gram = xs.t().dot(&xs);
    let p = cols.len();
    let trace: f64 = (0..p).map(|i| gram[[i, i]]).sum();
    let lambda = 1e-6 * trace / p as f64 + 1e-12;
    let mut a = DMatrix::from_row_iterator(p, p, gram.iter().copied());
    for i in 0..p {
        a[(i, i)] += lambda;
    }
    let rhs = DVector::from_iterator(p, xs.t().dot(&ndarray::Array1::from(ys)).iter().copied());
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::SingularFit("ridge system is not positive definite".into()))?;
    Ok(chol.solve(&rhs).iter().copied().collect())
}

/// Weighted least squares with intercept. Returns (intercept, slopes, weighted R²).
fn weighted_least_squares(offsets: &Array2<f64>, cols: &[usize], y: &[f64], w: &[f64]) -> Result<(f64, Vec<f64>, f64)> {
    let n = y.len();
    let p = cols.len() + 1;
    let mut a = DMatrix::zeros(n, p);
    let mut b = DVector::zeros(n);
    for i in 0..n {
        let sw = w[i].sqrt();
        a[(i, 0)] = sw;
        for (k, &j) in cols.iter().enumerate() {
            a[(i, k + 1)] = sw * offsets[[i, j]];
        }
        b[i] = sw * y[i];
    }
    let svd = a.svd(true, true);
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    if !(max_sv > 0.0) || min_sv <= max_sv * 1e-10 {
        return Err(Error::SingularFit(format!(
            "design matrix is rank deficient (condition {:.3e})",
            max_sv / min_sv
        )));
    }
    let coef = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::SingularFit(e.to_string()))?;

    let w_sum: f64 = w.iter().sum();
    let y_mean = weighted_mean(y.iter().copied(), w, w_sum);
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..n {
        let fit = coef[0] + cols.iter().enumerate().map(|(k, &j)| coef[k + 1] * offsets[[i, j]]).sum::<f64>();
        ss_res += w[i] * (y[i] - fit).powi(2);
        ss_tot += w[i] * (y[i] - y_mean).powi(2);
    }
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= f64::EPSILON * w_sum * (1.0 + y_mean.abs()) {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    Ok((coef[0], coef.iter().skip(1).copied().collect(), r_squared))
}
