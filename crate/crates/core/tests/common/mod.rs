//! Test-only oracles and toy models, independent of the library's numerics.
#![allow(dead_code)]

pub mod folds;
pub mod gradcheck;
pub mod shapley;

use ndarray::{Array2, ArrayView2};
use rfzt::mlp::Predictor;
use rfzt::Result;

/// Direct O(N·M) evaluation of `|Σ_n x(n) exp(-j2π m n / L)|` for `m < bins`,
/// with `L` the transform length.
pub fn direct_dft_magnitudes(x: &[f64], transform_len: usize, bins: usize) -> Vec<f64> {
    (0..bins)
        .map(|m| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (n, &v) in x.iter().enumerate().take(transform_len) {
                let ang = -2.0 * std::f64::consts::PI * (m * n % transform_len) as f64 / transform_len as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            re.hypot(im)
        })
        .collect()
}

/// `f(x) = w·x + b`, single output.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Predictor for LinearModel {
    fn input_dim(&self) -> usize {
        self.w.len()
    }
    fn output_dim(&self) -> usize {
        1
    }
    fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        Ok(Array2::from_shape_fn((x.nrows(), 1), |(i, _)| {
            x.row(i).iter().zip(&self.w).map(|(a, b)| a * b).sum::<f64>() + self.b
        }))
    }
}

#[derive(Debug, Clone)]
pub struct ConstantModel {
    pub dim: usize,
    pub value: f64,
}

impl Predictor for ConstantModel {
    fn input_dim(&self) -> usize {
        self.dim
    }
    fn output_dim(&self) -> usize {
        1
    }
    fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        Ok(Array2::from_elem((x.nrows(), 1), self.value))
    }
}

/// Nonlinear toy: two outputs, `sigmoid(Σ a_j x_j + Σ c_jk x_j x_k)` and its complement.
#[derive(Debug, Clone)]
pub struct InteractionModel {
    pub a: Vec<f64>,
    pub pairs: Vec<(usize, usize, f64)>,
}

impl Predictor for InteractionModel {
    fn input_dim(&self) -> usize {
        self.a.len()
    }
    fn output_dim(&self) -> usize {
        2
    }
    fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((x.nrows(), 2));
        for (i, row) in x.rows().into_iter().enumerate() {
            let mut s: f64 = row.iter().zip(&self.a).map(|(v, a)| v * a).sum();
            for &(j, k, c) in &self.pairs {
                s += c * row[j] * row[k];
            }
            let p = 1.0 / (1.0 + (-s).exp());
            out[[i, 0]] = p;
            out[[i, 1]] = 1.0 - p;
        }
        Ok(out)
    }
}

/// Returns a fixed probability vector chosen by the first feature's integer value.
#[derive(Debug, Clone)]
pub struct ScriptedClassifier {
    pub table: Vec<Vec<f64>>,
}

impl Predictor for ScriptedClassifier {
    fn input_dim(&self) -> usize {
        1
    }
    fn output_dim(&self) -> usize {
        4
    }
    fn predict_batch(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((x.nrows(), 4));
        for (i, row) in x.rows().into_iter().enumerate() {
            let probs = &self.table[row[0] as usize];
            for (j, p) in probs.iter().enumerate() {
                out[[i, j]] = *p;
            }
        }
        Ok(out)
    }
}

/// Probability vector with `confidence` on `class` and the rest spread evenly.
pub fn probs(class: usize, confidence: f64) -> Vec<f64> {
    let rest = (1.0 - confidence) / 3.0;
    (0..4).map(|c| if c == class { confidence } else { rest }).collect()
}
