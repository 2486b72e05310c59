//! Principal-component reduction retaining a target fraction of variance.
//!
//! Components come from the SVD of the centred (optionally standardised)
//! data matrix. The retained count is the smallest `k` whose cumulative
//! explained variance reaches the target.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PCA_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Array1<f64>,
    /// Per-feature divisor applied after centring; `None` means centring only.
    scale: Option<Array1<f64>>,
    /// Rows are orthonormal components in input-feature coordinates.
    basis: Array2<f64>,
    explained_variance: Vec<f64>,
    total_variance: f64,
    variance_target: f64,
}

impl PcaModel {
    pub fn fit(data: ArrayView2<'_, f64>, variance_target: f64, standardize: bool) -> Result<Self> {
        let (n, d) = data.dim();
        if n < 2 {
            return Err(Error::DegenerateData(format!("need at least 2 rows, got {n}")));
        }
        if d == 0 {
            return Err(Error::DegenerateData("data has no columns".into()));
        }
        if !(variance_target > 0.0 && variance_target <= 1.0) {
            return Err(Error::config("variance_target", format!("must be in (0, 1], got {variance_target}")));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("PCA input"));
        }

        let mean = data.mean_axis(Axis(0)).expect("n >= 2");
        let mut centred = &data - &mean;
        let scale = if standardize {
            let std = centred.map_axis(Axis(0), |col| {
                let s = (col.iter().map(|v| v * v).sum::<f64>() / (n - 1) as f64).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            });
            centred /= &std;
            Some(std)
        } else {
            None
        };
        if centred.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateData("all rows identical; total variance is zero".into()));
        }

        let mat = DMatrix::from_row_iterator(n, d, centred.iter().copied());
        let svd = mat.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

        // A centred n-row matrix has rank at most n - 1.
        let rank_cap = (n - 1).min(d).min(order.len());
        let variances: Vec<f64> = order[..rank_cap]
            .iter()
            .map(|&i| svd.singular_values[i].powi(2) / (n - 1) as f64)
            .collect();
        let total_variance: f64 = variances.iter().sum();
        if total_variance <= 0.0 {
            return Err(Error::DegenerateData("total variance is zero".into()));
        }

        let mut cumulative = 0.0;
        let mut keep = rank_cap;
        for (i, v) in variances.iter().enumerate() {
            cumulative += v;
            if cumulative / total_variance >= variance_target {
                keep = i + 1;
                break;
            }
        }

        let mut basis = Array2::zeros((keep, d));
        for (row, &src) in order[..keep].iter().enumerate() {
            let comp = v_t.row(src);
            let pivot = comp.iter().copied().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
            let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
            for j in 0..d {
                basis[[row, j]] = sign * comp[j];
            }
        }

        Ok(Self {
            mean,
            scale,
            basis,
            explained_variance: variances[..keep].to_vec(),
            total_variance,
            variance_target,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn component_count(&self) -> usize {
        self.basis.nrows()
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn basis(&self) -> &Array2<f64> {
        &self.basis
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    pub fn variance_target(&self) -> f64 {
        self.variance_target
    }

    pub fn is_standardized(&self) -> bool {
        self.scale.is_some()
    }

    pub fn retained_ratio(&self) -> f64 {
        self.explained_variance.iter().sum::<f64>() / self.total_variance
    }

    /// Projects rows onto the retained components.
    pub fn transform(&self, data: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if data.ncols() != self.input_dim() {
            return Err(Error::Dimension {
                expected: self.input_dim(),
                actual: data.ncols(),
                context: "PCA transform input columns",
            });
        }
        let mut centred = &data - &self.mean;
        if let Some(scale) = &self.scale {
            centred /= scale;
        }
        Ok(centred.dot(&self.basis.t()))
    }

    /// Maps component scores back to input-feature coordinates.
    pub fn inverse_transform(&self, scores: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if scores.ncols() != self.component_count() {
            return Err(Error::Dimension {
                expected: self.component_count(),
                actual: scores.ncols(),
                context: "PCA inverse input columns",
            });
        }
        let mut out = scores.dot(&self.basis);
        if let Some(scale) = &self.scale {
            out *= scale;
        }
        Ok(out + &self.mean)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PcaFile::from(self)).expect("PCA bundle serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PcaFile = serde_json::from_str(text).map_err(|e| Error::Format(format!("PCA bundle: {e}")))?;
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

#[derive(Serialize, Deserialize)]
struct PcaFile {
    format_version: u32,
    kind: String,
    input_dim: usize,
    components: usize,
    variance_target: f64,
    total_variance: f64,
    explained_variance: Vec<f64>,
    mean: Vec<f64>,
    scale: Option<Vec<f64>>,
    /// Row-major `components x input_dim`.
    basis: Vec<f64>,
}

impl From<&PcaModel> for PcaFile {
    fn from(m: &PcaModel) -> Self {
        Self {
            format_version: PCA_FORMAT_VERSION,
            kind: "pca".into(),
            input_dim: m.input_dim(),
            components: m.component_count(),
            variance_target: m.variance_target,
            total_variance: m.total_variance,
            explained_variance: m.explained_variance.clone(),
            mean: m.mean.to_vec(),
            scale: m.scale.as_ref().map(|s| s.to_vec()),
            basis: m.basis.iter().copied().collect(),
        }
    }
}

impl TryFrom<PcaFile> for PcaModel {
    type Error = Error;

    fn try_from(f: PcaFile) -> Result<Self> {
        if f.format_version != PCA_FORMAT_VERSION || f.kind != "pca" {
            return Err(Error::Format(format!(
                "expected pca bundle version {PCA_FORMAT_VERSION}, found {} version {}",
                f.kind, f.format_version
            )));
        }
        let dim_err = |what: &str| Error::Format(format!("PCA bundle: {what} has wrong length"));
        if f.mean.len() != f.input_dim {
            return Err(dim_err("mean"));
        }
        if f.scale.as_ref().is_some_and(|s| s.len() != f.input_dim) {
            return Err(dim_err("scale"));
        }
        if f.explained_variance.len() != f.components {
            return Err(dim_err("explained_variance"));
        }
        let basis = Array2::from_shape_vec((f.components, f.input_dim), f.basis).map_err(|_| dim_err("basis"))?;
        Ok(Self {
            mean: Array1::from(f.mean),
            scale: f.scale.map(Array1::from),
            basis,
            explained_variance: f.explained_variance,
            total_variance: f.total_variance,
            variance_target: f.variance_target,
        })
    }
}
