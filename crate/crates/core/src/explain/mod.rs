//! Post-hoc attribution: Shapley values, local surrogates and global
//! per-class summaries.

pub mod lime;
pub mod shap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pca::PcaModel;

pub use lime::{default_kernel_width, kernel_weight, lime_explain, FeatureStats, LimeExplanation};
pub use shap::{shap_exact, shap_sampled, shapley_weight, ShapExplanation, ShapMethod, MAX_EXACT_FEATURES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class_explained: usize,
    pub explanations: usize,
    pub mean_abs_phi: Vec<f64>,
    /// Feature indices by descending mean |phi|, ties to the lower index.
    pub ranking: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalSummary {
    pub classes: Vec<ClassSummary>,
}

/// Mean |phi| per feature for each explained class, ranked descending.
pub fn global_summary(explanations: &[ShapExplanation]) -> Result<GlobalSummary> {
    let first = explanations.first().ok_or(Error::EmptyInput("no explanations to summarise"))?;
    let d = first.phi.len();
    if let Some(bad) = explanations.iter().find(|e| e.phi.len() != d) {
        return Err(Error::Dimension {
            expected: d,
            actual: bad.phi.len(),
            context: "attribution length",
        });
    }
    let mut classes: Vec<usize> = explanations.iter().map(|e| e.class_explained).collect();
    classes.sort_unstable();
    classes.dedup();
    let classes = classes
        .into_iter()
        .map(|c| {
            let group: Vec<&ShapExplanation> = explanations.iter().filter(|e| e.class_explained == c).collect();
            let mut mean_abs_phi = vec![0.0; d];
            for e in &group {
                for (m, p) in mean_abs_phi.iter_mut().zip(&e.phi) {
                    *m += p.abs();
                }
            }
            let k = group.len() as f64;
            mean_abs_phi.iter_mut().for_each(|m| *m /= k);
            ClassSummary {
                class_explained: c,
                explanations: group.len(),
                ranking: shap::rank_by_magnitude(&mean_abs_phi),
                mean_abs_phi,
            }
        })
        .collect();
    Ok(GlobalSummary { classes })
}

/// Spreads component attributions over the original spectrum bins in
/// proportion to each component's squared loadings. Totals are preserved
/// because every basis row has unit norm.
pub fn map_to_bins(phi: &[f64], pca: &PcaModel) -> Result<Vec<f64>> {
    if phi.len() != pca.component_count() {
        return Err(Error::Dimension {
            expected: pca.component_count(),
            actual: phi.len(),
            context: "component attributions",
        });
    }
    let mut out = vec![0.0; pca.input_dim()];
    for (row, &p) in pca.basis().rows().into_iter().zip(phi) {
        for (o, &v) in out.iter_mut().zip(row) {
            *o += p * v * v;
        }
    }
    Ok(out)
}

/// Plain-text rank table of the `limit` largest attributions.
pub fn rank_table(title: &str, values: &[f64], limit: usize) -> String {
    let mut s = format!("{title}\n{:>5}  {:>8}  {:>14}\n", "rank", "feature", "attribution");
    for (r, j) in shap::rank_by_magnitude(values).into_iter().take(limit).enumerate() {
        s.push_str(&format!("{:>5}  {:>8}  {:>14.6e}\n", r + 1, j, values[j]));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expl(phi: Vec<f64>, class: usize) -> ShapExplanation {
        ShapExplanation {
            features: (0..phi.len()).collect(),
            phi,
            base_value: 0.0,
            model_output: 0.0,
            class_explained: class,
            method: ShapMethod::Exact,
            sample_count: 0,
        }
    }

    #[test]
    fn single_explanation_ranking() {
        let s = global_summary(&[expl(vec![3.0, -1.0, 0.0], 1)]).unwrap();
        assert_eq!(s.classes[0].ranking, vec![0, 1, 2]);
    }

    #[test]
    fn tied_means_rank_by_index() {
        let s = global_summary(&[expl(vec![1.0, 0.0], 2), expl(vec![-1.0, 2.0], 2)]).unwrap();
        assert_eq!(s.classes[0].mean_abs_phi, vec![1.0, 1.0]);
        assert_eq!(s.classes[0].ranking, vec![0, 1]);
    }

    #[test]
    fn all_zero_keeps_index_order() {
        let s = global_summary(&[expl(vec![0.0; 4], 0), expl(vec![0.0; 4], 0)]).unwrap();
        assert_eq!(s.classes[0].ranking, vec![0, 1, 2, 3]);
    }

    #[test]
    fn classes_are_grouped() {
        let s = global_summary(&[expl(vec![1.0, 0.0], 0), expl(vec![0.0, 5.0], 3)]).unwrap();
        assert_eq!(s.classes.len(), 2);
        assert_eq!(s.classes[1].class_explained, 3);
        assert_eq!(s.classes[1].ranking, vec![1, 0]);
    }

    #[test]
    fn empty_and_ragged_inputs_fail() {
        assert!(matches!(global_summary(&[]), Err(Error::EmptyInput(_))));
        assert!(global_summary(&[expl(vec![1.0], 0), expl(vec![1.0, 2.0], 0)]).is_err());
    }
}
