//! Exhaustive invariant check for stratified folds.

use rfzt::training::stratified_kfold;
use rfzt::{ClassLabel, Error};

/// Checks every fold invariant for one label vector.
pub fn check_folds(labels: &[ClassLabel], k: usize, seed: u64) -> std::result::Result<(), String> {
    let mut counts = [0usize; 4];
    for l in labels {
        counts[l.code()] += 1;
    }
    let result = stratified_kfold(labels, k, seed);
    if counts.iter().any(|&c| c > 0 && c < k) {
        return match result {
            Err(Error::InsufficientClass { .. }) => Ok(()),
            other => Err(format!("expected InsufficientClass, got {other:?}")),
        };
    }
    let folds = result.map_err(|e| e.to_string())?;
    if folds.len() != k {
        return Err("wrong fold count".into());
    }
    let mut seen = vec![0u32; labels.len()];
    for f in &folds {
        for &i in &f.test {
            seen[i] += 1;
        }
        let mut all: Vec<usize> = f.train.iter().chain(&f.test).copied().collect();
        all.sort_unstable();
        if all != (0..labels.len()).collect::<Vec<_>>() {
            return Err("train and test do not partition the indices".into());
        }
        for (c, &n_c) in counts.iter().enumerate() {
            let in_fold = f.test.iter().filter(|&&i| labels[i].code() == c).count();
            let ideal = n_c as f64 / k as f64;
            if (in_fold as f64 - ideal).abs() >= 1.0 {
                return Err(format!("class {c}: {in_fold} in fold vs ideal {ideal}"));
            }
        }
    }
    if seen.iter().any(|&s| s != 1) {
        return Err("an index is not in exactly one test fold".into());
    }
    if stratified_kfold(labels, k, seed).unwrap() != folds {
        return Err("not deterministic".into());
    }
    Ok(())
}
