//! Shapley values by brute force over all orderings.

use ndarray::ArrayView2;
use rfzt::mlp::Predictor;

/// Interventional value of coalition `mask`, straight from the definition.
pub fn coalition_value<P: Predictor>(model: &P, x: &[f64], bg: ArrayView2<'_, f64>, mask: &[bool], class: usize) -> f64 {
    let mut z = bg.to_owned();
    for mut row in z.rows_mut() {
        for (j, &on) in mask.iter().enumerate() {
            if on {
                row[j] = x[j];
            }
        }
    }
    let out = model.predict_batch(z.view()).unwrap();
    out.column(class).mean().unwrap()
}

/// Shapley values as the average marginal contribution over all n! orderings.
pub fn brute_force_shapley<P: Predictor>(model: &P, x: &[f64], bg: ArrayView2<'_, f64>, class: usize) -> Vec<f64> {
    let n = x.len();
    let mut phi = vec![0.0; n];
    let mut count = 0usize;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |order| {
        let mut mask = vec![false; n];
        let mut prev = coalition_value(model, x, bg, &mask, class);
        for &j in order {
            mask[j] = true;
            let v = coalition_value(model, x, bg, &mask, class);
            phi[j] += v - prev;
            prev = v;
        }
        count += 1;
    });
    phi.iter().map(|p| p / count as f64).collect()
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
