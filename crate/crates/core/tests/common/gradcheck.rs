//! Central finite differences against backprop on random small networks.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfzt::mlp::{cross_entropy_loss, one_hot, LayerParams, MlpModel};

pub const H: f64 = 1e-5;

/// Random small network and batch whose ReLU pre-activations all stay at
/// least 1e-3 away from the kink, so central differences are well defined.
pub fn draw_case(rng: &mut ChaCha8Rng) -> (MlpModel, Array2<f64>, Vec<usize>) {
    loop {
        let input = rng.random_range(2..=6);
        let depth = rng.random_range(1..=3);
        let hidden: Vec<usize> = (0..depth).map(|_| rng.random_range(2..=8)).collect();
        let classes = rng.random_range(2..=5);
        let batch = rng.random_range(1..=4);
        let model = MlpModel::init(input, &hidden, classes, rng.random()).unwrap();
        let layers: Vec<LayerParams> = model
            .layers()
            .iter()
            .map(|l| {
                let bias = Array1::from_shape_fn(l.bias.len(), |_| rng.random_range(-0.5..0.5));
                LayerParams::new(l.weights.clone(), bias, l.activation).unwrap()
            })
            .collect();
        let model = MlpModel::new(layers).unwrap();
        let x = Array2::from_shape_fn((batch, input), |_| rng.random_range(-2.0..2.0));
        let targets: Vec<usize> = (0..batch).map(|_| rng.random_range(0..classes)).collect();
        if clear_of_kinks(&model, &x) {
            return (model, x, targets);
        }
    }
}

fn clear_of_kinks(model: &MlpModel, x: &Array2<f64>) -> bool {
    let mut a = x.clone();
    for l in &model.layers()[..model.layers().len() - 1] {
        let z = a.dot(&l.weights.t()) + &l.bias;
        if z.iter().any(|v| v.abs() < 1e-3) {
            return false;
        }
        a = z.mapv(|v| v.max(0.0));
    }
    true
}

fn loss(model: &MlpModel, x: &Array2<f64>, targets: &[usize]) -> f64 {
    let out = model.forward_batch(x.view()).unwrap();
    cross_entropy_loss(out.output().view(), one_hot(targets, model.class_count()).view()).unwrap()
}

#[derive(Clone, Copy)]
enum ParamIndex {
    Weight(usize, usize),
    Bias(usize),
}

fn with_param(model: &MlpModel, layer: usize, index: ParamIndex, delta: f64) -> MlpModel {
    let mut layers = model.layers().to_vec();
    match index {
        ParamIndex::Weight(r, c) => layers[layer].weights[[r, c]] += delta,
        ParamIndex::Bias(r) => layers[layer].bias[r] += delta,
    }
    MlpModel::new(layers).unwrap()
}

/// Relative error with a 1e-6 floor on the scale, so components that are
/// zero on both sides compare by absolute difference.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Worst relative error over every parameter of `networks` random cases,
/// plus the number of components compared.
pub fn worst_gradient_error(networks: usize, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..networks {
        let (model, x, targets) = draw_case(&mut rng);
        let cache = model.forward_batch(x.view()).unwrap();
        let grads = model.backward(&cache, one_hot(&targets, model.class_count()).view()).unwrap();
        for (l, layer) in model.layers().iter().enumerate() {
            let (gw, gb) = &grads.layers[l];
            let mut params = Vec::new();
            for r in 0..layer.output_dim() {
                for c in 0..layer.input_dim() {
                    params.push((ParamIndex::Weight(r, c), gw[[r, c]]));
                }
                params.push((ParamIndex::Bias(r), gb[r]));
            }
            for (idx, analytic) in params {
                let plus = loss(&with_param(&model, l, idx, H), &x, &targets);
                let minus = loss(&with_param(&model, l, idx, -H), &x, &targets);
                let numeric = (plus - minus) / (2.0 * H);
                worst = worst.max(rel_err(analytic, numeric));
                checked += 1;
            }
        }
    }
    (worst, checked)
}
