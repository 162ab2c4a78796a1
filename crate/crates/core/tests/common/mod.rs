#![allow(dead_code)]

use mlpreach::{Activation, InputBox, LayerParams, Mlp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEMO_NET: &str = include_str!("../../fixtures/tanh_demo.json");

pub fn demo() -> Mlp<f64> {
    mlpreach::load_network(DEMO_NET.as_bytes()).unwrap()
}

pub fn unit_square() -> InputBox<f64> {
    InputBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
}

pub fn random_activation(rng: &mut ChaCha8Rng) -> Activation<f64> {
    match rng.gen_range(0..5) {
        0 => Activation::Relu,
        1 => Activation::Logistic,
        2 => Activation::Tanh,
        3 => Activation::Linear,
        _ => Activation::Elu { alpha: rng.gen_range(0.1..2.0) },
    }
}

/// Random net with 1..=max_layers layers of 1..=max_width neurons.
pub fn random_net(seed: u64, max_layers: usize, max_width: usize) -> Mlp<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = rng.gen_range(1..=max_layers);
    let mut inputs = rng.gen_range(1..=max_width.min(4));
    let mut out = Vec::with_capacity(layers);
    for _ in 0..layers {
        let width = rng.gen_range(1..=max_width);
        let w = (0..width)
            .map(|_| (0..inputs).map(|_| rng.gen_range(-1.5..1.5)).collect())
            .collect();
        let b = (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect();
        out.push(LayerParams::new(w, b, random_activation(&mut rng)).unwrap());
        inputs = width;
    }
    Mlp::new(out).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn random_box(rng: &mut ChaCha8Rng, n: usize) -> InputBox<f64> {
    let lo: Vec<f64> = random_point(rng, n, 1.0);
    let hi = lo.iter().map(|l| l + rng.gen_range(0.0..0.8)).collect();
    InputBox::new(lo, hi).unwrap()
}

pub fn uniform_in(rng: &mut ChaCha8Rng, b: &InputBox<f64>) -> Vec<f64> {
    b.lower()
        .iter()
        .zip(b.upper())
        .map(|(&l, &h)| if l == h { l } else { rng.gen_range(l..=h) })
        .collect()
}

pub fn perturb(rng: &mut ChaCha8Rng, x0: &[f64], delta: f64) -> Vec<f64> {
    x0.iter()
        .map(|&c| match rng.gen_range(0..8) {
            // bias toward the faces, where the extremes live
            0 => c - delta,
            1 => c + delta,
            _ => c + rng.gen_range(-delta..=delta),
        })
        .collect()
}
