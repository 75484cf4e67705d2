#![allow(dead_code)]

use gaitscore::frames::DepthSequence;
use gaitscore::poi::{QuantBounds, PCA_DIM};
use gaitscore::sequence_models::{Gmm, GmmHmm};
use gaitscore::synthgait::{generate_walk, SynthParams};
use rand::Rng;

pub fn walk(frames: usize, limp: f64, seed: u64) -> DepthSequence {
    generate_walk(&SynthParams {
        frames,
        limp_asym: limp,
        seed,
        ..SynthParams::default()
    })
    .unwrap()
}

pub fn quiet_walk(frames: usize, limp: f64, seed: u64) -> DepthSequence {
    generate_walk(&SynthParams {
        frames,
        limp_asym: limp,
        seed,
        noise_mm: 0.0,
        ..SynthParams::default()
    })
    .unwrap()
}

/// Sum over every state path of the joint density, computed without scaling.
pub fn brute_force_log_likelihood(model: &GmmHmm, obs: &[f64]) -> f64 {
    let n = model.n_states;
    let density = |j: usize, x: f64| -> f64 {
        let g = &model.emissions[j];
        let mut p = 0.0;
        for m in 0..g.weights.len() {
            let v = g.variances[m];
            p += g.weights[m] * (-(x - g.means[m]).powi(2) / (2.0 * v)).exp()
                / (2.0 * std::f64::consts::PI * v).sqrt();
        }
        p
    };
    let t = obs.len();
    let mut total = 0.0;
    let mut path = vec![0usize; t];
    loop {
        let mut p = model.pi[path[0]] * density(path[0], obs[0]);
        for k in 1..t {
            p *= model.trans[path[k - 1]][path[k]] * density(path[k], obs[k]);
        }
        total += p;
        let mut k = 0;
        loop {
            if k == t {
                return total.ln();
            }
            path[k] += 1;
            if path[k] < n {
                break;
            }
            path[k] = 0;
            k += 1;
        }
    }
}

fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

pub fn random_model<R: Rng>(rng: &mut R, max_states: usize, max_mix: usize) -> GmmHmm {
    let n = rng.random_range(1..=max_states);
    GmmHmm {
        n_states: n,
        pi: random_simplex(rng, n),
        trans: (0..n).map(|_| random_simplex(rng, n)).collect(),
        emissions: (0..n)
            .map(|_| {
                let m = rng.random_range(1..=max_mix);
                Gmm {
                    weights: random_simplex(rng, m),
                    means: (0..m).map(|_| rng.random_range(-3.0..6.0)).collect(),
                    variances: (0..m).map(|_| rng.random_range(0.3..4.0)).collect(),
                }
            })
            .collect(),
    }
}

/// Cell index computed per axis with integer search instead of the closed form.
pub fn counting_index(v: &[f64; PCA_DIM], b: &QuantBounds) -> usize {
    let mut index = 0;
    let mut stride = 1;
    for j in 0..PCA_DIM {
        let x = if v[j].is_nan() { b.min[j] } else { v[j].clamp(b.min[j], b.max[j]) };
        let width = (b.max[j] - b.min[j] + b.eps[j]) / b.q as f64;
        let mut cell = 0;
        while cell + 1 < b.q && x >= b.min[j] + (cell + 1) as f64 * width {
            cell += 1;
        }
        index += stride * cell;
        stride *= b.q;
    }
    index
}
