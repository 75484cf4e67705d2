//! Fully connected HMM with scalar Gaussian-mixture emissions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::kmeans::kmeans_1d;
use crate::error::{GaitError, Result};

pub const VARIANCE_FLOOR: f64 = 1e-4;
/// Lower bound applied to initial and transition probabilities of a trained
/// model so that no window scores exactly zero probability.
const PROBABILITY_FLOOR: f64 = 1e-12;
const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gmm {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl Gmm {
    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    /// Component terms `ln w_m + ln N(x; μ_m, σ²_m)`.
    fn component_log_terms(&self, x: f64, out: &mut Vec<f64>) {
        out.clear();
        for m in 0..self.weights.len() {
            let w = self.weights[m];
            if w <= 0.0 {
                out.push(f64::NEG_INFINITY);
                continue;
            }
            let var = self.variances[m];
            let d = x - self.means[m];
            out.push(w.ln() - 0.5 * (LN_2PI + var.ln() + d * d / var));
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        let mut terms = Vec::with_capacity(self.weights.len());
        self.component_log_terms(x, &mut terms);
        log_sum_exp(&terms)
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmHmm {
    pub n_states: usize,
    pub pi: Vec<f64>,
    /// Row-stochastic, `trans[i][j]` = P(j | i).
    pub trans: Vec<Vec<f64>>,
    pub emissions: Vec<Gmm>,
}

impl GmmHmm {
    /// Verifies the stochasticity and variance-floor invariants.
    pub fn check(&self) -> std::result::Result<(), String> {
        let n = self.n_states;
        if n == 0 || self.pi.len() != n || self.trans.len() != n || self.emissions.len() != n {
            return Err("hmm arrays disagree with n_states".into());
        }
        let stochastic = |v: &[f64]| {
            v.iter().all(|p| p.is_finite() && *p >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() <= 1e-9
        };
        if !stochastic(&self.pi) {
            return Err("pi is not a distribution".into());
        }
        for (i, row) in self.trans.iter().enumerate() {
            if row.len() != n || !stochastic(row) {
                return Err(format!("transition row {i} is not a distribution"));
            }
        }
        for (j, g) in self.emissions.iter().enumerate() {
            let m = g.weights.len();
            if m == 0 || g.means.len() != m || g.variances.len() != m {
                return Err(format!("state {j} mixture arrays disagree"));
            }
            if !stochastic(&g.weights) {
                return Err(format!("state {j} mixture weights are not a distribution"));
            }
            if g.means.iter().any(|v| !v.is_finite()) {
                return Err(format!("state {j} has a non-finite mean"));
            }
            if g.variances.iter().any(|v| !v.is_finite() || *v < VARIANCE_FLOOR) {
                return Err(format!("state {j} variance below floor"));
            }
        }
        Ok(())
    }

    fn log_emissions(&self, obs: &[f64]) -> Vec<Vec<f64>> {
        obs.iter()
            .map(|&x| self.emissions.iter().map(|g| g.log_density(x)).collect())
            .collect()
    }
}

/// Scaled forward recursion. Emissions are shifted by their per-step maximum
/// before exponentiation and every α row is renormalized, so the result stays
/// finite for long windows and sharply peaked mixtures.
pub fn forward_log_likelihood(model: &GmmHmm, obs: &[f64]) -> f64 {
    let n = model.n_states;
    let log_b = model.log_emissions(obs);
    let mut alpha = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut ll = 0.0;
    for (t, lb) in log_b.iter().enumerate() {
        let shift = lb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        for j in 0..n {
            let e = (lb[j] - shift).exp();
            let prior = if t == 0 {
                model.pi[j]
            } else {
                (0..n).map(|i| alpha[i] * model.trans[i][j]).sum()
            };
            next[j] = prior * e;
        }
        let c: f64 = next.iter().sum();
        if c <= 0.0 || !c.is_finite() {
            return log_forward(model, &log_b);
        }
        for j in 0..n {
            alpha[j] = next[j] / c;
        }
        ll += c.ln() + shift;
    }
    ll
}

/// Forward recursion fully in log space; used when scaling cannot recover.
fn log_forward(model: &GmmHmm, log_b: &[Vec<f64>]) -> f64 {
    let n = model.n_states;
    let ln = |p: f64| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY };
    let mut alpha: Vec<f64> = (0..n).map(|j| ln(model.pi[j]) + log_b[0][j]).collect();
    let mut terms = vec![0.0; n];
    for lb in &log_b[1..] {
        let prev = alpha.clone();
        for j in 0..n {
            for i in 0..n {
                terms[i] = prev[i] + ln(model.trans[i][j]);
            }
            alpha[j] = log_sum_exp(&terms) + lb[j];
        }
    }
    log_sum_exp(&alpha)
}

/// Log-likelihood of `window`, clamped to be non-positive.
pub fn poi_score(model: &GmmHmm, window: &[f64]) -> Result<f64> {
    if window.is_empty() {
        return Err(GaitError::EmptyWindow);
    }
    Ok(forward_log_likelihood(model, window).min(0.0))
}

// ---------------------------------------------------------------------------
// Baum-Welch

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmmTrainConfig {
    pub n_states: usize,
    pub n_mix: usize,
    pub max_iter: usize,
    /// Stop when the relative total log-likelihood improvement drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl HmmTrainConfig {
    pub fn new(n_states: usize, n_mix: usize, seed: u64) -> Self {
        HmmTrainConfig {
            n_states,
            n_mix,
            max_iter: 100,
            tol: 1e-4,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrace {
    /// Total log-likelihood of the training data before each M-step, plus the
    /// final model's value as the last entry.
    pub log_likelihoods: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// All observations were identical; a single-component model was built.
    pub degenerate: bool,
}

pub fn train_hmm(sequences: &[Vec<f64>], cfg: &HmmTrainConfig) -> Result<GmmHmm> {
    train_hmm_traced(sequences, cfg).map(|(m, _)| m)
}

/// Baum-Welch EM over all sequences, initialized from seeded k-means.
pub fn train_hmm_traced(sequences: &[Vec<f64>], cfg: &HmmTrainConfig) -> Result<(GmmHmm, TrainTrace)> {
    if sequences.is_empty() {
        return Err(GaitError::EmptyTrainingSet);
    }
    if cfg.n_states == 0 || cfg.n_mix == 0 {
        return Err(GaitError::InvalidConfig("n_states and n_mix must be positive".into()));
    }
    for (index, s) in sequences.iter().enumerate() {
        if s.len() < cfg.n_states {
            return Err(GaitError::TrainingSequenceTooShort {
                index,
                len: s.len(),
                min: cfg.n_states,
            });
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(GaitError::InsufficientData(format!(
                "training sequence {index} has non-finite values"
            )));
        }
    }

    let pooled: Vec<f64> = sequences.iter().flatten().copied().collect();
    let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    if lo == hi {
        log::warn!("all {} training deltas equal {lo}; using single-component emissions", pooled.len());
        let n = cfg.n_states;
        let model = GmmHmm {
            n_states: n,
            pi: vec![1.0 / n as f64; n],
            trans: vec![vec![1.0 / n as f64; n]; n],
            emissions: vec![
                Gmm {
                    weights: vec![1.0],
                    means: vec![lo],
                    variances: vec![VARIANCE_FLOOR],
                };
                n
            ],
        };
        let ll = sequences.iter().map(|s| forward_log_likelihood(&model, s)).sum();
        let trace = TrainTrace {
            log_likelihoods: vec![ll],
            iterations: 0,
            converged: true,
            degenerate: true,
        };
        return Ok((model, trace));
    }

    let mut model = initial_model(&pooled, cfg, &mut rng);
    let mut trace = TrainTrace::default();
    let mut prev: Option<f64> = None;
    for iter in 0..=cfg.max_iter {
        let mut acc = Accumulators::new(&model);
        let ll: f64 = sequences.iter().map(|s| acc.add_sequence(&model, s)).sum();
        trace.log_likelihoods.push(ll);
        if let Some(p) = prev {
            let improvement = (ll - p) / p.abs().max(f64::MIN_POSITIVE);
            if improvement < cfg.tol {
                trace.converged = true;
                break;
            }
        }
        if iter == cfg.max_iter {
            break;
        }
        acc.update(&mut model, sequences.len());
        model
            .check()
            .map_err(|e| GaitError::Internal(format!("EM iteration {iter}: {e}")))?;
        trace.iterations += 1;
        prev = Some(ll);
    }
    floor_probabilities(&mut model);
    Ok((model, trace))
}

fn floor_probabilities(model: &mut GmmHmm) {
    let floor_row = |row: &mut Vec<f64>| {
        if row.iter().any(|&p| p < PROBABILITY_FLOOR) {
            row.iter_mut().for_each(|p| *p = p.max(PROBABILITY_FLOOR));
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
        }
    };
    floor_row(&mut model.pi);
    model.trans.iter_mut().for_each(floor_row);
}

fn variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    Some(xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64)
}

fn initial_model(pooled: &[f64], cfg: &HmmTrainConfig, rng: &mut ChaCha8Rng) -> GmmHmm {
    let n = cfg.n_states;
    let global_var = variance(pooled).unwrap_or(1.0).max(VARIANCE_FLOOR);
    let jitter = Normal::new(0.0, 0.05 * global_var.sqrt()).expect("finite sd");

    let centers = kmeans_1d(pooled, n, rng);
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &x in pooled {
        let j = (0..n)
            .min_by(|&a, &b| (x - centers[a]).abs().total_cmp(&(x - centers[b]).abs()))
            .expect("n > 0");
        members[j].push(x);
    }

    let mut emissions = Vec::with_capacity(n);
    let mut used_means: Vec<f64> = Vec::new();
    for j in 0..n {
        let pts = &members[j];
        let state_var = variance(pts).unwrap_or(global_var).max(VARIANCE_FLOOR);
        let mut means = if pts.is_empty() {
            vec![centers[j]; cfg.n_mix]
        } else {
            kmeans_1d(pts, cfg.n_mix, rng)
        };
        // duplicated centroids (few distinct values, cycled centers) get nudged apart
        for m in 0..means.len() {
            if used_means.contains(&means[m]) {
                means[m] += jitter.sample(rng);
            }
            used_means.push(means[m]);
        }
        let mut counts = vec![0usize; cfg.n_mix];
        let mut comp_pts: Vec<Vec<f64>> = vec![Vec::new(); cfg.n_mix];
        for &x in pts {
            let m = (0..cfg.n_mix)
                .min_by(|&a, &b| (x - means[a]).abs().total_cmp(&(x - means[b]).abs()))
                .expect("n_mix > 0");
            counts[m] += 1;
            comp_pts[m].push(x);
        }
        let total = (pts.len() + cfg.n_mix) as f64;
        let weights = counts.iter().map(|&c| (c as f64 + 1.0) / total).collect();
        let variances = comp_pts
            .iter()
            .map(|cp| variance(cp).unwrap_or(state_var).max(VARIANCE_FLOOR))
            .collect();
        emissions.push(Gmm {
            weights,
            means,
            variances,
        });
    }

    let trans = (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..n)
                .map(|_| 1.0 / n as f64 + rng.random_range(0.0..1e-3))
                .collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
            row
        })
        .collect();

    GmmHmm {
        n_states: n,
        pi: vec![1.0 / n as f64; n],
        trans,
        emissions,
    }
}

struct Accumulators {
    pi: Vec<f64>,
    trans_num: Vec<Vec<f64>>,
    trans_den: Vec<f64>,
    /// Per state and component: occupancy, Σ r·(x − μ_old), Σ r·(x − μ_old)².
    occ: Vec<Vec<f64>>,
    s1: Vec<Vec<f64>>,
    s2: Vec<Vec<f64>>,
}

impl Accumulators {
    fn new(model: &GmmHmm) -> Self {
        let n = model.n_states;
        let per_state = |g: &Gmm| vec![0.0; g.n_components()];
        Accumulators {
            pi: vec![0.0; n],
            trans_num: vec![vec![0.0; n]; n],
            trans_den: vec![0.0; n],
            occ: model.emissions.iter().map(per_state).collect(),
            s1: model.emissions.iter().map(per_state).collect(),
            s2: model.emissions.iter().map(per_state).collect(),
        }
    }

    /// E-step for one sequence; returns its log-likelihood.
    fn add_sequence(&mut self, model: &GmmHmm, obs: &[f64]) -> f64 {
        let n = model.n_states;
        let len = obs.len();
        let mut comp_terms: Vec<Vec<Vec<f64>>> = Vec::with_capacity(len);
        let mut log_b = vec![vec![0.0; n]; len];
        let mut scratch = Vec::new();
        for (t, &x) in obs.iter().enumerate() {
            let mut row = Vec::with_capacity(n);
            for (j, g) in model.emissions.iter().enumerate() {
                g.component_log_terms(x, &mut scratch);
                log_b[t][j] = log_sum_exp(&scratch);
                row.push(scratch.clone());
            }
            comp_terms.push(row);
        }

        // shifted emissions and scaled forward
        let mut e = vec![vec![0.0; n]; len];
        let mut alpha = vec![vec![0.0; n]; len];
        let mut c = vec![0.0; len];
        let mut ll = 0.0;
        for t in 0..len {
            let shift = log_b[t].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for j in 0..n {
                e[t][j] = (log_b[t][j] - shift).exp();
                let prior = if t == 0 {
                    model.pi[j]
                } else {
                    (0..n).map(|i| alpha[t - 1][i] * model.trans[i][j]).sum()
                };
                alpha[t][j] = prior * e[t][j];
            }
            c[t] = alpha[t].iter().sum();
            for j in 0..n {
                alpha[t][j] /= c[t];
            }
            ll += c[t].ln() + shift;
        }

        let mut beta = vec![vec![1.0; n]; len];
        for t in (0..len - 1).rev() {
            for i in 0..n {
                beta[t][i] = (0..n)
                    .map(|j| model.trans[i][j] * e[t + 1][j] * beta[t + 1][j])
                    .sum::<f64>()
                    / c[t + 1];
            }
        }

        for t in 0..len {
            let mut gamma: Vec<f64> = (0..n).map(|j| alpha[t][j] * beta[t][j]).collect();
            let gs: f64 = gamma.iter().sum();
            gamma.iter_mut().for_each(|g| *g /= gs);
            if t == 0 {
                for j in 0..n {
                    self.pi[j] += gamma[j];
                }
            }
            if t + 1 < len {
                for i in 0..n {
                    self.trans_den[i] += gamma[i];
                    for j in 0..n {
                        self.trans_num[i][j] += alpha[t][i] * model.trans[i][j] * e[t + 1][j]
                            * beta[t + 1][j]
                            / c[t + 1];
                    }
                }
            }
            let x = obs[t];
            for j in 0..n {
                if gamma[j] == 0.0 {
                    continue;
                }
                let g = &model.emissions[j];
                for m in 0..g.n_components() {
                    let post = (comp_terms[t][j][m] - log_b[t][j]).exp();
                    let r = gamma[j] * post;
                    let d = x - g.means[m];
                    self.occ[j][m] += r;
                    self.s1[j][m] += r * d;
                    self.s2[j][m] += r * d * d;
                }
            }
        }
        ll
    }

    /// M-step. States or components with no posterior mass keep their parameters.
    fn update(&self, model: &mut GmmHmm, n_sequences: usize) {
        let n = model.n_states;
        for j in 0..n {
            model.pi[j] = self.pi[j] / n_sequences as f64;
        }
        let pi_sum: f64 = model.pi.iter().sum();
        model.pi.iter_mut().for_each(|p| *p /= pi_sum);

        for i in 0..n {
            if self.trans_den[i] > 0.0 {
                let row_sum: f64 = self.trans_num[i].iter().sum();
                if row_sum > 0.0 {
                    for j in 0..n {
                        model.trans[i][j] = self.trans_num[i][j] / row_sum;
                    }
                }
            }
        }

        for (j, g) in model.emissions.iter_mut().enumerate() {
            let total: f64 = self.occ[j].iter().sum();
            if total <= 0.0 {
                continue;
            }
            for m in 0..g.n_components() {
                g.weights[m] = self.occ[j][m] / total;
                let occ = self.occ[j][m];
                if occ <= 1e-300 {
                    continue;
                }
                let shift = self.s1[j][m] / occ;
                let var = self.s2[j][m] / occ - shift * shift;
                g.means[m] += shift;
                g.variances[m] = var.max(VARIANCE_FLOOR);
            }
            let ws: f64 = g.weights.iter().sum();
            g.weights.iter_mut().for_each(|w| *w /= ws);
        }
    }
}
