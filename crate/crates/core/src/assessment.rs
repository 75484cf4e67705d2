//! Sliding-window scoring: per-window PoI and LoPS scores, their weighted
//! fusion, sequence decisions, training and model persistence.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GaitError, Result};
use crate::frames::{DepthSequence, Label};
use crate::lops::{lops_frame_feature, LoPSFrameFeature, DEFAULT_PROJ_BINS};
use crate::poi::{
    build_histogram, fit_bounds, fit_pca, frame_raw_features, PcaModel, PoIHistogram, QuantBounds,
    RawFeature, PCA_DIM,
};
use crate::sequence_models::{
    delta_sequence, poi_score, train_hmm_traced, xcorr_similarity, GmmHmm, HammingMode,
    HmmTrainConfig, TrainTrace,
};

pub const FORMAT_VERSION: u64 = 1;
pub const MIN_WINDOW: usize = 3;
/// Floor applied inside the LoPS logarithm.
pub const LOPS_FLOOR: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub fast_threshold_mm: f64,
    pub q: usize,
    pub window_w: usize,
    pub n_states: usize,
    pub n_mix: usize,
    pub proj_bins: usize,
    pub hamming_mode: HammingMode,
    pub seed: u64,
    /// Decision threshold sits this fraction of the training score range
    /// below the lowest training sequence score.
    pub threshold_margin: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            fast_threshold_mm: 30.0,
            q: 5,
            window_w: 10,
            n_states: 8,
            n_mix: 3,
            proj_bins: DEFAULT_PROJ_BINS,
            hamming_mode: HammingMode::Occupancy,
            seed: 0,
            threshold_margin: 0.1,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GaitError::InvalidConfig(m));
        if self.window_w < MIN_WINDOW {
            return bad(format!("window_w must be at least {MIN_WINDOW}, got {}", self.window_w));
        }
        if self.q < 2 {
            return bad(format!("q must be at least 2, got {}", self.q));
        }
        for (name, v) in [
            ("n_states", self.n_states),
            ("n_mix", self.n_mix),
            ("proj_bins", self.proj_bins),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if !(self.fast_threshold_mm.is_finite() && self.fast_threshold_mm > 0.0) {
            return bad(format!(
                "fast_threshold_mm must be positive, got {}",
                self.fast_threshold_mm
            ));
        }
        if !(self.threshold_margin.is_finite() && self.threshold_margin >= 0.0) {
            return bad(format!(
                "threshold_margin must be non-negative, got {}",
                self.threshold_margin
            ));
        }
        Ok(())
    }

    fn hmm_config(&self) -> HmmTrainConfig {
        HmmTrainConfig::new(self.n_states, self.n_mix, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionWeights {
    pub w_poi: f64,
    pub w_lops: f64,
}

impl FusionWeights {
    /// Builds the pair from `w_lops ∈ [0, 1]` so that the two weights sum to
    /// exactly 1.0 in floating point: the larger weight is rounded first and
    /// the smaller one is its exact complement.
    pub fn from_lops(w_lops: f64) -> Self {
        let w_lops = w_lops.clamp(0.0, 1.0);
        if w_lops >= 0.5 {
            FusionWeights {
                w_poi: 1.0 - w_lops,
                w_lops,
            }
        } else {
            let w_poi = 1.0 - w_lops;
            FusionWeights {
                w_poi,
                w_lops: 1.0 - w_poi,
            }
        }
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        for (name, w) in [("w_poi", self.w_poi), ("w_lops", self.w_lops)] {
            if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
                return Err(format!("{name} = {w} is outside [0, 1]"));
            }
        }
        let sum = self.w_poi + self.w_lops;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(format!("weights sum to {sum}, not 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitModel {
    pub format_version: u64,
    pub config: PipelineConfig,
    pub pca: PcaModel,
    pub bounds: QuantBounds,
    pub hmm: GmmHmm,
    pub weights: FusionWeights,
    pub threshold: f64,
}

impl GaitModel {
    /// Checks every component invariant and the cross-component shapes.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.format_version != FORMAT_VERSION {
            return Err(format!("format_version {}", self.format_version));
        }
        self.config.validate().map_err(|e| e.to_string())?;
        self.pca.check().map_err(|e| format!("pca: {e}"))?;
        self.bounds.check().map_err(|e| format!("bounds: {e}"))?;
        self.hmm.check().map_err(|e| format!("hmm: {e}"))?;
        self.weights.check().map_err(|e| format!("weights: {e}"))?;
        if self.bounds.q != self.config.q {
            return Err(format!(
                "bounds use q = {} but config has q = {}",
                self.bounds.q, self.config.q
            ));
        }
        if self.hmm.n_states != self.config.n_states {
            return Err(format!(
                "hmm has {} states but config has {}",
                self.hmm.n_states, self.config.n_states
            ));
        }
        if self.hmm.emissions.iter().any(|g| g.n_components() > self.config.n_mix) {
            return Err("hmm has more mixture components than config.n_mix".into());
        }
        if !self.threshold.is_finite() {
            return Err(format!("threshold {} is not finite", self.threshold));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowScore {
    pub start_frame: usize,
    pub s_poi: f64,
    pub s_lops: f64,
    pub s_final: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub frame: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub windows: Vec<WindowScore>,
    /// One entry per frame that closes a window, i.e. frames w−1 .. n−1.
    pub per_frame: Vec<FrameScore>,
    pub sequence_score: f64,
    pub decision: Label,
}

// ---------------------------------------------------------------------------
// feature extraction

fn map_frames<T, F>(n: usize, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Keypoint raw features and LoPS descriptors of every frame.
pub fn extract_raw(
    seq: &DepthSequence,
    config: &PipelineConfig,
    parallel: bool,
) -> Result<Vec<(Vec<RawFeature>, LoPSFrameFeature)>> {
    map_frames(seq.len(), parallel, |i| {
        let frame = &seq.frames[i];
        let meta = seq.meta.entry(i);
        let raw = frame_raw_features(frame, &meta, &seq.meta.intrinsics, config.fast_threshold_mm)?;
        let lops = lops_frame_feature(frame, &meta, config.proj_bins)?;
        Ok((raw, lops))
    })
}

fn histograms(
    raw: &[(Vec<RawFeature>, LoPSFrameFeature)],
    pca: &PcaModel,
    bounds: &QuantBounds,
) -> Vec<PoIHistogram> {
    raw.iter()
        .map(|(feats, _)| {
            let proj: Vec<[f64; PCA_DIM]> = feats.iter().map(|f| pca.project(f)).collect();
            build_histogram(&proj, bounds)
        })
        .collect()
}

/// Per-frame PoI histogram and LoPS descriptor, in frame order. A frame
/// without keypoints gets an all-zero histogram.
pub fn extract_all(
    seq: &DepthSequence,
    pca: &PcaModel,
    bounds: &QuantBounds,
    config: &PipelineConfig,
    parallel: bool,
) -> Result<Vec<(PoIHistogram, LoPSFrameFeature)>> {
    let raw = extract_raw(seq, config, parallel)?;
    let hists = histograms(&raw, pca, bounds);
    Ok(hists.into_iter().zip(raw.into_iter().map(|(_, l)| l)).collect())
}

// ---------------------------------------------------------------------------
// scores

/// `ln(max((ζ + mean ϑ) / 2, 1e-12))` over a window of frame descriptors.
pub fn lops_score(window: &[LoPSFrameFeature]) -> Result<f64> {
    if window.len() < MIN_WINDOW {
        return Err(GaitError::WindowTooShort {
            len: window.len(),
            min: MIN_WINDOW,
        });
    }
    let left: Vec<f64> = window.iter().map(|f| f.ratio_left).collect();
    let right: Vec<f64> = window.iter().map(|f| f.ratio_right).collect();
    let zeta = xcorr_similarity(&left, &right, None)?;

    let k = window[0].k();
    if window.iter().any(|f| f.k() != k || f.right_hist.len() != k) {
        return Err(GaitError::Internal("projection bin counts differ within a window".into()));
    }
    let mut theta = 0.0;
    for i in 0..k {
        let a: Vec<f64> = window.iter().map(|f| f.left_hist[i]).collect();
        let b: Vec<f64> = window.iter().map(|f| f.right_hist[i]).collect();
        theta += xcorr_similarity(&a, &b, None)?;
    }
    let theta = if k > 0 { theta / k as f64 } else { 0.0 };
    Ok(((zeta + theta) / 2.0).max(LOPS_FLOOR).ln())
}

/// Fusion weights from training score pairs `(s_poi, s_lops)`: the score with
/// the smaller absolute sum gets the larger weight.
pub fn fit_weights(pairs: &[(f64, f64)]) -> Result<FusionWeights> {
    if pairs.is_empty() {
        return Err(GaitError::NoTrainingWindows);
    }
    if pairs.iter().any(|&(p, l)| !(p <= 0.0 && l <= 0.0)) {
        return Err(GaitError::Internal("training scores must be non-positive".into()));
    }
    let sum_poi: f64 = pairs.iter().map(|p| p.0).sum();
    let sum_lops: f64 = pairs.iter().map(|p| p.1).sum();
    let total = sum_poi + sum_lops;
    if total == 0.0 {
        log::warn!("both training score sums are zero; using equal fusion weights");
        return Ok(FusionWeights::from_lops(0.5));
    }
    let direct = FusionWeights {
        w_poi: sum_lops / total,
        w_lops: sum_poi / total,
    };
    if direct.w_poi + direct.w_lops == 1.0 {
        return Ok(direct);
    }
    Ok(FusionWeights::from_lops(direct.w_lops))
}

pub fn final_score(s_poi: f64, s_lops: f64, weights: &FusionWeights) -> f64 {
    weights.w_poi * s_poi + weights.w_lops * s_lops
}

/// Unfused `(start, s_poi, s_lops)` for every window of `w` frames.
fn window_pairs(
    hmm: &GmmHmm,
    hists: &[PoIHistogram],
    lops: &[LoPSFrameFeature],
    config: &PipelineConfig,
) -> Result<Vec<(usize, f64, f64)>> {
    let w = config.window_w;
    let n = lops.len();
    if n < w {
        return Err(GaitError::SequenceTooShort { len: n, window: w });
    }
    let deltas = delta_sequence(hists, config.hamming_mode)?;
    (0..=n - w)
        .map(|s| {
            let s_poi = poi_score(hmm, &deltas[s..s + w - 1])?;
            let s_lops = lops_score(&lops[s..s + w])?;
            Ok((s, s_poi, s_lops))
        })
        .collect()
}

fn fuse(pairs: &[(usize, f64, f64)], weights: &FusionWeights) -> Vec<WindowScore> {
    pairs
        .iter()
        .map(|&(start_frame, s_poi, s_lops)| WindowScore {
            start_frame,
            s_poi,
            s_lops,
            s_final: final_score(s_poi, s_lops, weights),
        })
        .collect()
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    xs.sum::<f64>() / n as f64
}

/// Window scores from precomputed per-frame features.
pub fn score_features(
    model: &GaitModel,
    hists: &[PoIHistogram],
    lops: &[LoPSFrameFeature],
) -> Result<Assessment> {
    let pairs = window_pairs(&model.hmm, hists, lops, &model.config)?;
    let windows = fuse(&pairs, &model.weights);
    let w = model.config.window_w;
    let per_frame = windows
        .iter()
        .map(|s| FrameScore {
            frame: s.start_frame + w - 1,
            score: s.s_final,
        })
        .collect();
    let sequence_score = mean(windows.iter().map(|s| s.s_final));
    let decision = if sequence_score >= model.threshold {
        Label::Normal
    } else {
        Label::Abnormal
    };
    Ok(Assessment {
        windows,
        per_frame,
        sequence_score,
        decision,
    })
}

pub fn assess_sequence(model: &GaitModel, seq: &DepthSequence) -> Result<Assessment> {
    assess_sequence_with(model, seq, true)
}

pub fn assess_sequence_with(model: &GaitModel, seq: &DepthSequence, parallel: bool) -> Result<Assessment> {
    let w = model.config.window_w;
    if seq.len() < w {
        return Err(GaitError::SequenceTooShort {
            len: seq.len(),
            window: w,
        });
    }
    let feats = extract_all(seq, &model.pca, &model.bounds, &model.config, parallel)?;
    let (hists, lops): (Vec<_>, Vec<_>) = feats.into_iter().unzip();
    score_features(model, &hists, &lops)
}

// ---------------------------------------------------------------------------
// training

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub trace: TrainTrace,
    /// Mean final score of each training sequence.
    pub sequence_scores: Vec<f64>,
    pub n_windows: usize,
    pub n_keypoints: usize,
}

pub fn train(sequences: &[DepthSequence], config: &PipelineConfig) -> Result<GaitModel> {
    train_with_report(sequences, config).map(|(m, _)| m)
}

/// Fits PCA, bounds, HMM, fusion weights and threshold on normal walks.
pub fn train_with_report(
    sequences: &[DepthSequence],
    config: &PipelineConfig,
) -> Result<(GaitModel, TrainReport)> {
    config.validate()?;
    if sequences.is_empty() {
        return Err(GaitError::InsufficientData("no training sequences".into()));
    }
    let w = config.window_w;
    for (i, seq) in sequences.iter().enumerate() {
        if seq.label == Some(Label::Abnormal) {
            return Err(GaitError::InsufficientData(format!(
                "training sequence {i} is labeled abnormal"
            )));
        }
        if seq.len() < w + 1 {
            return Err(GaitError::InsufficientData(format!(
                "training sequence {i} has {} frames, need at least {}",
                seq.len(),
                w + 1
            )));
        }
    }

    let raw: Vec<_> = sequences
        .iter()
        .map(|s| extract_raw(s, config, true))
        .collect::<Result<_>>()?;
    let pooled: Vec<RawFeature> = raw
        .iter()
        .flat_map(|seq| seq.iter().flat_map(|(f, _)| f.iter().copied()))
        .collect();
    let n_keypoints = pooled.len();
    let pca = fit_pca(&pooled).map_err(|e| match e {
        GaitError::InsufficientSamples { needed, found } => GaitError::InsufficientData(format!(
            "training frames yield {found} keypoints, PCA needs {needed}"
        )),
        other => other,
    })?;
    let projected: Vec<[f64; PCA_DIM]> = pooled.iter().map(|f| pca.project(f)).collect();
    let bounds = fit_bounds(&projected, config.q)?;

    let hists: Vec<Vec<PoIHistogram>> = raw.iter().map(|r| histograms(r, &pca, &bounds)).collect();
    let lops: Vec<Vec<LoPSFrameFeature>> = raw
        .into_iter()
        .map(|r| r.into_iter().map(|(_, l)| l).collect())
        .collect();

    let mut windows = Vec::new();
    for h in &hists {
        let deltas = delta_sequence(h, config.hamming_mode)?;
        for s in 0..=h.len() - w {
            windows.push(deltas[s..s + w - 1].to_vec());
        }
    }
    let (hmm, trace) = train_hmm_traced(&windows, &config.hmm_config())?;

    let per_seq: Vec<Vec<(usize, f64, f64)>> = hists
        .iter()
        .zip(&lops)
        .map(|(h, l)| window_pairs(&hmm, h, l, config))
        .collect::<Result<_>>()?;
    let all: Vec<(f64, f64)> = per_seq.iter().flatten().map(|&(_, p, l)| (p, l)).collect();
    let weights = fit_weights(&all)?;

    let sequence_scores: Vec<f64> = per_seq
        .iter()
        .map(|p| mean(fuse(p, &weights).iter().map(|s| s.s_final)))
        .collect();
    let lo = sequence_scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sequence_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = lo - config.threshold_margin * (hi - lo);

    let model = GaitModel {
        format_version: FORMAT_VERSION,
        config: config.clone(),
        pca,
        bounds,
        hmm,
        weights,
        threshold,
    };
    model.check().map_err(GaitError::Internal)?;
    let report = TrainReport {
        trace,
        sequence_scores,
        n_windows: all.len(),
        n_keypoints,
    };
    Ok((model, report))
}

// ---------------------------------------------------------------------------
// persistence

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let v = serde_json::to_value(value).map_err(|e| GaitError::Internal(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| GaitError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed write never leaves a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| GaitError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| GaitError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| GaitError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| GaitError::io(path, e.error))?;
    Ok(())
}

pub fn model_to_bytes(model: &GaitModel) -> Result<Vec<u8>> {
    to_canonical_json(model)
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<GaitModel> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| GaitError::SchemaViolation(e.to_string()))?;
    match value.get("format_version").map(|v| v.as_u64()) {
        None => return Err(GaitError::SchemaViolation("missing format_version".into())),
        Some(None) => {
            return Err(GaitError::SchemaViolation(
                "format_version is not an unsigned integer".into(),
            ))
        }
        Some(Some(v)) if v != FORMAT_VERSION => return Err(GaitError::UnknownVersion(v)),
        Some(Some(_)) => {}
    }
    let model: GaitModel =
        serde_json::from_value(value).map_err(|e| GaitError::SchemaViolation(e.to_string()))?;
    model.check().map_err(GaitError::SchemaViolation)?;
    Ok(model)
}

pub fn save_model(model: &GaitModel, path: &Path) -> Result<()> {
    write_atomic(path, &model_to_bytes(model)?)
}

pub fn load_model(path: &Path) -> Result<GaitModel> {
    let bytes = fs::read(path).map_err(|e| GaitError::io(path, e))?;
    model_from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgait::{generate_walk, SynthParams};

    fn feature(ratio_left: f64, left: Vec<f64>, right: Vec<f64>) -> LoPSFrameFeature {
        LoPSFrameFeature {
            ratio_left,
            ratio_right: 1.0 - ratio_left,
            left_hist: left,
            right_hist: right,
        }
    }

    #[test]
    fn weight_examples() {
        let w = fit_weights(&[(-5.0, -5.0), (-5.0, -5.0)]).unwrap();
        assert_eq!((w.w_poi, w.w_lops), (0.5, 0.5));
        let w = fit_weights(&[(-9.0, -1.0)]).unwrap();
        assert!((w.w_lops - 0.9).abs() < 1e-15);
        assert!((w.w_poi - 0.1).abs() < 1e-15);
        assert_eq!(w.w_poi + w.w_lops, 1.0);
        let w = fit_weights(&[(0.0, 0.0)]).unwrap();
        assert_eq!((w.w_poi, w.w_lops), (0.5, 0.5));
        assert!(matches!(fit_weights(&[]), Err(GaitError::NoTrainingWindows)));
    }

    #[test]
    fn weights_sum_exactly_one() {
        for i in 0..=1000 {
            let w = FusionWeights::from_lops(i as f64 / 1000.0 * 0.999_999_7);
            assert_eq!(w.w_poi + w.w_lops, 1.0);
        }
    }

    #[test]
    fn final_score_examples() {
        let half = FusionWeights::from_lops(0.5);
        assert_eq!(final_score(-2.0, -4.0, &half), -3.0);
        let poi_only = FusionWeights::from_lops(0.0);
        assert_eq!(final_score(-7.25, -3.0, &poi_only), -7.25);
        let w = FusionWeights { w_poi: 0.1, w_lops: 0.9 };
        assert!((final_score(-9.0, -1.0, &w) + 1.8).abs() < 1e-15);
    }

    #[test]
    fn empty_half_scores_near_floor() {
        let window: Vec<_> = (0..10)
            .map(|t| feature(1.0, vec![0.5 + 0.01 * t as f64, 0.5], vec![0.0, 0.0]))
            .collect();
        let s = lops_score(&window).unwrap();
        assert!(s.is_finite() && s >= LOPS_FLOOR.ln());
        assert!(s < -0.5, "{s}");
        assert!(matches!(
            lops_score(&window[..2]),
            Err(GaitError::WindowTooShort { len: 2, .. })
        ));
    }

    #[test]
    fn identical_halves_score_zero() {
        let window: Vec<_> = (0..6)
            .map(|t| {
                let h = vec![0.3 + 0.02 * t as f64, 0.7];
                feature(0.5, h.clone(), h)
            })
            .collect();
        assert_eq!(lops_score(&window).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_walker_lops_is_zero_and_limp_is_lower() {
        let cfg = PipelineConfig::default();
        let walk = |limp: f64| {
            let seq = generate_walk(&SynthParams {
                frames: 12,
                limp_asym: limp,
                noise_mm: 0.0,
                seed: 4,
                ..SynthParams::default()
            })
            .unwrap();
            extract_raw(&seq, &cfg, false)
                .unwrap()
                .into_iter()
                .map(|(_, l)| l)
                .collect::<Vec<_>>()
        };
        let sym = lops_score(&walk(0.0)[..10]).unwrap();
        assert!(sym.abs() < 1e-9, "{sym}");
        let limp = lops_score(&walk(0.4)[..10]).unwrap();
        assert!(limp < sym);
    }

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        let bad = PipelineConfig { window_w: 2, ..PipelineConfig::default() };
        assert!(matches!(bad.validate(), Err(GaitError::InvalidConfig(_))));
        let bad = PipelineConfig { n_states: 0, ..PipelineConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn version_and_schema_errors() {
        assert!(matches!(
            model_from_bytes(b"{\"format_version\": 7}"),
            Err(GaitError::UnknownVersion(7))
        ));
        assert!(matches!(
            model_from_bytes(b"{\"format_version\": 1, \"conf"),
            Err(GaitError::SchemaViolation(_))
        ));
        assert!(matches!(
            model_from_bytes(b"{\"format_version\": 1}"),
            Err(GaitError::SchemaViolation(_))
        ));
        assert!(matches!(model_from_bytes(b"[]"), Err(GaitError::SchemaViolation(_))));
    }
}
