//! ROC sweeps, equal error rates and the labeled test-set report.
//!
//! Abnormal is the positive class and a sample is called abnormal when its
//! score is strictly below the threshold.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assessment::{assess_sequence_with, GaitModel, PipelineConfig};
use crate::error::{GaitError, Result};
use crate::frames::{DepthSequence, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub score: f64,
    pub label: Label,
    pub subject_id: String,
    pub sequence_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub fnr: f64,
    pub threshold: f64,
}

/// One point at −∞, one per distinct score, one at +∞, in rising threshold
/// order.
pub fn roc_points(samples: &[LabeledScore]) -> Result<Vec<RocPoint>> {
    let mut scored: Vec<(f64, bool)> = Vec::with_capacity(samples.len());
    for s in samples {
        if !s.score.is_finite() {
            return Err(GaitError::InsufficientData(format!(
                "sequence {} has non-finite score {}",
                s.sequence_id, s.score
            )));
        }
        scored.push((s.score, s.label == Label::Abnormal));
    }
    let n_pos = scored.iter().filter(|s| s.1).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(GaitError::SingleClassInput);
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let point = |tp: usize, fp: usize, threshold: f64| RocPoint {
        fpr: fp as f64 / n_neg as f64,
        fnr: (n_pos - tp) as f64 / n_pos as f64,
        threshold,
    };
    let mut out = vec![point(0, 0, f64::NEG_INFINITY)];
    // (tp, fp) count the samples strictly below the current threshold
    let (mut tp, mut fp) = (0, 0);
    let mut i = 0;
    while i < scored.len() {
        let t = scored[i].0;
        out.push(point(tp, fp, t));
        while i < scored.len() && scored[i].0 == t {
            if scored[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
    }
    out.push(point(tp, fp, f64::INFINITY));
    Ok(out)
}

/// Rate at which FPR and FNR cross, interpolated linearly between the two
/// points that bracket the crossing.
pub fn eer(points: &[RocPoint]) -> Result<f64> {
    let first = points
        .first()
        .ok_or_else(|| GaitError::InsufficientData("empty ROC".into()))?;
    if first.fpr >= first.fnr {
        return Ok((first.fpr + first.fnr) / 2.0);
    }
    for pair in points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (da, db) = (a.fpr - a.fnr, b.fpr - b.fnr);
        if db >= 0.0 {
            let t = da / (da - db);
            return Ok(a.fpr + t * (b.fpr - a.fpr));
        }
    }
    Err(GaitError::Internal("ROC never reaches FPR >= FNR".into()))
}

pub fn eer_of(samples: &[LabeledScore]) -> Result<f64> {
    eer(&roc_points(samples)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_frame_eer: f64,
    pub per_sequence_eer: f64,
    pub n_sequences: usize,
    pub n_windows: usize,
    pub runtime_s: f64,
    pub config_echo: PipelineConfig,
}

#[derive(Debug, Clone)]
pub struct TestSequence {
    pub subject_id: String,
    pub sequence_id: String,
    pub sequence: DepthSequence,
}

/// Scores every labeled test sequence. Each frame inherits its sequence's
/// label; the frame score is the window ending at that frame.
pub fn evaluate(model: &GaitModel, tests: &[TestSequence]) -> Result<EvalReport> {
    let started = Instant::now();
    for t in tests {
        if t.sequence.label.is_none() {
            return Err(GaitError::InsufficientData(format!(
                "test sequence {} has no label",
                t.sequence_id
            )));
        }
    }
    let assessments: Vec<_> = tests
        .par_iter()
        .map(|t| assess_sequence_with(model, &t.sequence, false))
        .collect::<Result<_>>()?;

    let mut frames = Vec::new();
    let mut sequences = Vec::new();
    for (t, a) in tests.iter().zip(&assessments) {
        let label = t.sequence.label.expect("checked above");
        let labeled = |score: f64| LabeledScore {
            score,
            label,
            subject_id: t.subject_id.clone(),
            sequence_id: t.sequence_id.clone(),
        };
        frames.extend(a.per_frame.iter().map(|f| labeled(f.score)));
        sequences.push(labeled(a.sequence_score));
    }
    Ok(EvalReport {
        per_frame_eer: eer_of(&frames)?,
        per_sequence_eer: eer_of(&sequences)?,
        n_sequences: tests.len(),
        n_windows: frames.len(),
        runtime_s: started.elapsed().as_secs_f64(),
        config_echo: model.config.clone(),
    })
}
