mod common;

use std::sync::OnceLock;

use common::{quiet_walk, random_model, walk};
use gaitscore::assessment::{
    assess_sequence, extract_all, final_score, fit_weights, lops_score, model_from_bytes,
    model_to_bytes, load_model, save_model, score_features, train, train_with_report, GaitModel,
    FusionWeights, PipelineConfig,
};
use gaitscore::evaluation::{eer_of, evaluate, roc_points, LabeledScore, TestSequence};
use gaitscore::frames::Label;
use gaitscore::lops::LoPSFrameFeature;
use gaitscore::poi::{PcaModel, PoIHistogram, QuantBounds, PCA_DIM, RAW_DIM};
use gaitscore::GaitError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn trained() -> &'static GaitModel {
    static MODEL: OnceLock<GaitModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let seqs: Vec<_> = (1..=6).map(|s| walk(240, 0.0, 500 + s)).collect();
        train(&seqs, &PipelineConfig::default()).unwrap()
    })
}

fn fake_model(w: usize, seed: u64) -> GaitModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hmm = random_model(&mut rng, 3, 2);
    GaitModel {
        format_version: 1,
        config: PipelineConfig {
            window_w: w,
            n_states: hmm.n_states,
            n_mix: 2,
            ..PipelineConfig::default()
        },
        pca: PcaModel {
            mean: vec![0.0; RAW_DIM],
            basis: (0..PCA_DIM)
                .map(|k| (0..RAW_DIM).map(|i| f64::from(u8::from(i == k))).collect())
                .collect(),
            eigenvalues: vec![1.0; PCA_DIM],
        },
        bounds: QuantBounds {
            min: [0.0; 3],
            max: [1.0; 3],
            q: 5,
            eps: [1e-6; 3],
        },
        hmm,
        weights: FusionWeights::from_lops(rng.random_range(0.0..1.0)),
        threshold: -1.0,
    }
}

fn fake_features(n: usize, seed: u64) -> (Vec<PoIHistogram>, Vec<LoPSFrameFeature>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hists = (0..n)
        .map(|_| PoIHistogram {
            bins: (0..125).map(|_| u32::from(rng.random_bool(0.05))).collect(),
            n_points: 0,
            n_clamped: 0,
        })
        .collect();
    let lops = (0..n)
        .map(|_| {
            let r = rng.random_range(0.3..0.7);
            LoPSFrameFeature {
                ratio_left: r,
                ratio_right: 1.0 - r,
                left_hist: (0..4).map(|_| rng.random_range(0.0..1.0)).collect(),
                right_hist: (0..4).map(|_| rng.random_range(0.0..1.0)).collect(),
            }
        })
        .collect();
    (hists, lops)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_arity_and_exact_fusion(w in 3usize..14, extra in 0usize..30, seed in any::<u64>()) {
        let n = w + extra;
        let model = fake_model(w, seed);
        let (hists, lops) = fake_features(n, seed ^ 1);
        let a = score_features(&model, &hists, &lops).unwrap();
        prop_assert_eq!(a.windows.len(), n - w + 1);
        prop_assert_eq!(a.per_frame.len(), n - w + 1);
        for (k, s) in a.windows.iter().enumerate() {
            prop_assert_eq!(s.start_frame, k);
            prop_assert_eq!(a.per_frame[k].frame, k + w - 1);
            let fused = model.weights.w_poi * s.s_poi + model.weights.w_lops * s.s_lops;
            prop_assert_eq!(s.s_final.to_bits(), fused.to_bits());
            prop_assert!(s.s_poi <= 0.0 && s.s_lops <= 0.0 && s.s_final <= 0.0);
        }
        let short = score_features(&model, &hists[..w - 1], &lops[..w - 1]);
        let too_short = matches!(short, Err(GaitError::SequenceTooShort { .. }));
        prop_assert!(too_short);
    }

    #[test]
    fn weights_sum_to_one_and_ignore_scale(
        pairs in prop::collection::vec((-50.0..0.0f64, -50.0..0.0f64), 1..40),
        c in 0.001..1000.0f64,
    ) {
        let w = fit_weights(&pairs).unwrap();
        prop_assert_eq!(w.w_poi + w.w_lops, 1.0);
        prop_assert!(w.w_poi >= 0.0 && w.w_lops >= 0.0);
        let scaled: Vec<_> = pairs.iter().map(|&(p, l)| (c * p, c * l)).collect();
        let v = fit_weights(&scaled).unwrap();
        prop_assert!((v.w_lops - w.w_lops).abs() < 1e-12);
        prop_assert!((v.w_poi - w.w_poi).abs() < 1e-12);
    }

    #[test]
    fn roc_matches_confusion_counts(
        raw in prop::collection::vec((-5i32..5, any::<bool>()), 2..50),
    ) {
        prop_assume!(raw.iter().any(|r| r.1) && raw.iter().any(|r| !r.1));
        let samples: Vec<LabeledScore> = raw
            .iter()
            .enumerate()
            .map(|(i, &(s, abnormal))| LabeledScore {
                score: f64::from(s),
                label: if abnormal { Label::Abnormal } else { Label::Normal },
                subject_id: i.to_string(),
                sequence_id: i.to_string(),
            })
            .collect();
        let roc = roc_points(&samples).unwrap();
        let n_pos = raw.iter().filter(|r| r.1).count() as f64;
        let n_neg = raw.len() as f64 - n_pos;
        for p in &roc {
            let fp = raw.iter().filter(|r| !r.1 && f64::from(r.0) < p.threshold).count() as f64;
            let fn_ = raw.iter().filter(|r| r.1 && f64::from(r.0) >= p.threshold).count() as f64;
            prop_assert_eq!(p.fpr, fp / n_neg);
            prop_assert_eq!(p.fnr, fn_ / n_pos);
        }
        let mut distinct: Vec<i32> = raw.iter().map(|r| r.0).collect();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(roc.len(), distinct.len() + 2);
        for w in roc.windows(2) {
            prop_assert!(w[0].threshold < w[1].threshold);
            prop_assert!(w[0].fpr <= w[1].fpr && w[0].fnr >= w[1].fnr);
        }
        // strictly increasing transforms leave the EER unchanged
        let moved: Vec<LabeledScore> = samples
            .iter()
            .map(|s| LabeledScore { score: (s.score / 3.0).exp() * 7.0 - 2.0, ..s.clone() })
            .collect();
        let e = eer_of(&samples).unwrap();
        prop_assert!((0.0..=1.0).contains(&e));
        prop_assert!((eer_of(&moved).unwrap() - e).abs() < 1e-12);
    }
}

#[test]
fn extraction_is_independent_of_parallelism() {
    let model = trained();
    let seq = walk(12, 0.3, 77);
    let serial = extract_all(&seq, &model.pca, &model.bounds, &model.config, false).unwrap();
    let parallel = extract_all(&seq, &model.pca, &model.bounds, &model.config, true).unwrap();
    assert_eq!(serial.len(), 12);
    assert_eq!(
        serde_json::to_vec(&serial).unwrap(),
        serde_json::to_vec(&parallel).unwrap()
    );
}

#[test]
fn frame_without_keypoints_gets_zero_histogram() {
    let model = trained();
    let mut seq = quiet_walk(12, 0.0, 4);
    // flatten one frame's foreground to a constant depth: no contrast, no keypoints
    for d in seq.frames[5].depth.iter_mut().filter(|d| **d != 0) {
        *d = 2500;
    }
    let feats = extract_all(&seq, &model.pca, &model.bounds, &model.config, true).unwrap();
    assert!(feats[5].0.bins.iter().all(|&b| b == 0));
    assert!(assess_sequence(model, &seq).is_ok());
}

#[test]
fn sequence_score_is_mean_of_recomputed_windows() {
    let model = trained();
    let seq = walk(16, 0.25, 31);
    let a = assess_sequence(model, &seq).unwrap();
    assert_eq!(a.windows.len(), 7);
    let w = model.config.window_w;
    let mut sum = 0.0;
    for s in 0..a.windows.len() {
        let mut part = seq.clone();
        part.frames = seq.frames[s..s + w].to_vec();
        part.meta.head_px = seq.meta.head_px[s..s + w].to_vec();
        part.meta.ground_row = seq.meta.ground_row[s..s + w].to_vec();
        let one = assess_sequence(model, &part).unwrap();
        assert_eq!(one.windows.len(), 1);
        assert_eq!(one.sequence_score, one.windows[0].s_final);
        assert_eq!(one.windows[0].s_final, a.windows[s].s_final);
        sum += one.windows[0].s_final;
    }
    assert!((a.sequence_score - sum / a.windows.len() as f64).abs() < 1e-12);
}

#[test]
fn symmetric_window_lops_is_exactly_zero() {
    let model = trained();
    let seq = quiet_walk(10, 0.0, 12);
    let feats = extract_all(&seq, &model.pca, &model.bounds, &model.config, false).unwrap();
    let lops: Vec<_> = feats.into_iter().map(|(_, l)| l).collect();
    assert!(lops_score(&lops).unwrap().abs() < 1e-9);
}

#[test]
fn training_sequences_are_all_normal() {
    let seqs: Vec<_> = (1..=6).map(|s| walk(60, 0.0, 40 + s)).collect();
    let (model, report) = train_with_report(&seqs, &PipelineConfig::default()).unwrap();
    assert_eq!(model.weights.w_poi + model.weights.w_lops, 1.0);
    for (i, seq) in seqs.iter().enumerate() {
        let a = assess_sequence(&model, seq).unwrap();
        assert_eq!(a.sequence_score, report.sequence_scores[i]);
        assert_eq!(a.decision, Label::Normal, "sequence {i}");
    }
    for w in report.trace.log_likelihoods.windows(2) {
        assert!(w[1] >= w[0] - 1e-8);
    }
}

#[test]
fn training_rejects_bad_input() {
    let cfg = PipelineConfig::default();
    assert!(matches!(train(&[], &cfg), Err(GaitError::InsufficientData(_))));
    let short = walk(10, 0.0, 1);
    assert!(matches!(train(&[short], &cfg), Err(GaitError::InsufficientData(_))));
    let limp = walk(40, 0.5, 1);
    assert!(matches!(train(&[limp], &cfg), Err(GaitError::InsufficientData(_))));
}

#[test]
fn model_bytes_are_deterministic_and_round_trip() {
    let seqs: Vec<_> = (1..=3).map(|s| walk(40, 0.0, 900 + s)).collect();
    let cfg = PipelineConfig { seed: 17, ..PipelineConfig::default() };
    let a = model_to_bytes(&train(&seqs, &cfg).unwrap()).unwrap();
    let b = model_to_bytes(&train(&seqs, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    save_model(&model_from_bytes(&a).unwrap(), &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), a);
    assert_eq!(model_to_bytes(&loaded).unwrap(), a);
    assert!(a.ends_with(b"\n"));
    let text = String::from_utf8(a.clone()).unwrap();
    for key in ["bounds", "config", "format_version", "hmm", "pca", "threshold", "weights"] {
        assert!(text.contains(&format!("\"{key}\"")), "{key}");
    }
}

#[test]
fn tampered_and_truncated_models_are_rejected() {
    let bytes = model_to_bytes(trained()).unwrap();
    let mut value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    value["weights"]["w_poi"] = serde_json::json!(0.3);
    value["weights"]["w_lops"] = serde_json::json!(0.3);
    let tampered = serde_json::to_vec(&value).unwrap();
    assert!(matches!(model_from_bytes(&tampered), Err(GaitError::SchemaViolation(_))));
    assert!(matches!(
        model_from_bytes(&bytes[..bytes.len() / 2]),
        Err(GaitError::SchemaViolation(_))
    ));
    value["format_version"] = serde_json::json!(2);
    assert!(matches!(
        model_from_bytes(&serde_json::to_vec(&value).unwrap()),
        Err(GaitError::UnknownVersion(2))
    ));
}

#[test]
fn evaluation_counts_windows_and_handles_training_set() {
    let model = trained();
    let lengths = [14usize, 20, 11, 17];
    let tests: Vec<TestSequence> = lengths
        .iter()
        .enumerate()
        .map(|(i, &n)| TestSequence {
            subject_id: format!("s{i}"),
            sequence_id: format!("q{i}"),
            sequence: walk(n, if i % 2 == 0 { 0.0 } else { 0.6 }, 300 + i as u64),
        })
        .collect();
    let report = evaluate(model, &tests).unwrap();
    let w = model.config.window_w;
    assert_eq!(report.n_windows, lengths.iter().map(|n| n - w + 1).sum::<usize>());
    assert_eq!(report.n_sequences, 4);
    assert!((0.0..=1.0).contains(&report.per_frame_eer));
    assert!((0.0..=1.0).contains(&report.per_sequence_eer));

    // the training walkers themselves plus one limper: finite, no errors
    let mut own: Vec<TestSequence> = (1..=6)
        .map(|s| TestSequence {
            subject_id: s.to_string(),
            sequence_id: s.to_string(),
            sequence: walk(240, 0.0, 500 + s),
        })
        .collect();
    own.push(TestSequence {
        subject_id: "x".into(),
        sequence_id: "x".into(),
        sequence: walk(30, 0.6, 3),
    });
    let r = evaluate(model, &own).unwrap();
    assert!(r.per_frame_eer.is_finite() && r.per_sequence_eer.is_finite());
}

#[test]
fn limp_lowers_lops_score() {
    let model = trained();
    let lops_of = |limp: f64| {
        let seq = walk(10, limp, 61);
        let feats = extract_all(&seq, &model.pca, &model.bounds, &model.config, false).unwrap();
        lops_score(&feats.into_iter().map(|(_, l)| l).collect::<Vec<_>>()).unwrap()
    };
    assert!(lops_of(0.4) < lops_of(0.0));
}

#[test]
fn sequence_score_falls_with_asymmetry() {
    let model = trained();
    let mean_score = |limp: f64| {
        let total: f64 = (1..=20u64)
            .map(|seed| assess_sequence(model, &walk(60, limp, seed)).unwrap().sequence_score)
            .sum();
        total / 20.0
    };
    let (s0, s25, s50) = (mean_score(0.0), mean_score(0.25), mean_score(0.5));
    assert!(s50 < s25 && s25 < s0, "{s0} {s25} {s50}");
}

#[test]
fn fusion_arithmetic() {
    let w = fit_weights(&[(-9.0, -1.0)]).unwrap();
    assert!((final_score(-9.0, -1.0, &w) + 1.8).abs() < 1e-12);
}
