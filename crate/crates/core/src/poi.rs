//! Point-of-interest histograms.
//!
//! Per frame: segment-test keypoints on the depth image, a 49-d raw descriptor
//! per keypoint (16 ring displacement vectors in camera space plus a height
//! ratio), projection onto a 3-d PCA basis, and a q³-bin occupancy histogram of
//! the quantized projections.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{GaitError, Result};
use crate::frames::{DepthFrame, FrameMeta, Intrinsics};

pub const RING_LEN: usize = 16;
pub const RING_RADIUS: i64 = 3;
pub const RAW_DIM: usize = 3 * RING_LEN + 1;
pub const PCA_DIM: usize = 3;
pub const MIN_PCA_SAMPLES: usize = 50;
const EIGEN_FLOOR: f64 = 1e-12;

/// Bresenham circle of radius 3 as (row, col) offsets, clockwise from 12 o'clock.
pub const RING_OFFSETS: [(i64, i64); RING_LEN] = [
    (-3, 0),
    (-3, 1),
    (-2, 2),
    (-1, 3),
    (0, 3),
    (1, 3),
    (2, 2),
    (3, 1),
    (3, 0),
    (3, -1),
    (2, -2),
    (1, -3),
    (0, -3),
    (-1, -3),
    (-2, -2),
    (-3, -1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct KeyPoint {
    pub px: (usize, usize),
    pub ring_px: [(usize, usize); RING_LEN],
    pub p3d: [f64; 3],
    pub ring_3d: [[f64; 3]; RING_LEN],
}

/// Segment test with a full 16-pixel arc: `p` is kept when every ring depth is
/// above `depth(p) + threshold_mm` or every ring depth is below
/// `depth(p) - threshold_mm`. Pixels touching background or the border are
/// skipped. Output is row-major.
pub fn detect_keypoints(
    frame: &DepthFrame,
    intrinsics: &Intrinsics,
    threshold_mm: f64,
) -> Vec<KeyPoint> {
    let r = RING_RADIUS as usize;
    let mut out = Vec::new();
    if frame.width <= 2 * r || frame.height <= 2 * r {
        return out;
    }
    let mut ring = [0u16; RING_LEN];
    for row in r..frame.height - r {
        'pixel: for col in r..frame.width - r {
            let center = frame.get(row, col);
            if center == 0 {
                continue;
            }
            for (slot, &(dr, dc)) in ring.iter_mut().zip(RING_OFFSETS.iter()) {
                let d = frame.get(
                    (row as i64 + dr) as usize,
                    (col as i64 + dc) as usize,
                );
                if d == 0 {
                    continue 'pixel;
                }
                *slot = d;
            }
            let c = f64::from(center);
            let brighter = ring.iter().all(|&d| f64::from(d) > c + threshold_mm);
            let darker = !brighter && ring.iter().all(|&d| f64::from(d) < c - threshold_mm);
            if !(brighter || darker) {
                continue;
            }
            let mut ring_px = [(0, 0); RING_LEN];
            let mut ring_3d = [[0.0; 3]; RING_LEN];
            for j in 0..RING_LEN {
                let (dr, dc) = RING_OFFSETS[j];
                let (rr, cc) = ((row as i64 + dr) as usize, (col as i64 + dc) as usize);
                ring_px[j] = (rr, cc);
                ring_3d[j] = intrinsics.back_project(rr as f64, cc as f64, f64::from(ring[j]));
            }
            out.push(KeyPoint {
                px: (row, col),
                ring_px,
                p3d: intrinsics.back_project(row as f64, col as f64, c),
                ring_3d,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawFeature {
    pub values: [f64; RAW_DIM],
}

impl RawFeature {
    pub fn height_ratio(&self) -> f64 {
        self.values[RAW_DIM - 1]
    }
}

/// Concatenated ring displacement vectors (mm) followed by the keypoint's
/// height above ground relative to body height, in image rows.
pub fn raw_feature(kp: &KeyPoint, meta: &FrameMeta) -> Result<RawFeature> {
    let body = (meta.ground_row - meta.head_px.0) as f64;
    if body == 0.0 {
        return Err(GaitError::DegenerateCalibration);
    }
    let mut values = [0.0; RAW_DIM];
    for (j, q) in kp.ring_3d.iter().enumerate() {
        for axis in 0..3 {
            values[3 * j + axis] = q[axis] - kp.p3d[axis];
        }
    }
    let ratio = (meta.ground_row as f64 - kp.px.0 as f64) / body;
    values[RAW_DIM - 1] = ratio.clamp(0.0, 1.0);
    Ok(RawFeature { values })
}

// ---------------------------------------------------------------------------
// PCA

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// PCA_DIM rows of length RAW_DIM.
    pub basis: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Top-3 principal directions of the samples (covariance with divisor n-1).
///
/// When fewer than three eigenvalues exceed 1e-12 the missing directions are
/// filled with standard-basis vectors orthogonalized against the found ones,
/// with eigenvalue 0.
pub fn fit_pca(samples: &[RawFeature]) -> Result<PcaModel> {
    let n = samples.len();
    if n < MIN_PCA_SAMPLES {
        return Err(GaitError::InsufficientSamples {
            needed: MIN_PCA_SAMPLES,
            found: n,
        });
    }
    let mut mean = vec![0.0; RAW_DIM];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s.values.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = DMatrix::<f64>::zeros(RAW_DIM, RAW_DIM);
    let mut centered = [0.0; RAW_DIM];
    for s in samples {
        for k in 0..RAW_DIM {
            centered[k] = s.values[k] - mean[k];
        }
        for i in 0..RAW_DIM {
            let ci = centered[i];
            for j in i..RAW_DIM {
                cov[(i, j)] += ci * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..RAW_DIM {
        for j in i..RAW_DIM {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..RAW_DIM).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(PCA_DIM);
    let mut eigenvalues = Vec::with_capacity(PCA_DIM);
    for &idx in order.iter().take(PCA_DIM) {
        let lambda = eig.eigenvalues[idx];
        if lambda <= EIGEN_FLOOR {
            break;
        }
        basis.push(eig.eigenvectors.column(idx).iter().copied().collect());
        eigenvalues.push(lambda);
    }
    if basis.len() < PCA_DIM {
        log::warn!(
            "degenerate covariance: {} of {PCA_DIM} eigenvalues above {EIGEN_FLOOR}; padding basis",
            basis.len()
        );
        pad_basis(&mut basis);
        eigenvalues.resize(PCA_DIM, 0.0);
    }
    orthonormalize(&mut basis);
    basis.iter_mut().for_each(|row| normalize_sign(row));

    Ok(PcaModel {
        mean,
        basis,
        eigenvalues,
    })
}

/// Adds standard-basis directions with the largest residual after projecting
/// out the existing rows until there are PCA_DIM rows.
fn pad_basis(basis: &mut Vec<Vec<f64>>) {
    while basis.len() < PCA_DIM {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for axis in 0..RAW_DIM {
            let mut e = vec![0.0; RAW_DIM];
            e[axis] = 1.0;
            for row in basis.iter() {
                let p = dot(&e, row);
                e.iter_mut().zip(row).for_each(|(x, r)| *x -= p * r);
            }
            let norm = dot(&e, &e).sqrt();
            if best.as_ref().is_none_or(|(n, _)| norm > *n + 1e-12) {
                best = Some((norm, e));
            }
        }
        let (norm, mut e) = best.expect("RAW_DIM > 0");
        e.iter_mut().for_each(|x| *x /= norm);
        basis.push(e);
    }
}

/// Modified Gram-Schmidt, twice, to hold orthonormality at machine precision.
fn orthonormalize(basis: &mut [Vec<f64>]) {
    for _ in 0..2 {
        for i in 0..basis.len() {
            for j in 0..i {
                let (head, tail) = basis.split_at_mut(i);
                let p = dot(&tail[0], &head[j]);
                tail[0].iter_mut().zip(&head[j]).for_each(|(x, r)| *x -= p * r);
            }
            let norm = dot(&basis[i], &basis[i]).sqrt();
            basis[i].iter_mut().for_each(|x| *x /= norm);
        }
    }
}

impl PcaModel {
    pub fn project(&self, f: &RawFeature) -> [f64; PCA_DIM] {
        project(self, f)
    }

    /// Checks shape, orthonormality (1e-9), ordering and sign convention.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.mean.len() != RAW_DIM {
            return Err(format!("pca mean has length {}", self.mean.len()));
        }
        if self.basis.len() != PCA_DIM || self.basis.iter().any(|r| r.len() != RAW_DIM) {
            return Err("pca basis must be 3 x 49".into());
        }
        if self.eigenvalues.len() != PCA_DIM {
            return Err("pca needs 3 eigenvalues".into());
        }
        let all_finite = self
            .mean
            .iter()
            .chain(self.basis.iter().flatten())
            .chain(self.eigenvalues.iter())
            .all(|v| v.is_finite());
        if !all_finite {
            return Err("pca has non-finite entries".into());
        }
        if orthonormality_error(&self.basis) > 1e-9 {
            return Err("pca basis rows are not orthonormal".into());
        }
        if self.eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err("pca eigenvalues not descending".into());
        }
        Ok(())
    }
}

/// ‖B·Bᵀ − I‖∞ over the basis rows.
pub fn orthonormality_error(basis: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(a, b) - target).abs());
        }
    }
    worst
}

/// `basis · (f − mean)`.
pub fn project(pca: &PcaModel, f: &RawFeature) -> [f64; PCA_DIM] {
    let mut out = [0.0; PCA_DIM];
    for (o, row) in out.iter_mut().zip(&pca.basis) {
        *o = row
            .iter()
            .zip(f.values.iter().zip(&pca.mean))
            .map(|(b, (v, m))| b * (v - m))
            .sum();
    }
    out
}

// ---------------------------------------------------------------------------
// Spatial quantization

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantBounds {
    pub min: [f64; PCA_DIM],
    pub max: [f64; PCA_DIM],
    pub q: usize,
    pub eps: [f64; PCA_DIM],
}

impl QuantBounds {
    pub fn n_bins(&self) -> usize {
        self.q.pow(PCA_DIM as u32)
    }

    pub fn contains(&self, v: &[f64; PCA_DIM]) -> bool {
        (0..PCA_DIM).all(|j| v[j] >= self.min[j] && v[j] <= self.max[j])
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if self.q < 2 {
            return Err(format!("q must be at least 2, got {}", self.q));
        }
        for j in 0..PCA_DIM {
            let finite = self.min[j].is_finite() && self.max[j].is_finite() && self.eps[j].is_finite();
            if !finite || self.max[j] < self.min[j] || self.eps[j] <= 0.0 {
                return Err(format!("bad bounds in dimension {j}"));
            }
        }
        Ok(())
    }
}

/// Per-dimension min/max over the training projections, with a relative
/// epsilon of 1e-6 · max(1, range).
pub fn fit_bounds(projected: &[[f64; PCA_DIM]], q: usize) -> Result<QuantBounds> {
    let first = projected.first().ok_or(GaitError::EmptyInput)?;
    if q < 2 {
        return Err(GaitError::InvalidConfig(format!("q must be at least 2, got {q}")));
    }
    let mut min = *first;
    let mut max = *first;
    for v in &projected[1..] {
        for j in 0..PCA_DIM {
            min[j] = min[j].min(v[j]);
            max[j] = max[j].max(v[j]);
        }
    }
    let eps = std::array::from_fn(|j| 1e-6 * (max[j] - min[j]).max(1.0));
    Ok(QuantBounds { min, max, q, eps })
}

/// Cell index Σ q^(j) · floor(q (v_j − min_j) / (max_j − min_j + eps_j)), with
/// `v` clamped into the bounds first. Always in `[0, q³ − 1]`.
pub fn quantize_index(v: &[f64; PCA_DIM], b: &QuantBounds) -> usize {
    let mut index = 0;
    let mut stride = 1;
    for j in 0..PCA_DIM {
        let x = if v[j].is_nan() {
            b.min[j]
        } else {
            v[j].clamp(b.min[j], b.max[j])
        };
        let t = b.q as f64 * (x - b.min[j]) / (b.max[j] - b.min[j] + b.eps[j]);
        let cell = (t.floor() as usize).min(b.q - 1);
        index += stride * cell;
        stride *= b.q;
    }
    index
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoIHistogram {
    pub bins: Vec<u32>,
    pub n_points: u32,
    /// Projections that fell outside the training bounds and were clamped.
    pub n_clamped: u32,
}

impl PoIHistogram {
    pub fn zeros(n_bins: usize) -> Self {
        PoIHistogram {
            bins: vec![0; n_bins],
            n_points: 0,
            n_clamped: 0,
        }
    }
}

/// Unnormalized keypoint counts per quantization cell.
pub fn build_histogram(projections: &[[f64; PCA_DIM]], b: &QuantBounds) -> PoIHistogram {
    let mut h = PoIHistogram::zeros(b.n_bins());
    for v in projections {
        h.bins[quantize_index(v, b)] += 1;
        if !b.contains(v) {
            h.n_clamped += 1;
        }
    }
    h.n_points = projections.len() as u32;
    h
}

/// Raw features of every keypoint in one frame.
pub fn frame_raw_features(
    frame: &DepthFrame,
    meta: &FrameMeta,
    intrinsics: &Intrinsics,
    threshold_mm: f64,
) -> Result<Vec<RawFeature>> {
    detect_keypoints(frame, intrinsics, threshold_mm)
        .iter()
        .map(|kp| raw_feature(kp, meta))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn intrinsics() -> Intrinsics {
        Intrinsics {
            fx: 365.0,
            fy: 365.0,
            cx: 20.0,
            cy: 20.0,
        }
    }

    fn plate(value: u16) -> DepthFrame {
        let mut f = DepthFrame::new(40, 40, 0);
        for r in 5..35 {
            for c in 5..35 {
                f.set(r, c, value);
            }
        }
        f
    }

    #[test]
    fn ring_is_the_radius_three_circle() {
        for &(dr, dc) in &RING_OFFSETS {
            let d2 = dr * dr + dc * dc;
            assert!((8..=10).contains(&d2), "offset ({dr},{dc})");
        }
        let mut uniq = RING_OFFSETS.to_vec();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), RING_LEN);
        assert_eq!(RING_OFFSETS[0], (-3, 0));
        // first step goes towards 3 o'clock
        assert_eq!(RING_OFFSETS[4], (0, 3));
    }

    #[test]
    fn flat_plate_has_no_keypoints() {
        assert!(detect_keypoints(&plate(1500), &intrinsics(), 30.0).is_empty());
    }

    #[test]
    fn isolated_near_pixel_is_detected() {
        let mut f = plate(1040);
        f.set(20, 20, 1000);
        // brute force: 16 comparisons at +40 > 30
        let all_greater = RING_OFFSETS
            .iter()
            .all(|&(dr, dc)| f.get((20 + dr) as usize, (20 + dc) as usize) > 1000 + 30);
        assert!(all_greater);
        let kps = detect_keypoints(&f, &intrinsics(), 30.0);
        assert_eq!(kps.len(), 1);
        assert_eq!(kps[0].px, (20, 20));
        assert_eq!(kps[0].p3d, [0.0, 0.0, 1000.0]);
        assert_eq!(kps[0].ring_px[0], (17, 20));
        assert_eq!(kps[0].ring_3d[0][2], 1040.0);
        // a contrast at exactly the threshold is not enough
        assert!(detect_keypoints(&f, &intrinsics(), 40.0).is_empty());
    }

    #[test]
    fn far_pixel_is_detected_too() {
        let mut f = plate(1000);
        f.set(12, 15, 1100);
        let kps = detect_keypoints(&f, &intrinsics(), 30.0);
        assert_eq!(kps.iter().map(|k| k.px).collect::<Vec<_>>(), vec![(12, 15)]);
    }

    #[test]
    fn background_on_ring_discards_pixel() {
        let mut f = plate(1040);
        f.set(20, 20, 1000);
        f.set(23, 21, 0);
        assert!(detect_keypoints(&f, &intrinsics(), 30.0).is_empty());
    }

    #[test]
    fn raw_feature_layout() {
        let meta = FrameMeta {
            head_px: (5, 20),
            ground_row: 35,
        };
        let mut f = plate(1040);
        f.set(20, 20, 1000);
        let mut kp = detect_keypoints(&f, &intrinsics(), 30.0).remove(0);
        kp.p3d = [0.0, 0.0, 1000.0];
        kp.ring_3d[3] = [10.0, -5.0, 1040.0];
        let rf = raw_feature(&kp, &meta).unwrap();
        assert_eq!(&rf.values[9..12], &[10.0, -5.0, 40.0]);
        assert_eq!(rf.values.len(), 49);
        assert!((rf.height_ratio() - 0.5).abs() < 1e-12);

        kp.px.0 = 5;
        assert_eq!(raw_feature(&kp, &meta).unwrap().height_ratio(), 1.0);
        kp.px.0 = 35;
        assert_eq!(raw_feature(&kp, &meta).unwrap().height_ratio(), 0.0);
        kp.px.0 = 38;
        assert_eq!(raw_feature(&kp, &meta).unwrap().height_ratio(), 0.0);

        let flat = FrameMeta {
            head_px: (35, 20),
            ground_row: 35,
        };
        assert!(matches!(
            raw_feature(&kp, &flat),
            Err(GaitError::DegenerateCalibration)
        ));
    }

    fn random_features(n: usize, seed: u64) -> Vec<RawFeature> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| RawFeature {
                values: std::array::from_fn(|_| rng.random_range(-5.0..5.0)),
            })
            .collect()
    }

    #[test]
    fn pca_needs_fifty_samples() {
        assert!(matches!(
            fit_pca(&random_features(49, 1)),
            Err(GaitError::InsufficientSamples { needed: 50, found: 49 })
        ));
    }

    #[test]
    fn pca_projection_of_mean_and_basis() {
        let pca = fit_pca(&random_features(200, 2)).unwrap();
        pca.check().unwrap();
        let mean = RawFeature {
            values: std::array::from_fn(|i| pca.mean[i]),
        };
        assert_eq!(project(&pca, &mean), [0.0; 3]);
        let shifted = RawFeature {
            values: std::array::from_fn(|i| pca.mean[i] + pca.basis[0][i]),
        };
        let p = project(&pca, &shifted);
        assert!((p[0] - 1.0).abs() < 1e-9 && p[1].abs() < 1e-9 && p[2].abs() < 1e-9);
    }

    #[test]
    fn pca_project_matches_naive_loop() {
        let pca = fit_pca(&random_features(120, 3)).unwrap();
        let f = random_features(1, 99)[0];
        let mut expected = [0.0; 3];
        for (i, e) in expected.iter_mut().enumerate() {
            for k in 0..RAW_DIM {
                *e += pca.basis[i][k] * (f.values[k] - pca.mean[k]);
            }
        }
        let got = project(&pca, &f);
        for i in 0..3 {
            assert!((got[i] - expected[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_covariance_pads_basis() {
        // every sample varies along a single axis
        let samples: Vec<RawFeature> = (0..60)
            .map(|i| {
                let mut values = [1.0; RAW_DIM];
                values[7] = i as f64;
                RawFeature { values }
            })
            .collect();
        let pca = fit_pca(&samples).unwrap();
        pca.check().unwrap();
        assert!(pca.eigenvalues[0] > 1.0);
        assert_eq!(&pca.eigenvalues[1..], &[0.0, 0.0]);
        assert!((pca.basis[0][7] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_examples() {
        let b = fit_bounds(&[[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]], 5).unwrap();
        assert_eq!(b.min, [0.0; 3]);
        assert_eq!(b.max, [1.0, 2.0, 3.0]);
        assert_eq!(b.eps, [1e-6, 2e-6, 3e-6]);

        let single = fit_bounds(&[[0.5, -1.0, 2.0]], 5).unwrap();
        assert_eq!(single.min, single.max);
        assert_eq!(quantize_index(&[0.5, -1.0, 2.0], &single), 0);
        assert_eq!(quantize_index(&[9.0, 9.0, 9.0], &single), 0);

        assert!(matches!(fit_bounds(&[], 5), Err(GaitError::EmptyInput)));
    }

    #[test]
    fn bounds_match_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vs: Vec<[f64; 3]> = (0..100)
            .map(|_| std::array::from_fn(|_| rng.random_range(-50.0..50.0)))
            .collect();
        let b = fit_bounds(&vs, 5).unwrap();
        for j in 0..3 {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in &vs {
                if v[j] < lo {
                    lo = v[j];
                }
                if v[j] > hi {
                    hi = v[j];
                }
            }
            assert_eq!(b.min[j], lo);
            assert_eq!(b.max[j], hi);
        }
    }

    fn unit_bounds() -> QuantBounds {
        fit_bounds(&[[0.0; 3], [1.0; 3]], 5).unwrap()
    }

    #[test]
    fn quantize_corners_and_hand_case() {
        let b = unit_bounds();
        assert_eq!(quantize_index(&[0.0; 3], &b), 0);
        assert_eq!(quantize_index(&[1.0; 3], &b), 124);
        assert_eq!(quantize_index(&[0.3, 0.5, 0.9], &b), 111);
        assert_eq!(quantize_index(&[-7.0, 0.5, 42.0], &b), 2 * 5 + 4 * 25);
    }

    #[test]
    fn histogram_cases() {
        let b = unit_bounds();
        let h = build_histogram(&[], &b);
        assert_eq!(h.n_points, 0);
        assert!(h.bins.iter().all(|&x| x == 0));
        assert_eq!(h.bins.len(), 125);

        let h = build_histogram(&[[0.3, 0.5, 0.9]; 7], &b);
        assert_eq!(h.bins[111], 7);
        assert_eq!(h.bins.iter().sum::<u32>(), 7);
        assert_eq!(h.n_clamped, 0);

        let h = build_histogram(&[[2.0, 0.5, 0.9]], &b);
        assert_eq!(h.n_clamped, 1);
    }
}
