//! Posture-symmetry descriptors.
//!
//! The silhouette is split by the line from the head pixel down to the ground
//! row. Each frame yields the left/right pixel ratios and, per half, a
//! horizontal projection histogram banded into `k` bins and L2-normalized.

use serde::{Deserialize, Serialize};

use crate::error::{GaitError, Result};
use crate::frames::{DepthFrame, FrameMeta};

pub const DEFAULT_PROJ_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationLine {
    /// (row, col) of the head.
    pub top: (f64, f64),
    /// (row, col) where the line meets the ground.
    pub bottom: (f64, f64),
}

impl SeparationLine {
    pub fn new(top: (f64, f64), bottom: (f64, f64)) -> Result<Self> {
        if !(top.0 < bottom.0) {
            return Err(GaitError::HeadBelowGround {
                frame: 0,
                head_row: top.0 as i64,
                ground_row: bottom.0 as i64,
            });
        }
        Ok(SeparationLine { top, bottom })
    }

    /// Column of the line at `row`, linearly inter/extrapolated.
    pub fn col_at(&self, row: f64) -> f64 {
        let t = (row - self.top.0) / (self.bottom.0 - self.top.0);
        self.top.1 + t * (self.bottom.1 - self.top.1)
    }
}

/// Vertical line from the head pixel to the ground row.
pub fn separation_line(meta: &FrameMeta) -> Result<SeparationLine> {
    let (row, col) = meta.head_px;
    if row >= meta.ground_row {
        return Err(GaitError::HeadBelowGround {
            frame: 0,
            head_row: row,
            ground_row: meta.ground_row,
        });
    }
    Ok(SeparationLine {
        top: (row as f64, col as f64),
        bottom: (meta.ground_row as f64, col as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Mask {
    pub fn empty(width: usize, height: usize) -> Self {
        Mask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn foreground(frame: &DepthFrame) -> Self {
        Mask {
            width: frame.width,
            height: frame.height,
            bits: frame.depth.iter().map(|&d| d != 0).collect(),
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn row_count(&self, row: usize) -> usize {
        self.bits[row * self.width..(row + 1) * self.width]
            .iter()
            .filter(|&&b| b)
            .count()
    }

    /// First and last rows holding any set pixel.
    pub fn row_extent(&self) -> Option<(usize, usize)> {
        let mut rows = (0..self.height).filter(|&r| self.row_count(r) > 0);
        let first = rows.next()?;
        let last = rows.last().unwrap_or(first);
        Some((first, last))
    }
}

/// Partitions the foreground: pixel (r, c) goes left iff `c <= col_at(r)`.
pub fn split_silhouette(frame: &DepthFrame, line: &SeparationLine) -> (Mask, Mask) {
    let mut left = Mask::empty(frame.width, frame.height);
    let mut right = Mask::empty(frame.width, frame.height);
    for r in 0..frame.height {
        let boundary = line.col_at(r as f64);
        for c in 0..frame.width {
            let i = r * frame.width + c;
            if frame.depth[i] == 0 {
                continue;
            }
            if (c as f64) <= boundary {
                left.bits[i] = true;
            } else {
                right.bits[i] = true;
            }
        }
    }
    (left, right)
}

/// `(#left / #whole, 1 − that)`.
pub fn half_body_ratio(left: &Mask, whole: &Mask) -> Result<(f64, f64)> {
    let total = whole.count();
    if total == 0 {
        return Err(GaitError::EmptySilhouette { frame: 0 });
    }
    let ratio_left = left.count() as f64 / total as f64;
    Ok((ratio_left, 1.0 - ratio_left))
}

/// Per-row pixel counts of `half` over the whole-body row extent, so both
/// halves share rows. Empty `whole` yields an empty vector.
pub fn projection_histogram(half: &Mask, whole: &Mask) -> Vec<u32> {
    match whole.row_extent() {
        Some((lo, hi)) => (lo..=hi).map(|r| half.row_count(r) as u32).collect(),
        None => Vec::new(),
    }
}

/// Band lengths for splitting `len` rows into `k` contiguous bands; the first
/// `len % k` bands are one row longer.
pub fn band_lengths(len: usize, k: usize) -> Vec<usize> {
    let base = len / k;
    let extra = len % k;
    (0..k).map(|i| base + usize::from(i < extra)).collect()
}

/// Band sums of `rows` without normalization.
pub fn band_sums(rows: &[u32], k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for len in band_lengths(rows.len(), k) {
        out.push(rows[start..start + len].iter().map(|&x| f64::from(x)).sum());
        start += len;
    }
    out
}

/// `k` band sums scaled to unit L2 norm, or all zeros when the input is empty.
pub fn quantize_projection(rows: &[u32], k: usize) -> Vec<f64> {
    assert!(k >= 1, "projection bin count must be positive");
    let mut bins = band_sums(rows, k);
    let norm = bins.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm > 0.0 {
        bins.iter_mut().for_each(|b| *b /= norm);
    }
    bins
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoPSFrameFeature {
    pub ratio_left: f64,
    pub ratio_right: f64,
    pub left_hist: Vec<f64>,
    pub right_hist: Vec<f64>,
}

impl LoPSFrameFeature {
    pub fn k(&self) -> usize {
        self.left_hist.len()
    }
}

/// All symmetry descriptors of one frame.
pub fn lops_frame_feature(frame: &DepthFrame, meta: &FrameMeta, k: usize) -> Result<LoPSFrameFeature> {
    let line = separation_line(meta).map_err(|_| GaitError::HeadBelowGround {
        frame: frame.index,
        head_row: meta.head_px.0,
        ground_row: meta.ground_row,
    })?;
    lops_feature_with_line(frame, &line, k)
}

pub fn lops_feature_with_line(
    frame: &DepthFrame,
    line: &SeparationLine,
    k: usize,
) -> Result<LoPSFrameFeature> {
    let whole = Mask::foreground(frame);
    let (left, right) = split_silhouette(frame, line);
    let (ratio_left, ratio_right) = half_body_ratio(&left, &whole)
        .map_err(|_| GaitError::EmptySilhouette { frame: frame.index })?;
    Ok(LoPSFrameFeature {
        ratio_left,
        ratio_right,
        left_hist: quantize_projection(&projection_histogram(&left, &whole), k),
        right_hist: quantize_projection(&projection_histogram(&right, &whole), k),
    })
}
