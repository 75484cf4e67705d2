use crate::error::{GaitError, Result};

/// Relative variance below which a segment is treated as constant.
const FLAT_RELATIVE: f64 = 1e-18;

pub fn default_max_lag(n: usize) -> usize {
    n / 2
}

/// Best lagged similarity of `a` against shifted copies of `b`, in `[0, 1]`.
///
/// For every lag in `[-max_lag, max_lag]` with at least two overlapping
/// samples, the overlapping segments are compared by zero-mean normalized
/// cross-correlation, or by plain cosine similarity when either segment is
/// constant (0 when either is all zeros). The maximum over lags is clamped
/// into `[0, 1]`.
pub fn xcorr_similarity(a: &[f64], b: &[f64], max_lag: Option<usize>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(GaitError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(GaitError::TooShort(n));
    }
    let max_lag = max_lag.unwrap_or_else(|| default_max_lag(n)).min(n - 2);
    let mut best = f64::NEG_INFINITY;
    for lag in -(max_lag as i64)..=(max_lag as i64) {
        let shift = lag.unsigned_abs() as usize;
        let (sa, sb) = if lag >= 0 {
            (&a[..n - shift], &b[shift..])
        } else {
            (&a[shift..], &b[..n - shift])
        };
        best = best.max(segment_similarity(sa, sb));
    }
    Ok(best.clamp(0.0, 1.0))
}

fn segment_similarity(x: &[f64], y: &[f64]) -> f64 {
    let len = x.len() as f64;
    let mx = x.iter().sum::<f64>() / len;
    let my = y.iter().sum::<f64>() / len;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    let (mut rxx, mut ryy) = (0.0, 0.0);
    for (&u, &v) in x.iter().zip(y) {
        let (du, dv) = (u - mx, v - my);
        sxy += du * dv;
        sxx += du * du;
        syy += dv * dv;
        rxx += u * u;
        ryy += v * v;
    }
    let flat_x = sxx <= FLAT_RELATIVE * rxx;
    let flat_y = syy <= FLAT_RELATIVE * ryy;
    if flat_x || flat_y {
        if rxx == 0.0 || ryy == 0.0 {
            return 0.0;
        }
        let dot: f64 = x.iter().zip(y).map(|(u, v)| u * v).sum();
        return dot / (rxx * ryy).sqrt();
    }
    sxy / (sxx * syy).sqrt()
}
