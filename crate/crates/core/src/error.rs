use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GaitError>;

#[derive(Debug, Error)]
pub enum GaitError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    // frames
    #[error("no meta.json sidecar in {0}")]
    MissingMeta(PathBuf),
    #[error("malformed meta.json: {0}")]
    MetaParse(String),
    #[error("no frame files found in {0}")]
    NoFrames(PathBuf),
    #[error("frame ordinals are not contiguous: expected frame {expected}, found {found}")]
    FrameGap { expected: usize, found: usize },
    #[error("frame {index} is {found:?} but the sequence is {expected:?} (width, height)")]
    FrameSizeMismatch {
        index: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("frame {index} is {width}x{height}, minimum is 32x32")]
    FrameTooSmall {
        index: usize,
        width: usize,
        height: usize,
    },
    #[error("corrupt PGM: {0}")]
    CorruptPgm(String),
    #[error("meta field `{field}` has {found} entries for {expected} frames")]
    MetaArityMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("frame {frame}: head row {head_row} is not above ground row {ground_row}")]
    HeadBelowGround {
        frame: usize,
        head_row: i64,
        ground_row: i64,
    },
    #[error("frame {frame}: silhouette is empty")]
    EmptySilhouette { frame: usize },
    #[error("invalid intrinsics: {0}")]
    InvalidIntrinsics(String),

    // synthgait
    #[error("invalid synthesis parameters: {0}")]
    InvalidParams(String),

    // poi features
    #[error("degenerate calibration: ground row equals head row")]
    DegenerateCalibration,
    #[error("PCA needs at least {needed} samples, got {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("empty input")]
    EmptyInput,

    // sequence models
    #[error("histogram bin counts differ: {0} vs {1}")]
    BinCountMismatch(usize, usize),
    #[error("no training sequences")]
    EmptyTrainingSet,
    #[error("training sequence {index} has {len} observations, need at least {min}")]
    TrainingSequenceTooShort { index: usize, len: usize, min: usize },
    #[error("empty scoring window")]
    EmptyWindow,
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sequence of length {0} is too short for cross-correlation")]
    TooShort(usize),

    // assessment
    #[error("window of {len} frames is shorter than the minimum of {min}")]
    WindowTooShort { len: usize, min: usize },
    #[error("no training windows")]
    NoTrainingWindows,
    #[error("sequence has {len} frames, window needs {window}")]
    SequenceTooShort { len: usize, window: usize },
    #[error("insufficient training data: {0}")]
    InsufficientData(String),
    #[error("invalid pipeline configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown model format version {0}")]
    UnknownVersion(u64),
    #[error("model schema violation: {0}")]
    SchemaViolation(String),

    // evaluation
    #[error("ROC needs both normal and abnormal samples")]
    SingleClassInput,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl GaitError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GaitError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, GaitError::Internal(_))
    }
}
