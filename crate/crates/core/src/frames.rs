//! Depth-frame sequences: in-memory model, validation and the on-disk layout.
//!
//! A sequence directory holds `frame_000000.pgm`, `frame_000001.pgm`, ... (binary
//! 16-bit PGM, big-endian samples, one millimeter per unit, 0 = background) and a
//! `meta.json` sidecar carrying per-frame head pixel and ground row, camera
//! intrinsics, frame rate and an optional label.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GaitError, Result};

pub const MIN_FRAME_SIDE: usize = 32;
pub const MIN_FOREGROUND_MM: u16 = 200;
pub const MAX_FOREGROUND_MM: u16 = 10_000;
pub const META_VERSION: u32 = 1;
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFrame {
    pub width: usize,
    pub height: usize,
    /// Row-major depth in millimeters, 0 = background.
    pub depth: Vec<u16>,
    pub index: usize,
}

impl DepthFrame {
    pub fn new(width: usize, height: usize, index: usize) -> Self {
        DepthFrame {
            width,
            height,
            depth: vec![0; width * height],
            index,
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.depth[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u16) {
        self.depth[row * self.width + col] = value;
    }

    /// Depth at a signed position, `None` outside the grid.
    #[inline]
    pub fn get_signed(&self, row: i64, col: i64) -> Option<u16> {
        if row < 0 || col < 0 || row >= self.height as i64 || col >= self.width as i64 {
            None
        } else {
            Some(self.get(row as usize, col as usize))
        }
    }

    pub fn foreground_count(&self) -> usize {
        self.depth.iter().filter(|&&d| d != 0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Intrinsics {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.fx, self.fy, self.cx, self.cy]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(GaitError::InvalidIntrinsics("non-finite value".into()));
        }
        if self.fx <= 0.0 || self.fy <= 0.0 {
            return Err(GaitError::InvalidIntrinsics(format!(
                "focal lengths must be positive (fx={}, fy={})",
                self.fx, self.fy
            )));
        }
        Ok(())
    }

    /// Pinhole back-projection of pixel (row, col) at depth `z` mm.
    #[inline]
    pub fn back_project(&self, row: f64, col: f64, z: f64) -> [f64; 3] {
        [(col - self.cx) * z / self.fx, (row - self.cy) * z / self.fy, z]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Normal,
    Abnormal,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Normal => f.write_str("normal"),
            Label::Abnormal => f.write_str("abnormal"),
        }
    }
}

/// Per-frame slice of [`SequenceMeta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameMeta {
    /// (row, col) of the head pixel.
    pub head_px: (i64, i64),
    pub ground_row: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMeta {
    pub head_px: Vec<(i64, i64)>,
    pub ground_row: Vec<i64>,
    pub intrinsics: Intrinsics,
    pub fps: f64,
}

impl SequenceMeta {
    pub fn entry(&self, index: usize) -> FrameMeta {
        FrameMeta {
            head_px: self.head_px[index],
            ground_row: self.ground_row[index],
        }
    }

    fn check_arity(&self, n_frames: usize) -> Result<()> {
        if self.head_px.len() != n_frames {
            return Err(GaitError::MetaArityMismatch {
                field: "head_px",
                expected: n_frames,
                found: self.head_px.len(),
            });
        }
        if self.ground_row.len() != n_frames {
            return Err(GaitError::MetaArityMismatch {
                field: "ground_row",
                expected: n_frames,
                found: self.ground_row.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthSequence {
    pub frames: Vec<DepthFrame>,
    pub meta: SequenceMeta,
    pub label: Option<Label>,
}

impl DepthSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Checks shape and arity invariants, then validates every frame in place.
    /// Returns the total number of foreground pixels that were zeroed.
    pub fn validate(&mut self) -> Result<usize> {
        let Some(first) = self.frames.first() else {
            return Err(GaitError::EmptyInput);
        };
        let dims = (first.width, first.height);
        self.meta.check_arity(self.frames.len())?;
        self.meta.intrinsics.validate()?;
        let mut clamped = 0;
        for (i, frame) in self.frames.iter_mut().enumerate() {
            if (frame.width, frame.height) != dims {
                return Err(GaitError::FrameSizeMismatch {
                    index: i,
                    expected: dims,
                    found: (frame.width, frame.height),
                });
            }
            clamped += validate_frame(frame, &self.meta.entry(i))?;
        }
        Ok(clamped)
    }
}

/// Enforces the frame invariants. Foreground values outside the plausible
/// [200, 10000] mm window are zeroed; the number of zeroed pixels is returned.
pub fn validate_frame(frame: &mut DepthFrame, meta: &FrameMeta) -> Result<usize> {
    if frame.width < MIN_FRAME_SIDE || frame.height < MIN_FRAME_SIDE {
        return Err(GaitError::FrameTooSmall {
            index: frame.index,
            width: frame.width,
            height: frame.height,
        });
    }
    if frame.depth.len() != frame.width * frame.height {
        return Err(GaitError::Internal(format!(
            "frame {} holds {} samples for {}x{}",
            frame.index,
            frame.depth.len(),
            frame.width,
            frame.height
        )));
    }
    if meta.head_px.0 >= meta.ground_row {
        return Err(GaitError::HeadBelowGround {
            frame: frame.index,
            head_row: meta.head_px.0,
            ground_row: meta.ground_row,
        });
    }
    let mut clamped = 0;
    let mut foreground = 0;
    for d in frame.depth.iter_mut() {
        if *d == 0 {
            continue;
        }
        if (MIN_FOREGROUND_MM..=MAX_FOREGROUND_MM).contains(d) {
            foreground += 1;
        } else {
            *d = 0;
            clamped += 1;
        }
    }
    if foreground == 0 {
        return Err(GaitError::EmptySilhouette { frame: frame.index });
    }
    Ok(clamped)
}

// ---------------------------------------------------------------------------
// PGM (P5, maxval 65535)

pub fn encode_pgm(frame: &DepthFrame) -> Vec<u8> {
    let header = format!("P5\n{} {}\n65535\n", frame.width, frame.height);
    let mut out = Vec::with_capacity(header.len() + frame.depth.len() * 2);
    out.extend_from_slice(header.as_bytes());
    for &d in &frame.depth {
        out.extend_from_slice(&d.to_be_bytes());
    }
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b' ' | b'\t' | b'\n' | b'\r' => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(GaitError::CorruptPgm(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GaitError::CorruptPgm(format!("bad {what}")))
    }
}

/// Decodes a binary 16-bit PGM into a frame with ordinal `index`.
pub fn decode_pgm(bytes: &[u8], index: usize) -> Result<DepthFrame> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(GaitError::CorruptPgm("missing P5 magic".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 65535 {
        return Err(GaitError::CorruptPgm(format!(
            "maxval {maxval}, expected 65535"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(GaitError::CorruptPgm("header not terminated".into())),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(2))
        .ok_or_else(|| GaitError::CorruptPgm("dimensions overflow".into()))?;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(GaitError::CorruptPgm(format!(
            "truncated payload: {} of {expected} bytes",
            payload.len()
        )));
    }
    if payload.len() > expected {
        return Err(GaitError::CorruptPgm(format!(
            "{} trailing bytes after raster",
            payload.len() - expected
        )));
    }
    let depth = payload
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    Ok(DepthFrame {
        width,
        height,
        depth,
        index,
    })
}

// ---------------------------------------------------------------------------
// meta.json

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaFile {
    version: u32,
    fps: f64,
    intrinsics: Intrinsics,
    head_px: Vec<[i64; 2]>,
    ground_row: Vec<i64>,
    #[serde(default)]
    label: Option<Label>,
}

fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.pgm")
}

fn parse_frame_ordinal(name: &str) -> Option<usize> {
    let digits = name.strip_prefix("frame_")?.strip_suffix(".pgm")?;
    if digits.len() != 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Serializes the sidecar with sorted keys and a trailing newline.
pub fn encode_meta(seq: &DepthSequence) -> Vec<u8> {
    let file = MetaFile {
        version: META_VERSION,
        fps: seq.meta.fps,
        intrinsics: seq.meta.intrinsics,
        head_px: seq.meta.head_px.iter().map(|&(r, c)| [r, c]).collect(),
        ground_row: seq.meta.ground_row.clone(),
        label: seq.label,
    };
    let value = serde_json::to_value(&file).expect("meta serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("meta serializes");
    text.push('\n');
    text.into_bytes()
}

fn decode_meta(bytes: &[u8]) -> Result<(SequenceMeta, Option<Label>)> {
    let file: MetaFile =
        serde_json::from_slice(bytes).map_err(|e| GaitError::MetaParse(e.to_string()))?;
    if file.version != META_VERSION {
        return Err(GaitError::MetaParse(format!(
            "unsupported meta version {}",
            file.version
        )));
    }
    if !(file.fps.is_finite() && file.fps > 0.0) {
        return Err(GaitError::MetaParse(format!("fps must be positive, got {}", file.fps)));
    }
    let meta = SequenceMeta {
        head_px: file.head_px.iter().map(|p| (p[0], p[1])).collect(),
        ground_row: file.ground_row,
        intrinsics: file.intrinsics,
        fps: file.fps,
    };
    Ok((meta, file.label))
}

/// Reads and validates a sequence directory.
pub fn load_sequence(dir: &Path) -> Result<DepthSequence> {
    let meta_path = dir.join(META_FILE);
    if !meta_path.is_file() {
        if !dir.is_dir() {
            return Err(GaitError::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            ));
        }
        return Err(GaitError::MissingMeta(dir.to_path_buf()));
    }
    let meta_bytes = fs::read(&meta_path).map_err(|e| GaitError::io(&meta_path, e))?;
    let (meta, label) = decode_meta(&meta_bytes)?;

    let mut ordinals = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| GaitError::io(dir, e))? {
        let entry = entry.map_err(|e| GaitError::io(dir, e))?;
        if let Some(i) = entry.file_name().to_str().and_then(parse_frame_ordinal) {
            ordinals.push(i);
        }
    }
    if ordinals.is_empty() {
        return Err(GaitError::NoFrames(dir.to_path_buf()));
    }
    ordinals.sort_unstable();
    for (expected, &found) in ordinals.iter().enumerate() {
        if expected != found {
            return Err(GaitError::FrameGap { expected, found });
        }
    }

    let mut frames = Vec::with_capacity(ordinals.len());
    for &i in &ordinals {
        let path = dir.join(frame_file_name(i));
        let bytes = fs::read(&path).map_err(|e| GaitError::io(&path, e))?;
        let frame = decode_pgm(&bytes, i)
            .map_err(|e| GaitError::CorruptPgm(format!("{}: {e}", path.display())))?;
        frames.push(frame);
    }

    let mut seq = DepthSequence {
        frames,
        meta,
        label,
    };
    let clamped = seq.validate()?;
    if clamped > 0 {
        log::debug!(
            "{}: zeroed {clamped} out-of-range foreground pixels",
            dir.display()
        );
    }
    Ok(seq)
}

/// Writes `seq` into `dir` (created if missing). Frame files are written in
/// ordinal order, the sidecar last.
pub fn save_sequence(seq: &DepthSequence, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| GaitError::io(dir, e))?;
    for (i, frame) in seq.frames.iter().enumerate() {
        let path = dir.join(frame_file_name(i));
        fs::write(&path, encode_pgm(frame)).map_err(|e| GaitError::io(&path, e))?;
    }
    let meta_path = dir.join(META_FILE);
    fs::write(&meta_path, encode_meta(seq)).map_err(|e| GaitError::io(&meta_path, e))
}
