//! Gait normality scoring from frontal-view depth silhouette sequences.
//!
//! Two per-frame feature families feed two window scores: point-of-interest
//! histograms scored by a fully connected GMM-HMM over histogram deltas, and
//! left/right posture-symmetry descriptors scored by lagged cross-correlation.
//! The two scores are fused with weights fitted on normal gait only.

pub mod assessment;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod frames;
pub mod lops;
pub mod poi;
pub mod sequence_models;
pub mod synthgait;

pub use error::{GaitError, Result};
