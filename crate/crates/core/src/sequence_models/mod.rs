//! Sequence-level scoring machinery: histogram deltas, the fully connected
//! GMM-HMM over those deltas, and lagged cross-correlation similarity.

mod hamming;
mod hmm;
mod kmeans;
mod xcorr;

pub use hamming::{delta_sequence, hamming_delta, HammingMode};
pub use hmm::{
    forward_log_likelihood, poi_score, train_hmm, train_hmm_traced, Gmm, GmmHmm, HmmTrainConfig,
    TrainTrace, VARIANCE_FLOOR,
};
pub use kmeans::kmeans_1d;
pub use xcorr::{default_max_lag, xcorr_similarity};
