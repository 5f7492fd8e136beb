//! Cross-mapping coherence (CMC).
//!
//! Convergent cross-mapping reconstructs one variable from the delay
//! embedding of another; the skill of that reconstruction indicates that the
//! embedded variable is driven by the reconstructed one. CMC replaces the
//! scalar skill with the magnitude coherence spectrum between
//! the observed and cross-mapped signals, scanned over temporal shifts, and
//! reduces each frequency band to a causal strength using peak prominence.
//!
//! Direction convention: functions taking `(x, y)` embed `x` and predict `y`,
//! which tests the influence `y -> x`.

mod error;
mod knn;

pub mod crossmap;
pub mod embedding;
pub mod prominence;
pub mod scan;
pub mod spectral;
pub mod timeseries;

pub use crossmap::{
    ccm_score, ccm_score_with, compute_weights, convergence_curve, cross_map, find_neighbors,
    CrossMapConfig, CrossMapModel, Prediction,
};
pub use embedding::{embed, DelayEmbedding, EmbeddingConfig};
pub use error::{Error, Result};
pub use prominence::{
    causal_limit, causal_strength, find_peaks, strength_profile, CausalStrength,
    CausalStrengthProfile, Peak,
};
pub use scan::{
    average_surfaces, ccm_function, cmc_surface, normalize_per_band, shift_pair, CcmCurve,
    CmcSurface, ShiftRange, ShiftScan,
};
pub use spectral::{
    coherence, welch_csd, welch_psd, CoherenceCurve, CrossSpectra, SpectralConfig,
    SpectralEstimate, Taper, Welch,
};
pub use timeseries::{
    add_observational_noise, pearson_r2, subsample, NoiseConfig, TimeSeries,
};
