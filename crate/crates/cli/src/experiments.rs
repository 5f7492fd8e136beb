//! Benchmark analyses on simulated systems.
//!
//! Each function simulates a benchmark scenario and runs the bidirectional
//! pipeline with fixed analysis settings. The figure reproductions and the
//! acceptance tests both build on these.
//!
//! Spectral segment lengths are chosen per experiment. Null coherence is
//! biased upwards by roughly `0.9 / sqrt(segments)`, so broadband logistic
//! data use short segments (many averages), while the oscillator systems
//! need longer ones to resolve their rhythms.

use cmc::{
    add_observational_noise, EmbeddingConfig, NoiseConfig, ShiftRange, SpectralConfig, TimeSeries,
};
use cmc_sim::presets::{
    kuramoto_preset, logistic_coupling_study, logistic_length_study, logistic_noise_study,
    logistic_preset, lorenz_preset,
};
use cmc_sim::{simulate_kuramoto, simulate_logistic, simulate_lorenz, simulate_wilson_cowan, Preset, WilsonCowanConfig};
use rayon::prelude::*;

use crate::config::AnalysisConfig;
use crate::error::{CliError, Result};
use crate::pipeline::{run_pipeline, run_realizations, ResultBundle};

pub const DEFAULT_SEED: u64 = 0;

/// Segment length for logistic records of 10^4 samples or more.
pub const LOGISTIC_SEGMENT_LONG: usize = 32;
/// Segment length for logistic records of at most a few thousand samples.
pub const LOGISTIC_SEGMENT_SHORT: usize = 8;
pub const LORENZ_SEGMENT: usize = 64;
pub const KURAMOTO_SEGMENT: usize = 64;
pub const WILSON_COWAN_SEGMENT: usize = 256;

pub const LENGTHS: [usize; 5] = [400, 700, 1000, 2000, 5000];
pub const COUPLINGS: [f64; 5] = [0.0, 0.05, 0.1, 0.15, 0.2];
pub const SNRS: [f64; 5] = [1000.0, 100.0, 10.0, 5.0, 2.0];
pub const DIMENSIONS: [usize; 5] = [2, 4, 6, 8, 10];

fn analysis(dimension: usize, shifts: ShiftRange, segment: usize) -> AnalysisConfig {
    AnalysisConfig {
        embedding: EmbeddingConfig { dimension, delay: 1 },
        spectral: SpectralConfig::with_segment_length(segment),
        shift_range: shifts,
        ..AnalysisConfig::default()
    }
}

/// Logistic settings: `E = 2`, `tau = 1`, shifts `[-20, 20]`.
pub fn logistic_analysis(segment: usize) -> AnalysisConfig {
    analysis(2, ShiftRange::symmetric(20), segment)
}

fn pair(series: &[TimeSeries]) -> (TimeSeries, TimeSeries) {
    (series[0].clone(), series[1].clone())
}

/// Observation noise seeds derived from the simulation seed.
fn noise_seed(seed: u64, channel: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(channel + 1)
}

/// One of the logistic scenarios; `x` and `y` are maps 1 and 2.
pub fn logistic_scenario(preset: Preset, seed: u64) -> Result<ResultBundle> {
    let sim = logistic_preset(preset, seed)
        .ok_or_else(|| CliError::Usage(format!("{preset} is not a logistic preset")))?;
    let (x, y) = pair(&simulate_logistic(&sim)?);
    let mut cfg = logistic_analysis(LOGISTIC_SEGMENT_LONG);
    cfg.seed = seed;
    run_pipeline(&cfg, &x, &y)
}

/// Unidirectional maps simulated at each record length.
pub fn length_study(lengths: &[usize], seed: u64) -> Result<Vec<(usize, ResultBundle)>> {
    let mut cfg = logistic_analysis(LOGISTIC_SEGMENT_SHORT);
    cfg.seed = seed;
    lengths
        .iter()
        .map(|&l| {
            let (x, y) = pair(&simulate_logistic(&logistic_length_study(l, seed))?);
            Ok((l, run_pipeline(&cfg, &x, &y)?))
        })
        .collect()
}

pub fn coupling_study(couplings: &[f64], seed: u64) -> Result<Vec<(f64, ResultBundle)>> {
    let mut cfg = logistic_analysis(LOGISTIC_SEGMENT_SHORT);
    cfg.seed = seed;
    couplings
        .iter()
        .map(|&c| {
            let (x, y) = pair(&simulate_logistic(&logistic_coupling_study(c, seed))?);
            Ok((c, run_pipeline(&cfg, &x, &y)?))
        })
        .collect()
}

/// Record length of the noise study.
pub const NOISE_LENGTH: usize = 2000;

/// Adds independent white noise to both maps at each signal-to-noise ratio.
pub fn noise_study(snrs: &[f64], seed: u64) -> Result<Vec<(f64, ResultBundle)>> {
    let mut cfg = logistic_analysis(LOGISTIC_SEGMENT_SHORT);
    cfg.seed = seed;
    let (x, y) = pair(&simulate_logistic(&logistic_noise_study(NOISE_LENGTH, seed))?);
    snrs.iter()
        .map(|&snr| {
            let xn = add_observational_noise(&x, &NoiseConfig::new(snr, noise_seed(seed, 0))?)?;
            let yn = add_observational_noise(&y, &NoiseConfig::new(snr, noise_seed(seed, 1))?)?;
            Ok((snr, run_pipeline(&cfg, &xn, &yn)?))
        })
        .collect()
}

/// Record length of the embedding study.
pub const EMBEDDING_LENGTH: usize = 20_000;

pub fn embedding_study(dimensions: &[usize], seed: u64) -> Result<Vec<(usize, ResultBundle)>> {
    let (x, y) = pair(&simulate_logistic(&logistic_noise_study(EMBEDDING_LENGTH, seed))?);
    dimensions
        .iter()
        .map(|&e| {
            let mut cfg = analysis(e, ShiftRange::symmetric(20), LOGISTIC_SEGMENT_LONG);
            cfg.seed = seed;
            Ok((e, run_pipeline(&cfg, &x, &y)?))
        })
        .collect()
}

/// Width (in shift steps) of the contiguous run around the maximum of
/// `curve` that stays within 90% of the maximum.
pub fn plateau_width(curve: &[f64]) -> usize {
    let Some((peak, &top)) = curve.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return 0;
    };
    let level = 0.9 * top;
    let left = curve[..peak].iter().rev().take_while(|&&v| v >= level).count();
    let right = curve[peak + 1..].iter().take_while(|&&v| v >= level).count();
    left + right + 1
}

/// Lorenz `x1` against `x2`, sampled at 10 Hz, `E = 7`, shifts `±2 s`.
pub fn lorenz_study(preset: Preset) -> Result<ResultBundle> {
    let sim = lorenz_preset(preset).ok_or_else(|| CliError::Usage(format!("{preset} is not a Lorenz preset")))?;
    let out = simulate_lorenz(&sim)?;
    let (x1, x2) = (&out[0], &out[3]);
    let cfg = analysis(7, ShiftRange::from_seconds(2.0, x1.sample_rate()), LORENZ_SEGMENT);
    run_pipeline(&cfg, x1, x2)
}

/// A directed pair of oscillators and its analysis; `bundle.x_to_y` is
/// `cause -> effect`.
#[derive(Debug, Clone)]
pub struct PairResult {
    pub cause: String,
    pub effect: String,
    pub bundle: ResultBundle,
}

/// Samples of the oscillator record that are analysed.
pub const KURAMOTO_WINDOW: usize = 10_000;

/// The three oscillator pairs `z-x`, `z-y`, `x-y`: `E = 5`, shifts `±0.1 s`.
pub fn kuramoto_study(seed: u64) -> Result<Vec<PairResult>> {
    let out = simulate_kuramoto(&kuramoto_preset(seed))?;
    let names = ["z", "x", "y"];
    let first: Vec<TimeSeries> = out
        .observed
        .iter()
        .map(|s| s.slice(0, KURAMOTO_WINDOW.min(s.len())))
        .collect::<std::result::Result<_, _>>()?;
    let mut cfg = analysis(5, ShiftRange::from_seconds(0.1, first[0].sample_rate()), KURAMOTO_SEGMENT);
    cfg.seed = seed;
    [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(a, b)| {
            Ok(PairResult {
                cause: names[a].into(),
                effect: names[b].into(),
                bundle: run_pipeline(&cfg, &first[a], &first[b])?,
            })
        })
        .collect()
}

/// Settings for the two-area rate model: `E = 9`, shifts `±0.2 s`, per-band
/// normalization, averaged over the configured realizations.
pub fn wilson_cowan_analysis(sample_rate: f64, realizations: usize, seed: u64) -> AnalysisConfig {
    AnalysisConfig {
        normalization: true,
        realizations,
        seed,
        ..analysis(9, ShiftRange::from_seconds(0.2, sample_rate), WILSON_COWAN_SEGMENT)
    }
}

/// The first two configured signals are `x` and `y` (e.g. V1 and V4).
pub fn wilson_cowan_study(sim: &WilsonCowanConfig) -> Result<ResultBundle> {
    if sim.signals.len() < 2 {
        return Err(CliError::Usage("the rate model needs at least two [[signal]] entries".into()));
    }
    let pairs = (0..sim.realizations)
        .into_par_iter()
        .map(|r| {
            let signals = sim.observe(&simulate_wilson_cowan(sim, r)?)?;
            Ok((signals[0].clone(), signals[1].clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = wilson_cowan_analysis(sim.sample_rate(), sim.realizations, sim.seed);
    run_realizations(&cfg, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_width_examples() {
        assert_eq!(plateau_width(&[0.0, 1.0, 0.0]), 1);
        assert_eq!(plateau_width(&[0.1, 0.95, 1.0, 0.92, 0.5, 0.95]), 3);
        assert_eq!(plateau_width(&[]), 0);
    }

    #[test]
    fn noise_seeds_differ_per_channel() {
        assert_ne!(noise_seed(0, 0), noise_seed(0, 1));
        assert_ne!(noise_seed(0, 0), noise_seed(1, 0));
    }
}
