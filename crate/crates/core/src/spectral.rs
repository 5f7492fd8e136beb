//! Welch-averaged spectra and magnitude coherence.
//!
//! Segments are mean-removed (optional), tapered, transformed and averaged.
//! Spectra are one-sided densities: `S(f) = 2 |X(f)|² / (fs Σ w²)` except at
//! DC and Nyquist, which are not doubled. Coherence is
//! `|S_ab| / sqrt(S_aa S_bb)`; it needs at least two segments, since a single
//! periodogram always yields exactly 1.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::timeseries::TimeSeries;

/// Bins whose power is below this fraction of the spectrum's peak are treated
/// as empty when forming coherence.
const DEGENERATE_BIN_FRACTION: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Taper {
    #[default]
    Hann,
    Rectangular,
}

impl Taper {
    /// Periodic window of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            Taper::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
            Taper::Rectangular => vec![1.0; n],
        }
    }
}

impl std::str::FromStr for Taper {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hann" | "hanning" => Ok(Taper::Hann),
            "rect" | "rectangular" | "boxcar" => Ok(Taper::Rectangular),
            other => Err(format!("unknown window '{other}' (expected hann or rectangular)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// Samples per segment. `None` picks `min(256, 2^floor(log2(N/8)))`.
    pub segment_length: Option<usize>,
    pub overlap_fraction: f64,
    pub window: Taper,
    /// Subtract each segment's mean before tapering.
    pub detrend: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            segment_length: None,
            overlap_fraction: 0.5,
            window: Taper::Hann,
            detrend: true,
        }
    }
}

impl SpectralConfig {
    pub fn with_segment_length(segment_length: usize) -> Self {
        Self {
            segment_length: Some(segment_length),
            ..Self::default()
        }
    }

    /// Segment length that would be used for a signal of `n` samples.
    pub fn resolve_segment_length(&self, n: usize) -> usize {
        match self.segment_length {
            Some(s) => s,
            None => {
                let target = (n / 8).max(1);
                let pow2 = 1usize << (usize::BITS - 1 - target.leading_zeros());
                pow2.min(256)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(invalid!(
                "overlap fraction must lie in [0, 1), got {}",
                self.overlap_fraction
            ));
        }
        if let Some(s) = self.segment_length {
            if s < 8 {
                return Err(invalid!("segment length must be at least 8, got {s}"));
            }
        }
        Ok(())
    }
}

/// Spectrum sampled on `frequencies` (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate<T> {
    pub frequencies: Vec<f64>,
    pub values: Vec<T>,
    pub segments: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceCurve {
    pub frequencies: Vec<f64>,
    pub coherence: Vec<f64>,
    /// Bins where one of the power spectra vanished; their coherence is 0.
    pub degenerate: Vec<bool>,
}

/// Auto- and cross-spectra of a pair from one pass over the segments.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectra {
    pub frequencies: Vec<f64>,
    pub aa: Vec<f64>,
    pub bb: Vec<f64>,
    pub ab: Vec<Complex64>,
    pub segments: usize,
}

impl CrossSpectra {
    pub fn coherence(&self) -> CoherenceCurve {
        let floor_a = peak(&self.aa) * DEGENERATE_BIN_FRACTION;
        let floor_b = peak(&self.bb) * DEGENERATE_BIN_FRACTION;
        let mut coherence = Vec::with_capacity(self.ab.len());
        let mut degenerate = Vec::with_capacity(self.ab.len());
        for ((&saa, &sbb), sab) in self.aa.iter().zip(&self.bb).zip(&self.ab) {
            if saa <= floor_a || sbb <= floor_b || saa <= 0.0 || sbb <= 0.0 {
                coherence.push(0.0);
                degenerate.push(true);
            } else {
                coherence.push((sab.norm() / (saa * sbb).sqrt()).clamp(0.0, 1.0));
                degenerate.push(false);
            }
        }
        CoherenceCurve {
            frequencies: self.frequencies.clone(),
            coherence,
            degenerate,
        }
    }
}

fn peak(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// A planned Welch estimator for a fixed signal length and sample rate.
pub struct Welch {
    segment_length: usize,
    hop: usize,
    segments: usize,
    sample_rate: f64,
    detrend: bool,
    taper: Vec<f64>,
    scale: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Welch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Welch")
            .field("segment_length", &self.segment_length)
            .field("hop", &self.hop)
            .field("segments", &self.segments)
            .field("sample_rate", &self.sample_rate)
            .finish()
    }
}

impl Welch {
    pub fn new(cfg: &SpectralConfig, len: usize, sample_rate: f64) -> Result<Self> {
        cfg.validate()?;
        let seg = cfg.resolve_segment_length(len);
        if seg < 8 {
            return Err(invalid!(
                "signal of {len} samples is too short for a segment length of at least 8"
            ));
        }
        let overlap = (seg as f64 * cfg.overlap_fraction).floor() as usize;
        let hop = seg - overlap;
        let segments = if len >= seg { (len - seg) / hop + 1 } else { 0 };
        if segments < 2 {
            return Err(invalid!(
                "need at least 2 Welch segments, got {segments} (length {len}, segment {seg}, overlap {})",
                cfg.overlap_fraction
            ));
        }
        let taper = cfg.window.coefficients(seg);
        let power: f64 = taper.iter().map(|w| w * w).sum();
        Ok(Self {
            segment_length: seg,
            hop,
            segments,
            sample_rate,
            detrend: cfg.detrend,
            taper,
            scale: 1.0 / (sample_rate * power),
            fft: FftPlanner::new().plan_fft_forward(seg),
        })
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..=self.segment_length / 2)
            .map(|j| j as f64 * self.sample_rate / self.segment_length as f64)
            .collect()
    }

    fn transform(&self, x: &[f64], buf: &mut [Complex64], scratch: &mut [Complex64]) {
        let mean = if self.detrend {
            x.iter().sum::<f64>() / x.len() as f64
        } else {
            0.0
        };
        for ((slot, &v), &w) in buf.iter_mut().zip(x).zip(&self.taper) {
            *slot = Complex64::new((v - mean) * w, 0.0);
        }
        self.fft.process_with_scratch(buf, scratch);
    }

    /// Segment-averaged spectra of `a` and `b`. Both must have the length
    /// this estimator was planned for (or longer; the tail is ignored).
    pub fn cross_spectra(&self, a: &[f64], b: &[f64]) -> CrossSpectra {
        let n = self.segment_length;
        let bins = n / 2 + 1;
        let mut fa = vec![Complex64::default(); n];
        let mut fb = vec![Complex64::default(); n];
        let mut scratch = vec![Complex64::default(); self.fft.get_inplace_scratch_len()];
        let mut aa = vec![0.0; bins];
        let mut bb = vec![0.0; bins];
        let mut ab = vec![Complex64::default(); bins];
        for s in 0..self.segments {
            let start = s * self.hop;
            self.transform(&a[start..start + n], &mut fa, &mut scratch);
            self.transform(&b[start..start + n], &mut fb, &mut scratch);
            for j in 0..bins {
                aa[j] += (fa[j].conj() * fa[j]).re;
                bb[j] += (fb[j].conj() * fb[j]).re;
                ab[j] += fa[j].conj() * fb[j];
            }
        }
        let count = self.segments as f64;
        for j in 0..bins {
            let one_sided = if j == 0 || (n.is_multiple_of(2) && j == n / 2) { 1.0 } else { 2.0 };
            let factor = self.scale * one_sided / count;
            aa[j] *= factor;
            bb[j] *= factor;
            ab[j] *= factor;
        }
        CrossSpectra {
            frequencies: self.frequencies(),
            aa,
            bb,
            ab,
            segments: self.segments,
        }
    }
}

fn planned_pair(a: &TimeSeries, b: &TimeSeries, cfg: &SpectralConfig) -> Result<Welch> {
    if a.len() != b.len() {
        return Err(invalid!(
            "spectral estimation needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        ));
    }
    if a.sample_rate() != b.sample_rate() {
        return Err(invalid!(
            "spectral estimation needs equal sample rates, got {} and {}",
            a.sample_rate(),
            b.sample_rate()
        ));
    }
    Welch::new(cfg, a.len(), a.sample_rate())
}

/// One-sided Welch power spectral density.
pub fn welch_psd(series: &TimeSeries, cfg: &SpectralConfig) -> Result<SpectralEstimate<f64>> {
    let welch = Welch::new(cfg, series.len(), series.sample_rate())?;
    let s = welch.cross_spectra(series.samples(), series.samples());
    Ok(SpectralEstimate {
        frequencies: s.frequencies,
        values: s.aa,
        segments: s.segments,
    })
}

/// One-sided Welch cross-spectral density `E[conj(A) B]`.
pub fn welch_csd(
    a: &TimeSeries,
    b: &TimeSeries,
    cfg: &SpectralConfig,
) -> Result<SpectralEstimate<Complex64>> {
    let welch = planned_pair(a, b, cfg)?;
    let s = welch.cross_spectra(a.samples(), b.samples());
    Ok(SpectralEstimate {
        frequencies: s.frequencies,
        values: s.ab,
        segments: s.segments,
    })
}

/// Magnitude coherence between `a` and `b`.
pub fn coherence(a: &TimeSeries, b: &TimeSeries, cfg: &SpectralConfig) -> Result<CoherenceCurve> {
    let welch = planned_pair(a, b, cfg)?;
    Ok(welch.cross_spectra(a.samples(), b.samples()).coherence())
}
