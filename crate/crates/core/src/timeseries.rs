//! Uniformly sampled scalar signals and the small statistics shared by the
//! rest of the crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A uniformly sampled real-valued signal.
///
/// Construction rejects empty input, non-finite samples and a non-positive
/// sample rate, so every `TimeSeries` in circulation is analyzable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    samples: Vec<f64>,
    sample_rate: f64,
    t0: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        Self::with_start(samples, sample_rate, 0.0)
    }

    pub fn with_start(samples: Vec<f64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(invalid!("sample rate must be positive and finite, got {sample_rate}"));
        }
        if samples.is_empty() {
            return Err(invalid!("time series must contain at least one sample"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid!("non-finite sample {} at index {i}", samples[i]));
        }
        if !t0.is_finite() {
            return Err(invalid!("start time must be finite"));
        }
        Ok(Self {
            samples,
            sample_rate,
            t0,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Time of the first sample, in seconds.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sampling interval in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Contiguous sub-range `[start, end)` with the start time advanced
    /// accordingly.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(invalid!(
                "slice [{start}, {end}) out of range for series of length {}",
                self.len()
            ));
        }
        Ok(Self {
            samples: self.samples[start..end].to_vec(),
            sample_rate: self.sample_rate,
            t0: self.t0 + start as f64 / self.sample_rate,
        })
    }

    pub fn mean(&self) -> f64 {
        mean(&self.samples)
    }

    /// Population variance (divides by N).
    pub fn variance(&self) -> f64 {
        variance(&self.samples)
    }
}

/// Observational noise specification: `snr` is the power ratio
/// `var(signal) / var(noise)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub snr: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn new(snr: f64, seed: u64) -> Result<Self> {
        if !(snr.is_finite() && snr > 0.0) {
            return Err(invalid!("snr must be positive and finite, got {snr}"));
        }
        Ok(Self { snr, seed })
    }
}

/// Keeps every `factor`-th sample starting at index 0.
pub fn subsample(series: &TimeSeries, factor: usize) -> Result<TimeSeries> {
    if factor == 0 {
        return Err(invalid!("subsampling factor must be at least 1"));
    }
    if series.len() < factor {
        return Err(invalid!(
            "series of length {} is shorter than subsampling factor {factor}",
            series.len()
        ));
    }
    let samples = series.samples.iter().step_by(factor).copied().collect();
    Ok(TimeSeries {
        samples,
        sample_rate: series.sample_rate / factor as f64,
        t0: series.t0,
    })
}

/// Adds i.i.d. zero-mean Gaussian noise with variance `var(series) / snr`.
///
/// The noise stream is fully determined by `cfg.seed`.
pub fn add_observational_noise(series: &TimeSeries, cfg: &NoiseConfig) -> Result<TimeSeries> {
    if !(cfg.snr.is_finite() && cfg.snr > 0.0) {
        return Err(invalid!("snr must be positive and finite, got {}", cfg.snr));
    }
    if series.len() < 2 {
        return Err(invalid!("noise injection needs at least 2 samples"));
    }
    let var = series.variance();
    if var <= 0.0 {
        return Err(invalid!("signal has zero variance; SNR is undefined"));
    }
    let noise = Normal::new(0.0, (var / cfg.snr).sqrt())
        .map_err(|e| Error::Internal(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = series
        .samples
        .iter()
        .map(|&v| v + noise.sample(&mut rng))
        .collect();
    Ok(TimeSeries {
        samples,
        sample_rate: series.sample_rate,
        t0: series.t0,
    })
}

/// Squared Pearson correlation of two equally long sequences.
pub fn pearson_r2(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid!(
            "pearson_r2 needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        ));
    }
    if a.len() < 3 {
        return Err(invalid!("pearson_r2 needs at least 3 points, got {}", a.len()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Err(Error::Degenerate(
            "zero variance input to correlation".to_string(),
        ));
    }
    let r2 = (sab * sab) / (saa * sbb);
    Ok(r2.clamp(0.0, 1.0))
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(TimeSeries::new(vec![], 1.0).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN], 1.0).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::INFINITY], 1.0).is_err());
        assert!(TimeSeries::new(vec![1.0], 0.0).is_err());
        assert!(TimeSeries::new(vec![1.0], -2.0).is_err());
    }

    #[test]
    fn subsample_keeps_every_factor_th() {
        let s = ts(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let out = subsample(&s, 2).unwrap();
        assert_eq!(out.samples(), &[0.0, 2.0, 4.0]);
        assert_eq!(out.sample_rate(), 0.5);
        assert_eq!(subsample(&s, 1).unwrap(), s);
        assert!(subsample(&s, 0).is_err());
        assert!(subsample(&s, 7).is_err());
    }

    #[test]
    fn subsample_lorenz_rate() {
        let s = TimeSeries::new(vec![0.0; 1000], 1000.0).unwrap();
        let out = subsample(&s, 100).unwrap();
        assert!((out.dt() - 0.1).abs() < 1e-15);
        assert_eq!(out.sample_rate(), 10.0);
        assert_eq!(out.len(), 10);
    }

    #[test]
    fn noise_limit_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
        let s = ts(&v);
        let quiet = add_observational_noise(&s, &NoiseConfig::new(1e12, 3).unwrap()).unwrap();
        let std = s.variance().sqrt();
        for (a, b) in quiet.samples().iter().zip(s.samples()) {
            assert!((a - b).abs() < 1e-4 * std);
        }
        let cfg = NoiseConfig::new(1.0, 42).unwrap();
        let a = add_observational_noise(&s, &cfg).unwrap();
        let b = add_observational_noise(&s, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), s.len());
        assert_eq!(a.sample_rate(), s.sample_rate());
    }

    #[test]
    fn noise_variance_matches_snr() {
        // Unit-variance input, snr = 10: empirical noise variance ~ 0.1.
        let n = 10_000;
        let v: Vec<f64> = (0..n)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let s = ts(&v);
        assert!((s.variance() - 1.0).abs() < 1e-12);
        let noisy = add_observational_noise(&s, &NoiseConfig::new(10.0, 7).unwrap()).unwrap();
        let eps: Vec<f64> = noisy.samples().iter().zip(&v).map(|(a, b)| a - b).collect();
        let nv = variance(&eps);
        assert!((nv - 0.1).abs() < 0.005, "noise variance {nv}");
    }

    #[test]
    fn noise_rejects_constant_signal() {
        let s = ts(&[2.0; 10]);
        assert!(add_observational_noise(&s, &NoiseConfig { snr: 1.0, seed: 0 }).is_err());
        assert!(NoiseConfig::new(0.0, 0).is_err());
    }

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson_r2(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson_r2(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            pearson_r2(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::Degenerate(_))
        ));
        assert!(pearson_r2(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson_r2(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pearson_independent_uniform_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let a: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        assert!(pearson_r2(&a, &b).unwrap() < 0.01);
    }

    proptest! {
        #[test]
        fn pearson_symmetric_and_affine_invariant(
            v in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..60),
            alpha in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0],
            beta in -100.0f64..100.0,
        ) {
            let a: Vec<f64> = v.iter().map(|p| p.0).collect();
            let b: Vec<f64> = v.iter().map(|p| p.1).collect();
            prop_assume!(variance(&a) > 1e-6 && variance(&b) > 1e-6);
            let r = pearson_r2(&a, &b).unwrap();
            prop_assert!((r - pearson_r2(&b, &a).unwrap()).abs() < 1e-12);
            let t: Vec<f64> = a.iter().map(|x| alpha * x + beta).collect();
            prop_assert!((r - pearson_r2(&t, &b).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn subsample_composes(len in 1usize..200, fa in 1usize..6, fb in 1usize..6) {
            prop_assume!(len >= fa * fb);
            let s = TimeSeries::new((0..len).map(|i| i as f64).collect(), 8.0).unwrap();
            let twice = subsample(&subsample(&s, fa).unwrap(), fb).unwrap();
            let once = subsample(&s, fa * fb).unwrap();
            prop_assert_eq!(twice.samples(), once.samples());
            prop_assert!((twice.sample_rate() - once.sample_rate()).abs() < 1e-12);
        }
    }
}
