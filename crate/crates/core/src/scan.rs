//! Time-shifted cross-mapping: the 1-D CCM function and the 2-D
//! shift × frequency CMC surface.
//!
//! Conventions. A scan of `(x, y)` embeds `x` and predicts `y`, so it tests
//! the link `y -> x`. At shift `s` the sample `x[i]` is paired with
//! `y[i + s]`; negative shifts therefore put the candidate cause `y` earlier
//! than the effect `x` (the causal side).
//!
//! All shifts share one support: `x` is restricted to `[S, N - S)` with
//! `S = max |s|`, and re-embedded there, so every shift sees the same
//! manifold (and the same neighbour table) and only the target window moves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossmap::{check_pair, cross_map, library_model, skill, CrossMapConfig, CrossMapModel, Prediction};
use crate::embedding::{embed_slice, DelayEmbedding, EmbeddingConfig};
use crate::error::{invalid, Result};
use crate::spectral::{SpectralConfig, Welch};
use crate::timeseries::{pearson_r2, TimeSeries};

/// Smallest overlap `shift_pair` will return.
pub const MIN_OVERLAP: usize = 3;

/// Integer shifts (in samples) from `min_shift` to `max_shift`: every
/// multiple of `step` inside the range, so 0 is always included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShiftRange {
    pub min_shift: i64,
    pub max_shift: i64,
    pub step: usize,
}

impl ShiftRange {
    pub fn new(min_shift: i64, max_shift: i64, step: usize) -> Result<Self> {
        let r = Self {
            min_shift,
            max_shift,
            step,
        };
        r.validate()?;
        Ok(r)
    }

    /// Symmetric range `[-max, max]` in unit steps.
    pub fn symmetric(max: usize) -> Self {
        Self {
            min_shift: -(max as i64),
            max_shift: max as i64,
            step: 1,
        }
    }

    /// Symmetric range covering `±seconds` at the given sample rate.
    pub fn from_seconds(seconds: f64, sample_rate: f64) -> Self {
        Self::symmetric((seconds * sample_rate).round() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if self.step == 0 {
            return Err(invalid!("shift step must be positive"));
        }
        if self.min_shift > 0 || self.max_shift < 0 {
            return Err(invalid!(
                "shift range [{}, {}] must contain 0",
                self.min_shift,
                self.max_shift
            ));
        }
        Ok(())
    }

    pub fn shifts(&self) -> Vec<i64> {
        let step = self.step as i64;
        let lo = self.min_shift.div_euclid(step) + i64::from(self.min_shift.rem_euclid(step) != 0);
        let hi = self.max_shift.div_euclid(step);
        (lo..=hi).map(|k| k * step).collect()
    }

    pub fn max_abs(&self) -> usize {
        self.min_shift.unsigned_abs().max(self.max_shift.unsigned_abs()) as usize
    }
}

/// Cross-map skill as a function of shift.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcmCurve {
    pub shifts: Vec<i64>,
    pub scores: Vec<f64>,
    pub direction_label: String,
}

/// Coherence between prediction and truth for every (shift, frequency).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmcSurface {
    pub shifts: Vec<i64>,
    pub frequencies: Vec<f64>,
    /// Row-major, one row per shift.
    pub values: Vec<f64>,
    pub degenerate: Vec<bool>,
    pub direction_label: String,
    pub normalized: bool,
}

impl CmcSurface {
    pub fn value(&self, shift_idx: usize, freq_idx: usize) -> f64 {
        self.values[shift_idx * self.frequencies.len() + freq_idx]
    }

    pub fn row(&self, shift_idx: usize) -> &[f64] {
        let nf = self.frequencies.len();
        &self.values[shift_idx * nf..(shift_idx + 1) * nf]
    }

    /// Values over shifts at one frequency.
    pub fn column(&self, freq_idx: usize) -> Vec<f64> {
        let nf = self.frequencies.len();
        self.values.iter().skip(freq_idx).step_by(nf).copied().collect()
    }

    /// Mean over frequencies, one value per shift.
    pub fn band_mean(&self) -> Vec<f64> {
        (0..self.shifts.len())
            .map(|s| {
                let row = self.row(s);
                row.iter().sum::<f64>() / row.len() as f64
            })
            .collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.direction_label = label.into();
        self
    }
}

/// Aligns `y` displaced by `shift` samples against `x` on their overlap:
/// `x[i]` is paired with `y[i + shift]`.
pub fn shift_pair(x: &TimeSeries, y: &TimeSeries, shift: i64) -> Result<(TimeSeries, TimeSeries)> {
    if x.sample_rate() != y.sample_rate() {
        return Err(invalid!(
            "sample rates differ: {} vs {}",
            x.sample_rate(),
            y.sample_rate()
        ));
    }
    let n = x.len().min(y.len());
    let lag = shift.unsigned_abs() as usize;
    if lag >= n || n - lag < MIN_OVERLAP {
        return Err(invalid!(
            "shift {shift} leaves an overlap of {} samples, need at least {MIN_OVERLAP}",
            n.saturating_sub(lag)
        ));
    }
    let len = n - lag;
    let (xs, ys) = if shift < 0 { (lag, 0) } else { (0, lag) };
    Ok((x.slice(xs, xs + len)?, y.slice(ys, ys + len)?))
}

/// A prepared scan: one manifold and neighbour table reused across shifts.
#[derive(Debug, Clone)]
pub struct ShiftScan {
    cfg: EmbeddingConfig,
    range: ShiftRange,
    shifts: Vec<i64>,
    manifold: DelayEmbedding,
    model: CrossMapModel,
    k: usize,
    exclusion_radius: usize,
    target: Vec<f64>,
    sample_rate: f64,
    offset: usize,
    support: usize,
    label: String,
}

impl ShiftScan {
    /// Embeds `x` on the common support and builds the neighbour table;
    /// `y` is the series to be predicted.
    pub fn new(
        x: &TimeSeries,
        y: &TimeSeries,
        cfg: EmbeddingConfig,
        range: ShiftRange,
        cm: &CrossMapConfig,
    ) -> Result<Self> {
        check_pair(x, y)?;
        range.validate()?;
        let offset = range.max_abs();
        let n = x.len();
        if n <= 2 * offset + MIN_OVERLAP {
            return Err(invalid!(
                "series of length {n} too short for shifts up to ±{offset}"
            ));
        }
        let support = n - 2 * offset;
        let manifold = embed_slice(&x.samples()[offset..offset + support], cfg)?;
        let k = cm.neighbors_for(&cfg);
        let model = library_model(&manifold, manifold.len(), k, cm.exclusion_radius)?;
        Ok(Self {
            cfg,
            range,
            shifts: range.shifts(),
            manifold,
            model,
            k,
            exclusion_radius: cm.exclusion_radius,
            target: y.samples().to_vec(),
            sample_rate: x.sample_rate(),
            offset,
            support,
            label: "y->x".to_string(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn range(&self) -> ShiftRange {
        self.range
    }

    pub fn embedding(&self) -> EmbeddingConfig {
        self.cfg
    }

    /// Number of manifold rows (library size at full overlap).
    pub fn manifold_len(&self) -> usize {
        self.manifold.len()
    }

    /// The window of `y` aligned with the embedded support at `shift`.
    pub fn target_window(&self, shift: i64) -> &[f64] {
        let start = (self.offset as i64 + shift) as usize;
        &self.target[start..start + self.support]
    }

    /// Leave-one-out prediction of the shifted target.
    pub fn prediction(&self, shift: i64) -> Result<Prediction> {
        cross_map(&self.model, self.target_window(shift))
    }

    /// CCM function using the first `library_length` manifold rows
    /// (`None`: all rows).
    pub fn ccm_curve(&self, library_length: Option<usize>) -> Result<CcmCurve> {
        let prefix_model;
        let model = match library_length {
            Some(l) if l != self.manifold.len() => {
                prefix_model = library_model(&self.manifold, l, self.k, self.exclusion_radius)?;
                &prefix_model
            }
            _ => &self.model,
        };
        let scores = self
            .shifts
            .par_iter()
            .map(|&s| skill(model, self.target_window(s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CcmCurve {
            shifts: self.shifts.clone(),
            scores,
            direction_label: self.label.clone(),
        })
    }

    pub fn cmc_surface(&self, scfg: &SpectralConfig) -> Result<CmcSurface> {
        let welch = Welch::new(scfg, self.model.len(), self.sample_rate)?;
        let rows = self
            .shifts
            .par_iter()
            .map(|&s| {
                let target = self.target_window(s);
                let pred = cross_map(&self.model, target)?;
                let truth = pred.observed(target)?;
                Ok(welch.cross_spectra(&truth, &pred.values).coherence())
            })
            .collect::<Result<Vec<_>>>()?;
        let frequencies = welch.frequencies();
        let mut values = Vec::with_capacity(rows.len() * frequencies.len());
        let mut degenerate = Vec::with_capacity(values.capacity());
        for c in rows {
            values.extend(c.coherence);
            degenerate.extend(c.degenerate);
        }
        Ok(CmcSurface {
            shifts: self.shifts.clone(),
            frequencies,
            values,
            degenerate,
            direction_label: self.label.clone(),
            normalized: false,
        })
    }

    /// R² at one shift; mostly useful for cross-checks.
    pub fn score_at(&self, shift: i64) -> Result<f64> {
        let target = self.target_window(shift);
        let pred = cross_map(&self.model, target)?;
        pearson_r2(&pred.values, &pred.observed(target)?)
    }
}

/// CCM skill at each shift (embed `x`, predict shifted `y`).
pub fn ccm_function(
    x: &TimeSeries,
    y: &TimeSeries,
    cfg: EmbeddingConfig,
    range: ShiftRange,
    library_length: Option<usize>,
) -> Result<CcmCurve> {
    ShiftScan::new(x, y, cfg, range, &CrossMapConfig::default())?.ccm_curve(library_length)
}

/// Shift × frequency coherence surface (embed `x`, predict shifted `y`).
pub fn cmc_surface(
    x: &TimeSeries,
    y: &TimeSeries,
    cfg: EmbeddingConfig,
    range: ShiftRange,
    scfg: &SpectralConfig,
) -> Result<CmcSurface> {
    ShiftScan::new(x, y, cfg, range, &CrossMapConfig::default())?.cmc_surface(scfg)
}

/// Min-max rescales every frequency column to `[0, 1]`; constant columns
/// become zero.
pub fn normalize_per_band(surface: &CmcSurface) -> CmcSurface {
    let nf = surface.frequencies.len();
    let mut out = surface.clone();
    for f in 0..nf {
        let col = surface.column(f);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        for (s, &v) in col.iter().enumerate() {
            out.values[s * nf + f] = if span > 0.0 { (v - lo) / span } else { 0.0 };
        }
    }
    out.normalized = true;
    out
}

/// Element-wise mean of surfaces sharing axes and normalization state.
pub fn average_surfaces(surfaces: &[CmcSurface]) -> Result<CmcSurface> {
    let first = surfaces
        .first()
        .ok_or_else(|| invalid!("cannot average an empty set of surfaces"))?;
    for s in &surfaces[1..] {
        if s.shifts != first.shifts || s.frequencies != first.frequencies {
            return Err(invalid!("surfaces have mismatched shift/frequency axes"));
        }
        if s.normalized != first.normalized {
            return Err(invalid!("cannot average normalized with raw surfaces"));
        }
    }
    let count = surfaces.len() as f64;
    let mut out = first.clone();
    for (i, v) in out.values.iter_mut().enumerate() {
        *v = surfaces.iter().map(|s| s.values[i]).sum::<f64>() / count;
    }
    for (i, d) in out.degenerate.iter_mut().enumerate() {
        *d = surfaces.iter().any(|s| s.degenerate[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::coherence;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec(), 1.0).unwrap()
    }

    fn logistic_pair(n: usize, coupling: f64) -> (TimeSeries, TimeSeries) {
        // x drives y
        let (mut x, mut y) = (0.4, 0.2);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for _ in 0..n {
            xs.push(x);
            ys.push(y);
            let nx = 3.99 * x * (1.0 - x);
            let ny = 3.98 * y * (1.0 - y - coupling * x);
            x = fold(nx);
            y = fold(ny);
        }
        (ts(&xs), ts(&ys))
    }

    fn fold(v: f64) -> f64 {
        let w = v.abs() % 2.0;
        if w > 1.0 { 2.0 - w } else { w }
    }

    #[test]
    fn shift_range_values() {
        assert_eq!(ShiftRange::new(-3, 2, 1).unwrap().shifts(), vec![-3, -2, -1, 0, 1, 2]);
        assert_eq!(ShiftRange::new(-5, 5, 2).unwrap().shifts(), vec![-4, -2, 0, 2, 4]);
        assert!(ShiftRange::new(1, 5, 1).is_err());
        assert!(ShiftRange::new(-1, 1, 0).is_err());
        assert_eq!(ShiftRange::from_seconds(0.1, 200.0), ShiftRange::symmetric(20));
    }

    #[test]
    fn shift_pair_examples() {
        let x = ts(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let y = ts(&[10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0, 19.0]);
        let (a, b) = shift_pair(&x, &y, 0).unwrap();
        assert_eq!((a, b), (x.clone(), y.clone()));
        let (a, b) = shift_pair(&x, &y, -1).unwrap();
        assert_eq!(a.samples(), &x.samples()[1..]);
        assert_eq!(b.samples(), &y.samples()[..9]);
        let (a, b) = shift_pair(&x, &y, 2).unwrap();
        assert_eq!(a.samples(), &x.samples()[..8]);
        assert_eq!(b.samples(), &y.samples()[2..]);
        assert!(shift_pair(&x, &y, 8).is_err());
        assert!(shift_pair(&x, &y, -10).is_err());
    }

    #[test]
    fn shift_pair_five_samples() {
        let x = ts(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let y = ts(&[10.0, 11.0, 12.0, 13.0, 14.0]);
        let (a, b) = shift_pair(&x, &y, -1).unwrap();
        assert_eq!(a.samples(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(b.samples(), &[10.0, 11.0, 12.0, 13.0]);
    }

    proptest! {
        #[test]
        fn shift_then_unshift_recovers_alignment(s in 1i64..10, n in 30usize..60) {
            let x = ts(&(0..n).map(|i| i as f64).collect::<Vec<_>>());
            let y = ts(&(0..n).map(|i| 100.0 + i as f64).collect::<Vec<_>>());
            let (a, b) = shift_pair(&x, &y, s).unwrap();
            let (c, d) = shift_pair(&a, &b, -s).unwrap();
            // pairs (x[i], y[i]) on the common support
            for (xc, yd) in c.samples().iter().zip(d.samples()) {
                prop_assert_eq!(*yd - 100.0, *xc);
            }
        }
    }

    #[test]
    fn self_coupling_ccm_function() {
        let (x, _) = logistic_pair(600, 0.0);
        let cfg = EmbeddingConfig::new(2, 1).unwrap();
        let curve = ccm_function(&x, &x, cfg, ShiftRange::symmetric(5), None).unwrap();
        let zero = curve.shifts.iter().position(|&s| s == 0).unwrap();
        // shifts inside the embedding window are read straight off a coordinate
        for (i, &s) in curve.shifts.iter().enumerate() {
            if (-1..=0).contains(&s) {
                assert!(curve.scores[i] > 0.99);
            } else {
                assert!(curve.scores[i] < curve.scores[zero]);
            }
        }
        // decays with distance from the embedding window on both sides
        assert!(curve.scores[zero + 3] < curve.scores[zero + 1] + 0.05);
        assert!(curve.scores[zero - 4] < curve.scores[zero - 2] + 0.05);
    }

    #[test]
    fn surface_row_matches_standalone_coherence() {
        let (x, y) = logistic_pair(1200, 0.1);
        let cfg = EmbeddingConfig::new(2, 1).unwrap();
        let range = ShiftRange::symmetric(4);
        let scfg = SpectralConfig::with_segment_length(64);
        let scan = ShiftScan::new(&y, &x, cfg, range, &CrossMapConfig::default()).unwrap();
        let surface = scan.cmc_surface(&scfg).unwrap();
        assert_eq!(surface.values.len(), 9 * 33);
        assert!(surface.values.iter().all(|v| (0.0..=1.0).contains(v)));
        for (si, &s) in surface.shifts.iter().enumerate() {
            let target = scan.target_window(s);
            let pred = scan.prediction(s).unwrap();
            let truth = ts(&pred.observed(target).unwrap());
            let c = coherence(&truth, &ts(&pred.values), &scfg).unwrap();
            assert_eq!(surface.row(si), c.coherence.as_slice());
        }
        // the scan's shifted target is the shift_pair alignment restricted to
        // the common support
        let (_, yb) = shift_pair(&y, &x, -2).unwrap();
        let window = scan.target_window(-2);
        assert_eq!(window, &yb.samples()[2..2 + window.len()]);
    }

    #[test]
    fn normalize_and_average() {
        let surface = CmcSurface {
            shifts: vec![-1, 0, 1],
            frequencies: vec![0.0, 0.5],
            values: vec![0.2, 0.3, 0.4, 0.3, 0.6, 0.3],
            degenerate: vec![false; 6],
            direction_label: "a->b".into(),
            normalized: false,
        };
        let n = normalize_per_band(&surface);
        let c0 = n.column(0);
        for (a, b) in c0.iter().zip([0.0, 0.5, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(n.column(1), vec![0.0, 0.0, 0.0]);
        assert!(n.normalized);
        assert_eq!(normalize_per_band(&n), n);

        assert_eq!(average_surfaces(&[surface.clone(), surface.clone()]).unwrap(), surface);
        let mut zeros = surface.clone();
        zeros.values = vec![0.0; 6];
        let mut ones = surface.clone();
        ones.values = vec![1.0; 6];
        let avg = average_surfaces(&[zeros, ones]).unwrap();
        assert!(avg.values.iter().all(|&v| v == 0.5));
        assert!(average_surfaces(&[surface.clone(), n]).is_err());
        let mut other = surface.clone();
        other.shifts = vec![-2, 0, 2];
        assert!(average_surfaces(&[surface, other]).is_err());
        assert!(average_surfaces(&[]).is_err());
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(v in prop::collection::vec(0.0f64..1.0, 12)) {
            let s = CmcSurface {
                shifts: vec![-1, 0, 1],
                frequencies: vec![0.0, 0.1, 0.2, 0.3],
                values: v,
                degenerate: vec![false; 12],
                direction_label: String::new(),
                normalized: false,
            };
            let once = normalize_per_band(&s);
            prop_assert_eq!(normalize_per_band(&once), once.clone());
            for f in 0..4 {
                let col = once.column(f);
                let hi = col.iter().copied().fold(0.0, f64::max);
                let lo = col.iter().copied().fold(1.0, f64::min);
                prop_assert!(hi == 1.0 || hi == 0.0);
                prop_assert!(lo == 0.0);
            }
        }
    }

    #[test]
    fn too_short_for_range() {
        let (x, y) = logistic_pair(30, 0.0);
        let cfg = EmbeddingConfig::new(2, 1).unwrap();
        assert!(ccm_function(&x, &y, cfg, ShiftRange::symmetric(20), None).is_err());
    }
}
