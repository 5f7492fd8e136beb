//! Bidirectional CMC analysis of a pair of series.

use std::path::Path;

use cmc::{
    average_surfaces, convergence_curve, normalize_per_band, strength_profile, CausalStrengthProfile, CcmCurve,
    CmcSurface, ShiftScan, TimeSeries,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::AnalysisConfig;
use crate::csv_io::{render_ccm, render_convergence, render_profile, render_surface, write_atomic, Header};
use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(cfg: &AnalysisConfig) -> Self {
        Self {
            config_hash: cfg.hash(),
            seed: cfg.seed,
            version: VERSION.to_string(),
        }
    }

    pub fn header(&self) -> Header {
        vec![
            ("config_hash".into(), self.config_hash.clone()),
            ("seed".into(), self.seed.to_string()),
            ("version".into(), self.version.clone()),
        ]
    }
}

/// Everything computed for one direction of influence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionResult {
    pub label: String,
    pub ccm: CcmCurve,
    pub convergence: Vec<(usize, f64)>,
    pub surface: CmcSurface,
    pub normalized: CmcSurface,
    /// Read from `normalized` when the config asks for normalization,
    /// otherwise from `surface`.
    pub profile: CausalStrengthProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultBundle {
    pub x_to_y: DirectionResult,
    pub y_to_x: DirectionResult,
    pub provenance: Provenance,
}

impl ResultBundle {
    pub fn directions(&self) -> [&DirectionResult; 2] {
        [&self.x_to_y, &self.y_to_x]
    }
}

struct Single {
    ccm: CcmCurve,
    convergence: Vec<(usize, f64)>,
    surface: CmcSurface,
}

fn check_input(name: &str, s: &TimeSeries) -> Result<()> {
    if s.samples().iter().any(|v| !v.is_finite()) {
        return Err(CliError::Data(format!("series {name} contains non-finite values")));
    }
    if s.variance() == 0.0 {
        return Err(CliError::Numeric(format!("series {name} is constant; nothing to cross-map")));
    }
    Ok(())
}

/// Influence `cause -> effect`: embed the effect, predict the cause.
fn one_direction(cfg: &AnalysisConfig, cause: &TimeSeries, effect: &TimeSeries, label: &str) -> Result<Single> {
    let scan = ShiftScan::new(effect, cause, cfg.embedding, cfg.shift_range, &cfg.cross_map())?.with_label(label);
    let convergence = if cfg.library_lengths.is_empty() {
        Vec::new()
    } else {
        convergence_curve(effect, cause, cfg.embedding, &cfg.library_lengths)?
    };
    Ok(Single {
        ccm: scan.ccm_curve(None)?,
        convergence,
        surface: scan.cmc_surface(&cfg.spectral)?,
    })
}

fn mean_curves(curves: &[CcmCurve]) -> CcmCurve {
    let mut out = curves[0].clone();
    for (i, v) in out.scores.iter_mut().enumerate() {
        *v = curves.iter().map(|c| c.scores[i]).sum::<f64>() / curves.len() as f64;
    }
    out
}

fn mean_points(sets: &[Vec<(usize, f64)>]) -> Vec<(usize, f64)> {
    (0..sets[0].len())
        .map(|i| (sets[0][i].0, sets.iter().map(|s| s[i].1).sum::<f64>() / sets.len() as f64))
        .collect()
}

fn combine(cfg: &AnalysisConfig, runs: Vec<Single>, label: &str) -> Result<DirectionResult> {
    let ccm = mean_curves(&runs.iter().map(|r| r.ccm.clone()).collect::<Vec<_>>());
    let convergence = mean_points(&runs.iter().map(|r| r.convergence.clone()).collect::<Vec<_>>());
    let raw: Vec<CmcSurface> = runs.into_iter().map(|r| r.surface).collect();
    let normalized = average_surfaces(&raw.iter().map(normalize_per_band).collect::<Vec<_>>())?;
    let surface = average_surfaces(&raw)?;
    let source = if cfg.normalization { &normalized } else { &surface };
    let profile = strength_profile(source, cfg.limit());
    Ok(DirectionResult {
        label: label.to_string(),
        ccm,
        convergence,
        surface,
        normalized,
        profile,
    })
}

/// Full analysis in both directions for one pair of series.
pub fn run_pipeline(cfg: &AnalysisConfig, x: &TimeSeries, y: &TimeSeries) -> Result<ResultBundle> {
    run_realizations(cfg, &[(x.clone(), y.clone())])
}

/// Analyses every `(x, y)` realization and averages the results: surfaces
/// are averaged raw, and separately after per-band normalization of each
/// realization.
pub fn run_realizations(cfg: &AnalysisConfig, pairs: &[(TimeSeries, TimeSeries)]) -> Result<ResultBundle> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(CliError::Usage("no realizations to analyse".into()));
    }
    for (x, y) in pairs {
        check_input("x", x)?;
        check_input("y", y)?;
    }
    let runs = pairs
        .par_iter()
        .map(|(x, y)| {
            let xy = one_direction(cfg, x, y, "x->y").map_err(|e| e.context("x->y"))?;
            let yx = one_direction(cfg, y, x, "y->x").map_err(|e| e.context("y->x"))?;
            Ok((xy, yx))
        })
        .collect::<Result<Vec<_>>>()?;
    let (xy, yx): (Vec<Single>, Vec<Single>) = runs.into_iter().unzip();
    Ok(ResultBundle {
        x_to_y: combine(cfg, xy, "x->y")?,
        y_to_x: combine(cfg, yx, "y->x")?,
        provenance: Provenance::new(cfg),
    })
}

/// Summary numbers written next to the CSV files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BundleSummary {
    pub provenance: Provenance,
    pub mean_strength_x_to_y: f64,
    pub mean_strength_y_to_x: f64,
    pub peak_frequency_x_to_y: f64,
    pub peak_frequency_y_to_x: f64,
}

impl BundleSummary {
    pub fn of(b: &ResultBundle) -> Self {
        Self {
            provenance: b.provenance.clone(),
            mean_strength_x_to_y: b.x_to_y.profile.mean_strength(),
            mean_strength_y_to_x: b.y_to_x.profile.mean_strength(),
            peak_frequency_x_to_y: b.x_to_y.profile.peak_frequency(),
            peak_frequency_y_to_x: b.y_to_x.profile.peak_frequency(),
        }
    }
}

/// Renders every file of a bundle as `(file name, contents)`; file names
/// are prefixed with `prefix`.
pub fn render_bundle(bundle: &ResultBundle, prefix: &str, extra: &Header) -> Vec<(String, String)> {
    let mut header = bundle.provenance.header();
    header.extend(extra.iter().cloned());
    let mut files = Vec::new();
    for d in bundle.directions() {
        let tag = d.label.replace("->", "_to_");
        files.push((format!("{prefix}surface_{tag}.csv"), render_surface(&d.surface, &header)));
        files.push((
            format!("{prefix}surface_{tag}_normalized.csv"),
            render_surface(&d.normalized, &header),
        ));
        files.push((format!("{prefix}profile_{tag}.csv"), render_profile(&d.profile, &header)));
        files.push((format!("{prefix}ccm_{tag}.csv"), render_ccm(&d.ccm, &header)));
        if !d.convergence.is_empty() {
            files.push((
                format!("{prefix}convergence_{tag}.csv"),
                render_convergence(&d.convergence, &d.label, &header),
            ));
        }
    }
    let summary = serde_json::to_string_pretty(&BundleSummary::of(bundle)).expect("summary serializes");
    files.push((format!("{prefix}summary.json"), summary + "\n"));
    files
}

/// Writes a bundle below `dir` and returns the file names.
pub fn write_bundle(dir: &Path, bundle: &ResultBundle, prefix: &str, extra: &Header) -> Result<Vec<String>> {
    let files = render_bundle(bundle, prefix, extra);
    for (name, text) in &files {
        write_atomic(&dir.join(name), text)?;
    }
    Ok(files.into_iter().map(|(n, _)| n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmc_sim::{simulate_logistic, LogisticMapConfig};

    fn driven_pair(n: usize) -> (TimeSeries, TimeSeries) {
        let cfg = LogisticMapConfig::independent(vec![3.99, 3.98], n)
            .with_coupling(1, 0, 0.15)
            .with_seed(3);
        let s = simulate_logistic(&cfg).unwrap();
        (s[0].clone(), s[1].clone())
    }

    fn cfg() -> AnalysisConfig {
        AnalysisConfig {
            spectral: cmc::SpectralConfig::with_segment_length(16),
            shift_range: cmc::ShiftRange::symmetric(5),
            library_lengths: vec![100, 400],
            ..AnalysisConfig::default()
        }
    }

    #[test]
    fn detects_direction() {
        let (x, y) = driven_pair(1500);
        let b = run_pipeline(&cfg(), &x, &y).unwrap();
        assert!(b.x_to_y.profile.mean_strength() > 3.0 * b.y_to_x.profile.mean_strength());
        assert_eq!(b.x_to_y.surface.values.len(), b.y_to_x.surface.values.len());
        assert_eq!(b.x_to_y.convergence.len(), 2);
        assert!(b.x_to_y.normalized.normalized);
        assert_eq!(b.x_to_y.profile.direction_label, "x->y");
    }

    #[test]
    fn constant_input_is_numeric_error() {
        let c = TimeSeries::new(vec![1.0; 300], 1.0).unwrap();
        let err = run_pipeline(&cfg(), &c, &c).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn single_realization_average_is_identity() {
        let (x, y) = driven_pair(600);
        let a = run_pipeline(&cfg(), &x, &y).unwrap();
        let b = run_realizations(&cfg(), &[(x.clone(), y.clone()), (x, y)]).unwrap();
        assert_eq!(a.x_to_y.surface, b.x_to_y.surface);
        assert_eq!(a.y_to_x.profile, b.y_to_x.profile);
    }

    #[test]
    fn rendering_is_deterministic() {
        let (x, y) = driven_pair(600);
        let a = render_bundle(&run_pipeline(&cfg(), &x, &y).unwrap(), "", &Vec::new());
        let b = render_bundle(&run_pipeline(&cfg(), &x, &y).unwrap(), "", &Vec::new());
        assert_eq!(a, b);
        assert!(a.iter().all(|(_, text)| text.contains("config_hash")));
    }
}
