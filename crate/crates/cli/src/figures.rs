//! File sets for re-plotting the benchmark figures, plus parameter sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cmc_sim::{Preset, WilsonCowanConfig};
use serde::Serialize;

use crate::csv_io::{format_f64, render_table, write_atomic, Header};
use crate::error::{CliError, Result};
use crate::experiments::{self as ex, plateau_width};
use crate::pipeline::{write_bundle, ResultBundle, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Figure {
    pub const ALL: [Figure; 10] = [
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig4c,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig4c => "fig4c",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL.into_iter().find(|f| f.id() == s).ok_or_else(|| {
            let ids: Vec<&str> = Figure::ALL.iter().map(|f| f.id()).collect();
            CliError::Usage(format!("unknown figure {s:?}; known: {}", ids.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    Length,
    Coupling,
    Noise,
    Embedding,
}

impl FromStr for Sweep {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(Sweep::Length),
            "coupling" => Ok(Sweep::Coupling),
            "noise" => Ok(Sweep::Noise),
            "embedding" => Ok(Sweep::Embedding),
            _ => Err(CliError::Usage(format!(
                "unknown sweep {s:?}; known: length, coupling, noise, embedding"
            ))),
        }
    }
}

impl Sweep {
    fn name(self) -> &'static str {
        match self {
            Sweep::Length => "length",
            Sweep::Coupling => "coupling",
            Sweep::Noise => "noise",
            Sweep::Embedding => "embedding",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            Sweep::Length => ex::LENGTHS.iter().map(|&v| v as f64).collect(),
            Sweep::Coupling => ex::COUPLINGS.to_vec(),
            Sweep::Noise => ex::SNRS.to_vec(),
            Sweep::Embedding => ex::DIMENSIONS.iter().map(|&v| v as f64).collect(),
        }
    }
}

/// Index of everything a reproduction wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub figure: String,
    pub seed: u64,
    pub version: String,
    pub files: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ReproduceOptions {
    pub seed: u64,
    /// Required for `fig8`.
    pub wilson_cowan_config: Option<PathBuf>,
}

struct Collector<'a> {
    dir: &'a Path,
    files: Vec<String>,
    metrics: BTreeMap<String, f64>,
}

impl<'a> Collector<'a> {
    fn new(dir: &'a Path) -> Self {
        Self {
            dir,
            files: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn bundle(&mut self, prefix: &str, bundle: &ResultBundle, extra: &Header) -> Result<()> {
        self.files.extend(write_bundle(self.dir, bundle, prefix, extra)?);
        let key = prefix.trim_end_matches('_');
        let key = if key.is_empty() { String::new() } else { format!("{key}.") };
        self.metrics.insert(format!("{key}mean_strength_x_to_y"), bundle.x_to_y.profile.mean_strength());
        self.metrics.insert(format!("{key}mean_strength_y_to_x"), bundle.y_to_x.profile.mean_strength());
        Ok(())
    }

    fn file(&mut self, name: &str, text: &str) -> Result<()> {
        write_atomic(&self.dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn finish(mut self, figure: &str, seed: u64) -> Result<Manifest> {
        let manifest = Manifest {
            figure: figure.to_string(),
            seed,
            version: VERSION.to_string(),
            files: std::mem::take(&mut self.files),
            metrics: std::mem::take(&mut self.metrics),
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        write_atomic(&self.dir.join("manifest.json"), &text)?;
        Ok(manifest)
    }
}

fn seed_header(seed: u64) -> Header {
    vec![("simulation_seed".into(), seed.to_string())]
}

/// Driven-direction band-mean CMC function for every sweep value, plus a
/// table of mean strengths.
fn sweep_tables(c: &mut Collector, kind: Sweep, runs: &[(f64, ResultBundle)], seed: u64) -> Result<()> {
    let header = seed_header(seed);
    let mut summary = Vec::new();
    for (v, b) in runs {
        let curve = b.x_to_y.surface.band_mean();
        summary.push(vec![
            format_f64(*v),
            format_f64(b.x_to_y.profile.mean_strength()),
            format_f64(b.y_to_x.profile.mean_strength()),
            plateau_width(&curve).to_string(),
        ]);
    }
    c.file(
        &format!("{}_summary.csv", kind.name()),
        &render_table(
            &header,
            &["value", "mean_strength_x_to_y", "mean_strength_y_to_x", "plateau_width"],
            &summary,
        ),
    )?;
    let shifts = &runs[0].1.x_to_y.surface.shifts;
    let names: Vec<String> = runs.iter().map(|(v, _)| format!("value_{v}")).collect();
    let mut columns = vec!["shift_samples"];
    columns.extend(names.iter().map(String::as_str));
    let curves: Vec<Vec<f64>> = runs.iter().map(|(_, b)| b.x_to_y.surface.band_mean()).collect();
    let rows: Vec<Vec<String>> = shifts
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![s.to_string()];
            row.extend(curves.iter().map(|c| format_f64(c[i])));
            row
        })
        .collect();
    c.file(&format!("{}_cmc_functions.csv", kind.name()), &render_table(&header, &columns, &rows))
}

fn as_count(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(CliError::Usage(format!("{what} must be a positive integer, got {v}")))
    }
}

fn run_sweep(kind: Sweep, values: &[f64], seed: u64) -> Result<Vec<(f64, ResultBundle)>> {
    let counts = |what| values.iter().map(|&v| as_count(v, what)).collect::<Result<Vec<_>>>();
    Ok(match kind {
        Sweep::Length => ex::length_study(&counts("length")?, seed)?
            .into_iter()
            .map(|(l, b)| (l as f64, b))
            .collect(),
        Sweep::Coupling => ex::coupling_study(values, seed)?,
        Sweep::Noise => ex::noise_study(values, seed)?,
        Sweep::Embedding => ex::embedding_study(&counts("dimension")?, seed)?
            .into_iter()
            .map(|(e, b)| (e as f64, b))
            .collect(),
    })
}

fn sweep_into(c: &mut Collector, kind: Sweep, values: &[f64], seed: u64) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::Usage("a sweep needs at least one value".into()));
    }
    let runs = run_sweep(kind, values, seed)?;
    for (v, b) in &runs {
        c.bundle(&format!("{}_{v}_", kind.name()), b, &seed_header(seed))?;
    }
    sweep_tables(c, kind, &runs, seed)
}

/// Runs a parameter sweep and writes its files and manifest to `dir`.
pub fn sweep(kind: Sweep, values: Option<Vec<f64>>, dir: &Path, seed: u64) -> Result<Manifest> {
    let values = values.unwrap_or_else(|| kind.default_values());
    let mut c = Collector::new(dir);
    sweep_into(&mut c, kind, &values, seed)?;
    c.finish(&format!("sweep-{}", kind.name()), seed)
}

pub fn reproduce(figure: Figure, dir: &Path, opts: &ReproduceOptions) -> Result<Manifest> {
    let seed = opts.seed;
    let header = seed_header(seed);
    let mut c = Collector::new(dir);
    match figure {
        Figure::Fig2 => c.bundle("", &ex::logistic_scenario(Preset::LogisticUni, seed)?, &header)?,
        Figure::Fig3 => {
            for p in [Preset::LogisticUni, Preset::LogisticCirc, Preset::LogisticHidden, Preset::LogisticIndep] {
                c.bundle(&format!("{p}_"), &ex::logistic_scenario(p, seed)?, &header)?;
            }
        }
        Figure::Fig4 => {
            for kind in [Sweep::Length, Sweep::Coupling, Sweep::Noise] {
                sweep_into(&mut c, kind, &kind.default_values(), seed)?;
            }
        }
        Figure::Fig4a => sweep_into(&mut c, Sweep::Length, &Sweep::Length.default_values(), seed)?,
        Figure::Fig4b => sweep_into(&mut c, Sweep::Coupling, &Sweep::Coupling.default_values(), seed)?,
        Figure::Fig4c => sweep_into(&mut c, Sweep::Noise, &Sweep::Noise.default_values(), seed)?,
        Figure::Fig5 => sweep_into(&mut c, Sweep::Embedding, &Sweep::Embedding.default_values(), seed)?,
        Figure::Fig6 => {
            for p in [Preset::LorenzUni, Preset::LorenzCirc, Preset::LorenzIndep] {
                c.bundle(&format!("{p}_"), &ex::lorenz_study(p)?, &header)?;
            }
        }
        Figure::Fig7 => {
            for r in ex::kuramoto_study(seed)? {
                let extra = vec![
                    ("simulation_seed".into(), seed.to_string()),
                    ("x".into(), r.cause.clone()),
                    ("y".into(), r.effect.clone()),
                ];
                c.bundle(&format!("{}_{}_", r.cause, r.effect), &r.bundle, &extra)?;
            }
        }
        Figure::Fig8 => {
            let path = opts.wilson_cowan_config.as_ref().ok_or_else(|| {
                CliError::Usage("fig8 needs --wilson-cowan-config with the rate-model weights".into())
            })?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let mut sim = WilsonCowanConfig::from_toml_str(&text)?;
            sim.seed = seed;
            let b = ex::wilson_cowan_study(&sim)?;
            c.bundle("", &b, &header)?;
            for (name, d) in [("x_to_y", &b.x_to_y), ("y_to_x", &b.y_to_x)] {
                c.metrics.insert(format!("{name}.integral_1_20_hz"), d.profile.integral(1.0, 20.0));
                c.metrics.insert(format!("{name}.integral_20_50_hz"), d.profile.integral(20.0, 50.0));
            }
        }
    }
    c.finish(figure.id(), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.id().parse::<Figure>().unwrap(), f);
        }
        assert_eq!("fig9".parse::<Figure>().unwrap_err().exit_code(), 2);
        assert!("heat".parse::<Sweep>().is_err());
    }

    #[test]
    fn fig8_without_config_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = reproduce(Figure::Fig8, dir.path(), &ReproduceOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn small_sweep_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let m = sweep(Sweep::Length, Some(vec![400.0, 700.0]), dir.path(), 0).unwrap();
        assert!(m.files.contains(&"length_summary.csv".to_string()));
        assert!(m.files.contains(&"length_400_surface_x_to_y.csv".to_string()));
        assert!(m.metrics.contains_key("length_700.mean_strength_x_to_y"));
        assert!(dir.path().join("manifest.json").exists());
        assert!(sweep(Sweep::Length, Some(vec![2.5]), dir.path(), 0).is_err());
    }
}
