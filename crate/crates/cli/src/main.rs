use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cmc::{ShiftRange, Taper};
use cmc_cli::csv_io::{load_csv, save_csv, SeriesTable};
use cmc_cli::figures::{reproduce, sweep, Figure, ReproduceOptions, Sweep};
use cmc_cli::pipeline::{run_realizations, write_bundle};
use cmc_cli::{AnalysisConfig, CliError, Result};
use cmc_sim::{simulate_preset, simulate_wilson_cowan, Preset, WilsonCowanConfig};

#[derive(Parser)]
#[command(name = "cmc", version, about = "Frequency-resolved causal discovery with cross-mapping coherence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a benchmark system and write its series as CSV.
    Simulate {
        /// Preset name, e.g. logistic-uni or kuramoto-3.
        preset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rate-model configuration (required for wilson-cowan-v1v4).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Realization index for the rate model.
        #[arg(long, default_value_t = 0)]
        realization: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Analyse two columns of one or more CSV files in both directions.
    Analyze(Box<AnalyzeArgs>),
    /// Write the data behind one of the benchmark figures.
    Reproduce {
        /// fig2, fig3, fig4, fig4a, fig4b, fig4c, fig5, fig6, fig7 or fig8.
        figure: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        wilson_cowan_config: Option<PathBuf>,
    },
    /// Sweep record length, coupling, noise level or embedding dimension.
    Sweep {
        /// length, coupling, noise or embedding.
        kind: String,
        /// Comma-separated values; defaults to the benchmark grid.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV; repeat for several realizations of the same system.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Column used as x.
    #[arg(long)]
    x: String,
    /// Column used as y.
    #[arg(long)]
    y: String,
    /// TOML analysis configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long)]
    delay: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    min_shift: Option<i64>,
    #[arg(long)]
    max_shift: Option<i64>,
    #[arg(long)]
    shift_step: Option<usize>,
    /// Symmetric shift range in seconds; overrides min/max shift.
    #[arg(long)]
    shift_seconds: Option<f64>,
    #[arg(long)]
    segment_length: Option<usize>,
    #[arg(long)]
    overlap_fraction: Option<f64>,
    #[arg(long)]
    window: Option<Taper>,
    #[arg(long, value_delimiter = ',')]
    library_lengths: Option<Vec<usize>>,
    #[arg(long)]
    normalization: Option<bool>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    causal_limit: Option<i64>,
    #[arg(long)]
    exclusion_radius: Option<usize>,
}

fn analysis_config(a: &AnalyzeArgs, sample_rate: f64) -> Result<AnalysisConfig> {
    let mut cfg = match &a.config {
        Some(p) => AnalysisConfig::from_file(p)?,
        None => AnalysisConfig::default(),
    };
    if let Some(v) = a.dimension {
        cfg.embedding.dimension = v;
    }
    if let Some(v) = a.delay {
        cfg.embedding.delay = v;
    }
    if let Some(v) = a.min_shift {
        cfg.shift_range.min_shift = v;
    }
    if let Some(v) = a.max_shift {
        cfg.shift_range.max_shift = v;
    }
    if let Some(v) = a.shift_step {
        cfg.shift_range.step = v;
    }
    if let Some(s) = a.shift_seconds {
        let r = ShiftRange::from_seconds(s, sample_rate);
        cfg.shift_range.min_shift = r.min_shift;
        cfg.shift_range.max_shift = r.max_shift;
    }
    if let Some(v) = a.segment_length {
        cfg.spectral.segment_length = Some(v);
    }
    if let Some(v) = a.overlap_fraction {
        cfg.spectral.overlap_fraction = v;
    }
    if let Some(v) = a.window {
        cfg.spectral.window = v;
    }
    if let Some(v) = &a.library_lengths {
        cfg.library_lengths = v.clone();
    }
    if let Some(v) = a.normalization {
        cfg.normalization = v;
    }
    if let Some(v) = a.realizations {
        cfg.realizations = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if a.causal_limit.is_some() {
        cfg.causal_limit = a.causal_limit;
    }
    if let Some(v) = a.exclusion_radius {
        cfg.exclusion_radius = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let tables = a.input.iter().map(|p| load_csv(p)).collect::<Result<Vec<_>>>()?;
    let pairs = tables
        .iter()
        .map(|t| Ok((t.column(&a.x)?.clone(), t.column(&a.y)?.clone())))
        .collect::<Result<Vec<_>>>()?;
    let cfg = analysis_config(&a, pairs[0].0.sample_rate())?;
    let bundle = run_realizations(&cfg, &pairs)?;
    let extra = vec![("x".into(), a.x.clone()), ("y".into(), a.y.clone())];
    let files = write_bundle(&a.out, &bundle, "", &extra)?;
    log::info!("wrote {} files to {}", files.len(), a.out.display());
    for d in bundle.directions() {
        println!(
            "{}: mean strength {:.4}, peak at {:.4} Hz",
            d.label,
            d.profile.mean_strength(),
            d.profile.peak_frequency()
        );
    }
    Ok(())
}

fn simulate(preset: &str, seed: u64, config: Option<&Path>, realization: usize, out: &Path) -> Result<()> {
    let preset: Preset = preset.parse()?;
    let provenance = vec![
        ("preset".to_string(), preset.to_string()),
        ("seed".to_string(), seed.to_string()),
        ("version".to_string(), cmc_cli::pipeline::VERSION.to_string()),
    ];
    let table = if preset.needs_config_file() {
        let path = config.ok_or_else(|| CliError::Usage(format!("{preset} needs --config")))?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let mut cfg = WilsonCowanConfig::from_toml_str(&text)?;
        cfg.seed = seed;
        let rates = simulate_wilson_cowan(&cfg, realization)?;
        let mut names: Vec<String> = cfg.populations.iter().map(|p| p.name.clone()).collect();
        let mut series = rates.clone();
        names.extend(cfg.signals.iter().map(|s| s.name.clone()));
        series.extend(cfg.observe(&rates)?);
        SeriesTable { names, series }
    } else {
        let sim = simulate_preset(preset, seed)?;
        SeriesTable {
            names: sim.names,
            series: sim.series,
        }
    };
    save_csv(out, &table, &provenance)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            preset,
            seed,
            config,
            realization,
            out,
        } => simulate(&preset, seed, config.as_deref(), realization, &out),
        Command::Analyze(a) => analyze(*a),
        Command::Reproduce {
            figure,
            out,
            seed,
            wilson_cowan_config,
        } => {
            let figure: Figure = figure.parse()?;
            let m = reproduce(
                figure,
                &out,
                &ReproduceOptions {
                    seed,
                    wilson_cowan_config,
                },
            )?;
            println!("{}: {} files in {}", m.figure, m.files.len(), out.display());
            Ok(())
        }
        Command::Sweep {
            kind,
            values,
            out,
            seed,
        } => {
            let kind: Sweep = kind.parse()?;
            let m = sweep(kind, values, &out, seed)?;
            println!("{}: {} files in {}", m.figure, m.files.len(), out.display());
            Ok(())
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CMC_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("CMC_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Usage("CMC_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|_| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
