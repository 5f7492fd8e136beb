//! Named benchmark configurations.

use std::fmt;
use std::str::FromStr;

use cmc::TimeSeries;

use crate::error::{Result, SimError};
use crate::kuramoto::{simulate_kuramoto, CouplingSign, KuramotoConfig};
use crate::logistic::{simulate_logistic, LogisticMapConfig};
use crate::lorenz::{simulate_lorenz, LorenzConfig, LorenzParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    LogisticUni,
    LogisticCirc,
    LogisticHidden,
    LogisticIndep,
    LorenzUni,
    LorenzCirc,
    LorenzIndep,
    Kuramoto3,
    WilsonCowanV1V4,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::LogisticUni,
        Preset::LogisticCirc,
        Preset::LogisticHidden,
        Preset::LogisticIndep,
        Preset::LorenzUni,
        Preset::LorenzCirc,
        Preset::LorenzIndep,
        Preset::Kuramoto3,
        Preset::WilsonCowanV1V4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::LogisticUni => "logistic-uni",
            Preset::LogisticCirc => "logistic-circ",
            Preset::LogisticHidden => "logistic-hidden",
            Preset::LogisticIndep => "logistic-indep",
            Preset::LorenzUni => "lorenz-uni",
            Preset::LorenzCirc => "lorenz-circ",
            Preset::LorenzIndep => "lorenz-indep",
            Preset::Kuramoto3 => "kuramoto-3",
            Preset::WilsonCowanV1V4 => "wilson-cowan-v1v4",
        }
    }

    /// Whether simulating needs a user-supplied configuration file.
    pub fn needs_config_file(self) -> bool {
        self == Preset::WilsonCowanV1V4
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                SimError::InvalidConfig(format!("unknown preset {s:?}; known: {}", known.join(", ")))
            })
    }
}

/// Named output columns of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub names: Vec<String>,
    pub series: Vec<TimeSeries>,
}

impl Simulated {
    pub fn get(&self, name: &str) -> Option<&TimeSeries> {
        self.names.iter().position(|n| n == name).map(|i| &self.series[i])
    }

    fn new(names: &[&str], series: Vec<TimeSeries>) -> Self {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            series,
        }
    }
}

/// Length of the logistic benchmark scenarios.
pub const LOGISTIC_LENGTH: usize = 10_000;

/// Logistic scenarios: map 1 is `x`, map 2 is `y`, map 3 (if any) is the
/// hidden driver `z`.
pub fn logistic_preset(preset: Preset, seed: u64) -> Option<LogisticMapConfig> {
    let cfg = match preset {
        Preset::LogisticUni => {
            LogisticMapConfig::independent(vec![3.9902032398544094, 3.9900842430866197], LOGISTIC_LENGTH)
                .with_coupling(1, 0, 0.05)
        }
        Preset::LogisticCirc => {
            LogisticMapConfig::independent(vec![3.9903787118484475, 3.9900528401775186], LOGISTIC_LENGTH)
                .with_coupling(1, 0, 0.05)
                .with_coupling(0, 1, 0.05)
        }
        Preset::LogisticHidden => LogisticMapConfig::independent(
            vec![3.9903839016316964, 3.9904120926448896, 3.9904110403001893],
            LOGISTIC_LENGTH,
        )
        .with_coupling(0, 2, 0.05)
        .with_coupling(1, 2, 0.05),
        Preset::LogisticIndep => {
            LogisticMapConfig::independent(vec![3.9903770705735107, 3.9907504255884914], LOGISTIC_LENGTH)
        }
        _ => return None,
    };
    Some(cfg.with_seed(seed))
}

/// Unidirectional `x -> y` maps used for the library-length study.
pub fn logistic_length_study(length: usize, seed: u64) -> LogisticMapConfig {
    LogisticMapConfig::independent(vec![3.99097965, 3.99024767], length)
        .with_coupling(1, 0, 0.05)
        .with_seed(seed)
}

/// Unidirectional `x -> y` maps with coupling `c` used for the sensitivity
/// study.
pub fn logistic_coupling_study(c: f64, seed: u64) -> LogisticMapConfig {
    LogisticMapConfig::independent(vec![3.99, 3.99], 2000)
        .with_coupling(1, 0, c)
        .with_seed(seed)
}

/// Unidirectional `x -> y` maps with coupling 0.15, used for the noise and
/// embedding studies.
pub fn logistic_noise_study(length: usize, seed: u64) -> LogisticMapConfig {
    LogisticMapConfig::independent(vec![3.99097965, 3.99024767], length)
        .with_coupling(1, 0, 0.15)
        .with_seed(seed)
}

pub fn lorenz_preset(preset: Preset) -> Option<LorenzConfig> {
    let (kappa1, kappa2) = match preset {
        Preset::LorenzUni => (0.0, 0.1),
        Preset::LorenzCirc => (0.1, 0.1),
        Preset::LorenzIndep => (0.0, 0.0),
        _ => return None,
    };
    Some(LorenzConfig {
        first: LorenzParams {
            sigma: 10.0,
            rho: 27.0,
            beta: 2.667,
        },
        second: LorenzParams {
            sigma: 10.209,
            rho: 25.9,
            beta: 2.652,
        },
        kappa1,
        kappa2,
        duration: 5000.0,
        dt: 1e-3,
        record_every: 100,
        initial_state: [1.0, 1.0, 1.0, -1.0, 0.5, 2.0],
    })
}

pub fn kuramoto_preset(seed: u64) -> KuramotoConfig {
    KuramotoConfig {
        base_frequencies: vec![10.50422624, 59.0, 40.0],
        couplings: vec![0.0, 3.0, 4.3],
        noise_std: 0.1,
        dt: 5e-3,
        steps: 20_000,
        seed,
        initial_phases: None,
        coupling_sign: CouplingSign::default(),
    }
}

/// Runs a preset. The Wilson-Cowan preset is rejected here because its
/// weights must come from a configuration file.
pub fn simulate_preset(preset: Preset, seed: u64) -> Result<Simulated> {
    if let Some(cfg) = logistic_preset(preset, seed) {
        let series = simulate_logistic(&cfg)?;
        let names: &[&str] = if series.len() == 3 { &["x", "y", "z"] } else { &["x", "y"] };
        return Ok(Simulated::new(names, series));
    }
    if let Some(cfg) = lorenz_preset(preset) {
        return Ok(Simulated::new(&["x1", "y1", "z1", "x2", "y2", "z2"], simulate_lorenz(&cfg)?));
    }
    match preset {
        Preset::Kuramoto3 => Ok(Simulated::new(
            &["z", "x", "y"],
            simulate_kuramoto(&kuramoto_preset(seed))?.observed,
        )),
        _ => Err(SimError::InvalidConfig(format!(
            "preset {preset} needs a configuration file with connection weights"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("lorenz".parse::<Preset>().is_err());
    }

    #[test]
    fn unidirectional_logistic_parameters() {
        let cfg = logistic_preset(Preset::LogisticUni, 0).unwrap();
        assert_eq!(cfg.rates, vec![3.9902032398544094, 3.9900842430866197]);
        assert_eq!(cfg.coupling, vec![vec![1.0, 0.0], vec![0.05, 1.0]]);
        assert_eq!(cfg.length, 10_000);
    }

    #[test]
    fn lorenz_tables() {
        let cfg = lorenz_preset(Preset::LorenzUni).unwrap();
        assert_eq!((cfg.second.sigma, cfg.second.rho, cfg.second.beta), (10.209, 25.9, 2.652));
        assert_eq!((cfg.kappa1, cfg.kappa2), (0.0, 0.1));
        assert!((cfg.sample_rate() - 10.0).abs() < 1e-12);
        assert_eq!(lorenz_preset(Preset::LorenzIndep).unwrap().kappa2, 0.0);
    }

    #[test]
    fn logistic_presets_simulate() {
        for p in [Preset::LogisticUni, Preset::LogisticCirc, Preset::LogisticHidden, Preset::LogisticIndep] {
            let s = simulate_preset(p, 1).unwrap();
            assert_eq!(s.series[0].len(), LOGISTIC_LENGTH);
            assert!(s.get("x").is_some() && s.get("y").is_some());
            for series in &s.series {
                assert!(series.samples().iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn kuramoto_preset_shape() {
        let s = simulate_preset(Preset::Kuramoto3, 0).unwrap();
        assert_eq!(s.names, vec!["z", "x", "y"]);
        assert_eq!(s.series[0].len(), 20_000);
        assert_eq!(s.series[0].sample_rate(), 200.0);
    }

    #[test]
    fn wilson_cowan_needs_file() {
        assert!(Preset::WilsonCowanV1V4.needs_config_file());
        assert!(simulate_preset(Preset::WilsonCowanV1V4, 0).is_err());
    }
}
