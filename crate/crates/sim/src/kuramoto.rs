//! Noisy Kuramoto oscillators integrated with Euler-Maruyama.

use std::f64::consts::TAU;

use cmc::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{bad_config, Result};

/// Sign convention of the pairwise interaction term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingSign {
    /// `sin(theta_i - theta_j)`, which pushes phases apart.
    #[default]
    Repulsive,
    /// `sin(theta_j - theta_i)`, the usual synchronising form.
    Attractive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KuramotoConfig {
    /// Natural frequencies in Hz.
    pub base_frequencies: Vec<f64>,
    /// Per-oscillator coupling gain `K_i`.
    pub couplings: Vec<f64>,
    /// Standard deviation of the white phase noise.
    pub noise_std: f64,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Drawn uniformly from `[0, 2 pi)` when absent.
    #[serde(default)]
    pub initial_phases: Option<Vec<f64>>,
    #[serde(default)]
    pub coupling_sign: CouplingSign,
}

impl KuramotoConfig {
    pub fn oscillators(&self) -> usize {
        self.base_frequencies.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.oscillators();
        if m == 0 {
            bad_config!("at least one oscillator is required");
        }
        if self.couplings.len() != m {
            bad_config!("{} couplings for {m} oscillators", self.couplings.len());
        }
        if let Some(p) = &self.initial_phases {
            if p.len() != m {
                bad_config!("{} initial phases for {m} oscillators", p.len());
            }
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad_config!("dt must be positive, got {}", self.dt);
        }
        if !(self.noise_std >= 0.0) {
            bad_config!("noise_std must be non-negative");
        }
        if self.steps == 0 {
            bad_config!("steps must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KuramotoOutput {
    /// `sin(theta_i)` per oscillator.
    pub observed: Vec<TimeSeries>,
    /// Unwrapped phases per oscillator.
    pub phases: Vec<Vec<f64>>,
}

pub fn simulate_kuramoto(cfg: &KuramotoConfig) -> Result<KuramotoOutput> {
    cfg.validate()?;
    let m = cfg.oscillators();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta = match &cfg.initial_phases {
        Some(p) => p.clone(),
        None => (0..m).map(|_| rng.random_range(0.0..TAU)).collect(),
    };
    let sign = match cfg.coupling_sign {
        CouplingSign::Repulsive => 1.0,
        CouplingSign::Attractive => -1.0,
    };
    let noise = cfg.noise_std * cfg.dt.sqrt();
    let mut phases: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.steps); m];
    let mut drift = vec![0.0; m];
    for step in 0..cfg.steps {
        for (p, &t) in phases.iter_mut().zip(&theta) {
            p.push(t);
        }
        if step + 1 == cfg.steps {
            break;
        }
        for i in 0..m {
            let pull: f64 = theta.iter().map(|&tj| (theta[i] - tj).sin()).sum();
            drift[i] = TAU * cfg.base_frequencies[i] + sign * cfg.couplings[i] / m as f64 * pull;
        }
        for i in 0..m {
            let dw: f64 = rng.sample(StandardNormal);
            theta[i] += drift[i] * cfg.dt + noise * dw;
        }
    }
    let fs = 1.0 / cfg.dt;
    let observed = phases
        .iter()
        .map(|p| TimeSeries::new(p.iter().map(|t| t.sin()).collect(), fs))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(KuramotoOutput { observed, phases })
}
