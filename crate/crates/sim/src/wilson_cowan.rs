//! Rate model of excitatory/inhibitory populations with threshold-linear-like
//! transduction, integrated with Euler-Maruyama.
//!
//! The model is fully user-configured: populations carry their own time
//! constant, noise strength and external drive, and connections are listed by
//! name. A population's input is `sum_j w_ij r_j + I_ext_i`.

use cmc::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{bad_config, Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub name: String,
    /// Time constant in seconds.
    pub tau: f64,
    pub sigma: f64,
    #[serde(default)]
    pub external: f64,
    #[serde(default)]
    pub initial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub from: String,
    pub to: String,
    pub weight: f64,
}

/// One term of an observed signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalTerm {
    pub population: String,
    #[serde(default = "unit")]
    pub weight: f64,
}

/// A named weighted sum of population rates, e.g. an area's LFP proxy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub name: String,
    pub terms: Vec<SignalTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilsonCowanConfig {
    #[serde(rename = "population")]
    pub populations: Vec<Population>,
    #[serde(rename = "connection", default)]
    pub connections: Vec<Connection>,
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
    /// Observed signals, in order.
    #[serde(rename = "signal", default)]
    pub signals: Vec<Signal>,
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

/// `x / (1 - exp(-x))`, continuous at 0 where it equals 1.
pub fn transduction(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x / 2.0
    } else {
        x / -(-x).exp_m1()
    }
}

impl WilsonCowanConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.populations.iter().position(|p| p.name == name)
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / (self.dt * self.record_every as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.populations.is_empty() {
            bad_config!("at least one population is required");
        }
        for (i, p) in self.populations.iter().enumerate() {
            if !(p.tau > 0.0 && p.tau.is_finite()) {
                bad_config!("population {} needs a positive tau", p.name);
            }
            if !(p.sigma >= 0.0) {
                bad_config!("population {} needs a non-negative sigma", p.name);
            }
            if self.populations[..i].iter().any(|q| q.name == p.name) {
                bad_config!("duplicate population name {}", p.name);
            }
        }
        for c in &self.connections {
            for end in [&c.from, &c.to] {
                if self.index_of(end).is_none() {
                    bad_config!("connection refers to unknown population {end}");
                }
            }
        }
        for sig in &self.signals {
            if sig.terms.is_empty() {
                bad_config!("signal {} has no terms", sig.name);
            }
            for t in &sig.terms {
                if self.index_of(&t.population).is_none() {
                    bad_config!("signal {} refers to unknown population {}", sig.name, t.population);
                }
            }
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad_config!("dt must be positive, got {}", self.dt);
        }
        if self.steps == 0 || self.record_every == 0 || self.realizations == 0 {
            bad_config!("steps, record_every and realizations must be positive");
        }
        Ok(())
    }

    /// Combines per-population series into the configured signals.
    pub fn observe(&self, rates: &[TimeSeries]) -> Result<Vec<TimeSeries>> {
        self.signals
            .iter()
            .map(|sig| {
                let mut acc = vec![0.0; rates[0].len()];
                for t in &sig.terms {
                    let r = &rates[self.index_of(&t.population).unwrap()];
                    for (a, v) in acc.iter_mut().zip(r.samples()) {
                        *a += t.weight * v;
                    }
                }
                TimeSeries::new(acc, rates[0].sample_rate()).map_err(SimError::from)
            })
            .collect()
    }

    fn weights(&self) -> Vec<Vec<(usize, f64)>> {
        let mut w = vec![Vec::new(); self.populations.len()];
        for c in &self.connections {
            let (from, to) = (self.index_of(&c.from).unwrap(), self.index_of(&c.to).unwrap());
            w[to].push((from, c.weight));
        }
        w
    }
}

/// Simulates one realization and returns one series per population, in
/// configuration order. Realizations share `seed` but use separate streams.
pub fn simulate_wilson_cowan(cfg: &WilsonCowanConfig, realization: usize) -> Result<Vec<TimeSeries>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(realization as u64);
    let w = cfg.weights();
    let n = cfg.populations.len();
    let mut r: Vec<f64> = cfg.populations.iter().map(|p| p.initial).collect();
    let mut next = r.clone();
    let samples = cfg.steps / cfg.record_every;
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(samples); n];
    let scale: Vec<(f64, f64)> = cfg
        .populations
        .iter()
        .map(|p| (cfg.dt / p.tau, p.sigma * (cfg.dt / p.tau).sqrt()))
        .collect();
    for step in 0..cfg.burn_in + samples * cfg.record_every {
        if step >= cfg.burn_in && (step - cfg.burn_in).is_multiple_of(cfg.record_every) {
            for (o, &v) in out.iter_mut().zip(&r) {
                o.push(v);
            }
        }
        for i in 0..n {
            let input: f64 =
                w[i].iter().map(|&(j, wij)| wij * r[j]).sum::<f64>() + cfg.populations[i].external;
            let dw: f64 = rng.sample(StandardNormal);
            let (a, b) = scale[i];
            next[i] = r[i] + a * (transduction(input) - r[i]) + b * dw;
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                system: "wilson-cowan",
                step: step + 1,
            });
        }
        std::mem::swap(&mut r, &mut next);
    }
    let fs = cfg.sample_rate();
    out.into_iter()
        .map(|v| TimeSeries::new(v, fs).map_err(SimError::from))
        .collect()
}
