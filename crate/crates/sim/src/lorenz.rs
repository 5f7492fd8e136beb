//! Two diffusively coupled Lorenz systems integrated with fixed-step RK4.

use cmc::TimeSeries;
use serde::{Deserialize, Serialize};

use crate::error::{bad_config, Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzConfig {
    pub first: LorenzParams,
    pub second: LorenzParams,
    /// Pull of subsystem 1 towards `y2`.
    pub kappa1: f64,
    /// Pull of subsystem 2 towards `y1`.
    pub kappa2: f64,
    /// Integrated duration in time units.
    pub duration: f64,
    pub dt: f64,
    /// Keep one state out of this many integration steps.
    #[serde(default = "one")]
    pub record_every: usize,
    /// `[x1, y1, z1, x2, y2, z2]` at time zero.
    pub initial_state: [f64; 6],
}

fn one() -> usize {
    1
}

impl LorenzConfig {
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / (self.dt * self.record_every as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad_config!("dt must be positive, got {}", self.dt);
        }
        if self.steps() < 1 {
            bad_config!("duration {} is shorter than one step", self.duration);
        }
        if self.record_every == 0 {
            bad_config!("record_every must be positive");
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            bad_config!("initial_state must be finite");
        }
        Ok(())
    }
}

/// Right-hand side of the coupled equations.
pub fn derivative(cfg: &LorenzConfig, s: &[f64; 6]) -> [f64; 6] {
    let [x1, y1, z1, x2, y2, z2] = *s;
    let (p, q) = (cfg.first, cfg.second);
    [
        p.sigma * ((y1 - x1) + cfg.kappa1 * (y2 - x1)),
        x1 * (p.rho - z1) - y1,
        x1 * y1 - p.beta * z1,
        q.sigma * ((y2 - x2) + cfg.kappa2 * (y1 - x2)),
        x2 * (q.rho - z2) - y2,
        x2 * y2 - q.beta * z2,
    ]
}

fn axpy(s: &[f64; 6], h: f64, k: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| s[i] + h * k[i])
}

fn rk4_step(cfg: &LorenzConfig, s: &[f64; 6]) -> [f64; 6] {
    let h = cfg.dt;
    let k1 = derivative(cfg, s);
    let k2 = derivative(cfg, &axpy(s, h / 2.0, &k1));
    let k3 = derivative(cfg, &axpy(s, h / 2.0, &k2));
    let k4 = derivative(cfg, &axpy(s, h, &k3));
    std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Returns `[x1, y1, z1, x2, y2, z2]` sampled every `record_every` steps,
/// starting with the initial state.
pub fn simulate_lorenz(cfg: &LorenzConfig) -> Result<Vec<TimeSeries>> {
    cfg.validate()?;
    let steps = cfg.steps();
    let samples = steps / cfg.record_every;
    let mut out: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(samples)).collect();
    let mut s = cfg.initial_state;
    for step in 0..samples * cfg.record_every {
        if step % cfg.record_every == 0 {
            for (o, v) in out.iter_mut().zip(s) {
                o.push(v);
            }
        }
        s = rk4_step(cfg, &s);
        if s.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                system: "lorenz",
                step: step + 1,
            });
        }
    }
    let fs = cfg.sample_rate();
    out.into_iter()
        .map(|v| TimeSeries::new(v, fs).map_err(SimError::from))
        .collect()
}
