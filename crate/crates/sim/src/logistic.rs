//! Coupled logistic maps with a mirroring boundary.

use cmc::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bad_config, Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticMapConfig {
    pub rates: Vec<f64>,
    /// Row-major `n x n` coupling matrix; `coupling[i][j]` is the effect of
    /// map `j` on map `i`. The diagonal must be 1.
    pub coupling: Vec<Vec<f64>>,
    pub length: usize,
    /// Starting values in (0, 1). Drawn from `seed` when absent.
    #[serde(default)]
    pub initial_state: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    /// Iterations discarded before recording.
    #[serde(default)]
    pub burn_in: usize,
}

impl LogisticMapConfig {
    /// Uncoupled maps with the given rates.
    pub fn independent(rates: Vec<f64>, length: usize) -> Self {
        let n = rates.len();
        let coupling = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            rates,
            coupling,
            length,
            initial_state: None,
            seed: 0,
            burn_in: 0,
        }
    }

    /// Sets `coupling[to][from]`, the influence of map `from` on map `to`.
    pub fn with_coupling(mut self, to: usize, from: usize, value: f64) -> Self {
        self.coupling[to][from] = value;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.rates.len();
        if n == 0 {
            bad_config!("at least one map is required");
        }
        if self.coupling.len() != n || self.coupling.iter().any(|row| row.len() != n) {
            bad_config!("coupling matrix must be {n}x{n}");
        }
        for (i, row) in self.coupling.iter().enumerate() {
            if row[i] != 1.0 {
                bad_config!("coupling[{i}][{i}] must be 1, got {}", row[i]);
            }
            if row.iter().any(|v| !v.is_finite()) {
                bad_config!("coupling row {i} has non-finite entries");
            }
        }
        if self.rates.iter().any(|r| !r.is_finite()) {
            bad_config!("rates must be finite");
        }
        if self.length == 0 {
            bad_config!("length must be positive");
        }
        if let Some(init) = &self.initial_state {
            if init.len() != n {
                bad_config!("initial_state has {} values for {n} maps", init.len());
            }
            if init.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
                bad_config!("initial_state values must lie in (0, 1)");
            }
        }
        Ok(())
    }
}

/// Reflects `v` into [0, 1] at both walls, repeatedly if needed.
pub fn mirror(mut v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    if !(-1.0..=2.0).contains(&v) {
        // reflection has period 2
        v = v.rem_euclid(2.0);
    }
    loop {
        if v < 0.0 {
            v = -v;
        } else if v > 1.0 {
            v = 2.0 - v;
        } else {
            return v;
        }
    }
}

/// Iterates `x_i <- F(r_i x_i (1 - sum_j A_ij x_j))` and returns one series
/// per map at unit sample rate.
pub fn simulate_logistic(cfg: &LogisticMapConfig) -> Result<Vec<TimeSeries>> {
    cfg.validate()?;
    let n = cfg.rates.len();
    let mut state = match &cfg.initial_state {
        Some(s) => s.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..n).map(|_| rng.random_range(0.05..0.95)).collect()
        }
    };
    let mut next = vec![0.0; n];
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.length); n];
    let total = cfg.burn_in + cfg.length;
    for step in 0..total {
        if step >= cfg.burn_in {
            for (o, &v) in out.iter_mut().zip(&state) {
                o.push(v);
            }
        }
        if step + 1 == total {
            break;
        }
        for i in 0..n {
            let load: f64 = cfg.coupling[i].iter().zip(&state).map(|(a, x)| a * x).sum();
            let v = mirror(cfg.rates[i] * state[i] * (1.0 - load));
            if !v.is_finite() {
                return Err(SimError::NonFinite {
                    system: "logistic",
                    step: step + 1,
                });
            }
            next[i] = v;
        }
        std::mem::swap(&mut state, &mut next);
    }
    out.into_iter()
        .map(|s| TimeSeries::new(s, 1.0).map_err(SimError::from))
        .collect()
}
