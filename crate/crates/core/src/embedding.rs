//! Time-delay embedding.
//!
//! A delay vector anchored at sample `t` is
//! `[x(t), x(t - τ), ..., x(t - (E-1)τ)]`, newest coordinate first. Row `i`
//! of a [`DelayEmbedding`] is anchored at `time_index[i] = (E-1)τ + i`, so
//! the first row is the earliest time with a complete history.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::timeseries::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub dimension: usize,
    pub delay: usize,
}

impl EmbeddingConfig {
    pub fn new(dimension: usize, delay: usize) -> Result<Self> {
        let cfg = Self { dimension, delay };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(invalid!("embedding dimension must be at least 1"));
        }
        if self.delay == 0 {
            return Err(invalid!("embedding delay must be at least 1"));
        }
        Ok(())
    }

    /// Span of one delay vector in samples, `(E-1)τ`.
    pub fn window(&self) -> usize {
        (self.dimension - 1) * self.delay
    }

    /// Default neighbour count for cross-mapping, `E + 1`.
    pub fn default_neighbors(&self) -> usize {
        self.dimension + 1
    }
}

/// Reconstructed state-space trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayEmbedding {
    points: Vec<f64>,
    time_index: Vec<usize>,
    config: EmbeddingConfig,
}

impl DelayEmbedding {
    pub fn config(&self) -> EmbeddingConfig {
        self.config
    }

    pub fn dimension(&self) -> usize {
        self.config.dimension
    }

    /// Number of delay vectors.
    pub fn len(&self) -> usize {
        self.time_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time_index.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let e = self.config.dimension;
        &self.points[i * e..(i + 1) * e]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.config.dimension)
    }

    /// Sample index of the newest coordinate of each row.
    pub fn time_index(&self) -> &[usize] {
        &self.time_index
    }

    /// Row-major `len() x dimension()` storage.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// The first `len` rows.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len() {
            return Err(invalid!(
                "prefix length {len} out of range for embedding with {} rows",
                self.len()
            ));
        }
        let e = self.config.dimension;
        Ok(Self {
            points: self.points[..len * e].to_vec(),
            time_index: self.time_index[..len].to_vec(),
            config: self.config,
        })
    }
}

/// Builds the delay embedding of `series`.
pub fn embed(series: &TimeSeries, cfg: EmbeddingConfig) -> Result<DelayEmbedding> {
    embed_slice(series.samples(), cfg)
}

pub(crate) fn embed_slice(x: &[f64], cfg: EmbeddingConfig) -> Result<DelayEmbedding> {
    cfg.validate()?;
    let window = cfg.window();
    if x.len() <= window {
        return Err(invalid!(
            "series of length {} too short for embedding window {window} (E={}, tau={}); need at least {}",
            x.len(),
            cfg.dimension,
            cfg.delay,
            window + 1
        ));
    }
    let rows = x.len() - window;
    let mut points = Vec::with_capacity(rows * cfg.dimension);
    for t in window..x.len() {
        points.extend((0..cfg.dimension).map(|j| x[t - j * cfg.delay]));
    }
    Ok(DelayEmbedding {
        points,
        time_index: (window..x.len()).collect(),
        config: cfg,
    })
}
