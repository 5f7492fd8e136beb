//! Weighted nearest-neighbour cross-mapping.
//!
//! For each query delay vector the `k` closest library vectors are found,
//! their distances turned into exponential weights
//! `w_j = exp(-d_j / d_1) / Σ exp(-d_i / d_1)`, and the target series is
//! predicted as the weighted mean of its values at the neighbours' time
//! indices. `ccm_score(x, y, ..)` embeds `x` and predicts `y`; skill that
//! converges with library length is evidence for `y -> x`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{embed, DelayEmbedding, EmbeddingConfig};
use crate::error::{invalid, Error, Result};
use crate::knn::NeighborIndex;
use crate::timeseries::{pearson_r2, TimeSeries};

/// Neighbour search settings. `neighbors = None` means `E + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CrossMapConfig {
    pub neighbors: Option<usize>,
    /// Library rows whose time index lies within this many samples of the
    /// query are skipped. 0 removes only the exact self-match.
    pub exclusion_radius: usize,
}

impl CrossMapConfig {
    pub fn neighbors_for(&self, cfg: &EmbeddingConfig) -> usize {
        self.neighbors.unwrap_or_else(|| cfg.default_neighbors())
    }
}

/// Neighbour table of a set of queries against a library manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMapModel {
    k: usize,
    query_times: Vec<usize>,
    neighbor_indices: Vec<usize>,
    neighbor_times: Vec<usize>,
    neighbor_distances: Vec<f64>,
    weights: Vec<f64>,
}

impl CrossMapModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.query_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.query_times.is_empty()
    }

    pub fn query_times(&self) -> &[usize] {
        &self.query_times
    }

    /// Library row indices of the neighbours of query `q`, nearest first.
    pub fn neighbor_indices(&self, q: usize) -> &[usize] {
        &self.neighbor_indices[q * self.k..(q + 1) * self.k]
    }

    /// Sample indices of the neighbours of query `q`.
    pub fn neighbor_times(&self, q: usize) -> &[usize] {
        &self.neighbor_times[q * self.k..(q + 1) * self.k]
    }

    pub fn neighbor_distances(&self, q: usize) -> &[f64] {
        &self.neighbor_distances[q * self.k..(q + 1) * self.k]
    }

    pub fn weights(&self, q: usize) -> &[f64] {
        &self.weights[q * self.k..(q + 1) * self.k]
    }
}

/// Cross-mapped estimate of a target series.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub values: Vec<f64>,
    pub target_time_index: Vec<usize>,
}

impl Prediction {
    /// The target samples the prediction should be compared against.
    pub fn observed(&self, target: &[f64]) -> Result<Vec<f64>> {
        self.target_time_index
            .iter()
            .map(|&t| {
                target.get(t).copied().ok_or_else(|| {
                    Error::Internal(format!("time index {t} outside target of length {}", target.len()))
                })
            })
            .collect()
    }
}

/// Finds the `k` nearest admissible library rows for every query row.
pub fn find_neighbors(
    library: &DelayEmbedding,
    queries: &DelayEmbedding,
    k: usize,
    exclusion_radius: usize,
) -> Result<CrossMapModel> {
    if k == 0 {
        return Err(invalid!("neighbour count must be at least 1"));
    }
    if library.dimension() != queries.dimension() {
        return Err(invalid!(
            "library dimension {} differs from query dimension {}",
            library.dimension(),
            queries.dimension()
        ));
    }
    let lib_times = library.time_index();
    for &t in queries.time_index() {
        let excluded = excluded_count(lib_times, t, exclusion_radius);
        if lib_times.len() - excluded < k {
            return Err(invalid!(
                "only {} admissible library rows for query at time {t}, need k = {k}",
                lib_times.len() - excluded
            ));
        }
    }

    let index = NeighborIndex::build(library.points(), lib_times, library.dimension());
    let per_query: Vec<Vec<_>> = (0..queries.len())
        .into_par_iter()
        .map(|q| {
            let tq = queries.time_index()[q];
            index.nearest(queries.row(q), k, |t| t.abs_diff(tq) > exclusion_radius)
        })
        .collect();

    let m = queries.len();
    let mut model = CrossMapModel {
        k,
        query_times: queries.time_index().to_vec(),
        neighbor_indices: Vec::with_capacity(m * k),
        neighbor_times: Vec::with_capacity(m * k),
        neighbor_distances: Vec::with_capacity(m * k),
        weights: Vec::with_capacity(m * k),
    };
    for found in per_query {
        debug_assert_eq!(found.len(), k);
        let start = model.neighbor_distances.len();
        for c in &found {
            model.neighbor_indices.push(c.row);
            model.neighbor_times.push(c.time);
            model.neighbor_distances.push(c.d2.sqrt());
        }
        let w = compute_weights(&model.neighbor_distances[start..])?;
        model.weights.extend(w);
    }
    Ok(model)
}

fn excluded_count(sorted_times: &[usize], t: usize, radius: usize) -> usize {
    let lo = sorted_times.partition_point(|&x| x < t.saturating_sub(radius));
    let hi = sorted_times.partition_point(|&x| x <= t.saturating_add(radius));
    hi - lo
}

/// Exponential neighbour weights from ascending distances.
///
/// When the nearest distance is zero the formula is undefined; the weight is
/// then spread uniformly over the zero-distance neighbours, which is the
/// limit as `d_1 -> 0+`.
pub fn compute_weights(distances: &[f64]) -> Result<Vec<f64>> {
    if distances.is_empty() {
        return Err(invalid!("need at least one distance"));
    }
    if distances.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
        return Err(invalid!("distances must be finite and nonnegative"));
    }
    if distances.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid!("distances must be sorted ascending"));
    }
    let d1 = distances[0];
    if d1 == 0.0 {
        let zeros = distances.iter().take_while(|&&d| d == 0.0).count();
        let share = 1.0 / zeros as f64;
        return Ok(distances
            .iter()
            .map(|&d| if d == 0.0 { share } else { 0.0 })
            .collect());
    }
    let gamma: Vec<f64> = distances.iter().map(|&d| (-d / d1).exp()).collect();
    let total: f64 = gamma.iter().sum();
    Ok(gamma.into_iter().map(|g| g / total).collect())
}

/// Weighted-mean prediction of `target` at each query.
pub fn cross_map(model: &CrossMapModel, target: &[f64]) -> Result<Prediction> {
    let mut values = Vec::with_capacity(model.len());
    for q in 0..model.len() {
        let mut acc = 0.0;
        for (&t, &w) in model.neighbor_times(q).iter().zip(model.weights(q)) {
            let y = target.get(t).ok_or_else(|| {
                Error::Internal(format!(
                    "neighbour time index {t} outside target of length {}",
                    target.len()
                ))
            })?;
            acc += w * y;
        }
        values.push(acc);
    }
    Ok(Prediction {
        values,
        target_time_index: model.query_times.clone(),
    })
}

/// Leave-one-out cross-map model of the first `library_length` rows.
pub(crate) fn library_model(
    manifold: &DelayEmbedding,
    library_length: usize,
    k: usize,
    exclusion_radius: usize,
) -> Result<CrossMapModel> {
    let window = manifold.config().window();
    if library_length > manifold.len() {
        return Err(invalid!(
            "library length {library_length} exceeds the {} available manifold rows",
            manifold.len()
        ));
    }
    if library_length <= window + k {
        return Err(invalid!(
            "library length {library_length} must exceed embedding window + k = {}",
            window + k
        ));
    }
    let library = if library_length == manifold.len() {
        manifold.clone()
    } else {
        manifold.prefix(library_length)?
    };
    find_neighbors(&library, &library, k, exclusion_radius)
}

/// Cross-map skill `R²` of predicting `y` from the manifold of `x`, using
/// the first `library_length` manifold rows.
pub fn ccm_score(
    x: &TimeSeries,
    y: &TimeSeries,
    cfg: EmbeddingConfig,
    library_length: usize,
) -> Result<f64> {
    ccm_score_with(x, y, cfg, library_length, &CrossMapConfig::default())
}

pub fn ccm_score_with(
    x: &TimeSeries,
    y: &TimeSeries,
    cfg: EmbeddingConfig,
    library_length: usize,
    cm: &CrossMapConfig,
) -> Result<f64> {
    check_pair(x, y)?;
    let manifold = embed(x, cfg)?;
    let model = library_model(&manifold, library_length, cm.neighbors_for(&cfg), cm.exclusion_radius)?;
    skill(&model, y.samples())
}

pub(crate) fn skill(model: &CrossMapModel, target: &[f64]) -> Result<f64> {
    let pred = cross_map(model, target)?;
    pearson_r2(&pred.values, &pred.observed(target)?)
}

/// `ccm_score` at each library length.
pub fn convergence_curve(
    x: &TimeSeries,
    y: &TimeSeries,
    cfg: EmbeddingConfig,
    library_lengths: &[usize],
) -> Result<Vec<(usize, f64)>> {
    if library_lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid!("library lengths must be strictly increasing"));
    }
    check_pair(x, y)?;
    let manifold = embed(x, cfg)?;
    let k = cfg.default_neighbors();
    library_lengths
        .iter()
        .map(|&l| {
            let model = library_model(&manifold, l, k, 0)?;
            Ok((l, skill(&model, y.samples())?))
        })
        .collect()
}

pub(crate) fn check_pair(x: &TimeSeries, y: &TimeSeries) -> Result<()> {
    if x.len() != y.len() {
        return Err(invalid!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        ));
    }
    if x.sample_rate() != y.sample_rate() {
        return Err(invalid!(
            "sample rates differ: {} vs {}",
            x.sample_rate(),
            y.sample_rate()
        ));
    }
    Ok(())
}
