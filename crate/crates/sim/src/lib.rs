//! Seeded simulators for the benchmark systems used to exercise
//! cross-mapping coherence: coupled logistic maps, coupled Lorenz systems,
//! noisy Kuramoto oscillators and a configurable Wilson-Cowan rate model.
//!
//! Every simulator is bit-deterministic for a given configuration and seed.

mod error;

pub mod kuramoto;
pub mod logistic;
pub mod lorenz;
pub mod presets;
pub mod wilson_cowan;

pub use error::{Result, SimError};
pub use kuramoto::{simulate_kuramoto, CouplingSign, KuramotoConfig, KuramotoOutput};
pub use logistic::{mirror, simulate_logistic, LogisticMapConfig};
pub use lorenz::{simulate_lorenz, LorenzConfig, LorenzParams};
pub use presets::{simulate_preset, Preset, Simulated};
pub use wilson_cowan::{
    simulate_wilson_cowan, transduction, Connection, Population, Signal, SignalTerm,
    WilsonCowanConfig,
};
