//! Analysis configuration shared by every subcommand.

use std::path::Path;

use cmc::{causal_limit, CrossMapConfig, EmbeddingConfig, ShiftRange, SpectralConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub embedding: EmbeddingConfig,
    pub spectral: SpectralConfig,
    pub shift_range: ShiftRange,
    /// Library lengths for the convergence curve; empty skips it.
    pub library_lengths: Vec<usize>,
    /// Read causal strength from per-band min-max normalized surfaces.
    pub normalization: bool,
    pub realizations: usize,
    pub seed: u64,
    /// Shifts below this count as causal. Defaults to `E * shift step`.
    pub causal_limit: Option<i64>,
    pub exclusion_radius: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            embedding: EmbeddingConfig {
                dimension: 2,
                delay: 1,
            },
            spectral: SpectralConfig::default(),
            shift_range: ShiftRange::symmetric(20),
            library_lengths: Vec::new(),
            normalization: false,
            realizations: 1,
            seed: 0,
            causal_limit: None,
            exclusion_radius: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Data(format!("analysis config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.embedding.validate()?;
        self.spectral.validate()?;
        self.shift_range.validate()?;
        if self.realizations == 0 {
            return Err(CliError::Usage("realizations must be positive".into()));
        }
        if self.library_lengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Usage("library_lengths must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn limit(&self) -> i64 {
        self.causal_limit
            .unwrap_or_else(|| causal_limit(self.embedding.dimension, self.shift_range.step))
    }

    pub fn cross_map(&self) -> CrossMapConfig {
        CrossMapConfig {
            neighbors: None,
            exclusion_radius: self.exclusion_radius,
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_fills_defaults() {
        let cfg = AnalysisConfig::from_toml_str(
            "normalization = true\n[embedding]\ndimension = 5\ndelay = 1\n[spectral]\nsegment_length = 64\n",
        )
        .unwrap();
        assert_eq!(cfg.embedding.dimension, 5);
        assert_eq!(cfg.spectral.segment_length, Some(64));
        assert_eq!(cfg.spectral.overlap_fraction, 0.5);
        assert_eq!(cfg.shift_range, ShiftRange::symmetric(20));
        assert_eq!(cfg.limit(), 5);
        assert!(cfg.normalization);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(AnalysisConfig::from_toml_str("bogus = 1").is_err());
        assert!(AnalysisConfig::from_toml_str("[embedding]\ndimension = 0\ndelay = 1").is_err());
        assert!(AnalysisConfig::from_toml_str("library_lengths = [10, 5]").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = AnalysisConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
