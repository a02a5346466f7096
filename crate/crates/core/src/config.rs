use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{ForgeError, Result};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Size guards and seeding shared by every computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub materialization_cap: u64,
    pub enumeration_cap: u64,
    pub oracle_cap: u64,
    pub seed: u64,
    /// Size of the cyclic coordinate acted on by s. Descriptive only: the
    /// abstract voltage group does not depend on it.
    pub ell: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            materialization_cap: 1 << 24,
            enumeration_cap: 10_000_000,
            oracle_cap: 4096,
            seed: DEFAULT_SEED,
            ell: 64,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ForgeError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Applies `FORGE_SEED` if set.
    pub fn with_env(mut self) -> Result<Self> {
        if let Ok(v) = std::env::var("FORGE_SEED") {
            self.seed = parse_seed(&v)?;
        }
        Ok(self)
    }
}

pub fn parse_seed(v: &str) -> Result<u64> {
    let v = v.trim();
    let parsed = if let Some(hex) = v.strip_prefix("0x") {
        u64::from_str_radix(hex, 16)
    } else {
        v.parse()
    };
    parsed.map_err(|_| ForgeError::Config(format!("bad seed {v:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c = Config::from_toml_str("oracle_cap = 100\nseed = 7\n").unwrap();
        assert_eq!(c.oracle_cap, 100);
        assert_eq!(c.seed, 7);
        assert_eq!(c.enumeration_cap, Config::default().enumeration_cap);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(Config::from_toml_str("oracle_capp = 1").is_err());
    }

    #[test]
    fn hex_seed() {
        assert_eq!(parse_seed("0x10").unwrap(), 16);
    }
}
