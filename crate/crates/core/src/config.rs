//! Run configuration: header grammar, segmentation lexicons, resolver
//! thresholds and output profile.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unsupported config version {0} (expected {CONFIG_VERSION})")]
    Version(u32),
    #[error("invalid pattern '{pattern}': {source}")]
    Pattern {
        pattern: String,
        source: regex::Error,
    },
    #[error("invalid value for {key}: {message}")]
    Value { key: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    pub headers: HeaderConfig,
    pub segmenter: SegmenterConfig,
    pub resolver: ResolverConfig,
    pub emitter: EmitterConfig,
    pub stats: StatsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeaderConfig {
    pub patterns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmenterConfig {
    pub opening_patterns: Vec<String>,
    pub aside_lexicon: Vec<String>,
    pub dash_variants: Vec<String>,
    pub max_dash_spacing: usize,
    pub max_speaker_len: usize,
    pub session_end_patterns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolverConfig {
    pub match_threshold: f64,
    pub president_threshold: f64,
    pub president_patterns: Vec<String>,
    pub president_suffixes: Vec<String>,
    pub orador_masculine: Vec<String>,
    pub orador_feminine: Vec<String>,
    pub masculine_articles: Vec<String>,
    pub feminine_articles: Vec<String>,
    pub office_titles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    pub indent: usize,
    pub xml_declaration: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SdConvention {
    #[default]
    Population,
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsConfig {
    pub sd: SdConvention,
}

impl Default for Config {
    fn default() -> Self {
        toml::from_str(DEFAULT_CONFIG).expect("bundled default config parses")
    }
}

/// Overlays `over` onto `base`, table by table. Arrays and scalars replace.
fn merge(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl Config {
    /// Parses an override document on top of the bundled defaults.
    pub fn from_toml_overrides(text: &str) -> Result<Self, ConfigError> {
        let mut base: toml::Value = toml::from_str(DEFAULT_CONFIG)?;
        let over: toml::Value = toml::from_str(text)?;
        merge(&mut base, over);
        let cfg: Config = base.try_into()?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_overrides(&text)
    }

    /// Rejects bad versions, thresholds outside `[0, 1]` and patterns that do
    /// not compile.
    pub fn check(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::Version(self.version));
        }
        for (key, t) in [
            ("resolver.match_threshold", self.resolver.match_threshold),
            ("resolver.president_threshold", self.resolver.president_threshold),
        ] {
            if !(0.0..=1.0).contains(&t) {
                return Err(ConfigError::Value {
                    key,
                    message: format!("{t} is outside [0, 1]"),
                });
            }
        }
        if self.segmenter.dash_variants.iter().any(|d| d.is_empty()) {
            return Err(ConfigError::Value {
                key: "segmenter.dash_variants",
                message: "empty dash".into(),
            });
        }
        let patterns = self
            .headers
            .patterns
            .iter()
            .chain(&self.segmenter.opening_patterns)
            .chain(&self.segmenter.session_end_patterns);
        for p in patterns {
            regex::Regex::new(p).map_err(|source| ConfigError::Pattern {
                pattern: p.clone(),
                source,
            })?;
        }
        Ok(())
    }

    /// Stable digest of the whole configuration.
    pub fn digest(&self) -> String {
        digest_json(self)
    }
}

/// Hex SHA-256 of a value's JSON serialization. Struct fields serialize in
/// declaration order, so equal values give equal digests.
pub fn digest_json<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config values serialize");
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_check() {
        let cfg = Config::default();
        cfg.check().unwrap();
        assert_eq!(cfg.resolver.match_threshold, 0.85);
        assert_eq!(cfg.resolver.president_threshold, 0.90);
        assert_eq!(cfg.segmenter.max_speaker_len, 120);
        assert_eq!(cfg.emitter.indent, 4);
    }

    #[test]
    fn overrides_replace_only_named_keys() {
        let cfg = Config::from_toml_overrides("[resolver]\nmatch_threshold = 0.9\n").unwrap();
        assert_eq!(cfg.resolver.match_threshold, 0.9);
        assert_eq!(cfg.resolver.president_threshold, 0.90);
        assert_ne!(cfg.digest(), Config::default().digest());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            Config::from_toml_overrides("version = 2"),
            Err(ConfigError::Version(2))
        ));
        assert!(Config::from_toml_overrides("[resolver]\nmatch_threshold = 1.5").is_err());
        assert!(Config::from_toml_overrides("[headers]\npatterns = ['(']").is_err());
        assert!(Config::from_toml_overrides("[resolver]\nbogus = 1").is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(Config::default().digest(), Config::default().digest());
    }
}
