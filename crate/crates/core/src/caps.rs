//! Resource caps for the exhaustive constructions.
//!
//! Every operation whose cost explodes with its size parameter checks an
//! explicit cap and fails fast instead of thrashing. The defaults cover the
//! full acceptance workload; the `BU_LAB_CAPS` environment variable (read by
//! [`Caps::from_env`]) raises them for larger experiments, e.g.
//! `BU_LAB_CAPS="b_dim=6,q_dim=5"`.

use thiserror::Error;

/// Upper limits on the size parameters of the expensive constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Largest dimension for the first subdivision complex.
    pub b_dim: usize,
    /// Largest dimension for the twice-subdivided complex and its covers.
    pub q_dim: usize,
    /// Largest ground-set size for the exhaustive coloring search.
    pub kneser_search_n: u32,
    /// Largest parameter for the built-in concept classes (domain size 2^m).
    pub class_m: u32,
    /// Largest ground-set size accepted anywhere (elements fit in a 64-bit
    /// mask with room to spare).
    pub ground_n: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            b_dim: 5,
            q_dim: 4,
            kneser_search_n: 5,
            class_m: 10,
            ground_n: 62,
        }
    }
}

/// Errors from parsing cap overrides.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CapsError {
    #[error("malformed cap override {0:?}: expected key=value")]
    Malformed(String),
    #[error("unknown cap key {0:?}")]
    UnknownKey(String),
    #[error("invalid value for cap {key}: {value:?}")]
    BadValue { key: String, value: String },
}

impl Caps {
    /// Defaults overridden by the comma-separated `key=value` list in the
    /// `BU_LAB_CAPS` environment variable, if set.
    pub fn from_env() -> Result<Caps, CapsError> {
        match std::env::var("BU_LAB_CAPS") {
            Ok(s) => parse_overrides(&s),
            Err(_) => Ok(Caps::default()),
        }
    }
}

/// Parse a comma-separated `key=value` override list on top of the defaults.
pub fn parse_overrides(s: &str) -> Result<Caps, CapsError> {
    let mut caps = Caps::default();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CapsError::Malformed(part.to_string()))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = || CapsError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "b_dim" => caps.b_dim = value.parse().map_err(|_| bad())?,
            "q_dim" => caps.q_dim = value.parse().map_err(|_| bad())?,
            "kneser_search_n" => caps.kneser_search_n = value.parse().map_err(|_| bad())?,
            "class_m" => caps.class_m = value.parse().map_err(|_| bad())?,
            "ground_n" => caps.ground_n = value.parse().map_err(|_| bad())?,
            _ => return Err(CapsError::UnknownKey(key.to_string())),
        }
    }
    Ok(caps)
}
