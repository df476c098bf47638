//! Run-wide configuration shared by the raster, feature, and solver stages.
//!
//! Every tunable of the pipeline lives in one plain struct so that a batch
//! run can be described (and reproduced) by a single value. `RunConfig` is
//! deliberately `Clone` + cheap: per-problem work never mutates it.

use std::collections::BTreeMap;

use thiserror::Error;

/// Which intensity counts as foreground when binarizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Dark strokes on light paper: intensities are inverted before
    /// thresholding, so low values become foreground. The default.
    Ink,
    /// Light strokes on dark ground: high values are foreground.
    Bright,
}

/// Statistic used as the row center when z-scoring a feature row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    /// Arithmetic mean. Guarantees |z| ≤ √5 for a row of six values.
    Mean,
    /// Median (mean of the 3rd and 4th order statistics for six values).
    /// More robust to a single wild panel; the √5 bound no longer applies.
    Median,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("z threshold must be > 0, got {0}")]
    NonPositiveZThreshold(String),
    #[error("rounding places must be in 0..=4, got {0}")]
    RoundingOutOfRange(u8),
    #[error("parallelism must be >= 1")]
    ZeroParallelism,
}

/// All pipeline tunables with their defaults.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    /// Binarization threshold; a pixel is foreground when its (polarity
    /// adjusted) intensity is strictly greater than this.
    pub binarize_threshold: u8,
    /// Foreground polarity for binarization and gutter detection.
    pub polarity: Polarity,
    /// |z| a feature row must reach before the feature is allowed to vote.
    pub z_threshold: f64,
    /// Row center statistic for z-scoring.
    pub center: Center,
    /// Decimal places kept for normalized point-cloud coordinates.
    pub cloud_rounding: u8,
    /// Decimal places kept for feature values before z-scoring.
    pub feature_rounding: u8,
    /// Blank the caption region of the first panel before solving.
    pub crop_caption: bool,
    /// Fall back to exact thirds/halves when gutter detection fails.
    pub gutter_fallback: bool,
    /// Register the optional signed-handedness feature (off by default: the
    /// stock bank is deliberately blind to mirror flips of unrotated shapes).
    pub enable_chirality_feature: bool,
    /// Per-feature overrides of the built-in complexity ranks.
    pub complexity_overrides: BTreeMap<String, u32>,
    /// Worker threads for batch runs; results are identical for any value.
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            binarize_threshold: 128,
            polarity: Polarity::Ink,
            z_threshold: 2.0,
            center: Center::Mean,
            cloud_rounding: 1,
            feature_rounding: 2,
            crop_caption: false,
            gutter_fallback: true,
            enable_chirality_feature: false,
            complexity_overrides: BTreeMap::new(),
            parallelism: 1,
        }
    }
}

impl RunConfig {
    /// Checks the numeric invariants; call after building one from CLI args.
    pub fn validate(&self) -> Result<(), ConfigError> {
        // NaN must fail here too, so the check is not `<= 0.0`.
        if self.z_threshold.is_nan() || self.z_threshold <= 0.0 {
            return Err(ConfigError::NonPositiveZThreshold(self.z_threshold.to_string()));
        }
        if self.cloud_rounding > 4 {
            return Err(ConfigError::RoundingOutOfRange(self.cloud_rounding));
        }
        if self.feature_rounding > 4 {
            return Err(ConfigError::RoundingOutOfRange(self.feature_rounding));
        }
        if self.parallelism == 0 {
            return Err(ConfigError::ZeroParallelism);
        }
        Ok(())
    }
}

/// Rounds `v` to `places` decimal places (half away from zero).
///
/// This is the "aggressive rounding" applied to normalized coordinates and
/// feature scalars; it is what makes panels that differ only by incidental
/// pose produce bit-equal downstream values.
pub fn round_places(v: f64, places: u8) -> f64 {
    let scale = 10f64.powi(i32::from(places));
    (v * scale).round() / scale
}
