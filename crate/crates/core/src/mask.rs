//! Column-selection under-sampling masks with a fully-sampled center band.
//!
//! Masks keep `floor(width * center_fraction)` contiguous central columns and
//! add equispaced or uniformly random extra columns so the total kept count is
//! `round(width / acceleration)`. Only vertical-line (column) masks are
//! provided; row masks are obtained by transposing the input image.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Placement rule for the kept columns outside the center band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskPattern {
    Equispaced,
    Random,
}

/// Boolean column-selection pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    width: usize,
    keep: Vec<bool>,
    center_fraction: f64,
    pattern: MaskPattern,
    seed: u64,
}

/// Serializable mask parameters, as they appear in experiment configs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MaskSpec {
    pub acceleration: f64,
    pub center_fraction: f64,
    pub pattern: MaskPattern,
    pub seed: u64,
}

impl MaskSpec {
    pub fn build(&self, width: usize) -> Result<SamplingMask> {
        make_mask(width, self.acceleration, self.center_fraction, self.pattern, self.seed)
    }
}

impl SamplingMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn keep(&self) -> &[bool] {
        &self.keep
    }

    #[inline]
    pub fn keeps_column(&self, col: usize) -> bool {
        self.keep[col]
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    /// Identity mask keeping every column.
    pub fn full(width: usize) -> Self {
        Self {
            width,
            keep: vec![true; width],
            center_fraction: 1.0,
            pattern: MaskPattern::Equispaced,
            seed: 0,
        }
    }

    pub fn center_fraction(&self) -> f64 {
        self.center_fraction
    }
}

/// Indices of the `floor(width * center_fraction)`-column central band.
///
/// The band is centered on `width / 2`, matching the DC column of the
/// centered Fourier convention.
pub fn center_band(width: usize, center_fraction: f64) -> std::ops::Range<usize> {
    let count = ((width as f64) * center_fraction).floor() as usize;
    let count = count.min(width);
    let start = (width - count) / 2;
    start..start + count
}

/// Build an under-sampling mask.
pub fn make_mask(
    width: usize,
    acceleration: f64,
    center_fraction: f64,
    pattern: MaskPattern,
    seed: u64,
) -> Result<SamplingMask> {
    if width == 0 {
        return Err(Error::InvalidSpec("mask width must be positive".into()));
    }
    if !(acceleration >= 1.0) {
        return Err(Error::InvalidSpec(format!("acceleration must be >= 1, got {acceleration}")));
    }
    if !(center_fraction > 0.0 && center_fraction <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "center_fraction must be in (0, 1], got {center_fraction}"
        )));
    }
    if (width as f64) * center_fraction < 1.0 {
        return Err(Error::InvalidSpec(format!(
            "center band is empty: width {width} * center_fraction {center_fraction} < 1"
        )));
    }

    let target_total = ((width as f64) / acceleration).round() as usize;
    let target_total = target_total.clamp(1, width);
    let band = center_band(width, center_fraction);
    let center_count = band.len();
    if center_count > target_total {
        return Err(Error::InvalidSpec(format!(
            "center band ({center_count} columns) exceeds the kept-column budget ({target_total})"
        )));
    }

    let mut keep = vec![false; width];
    for col in band.clone() {
        keep[col] = true;
    }

    let complement: Vec<usize> = (0..width).filter(|c| !band.contains(c)).collect();
    let extra = target_total - center_count;
    match pattern {
        MaskPattern::Equispaced => {
            // Evenly spread `extra` picks over the complement; integer stride
            // arithmetic keeps the picks distinct.
            for i in 0..extra {
                let idx = i * complement.len() / extra.max(1);
                keep[complement[idx]] = true;
            }
        }
        MaskPattern::Random => {
            let mut rng = rng::seeded(seed);
            let mut pool = complement;
            pool.shuffle(&mut rng);
            for &col in pool.iter().take(extra) {
                keep[col] = true;
            }
        }
    }

    Ok(SamplingMask { width, keep, center_fraction, pattern, seed })
}
