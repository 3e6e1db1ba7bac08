//! Image containers: complex-valued images, real-valued images, and coil
//! sensitivity maps.
//!
//! All pixel data is stored row-major. Generated phantoms are square with a
//! power-of-two side so that multi-level wavelet transforms apply without
//! boundary special cases.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex-valued image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    height: usize,
    width: usize,
    values: Vec<Complex64>,
}

impl ComplexImage {
    pub fn zeros(height: usize, width: usize) -> Self {
        Self { height, width, values: vec![Complex64::new(0.0, 0.0); height * width] }
    }

    pub fn from_values(height: usize, width: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{}={} values, got {}",
                height,
                width,
                height * width,
                values.len()
            )));
        }
        Ok(Self { height, width, values })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.values[row * self.width + col] = v;
    }

    /// Pixel-wise magnitude image.
    pub fn magnitude(&self) -> RealImage {
        RealImage {
            height: self.height,
            width: self.width,
            values: self.values.iter().map(|v| v.norm()).collect(),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest pixel magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// A real-valued image, row-major. Reconstruction outputs are real magnitude
/// images of this type.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl RealImage {
    pub fn zeros(height: usize, width: usize) -> Self {
        Self { height, width, values: vec![0.0; height * width] }
    }

    pub fn from_values(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != height * width {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{}={} values, got {}",
                height,
                width,
                height * width,
                values.len()
            )));
        }
        Ok(Self { height, width, values })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.values[row * self.width + col] = v;
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Interpret as a complex image with zero imaginary part.
    pub fn to_complex(&self) -> ComplexImage {
        ComplexImage {
            height: self.height,
            width: self.width,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Per-coil complex sensitivity maps, normalized so that the pixel-wise sum
/// of squared magnitudes is one.
#[derive(Debug, Clone, PartialEq)]
pub struct CoilSensitivities {
    maps: Vec<ComplexImage>,
}

impl CoilSensitivities {
    pub fn new(maps: Vec<ComplexImage>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidSpec("sensitivities need at least one coil".into()));
        }
        let (h, w) = (maps[0].height(), maps[0].width());
        if maps.iter().any(|m| m.height() != h || m.width() != w) {
            return Err(Error::ShapeMismatch("coil maps must share one shape".into()));
        }
        Ok(Self { maps })
    }

    pub fn n_coils(&self) -> usize {
        self.maps.len()
    }

    pub fn height(&self) -> usize {
        self.maps[0].height()
    }

    pub fn width(&self) -> usize {
        self.maps[0].width()
    }

    pub fn map(&self, coil: usize) -> &ComplexImage {
        &self.maps[coil]
    }

    pub fn maps(&self) -> &[ComplexImage] {
        &self.maps
    }

    /// Largest pixel-wise deviation of the sum of squared magnitudes from 1.
    pub fn max_normalization_error(&self) -> f64 {
        let n = self.height() * self.width();
        (0..n)
            .map(|i| {
                let s: f64 = self.maps.iter().map(|m| m.values()[i].norm_sqr()).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_mismatch_rejected() {
        assert!(ComplexImage::from_values(2, 2, vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(RealImage::from_values(2, 3, vec![0.0; 5]).is_err());
    }

    #[test]
    fn magnitude_is_pixelwise_norm() {
        let img = ComplexImage::from_values(
            1,
            2,
            vec![Complex64::new(3.0, 4.0), Complex64::new(0.0, -2.0)],
        )
        .unwrap();
        let mag = img.magnitude();
        assert_eq!(mag.values(), &[5.0, 2.0]);
    }

    #[test]
    fn sensitivities_reject_mixed_shapes() {
        let a = ComplexImage::zeros(4, 4);
        let b = ComplexImage::zeros(2, 2);
        assert!(CoilSensitivities::new(vec![a, b]).is_err());
        assert!(CoilSensitivities::new(vec![]).is_err());
    }
}
