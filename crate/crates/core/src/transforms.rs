//! Orthonormal sparsifying transforms: multi-level 2D wavelets (Haar and
//! Daubechies-4 with periodic boundaries), orthonormal 2D DCT-II, and the
//! centered unitary 2D Fourier transform.
//!
//! Real transforms act on real and imaginary parts independently; the
//! Fourier variant acts on the complex image directly. Every variant is
//! exactly orthonormal, so analysis preserves the l2 norm and synthesis is
//! the exact inverse.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{fft2_centered, ifft2_centered};
use crate::image::ComplexImage;

/// Which orthonormal basis to expand in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    #[serde(rename = "wavelet-haar")]
    WaveletHaar,
    #[serde(rename = "wavelet-db4")]
    WaveletDb4,
    #[serde(rename = "dct")]
    Dct,
    #[serde(rename = "fourier")]
    Fourier,
}

/// Basis plus wavelet decomposition depth. `levels` is ignored for DCT and
/// Fourier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_levels() -> usize {
    4
}

impl TransformSpec {
    pub fn haar(levels: usize) -> Self {
        Self { kind: TransformKind::WaveletHaar, levels }
    }

    pub fn db4(levels: usize) -> Self {
        Self { kind: TransformKind::WaveletDb4, levels }
    }

    pub fn dct() -> Self {
        Self { kind: TransformKind::Dct, levels: 1 }
    }

    pub fn fourier() -> Self {
        Self { kind: TransformKind::Fourier, levels: 1 }
    }

    pub fn id(&self) -> String {
        match self.kind {
            TransformKind::WaveletHaar => format!("wavelet-haar-{}", self.levels),
            TransformKind::WaveletDb4 => format!("wavelet-db4-{}", self.levels),
            TransformKind::Dct => "dct".into(),
            TransformKind::Fourier => "fourier".into(),
        }
    }
}

const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

fn db4_lowpass() -> [f64; 4] {
    let s3 = 3.0f64.sqrt();
    let norm = 4.0 * 2.0f64.sqrt();
    [(1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm, (1.0 - s3) / norm]
}

/// Quadrature mirror of the lowpass filter: g[k] = (-1)^k h[L-1-k].
fn highpass(h: &[f64]) -> Vec<f64> {
    h.iter()
        .rev()
        .enumerate()
        .map(|(k, &v)| if k % 2 == 0 { v } else { -v })
        .collect()
}

/// One periodic analysis step: x (length n, even) -> [approx | detail].
fn dwt_step(x: &mut [f64], h: &[f64], g: &[f64], scratch: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    for i in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (k, (&hk, &gk)) in h.iter().zip(g).enumerate() {
            let v = x[(2 * i + k) % n];
            a += hk * v;
            d += gk * v;
        }
        scratch[i] = a;
        scratch[half + i] = d;
    }
    x.copy_from_slice(&scratch[..n]);
}

/// Inverse of [`dwt_step`].
fn idwt_step(x: &mut [f64], h: &[f64], g: &[f64], scratch: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    scratch[..n].fill(0.0);
    for i in 0..half {
        let a = x[i];
        let d = x[half + i];
        for (k, (&hk, &gk)) in h.iter().zip(g).enumerate() {
            scratch[(2 * i + k) % n] += hk * a + gk * d;
        }
    }
    x.copy_from_slice(&scratch[..n]);
}

fn wavelet_validate(n: usize, levels: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(Error::InvalidSpec(format!("wavelet needs power-of-two size, got {n}")));
    }
    let max_levels = n.trailing_zeros() as usize;
    if levels < 1 || levels > max_levels {
        return Err(Error::InvalidSpec(format!(
            "levels must be in 1..={max_levels} for size {n}, got {levels}"
        )));
    }
    Ok(())
}

/// Multi-level separable 2D DWT on one real channel, in place.
fn wavelet2_forward(data: &mut [f64], n: usize, levels: usize, h: &[f64], g: &[f64]) {
    let mut scratch = vec![0.0; n];
    let mut row = vec![0.0; n];
    let mut block = n;
    for _ in 0..levels {
        // rows of the active block
        for r in 0..block {
            row[..block].copy_from_slice(&data[r * n..r * n + block]);
            dwt_step(&mut row[..block], h, g, &mut scratch);
            data[r * n..r * n + block].copy_from_slice(&row[..block]);
        }
        // columns of the active block
        for c in 0..block {
            for r in 0..block {
                row[r] = data[r * n + c];
            }
            dwt_step(&mut row[..block], h, g, &mut scratch);
            for r in 0..block {
                data[r * n + c] = row[r];
            }
        }
        block /= 2;
    }
}

fn wavelet2_inverse(data: &mut [f64], n: usize, levels: usize, h: &[f64], g: &[f64]) {
    let mut scratch = vec![0.0; n];
    let mut row = vec![0.0; n];
    let mut block = n >> (levels - 1);
    for _ in 0..levels {
        for c in 0..block {
            for r in 0..block {
                row[r] = data[r * n + c];
            }
            idwt_step(&mut row[..block], h, g, &mut scratch);
            for r in 0..block {
                data[r * n + c] = row[r];
            }
        }
        for r in 0..block {
            row[..block].copy_from_slice(&data[r * n..r * n + block]);
            idwt_step(&mut row[..block], h, g, &mut scratch);
            data[r * n..r * n + block].copy_from_slice(&row[..block]);
        }
        block *= 2;
    }
}

/// Orthonormal 1D DCT-II (forward) of `x` into `out`.
fn dct2_1d(x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let nf = n as f64;
    for (k, o) in out.iter_mut().enumerate() {
        let scale = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        let mut acc = 0.0;
        for (i, &v) in x.iter().enumerate() {
            acc += v * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * k as f64 / (2.0 * nf)).cos();
        }
        *o = scale * acc;
    }
}

/// Orthonormal 1D DCT-III, the inverse of [`dct2_1d`].
fn dct3_1d(x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let nf = n as f64;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = (1.0 / nf).sqrt() * x[0];
        for (k, &v) in x.iter().enumerate().skip(1) {
            acc += (2.0 / nf).sqrt()
                * v
                * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * k as f64 / (2.0 * nf)).cos();
        }
        *o = acc;
    }
}

fn dct2_2d(data: &mut [f64], h: usize, w: usize, inverse: bool) {
    let mut buf_in = vec![0.0; w.max(h)];
    let mut buf_out = vec![0.0; w.max(h)];
    for r in 0..h {
        buf_in[..w].copy_from_slice(&data[r * w..(r + 1) * w]);
        if inverse {
            dct3_1d(&buf_in[..w], &mut buf_out[..w]);
        } else {
            dct2_1d(&buf_in[..w], &mut buf_out[..w]);
        }
        data[r * w..(r + 1) * w].copy_from_slice(&buf_out[..w]);
    }
    for c in 0..w {
        for r in 0..h {
            buf_in[r] = data[r * w + c];
        }
        if inverse {
            dct3_1d(&buf_in[..h], &mut buf_out[..h]);
        } else {
            dct2_1d(&buf_in[..h], &mut buf_out[..h]);
        }
        for r in 0..h {
            data[r * w + c] = buf_out[r];
        }
    }
}

fn split_channels(x: &ComplexImage) -> (Vec<f64>, Vec<f64>) {
    let re = x.values().iter().map(|v| v.re).collect();
    let im = x.values().iter().map(|v| v.im).collect();
    (re, im)
}

fn join_channels(h: usize, w: usize, re: Vec<f64>, im: Vec<f64>) -> ComplexImage {
    let values = re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)).collect();
    ComplexImage::from_values(h, w, values).expect("channel lengths match")
}

fn square_side(x: &ComplexImage) -> Result<usize> {
    if x.height() != x.width() {
        return Err(Error::ShapeMismatch(format!(
            "transforms require square images, got {}x{}",
            x.height(),
            x.width()
        )));
    }
    Ok(x.height())
}

/// Expand `x` in the chosen basis. The coefficient image has the same element
/// count as the input and `||analyze(x)|| = ||x||`.
pub fn analyze(x: &ComplexImage, spec: &TransformSpec) -> Result<ComplexImage> {
    match spec.kind {
        TransformKind::Fourier => fft2_centered(x),
        TransformKind::Dct => {
            let n = square_side(x)?;
            let (mut re, mut im) = split_channels(x);
            dct2_2d(&mut re, n, n, false);
            dct2_2d(&mut im, n, n, false);
            Ok(join_channels(n, n, re, im))
        }
        TransformKind::WaveletHaar | TransformKind::WaveletDb4 => {
            let n = square_side(x)?;
            wavelet_validate(n, spec.levels)?;
            let h: Vec<f64> = match spec.kind {
                TransformKind::WaveletHaar => HAAR.to_vec(),
                _ => db4_lowpass().to_vec(),
            };
            let g = highpass(&h);
            let (mut re, mut im) = split_channels(x);
            wavelet2_forward(&mut re, n, spec.levels, &h, &g);
            wavelet2_forward(&mut im, n, spec.levels, &h, &g);
            Ok(join_channels(n, n, re, im))
        }
    }
}

/// Exact inverse of [`analyze`].
pub fn synthesize(coeffs: &ComplexImage, spec: &TransformSpec) -> Result<ComplexImage> {
    match spec.kind {
        TransformKind::Fourier => ifft2_centered(coeffs),
        TransformKind::Dct => {
            let n = square_side(coeffs)?;
            let (mut re, mut im) = split_channels(coeffs);
            dct2_2d(&mut re, n, n, true);
            dct2_2d(&mut im, n, n, true);
            Ok(join_channels(n, n, re, im))
        }
        TransformKind::WaveletHaar | TransformKind::WaveletDb4 => {
            let n = square_side(coeffs)?;
            wavelet_validate(n, spec.levels)?;
            let h: Vec<f64> = match spec.kind {
                TransformKind::WaveletHaar => HAAR.to_vec(),
                _ => db4_lowpass().to_vec(),
            };
            let g = highpass(&h);
            let (mut re, mut im) = split_channels(coeffs);
            wavelet2_inverse(&mut re, n, spec.levels, &h, &g);
            wavelet2_inverse(&mut im, n, spec.levels, &h, &g);
            Ok(join_channels(n, n, re, im))
        }
    }
}

/// Complex soft-thresholding, the proximal operator of `tau * ||.||_1` with
/// magnitudes thresholded jointly (not per real/imaginary component).
pub fn soft_threshold(coeffs: &ComplexImage, tau: f64) -> Result<ComplexImage> {
    if tau < 0.0 || tau.is_nan() {
        return Err(Error::InvalidSpec(format!("threshold must be >= 0, got {tau}")));
    }
    let mut out = coeffs.clone();
    for v in out.values_mut() {
        let mag = v.norm();
        *v = if mag <= tau { Complex64::new(0.0, 0.0) } else { *v * ((mag - tau) / mag) };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    fn random_image(n: usize, seed: u64) -> ComplexImage {
        let mut r = rng::seeded(seed);
        let values = (0..n * n).map(|_| rng::complex_normal(&mut r)).collect();
        ComplexImage::from_values(n, n, values).unwrap()
    }

    fn all_specs(n: usize) -> Vec<TransformSpec> {
        vec![
            TransformSpec::haar(n.trailing_zeros() as usize),
            TransformSpec::db4(2),
            TransformSpec::dct(),
            TransformSpec::fourier(),
        ]
    }

    fn max_abs_diff(a: &ComplexImage, b: &ComplexImage) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn perfect_reconstruction_all_bases() {
        let x = random_image(16, 1);
        for spec in all_specs(16) {
            let c = analyze(&x, &spec).unwrap();
            let back = synthesize(&c, &spec).unwrap();
            assert!(max_abs_diff(&x, &back) < 1e-10, "{:?}", spec.kind);
            let fwd = analyze(&back, &spec).unwrap();
            assert!(max_abs_diff(&c, &fwd) < 1e-10, "{:?}", spec.kind);
        }
    }

    #[test]
    fn parseval_all_bases() {
        let x = random_image(16, 2);
        for spec in all_specs(16) {
            let c = analyze(&x, &spec).unwrap();
            assert!((c.norm_l2() - x.norm_l2()).abs() < 1e-10, "{:?}", spec.kind);
        }
    }

    #[test]
    fn constant_image_haar_concentrates() {
        let n = 16;
        let x =
            ComplexImage::from_values(n, n, vec![Complex64::new(3.0, 0.0); n * n]).unwrap();
        let spec = TransformSpec::haar(4); // full depth for n = 16
        let c = analyze(&x, &spec).unwrap();
        // single coarsest scaling coefficient at (0, 0)
        assert!((c.at(0, 0).re - 3.0 * n as f64).abs() < 1e-10);
        let off: f64 = c
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 0)
            .map(|(_, v)| v.norm())
            .sum();
        assert!(off < 1e-10);
    }

    #[test]
    fn unit_coefficient_gives_unit_norm_image() {
        let n = 16;
        for spec in all_specs(n) {
            let mut c = ComplexImage::zeros(n, n);
            c.set(3, 5, Complex64::new(1.0, 0.0));
            let img = synthesize(&c, &spec).unwrap();
            assert!((img.norm_l2() - 1.0).abs() < 1e-10, "{:?}", spec.kind);
        }
    }

    #[test]
    fn synthesize_zero_is_zero() {
        let c = ComplexImage::zeros(8, 8);
        for spec in all_specs(8) {
            let img = synthesize(&c, &spec).unwrap();
            assert_eq!(img.norm_l2(), 0.0, "{:?}", spec.kind);
        }
    }

    #[test]
    fn levels_out_of_range_rejected() {
        let x = random_image(8, 3);
        assert!(analyze(&x, &TransformSpec::haar(0)).is_err());
        assert!(analyze(&x, &TransformSpec::haar(4)).is_err()); // log2(8) = 3
        assert!(analyze(&x, &TransformSpec::haar(3)).is_ok());
    }

    #[test]
    fn soft_threshold_identity_and_kill() {
        let x = random_image(8, 4);
        let same = soft_threshold(&x, 0.0).unwrap();
        assert_eq!(x, same);
        let big = soft_threshold(&x, 1e9).unwrap();
        assert_eq!(big.norm_l2(), 0.0);
        assert!(soft_threshold(&x, -1.0).is_err());
    }

    #[test]
    fn soft_threshold_closed_form() {
        let mut c = ComplexImage::zeros(1, 1);
        c.set(0, 0, Complex64::new(3.0, 4.0));
        let out = soft_threshold(&c, 2.5).unwrap();
        // (3+4i) * (5 - 2.5) / 5 = 1.5 + 2i
        assert!((out.at(0, 0) - Complex64::new(1.5, 2.0)).norm() < 1e-12);
    }

    /// Brute-force prox oracle: ternary search of 0.5*(c-u)^2 + tau*|u| on a
    /// bracketing interval, independent of the closed form.
    fn prox_by_search(c: f64, tau: f64) -> f64 {
        let objective = |u: f64| 0.5 * (c - u) * (c - u) + tau * u.abs();
        let mut lo = -c.abs() - tau - 1.0;
        let mut hi = c.abs() + tau + 1.0;
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if objective(m1) < objective(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn soft_threshold_matches_scalar_prox_search() {
        let mut r = rng::seeded(5);
        for _ in 0..50 {
            let c = rng::normal(&mut r) * 3.0;
            let tau = rng::normal(&mut r).abs();
            let mut img = ComplexImage::zeros(1, 1);
            img.set(0, 0, Complex64::new(c, 0.0));
            let fast = soft_threshold(&img, tau).unwrap().at(0, 0).re;
            let brute = prox_by_search(c, tau);
            assert!((fast - brute).abs() < 1e-9, "c={c} tau={tau} fast={fast} brute={brute}");
        }
    }

    proptest! {
        #[test]
        fn parseval_property(seed in 0u64..500) {
            let x = random_image(8, seed);
            for spec in all_specs(8) {
                let c = analyze(&x, &spec).unwrap();
                prop_assert!((c.norm_l2() - x.norm_l2()).abs() < 1e-10);
                let back = synthesize(&c, &spec).unwrap();
                prop_assert!(max_abs_diff(&x, &back) < 1e-10);
            }
        }
    }
}
