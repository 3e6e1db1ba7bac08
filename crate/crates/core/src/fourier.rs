//! The linear acquisition operator and its pieces: centered unitary 2D DFT,
//! coil-sensitivity weighting, column masking, the Hermitian adjoint, RSS
//! coil combination, measurement noise, and the low-frequency energy
//! diagnostic.
//!
//! The DFT convention is centered (DC at `width / 2`) and unitary (scale
//! `1/sqrt(H*W)` in both directions), so the operator norm of the full
//! acquisition map is at most 1 under normalized sensitivities.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::image::{CoilSensitivities, ComplexImage, RealImage};
use crate::mask::{center_band, SamplingMask};
use crate::rng;

/// Multi-coil frequency-domain measurement, coils outermost, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KSpaceVolume {
    n_coils: usize,
    height: usize,
    width: usize,
    values: Vec<Complex64>,
}

impl KSpaceVolume {
    pub fn zeros(n_coils: usize, height: usize, width: usize) -> Self {
        Self { n_coils, height, width, values: vec![Complex64::new(0.0, 0.0); n_coils * height * width] }
    }

    pub fn from_values(
        n_coils: usize,
        height: usize,
        width: usize,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != n_coils * height * width {
            return Err(Error::ShapeMismatch(format!(
                "expected {}*{}*{}={} values, got {}",
                n_coils,
                height,
                width,
                n_coils * height * width,
                values.len()
            )));
        }
        Ok(Self { n_coils, height, width, values })
    }

    pub fn n_coils(&self) -> usize {
        self.n_coils
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

    pub fn coil(&self, i: usize) -> &[Complex64] {
        let n = self.height * self.width;
        &self.values[i * n..(i + 1) * n]
    }

    pub fn coil_mut(&mut self, i: usize) -> &mut [Complex64] {
        let n = self.height * self.width;
        &mut self.values[i * n..(i + 1) * n]
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn same_shape(&self, other: &KSpaceVolume) -> bool {
        self.n_coils == other.n_coils && self.height == other.height && self.width == other.width
    }
}

fn is_power_of_two(n: usize) -> bool {
    n != 0 && (n & (n - 1)) == 0
}

/// In-place radix-2 FFT. Length must be a power of two. No normalization.
fn fft_inplace(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    debug_assert!(is_power_of_two(n));
    if n <= 1 {
        return;
    }

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let angle = sign * std::f64::consts::TAU / len as f64;
        let wlen = Complex64::new(angle.cos(), angle.sin());
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = data[start + k];
                let v = data[start + k + len / 2] * w;
                data[start + k] = u + v;
                data[start + k + len / 2] = u - v;
                w *= wlen;
            }
        }
        len <<= 1;
    }
}

/// Swap half-planes in both dimensions so DC moves between corner and center.
/// Self-inverse for the even (power-of-two) sizes used here.
fn shift2(img: &mut ComplexImage) {
    let (h, w) = (img.height(), img.width());
    let (hh, hw) = (h / 2, w / 2);
    let values = img.values_mut();
    for r in 0..hh {
        for c in 0..w {
            let r2 = r + hh;
            let c2 = (c + hw) % w;
            values.swap(r * w + c, r2 * w + c2);
        }
    }
}

fn fft2_dispatch(x: &ComplexImage, inverse: bool) -> Result<ComplexImage> {
    let (h, w) = (x.height(), x.width());
    if !is_power_of_two(h) || !is_power_of_two(w) {
        return Err(Error::InvalidSpec(format!("FFT requires power-of-two sides, got {h}x{w}")));
    }
    let mut out = x.clone();
    shift2(&mut out);
    {
        let values = out.values_mut();
        // rows
        for r in 0..h {
            fft_inplace(&mut values[r * w..(r + 1) * w], inverse);
        }
        // columns, via a scratch buffer
        let mut col = vec![Complex64::new(0.0, 0.0); h];
        for c in 0..w {
            for r in 0..h {
                col[r] = values[r * w + c];
            }
            fft_inplace(&mut col, inverse);
            for r in 0..h {
                values[r * w + c] = col[r];
            }
        }
        let scale = 1.0 / ((h * w) as f64).sqrt();
        for v in values.iter_mut() {
            *v *= scale;
        }
    }
    shift2(&mut out);
    Ok(out)
}

/// Centered, unitary 2D DFT.
pub fn fft2_centered(x: &ComplexImage) -> Result<ComplexImage> {
    fft2_dispatch(x, false)
}

/// Inverse of [`fft2_centered`]; also its Hermitian adjoint.
pub fn ifft2_centered(x: &ComplexImage) -> Result<ComplexImage> {
    fft2_dispatch(x, true)
}

/// Zero out the columns the mask drops. Idempotent.
pub fn apply_mask(y: &KSpaceVolume, mask: &SamplingMask) -> Result<KSpaceVolume> {
    if mask.width() != y.width() {
        return Err(Error::ShapeMismatch(format!(
            "mask width {} vs volume width {}",
            mask.width(),
            y.width()
        )));
    }
    let mut out = y.clone();
    let (h, w) = (y.height(), y.width());
    for i in 0..y.n_coils() {
        let coil = out.coil_mut(i);
        for r in 0..h {
            for c in 0..w {
                if !mask.keeps_column(c) {
                    coil[r * w + c] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    Ok(out)
}

fn check_shapes(x: &ComplexImage, sens: &CoilSensitivities, mask: &SamplingMask) -> Result<()> {
    if sens.height() != x.height() || sens.width() != x.width() {
        return Err(Error::ShapeMismatch(format!(
            "sensitivities {}x{} vs image {}x{}",
            sens.height(),
            sens.width(),
            x.height(),
            x.width()
        )));
    }
    if mask.width() != x.width() {
        return Err(Error::ShapeMismatch(format!(
            "mask width {} vs image width {}",
            mask.width(),
            x.width()
        )));
    }
    Ok(())
}

/// The acquisition operator: per coil, sensitivity-weight the image, take the
/// centered unitary DFT, and zero the dropped columns. Linear in `x`.
pub fn forward(
    x: &ComplexImage,
    sens: &CoilSensitivities,
    mask: &SamplingMask,
) -> Result<KSpaceVolume> {
    check_shapes(x, sens, mask)?;
    let (h, w) = (x.height(), x.width());
    let mut out = KSpaceVolume::zeros(sens.n_coils(), h, w);
    for i in 0..sens.n_coils() {
        let map = sens.map(i);
        let mut weighted = ComplexImage::zeros(h, w);
        for (dst, (xv, sv)) in
            weighted.values_mut().iter_mut().zip(x.values().iter().zip(map.values()))
        {
            *dst = xv * sv;
        }
        let spectrum = fft2_centered(&weighted)?;
        let coil = out.coil_mut(i);
        for r in 0..h {
            for c in 0..w {
                coil[r * w + c] = if mask.keeps_column(c) {
                    spectrum.at(r, c)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
        }
    }
    Ok(out)
}

/// Hermitian adjoint of [`forward`]: sum over coils of
/// `conj(S_i) * IDFT(mask * y_i)`.
pub fn adjoint(
    y: &KSpaceVolume,
    sens: &CoilSensitivities,
    mask: &SamplingMask,
) -> Result<ComplexImage> {
    if sens.n_coils() != y.n_coils() {
        return Err(Error::ShapeMismatch(format!(
            "sensitivities have {} coils, volume has {}",
            sens.n_coils(),
            y.n_coils()
        )));
    }
    if sens.height() != y.height() || sens.width() != y.width() || mask.width() != y.width() {
        return Err(Error::ShapeMismatch("adjoint operand shapes disagree".into()));
    }
    let (h, w) = (y.height(), y.width());
    let mut acc = ComplexImage::zeros(h, w);
    for i in 0..y.n_coils() {
        let coil = y.coil(i);
        let mut masked = ComplexImage::zeros(h, w);
        for r in 0..h {
            for c in 0..w {
                if mask.keeps_column(c) {
                    masked.set(r, c, coil[r * w + c]);
                }
            }
        }
        let img = ifft2_centered(&masked)?;
        let map = sens.map(i);
        for (dst, (iv, sv)) in
            acc.values_mut().iter_mut().zip(img.values().iter().zip(map.values()))
        {
            *dst += iv * sv.conj();
        }
    }
    Ok(acc)
}

/// Root-sum-of-squares coil combination: pixel-wise
/// `sqrt(sum_i |x_i|^2)`.
pub fn rss(coil_images: &[ComplexImage]) -> Result<RealImage> {
    let first = coil_images.first().ok_or_else(|| Error::InvalidSpec("rss of zero coils".into()))?;
    let (h, w) = (first.height(), first.width());
    if coil_images.iter().any(|im| im.height() != h || im.width() != w) {
        return Err(Error::ShapeMismatch("rss inputs must share one shape".into()));
    }
    let mut out = RealImage::zeros(h, w);
    for (idx, dst) in out.values_mut().iter_mut().enumerate() {
        let s: f64 = coil_images.iter().map(|im| im.values()[idx].norm_sqr()).sum();
        *dst = s.sqrt();
    }
    Ok(out)
}

/// Add i.i.d. complex Gaussian noise scaled so the expected signal-to-noise
/// ratio matches `snr_db`. `f64::INFINITY` means no noise.
pub fn add_noise(y: &KSpaceVolume, snr_db: f64, seed: u64) -> Result<KSpaceVolume> {
    if snr_db.is_nan() {
        return Err(Error::InvalidSpec("snr_db must not be NaN".into()));
    }
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(y.clone());
    }
    let m = y.values().len() as f64;
    let signal = y.norm_l2();
    // E ||noise||^2 = 2 sigma^2 m; match  signal^2 / 10^(snr/10)
    let sigma = signal / (2.0 * m * 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = rng::seeded(seed);
    let mut out = y.clone();
    for v in out.values_mut() {
        *v += rng::complex_normal(&mut rng) * sigma;
    }
    Ok(out)
}

/// Fraction of k-space energy (all coils) in the central column band.
pub fn low_frequency_proportion(y: &KSpaceVolume, center_fraction: f64) -> Result<f64> {
    if !(center_fraction > 0.0 && center_fraction <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "center_fraction must be in (0, 1], got {center_fraction}"
        )));
    }
    let band = center_band(y.width(), center_fraction);
    let (h, w) = (y.height(), y.width());
    let mut total = 0.0;
    let mut center = 0.0;
    for i in 0..y.n_coils() {
        let coil = y.coil(i);
        for r in 0..h {
            for c in 0..w {
                let e = coil[r * w + c].norm_sqr();
                total += e;
                if band.contains(&c) {
                    center += e;
                }
            }
        }
    }
    if total == 0.0 {
        return Err(Error::UndefinedRatio("zero total k-space energy".into()));
    }
    Ok(center / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::{make_mask, MaskPattern};
    use crate::phantom::{generate_phantom, generate_sensitivities, PhantomFamily, PhantomSpec};

    fn random_image(h: usize, w: usize, seed: u64) -> ComplexImage {
        let mut rng = rng::seeded(seed);
        let values = (0..h * w).map(|_| rng::complex_normal(&mut rng)).collect();
        ComplexImage::from_values(h, w, values).unwrap()
    }

    fn random_volume(nc: usize, h: usize, w: usize, seed: u64) -> KSpaceVolume {
        let mut rng = rng::seeded(seed);
        let values = (0..nc * h * w).map(|_| rng::complex_normal(&mut rng)).collect();
        KSpaceVolume::from_values(nc, h, w, values).unwrap()
    }

    fn dot_image(a: &ComplexImage, b: &ComplexImage) -> Complex64 {
        a.values().iter().zip(b.values()).map(|(x, y)| x.conj() * y).sum()
    }

    fn dot_volume(a: &KSpaceVolume, b: &KSpaceVolume) -> Complex64 {
        a.values().iter().zip(b.values()).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn fft_round_trip_and_parseval() {
        let x = random_image(16, 16, 3);
        let f = fft2_centered(&x).unwrap();
        let back = ifft2_centered(&f).unwrap();
        let err: f64 = x
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "round-trip error {err}");
        assert!((x.norm_l2() - f.norm_l2()).abs() < 1e-10);
    }

    #[test]
    fn constant_image_concentrates_at_dc() {
        let n = 8;
        let x = ComplexImage::from_values(n, n, vec![Complex64::new(1.0, 0.0); n * n]).unwrap();
        let f = fft2_centered(&x).unwrap();
        // DC sits at (n/2, n/2) in the centered convention
        assert!((f.at(n / 2, n / 2).re - n as f64).abs() < 1e-10);
        let off_dc: f64 = f
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != (n / 2) * n + n / 2)
            .map(|(_, v)| v.norm())
            .sum();
        assert!(off_dc < 1e-10);
    }

    #[test]
    fn fft_rejects_non_power_of_two() {
        let x = ComplexImage::zeros(6, 6);
        assert!(fft2_centered(&x).is_err());
    }

    #[test]
    fn forward_of_zero_is_zero() {
        let sens = generate_sensitivities(4, 16, 0).unwrap();
        let mask = make_mask(16, 4.0, 0.25, MaskPattern::Equispaced, 0).unwrap();
        let y = forward(&ComplexImage::zeros(16, 16), &sens, &mask).unwrap();
        assert!(y.norm_l2() == 0.0);
    }

    #[test]
    fn forward_is_homogeneous() {
        let sens = generate_sensitivities(3, 16, 1).unwrap();
        let mask = make_mask(16, 2.0, 0.25, MaskPattern::Random, 5).unwrap();
        let x = random_image(16, 16, 7);
        let alpha = Complex64::new(0.7, -1.3);
        let mut ax = x.clone();
        for v in ax.values_mut() {
            *v *= alpha;
        }
        let lhs = forward(&ax, &sens, &mask).unwrap();
        let mut rhs = forward(&x, &sens, &mask).unwrap();
        for v in rhs.values_mut() {
            *v *= alpha;
        }
        let err: f64 = lhs
            .values()
            .iter()
            .zip(rhs.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn adjoint_passes_dot_product_test() {
        let sens = generate_sensitivities(4, 16, 2).unwrap();
        let mask = make_mask(16, 4.0, 0.25, MaskPattern::Random, 3).unwrap();
        for trial in 0..20 {
            let x = random_image(16, 16, 100 + trial);
            let y = random_volume(4, 16, 16, 200 + trial);
            let ax = forward(&x, &sens, &mask).unwrap();
            let aty = adjoint(&y, &sens, &mask).unwrap();
            let lhs = dot_volume(&ax, &y);
            let rhs = dot_image(&x, &aty);
            let denom = ax.norm_l2() * y.norm_l2();
            assert!((lhs - rhs).norm() / denom <= 1e-6, "trial {trial}");
        }
    }

    #[test]
    fn full_mask_normalized_sens_inverts_exactly() {
        let n = 32;
        let spec = PhantomSpec::new(PhantomFamily::Ellipses, n, 11);
        let x = generate_phantom(&spec).unwrap();
        let sens = generate_sensitivities(4, n, 4).unwrap();
        let mask = SamplingMask::full(n);
        let y = forward(&x, &sens, &mask).unwrap();

        // adjoint inverts since A^H A = I under sum |S_i|^2 = 1
        let back = adjoint(&y, &sens, &mask).unwrap();
        let err: f64 = x
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "adjoint inversion error {err}");

        // rss of per-coil inverse DFTs recovers |x|
        let coils: Vec<ComplexImage> = (0..4)
            .map(|i| {
                let img = ComplexImage::from_values(n, n, y.coil(i).to_vec()).unwrap();
                ifft2_centered(&img).unwrap()
            })
            .collect();
        let combined = rss(&coils).unwrap();
        let mag = x.magnitude();
        let err: f64 = combined
            .values()
            .iter()
            .zip(mag.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "rss inversion error {err}");
    }

    #[test]
    fn masking_is_idempotent() {
        let mask = make_mask(16, 4.0, 0.25, MaskPattern::Random, 8).unwrap();
        let y = random_volume(2, 16, 16, 9);
        let once = apply_mask(&y, &mask).unwrap();
        let twice = apply_mask(&once, &mask).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rss_single_coil_is_magnitude() {
        let x = random_image(8, 8, 12);
        let out = rss(std::slice::from_ref(&x)).unwrap();
        let mag = x.magnitude();
        assert_eq!(out, mag);
    }

    #[test]
    fn rss_dominates_scaled_max() {
        let imgs: Vec<ComplexImage> = (0..3).map(|i| random_image(8, 8, 20 + i)).collect();
        let out = rss(&imgs).unwrap();
        let scale = 1.0 / (imgs.len() as f64).sqrt();
        for idx in 0..64 {
            let max_mag = imgs.iter().map(|im| im.values()[idx].norm()).fold(0.0, f64::max);
            assert!(out.values()[idx] >= max_mag * scale - 1e-12);
        }
    }

    #[test]
    fn rss_rejects_empty() {
        assert!(rss(&[]).is_err());
    }

    #[test]
    fn noise_infinite_snr_is_identity() {
        let y = random_volume(2, 16, 16, 30);
        let noisy = add_noise(&y, f64::INFINITY, 1).unwrap();
        assert_eq!(y, noisy);
    }

    #[test]
    fn noise_matches_requested_snr() {
        // 4 * 128 * 128 complex entries > 1e4, within 0.5 dB of 20
        let y = random_volume(4, 128, 128, 31);
        let noisy = add_noise(&y, 20.0, 2).unwrap();
        let mut diff = 0.0f64;
        for (a, b) in noisy.values().iter().zip(y.values()) {
            diff += (a - b).norm_sqr();
        }
        let measured = 20.0 * (y.norm_l2() / diff.sqrt()).log10();
        assert!((measured - 20.0).abs() < 0.5, "measured snr {measured}");
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let y = random_volume(2, 16, 16, 32);
        let a = add_noise(&y, 10.0, 77).unwrap();
        let b = add_noise(&y, 10.0, 77).unwrap();
        assert_eq!(a, b);
        let c = add_noise(&y, 10.0, 78).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn low_frequency_proportion_edges() {
        let n = 16;
        let x = ComplexImage::from_values(n, n, vec![Complex64::new(2.0, 0.0); n * n]).unwrap();
        let sens = generate_sensitivities(1, n, 0).unwrap();
        let y = forward(&x, &sens, &SamplingMask::full(n)).unwrap();
        // constant image: all energy at the DC column
        let p = low_frequency_proportion(&y, 0.1).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        // full band trivially captures everything
        let q = low_frequency_proportion(&y, 1.0).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
        // zero volume has no defined ratio
        let z = KSpaceVolume::zeros(1, n, n);
        assert!(low_frequency_proportion(&z, 0.1).is_err());
    }
}
