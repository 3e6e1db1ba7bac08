//! Synthetic ground-truth generation: phantom families standing in for
//! anatomy distributions, and smooth normalized coil sensitivity profiles.
//!
//! Families:
//! - `ellipses`: piecewise-constant overlapping ellipses,
//! - `smooth`:   a low-pass field built from wide Gaussian bumps,
//! - `textured`: the smooth field modulated by band-limited sinusoids,
//!   which shifts energy toward high spatial frequencies.
//!
//! A phantom can additionally be projected to exact sparsity in a chosen
//! transform basis by keeping the largest-magnitude coefficients.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{CoilSensitivities, ComplexImage};
use crate::rng;
use crate::transforms::{analyze, synthesize, TransformSpec};

/// Phantom family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomFamily {
    Ellipses,
    Textured,
    Smooth,
}

impl PhantomFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PhantomFamily::Ellipses => "ellipses",
            PhantomFamily::Textured => "textured",
            PhantomFamily::Smooth => "smooth",
        }
    }
}

/// Deterministic phantom description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhantomSpec {
    pub family: PhantomFamily,
    pub size: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity_basis: Option<TransformSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity_fraction: Option<f64>,
}

impl PhantomSpec {
    pub fn new(family: PhantomFamily, size: usize, seed: u64) -> Self {
        Self { family, size, seed, sparsity_basis: None, sparsity_fraction: None }
    }

    pub fn with_sparsity(mut self, basis: TransformSpec, fraction: f64) -> Self {
        self.sparsity_basis = Some(basis);
        self.sparsity_fraction = Some(fraction);
        self
    }

    fn validate(&self) -> Result<()> {
        if !self.size.is_power_of_two() || self.size < 4 {
            return Err(Error::InvalidSpec(format!(
                "phantom size must be a power of two >= 4, got {}",
                self.size
            )));
        }
        match (self.sparsity_basis.is_some(), self.sparsity_fraction) {
            (false, None) => {}
            (true, Some(f)) if f > 0.0 && f <= 1.0 => {}
            (true, Some(f)) => {
                return Err(Error::InvalidSpec(format!(
                    "sparsity_fraction must be in (0, 1], got {f}"
                )))
            }
            _ => {
                return Err(Error::InvalidSpec(
                    "sparsity_basis and sparsity_fraction must be given together".into(),
                ))
            }
        }
        Ok(())
    }
}

fn ellipse_field(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let count = rng.random_range(4..=7);
    let mut field = vec![0.0f64; n * n];
    for _ in 0..count {
        let cx: f64 = rng.random_range(-0.5..0.5);
        let cy: f64 = rng.random_range(-0.5..0.5);
        let a: f64 = rng.random_range(0.12..0.45);
        let b: f64 = rng.random_range(0.12..0.45);
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let amp: f64 = rng.random_range(0.2..1.0);
        let (st, ct) = theta.sin_cos();
        for r in 0..n {
            for c in 0..n {
                // pixel center in [-1, 1]^2
                let y = 2.0 * (r as f64 + 0.5) / n as f64 - 1.0;
                let x = 2.0 * (c as f64 + 0.5) / n as f64 - 1.0;
                let dx = x - cx;
                let dy = y - cy;
                let u = ct * dx + st * dy;
                let v = -st * dx + ct * dy;
                if (u / a) * (u / a) + (v / b) * (v / b) <= 1.0 {
                    field[r * n + c] += amp;
                }
            }
        }
    }
    field
}

fn gaussian_bump_field(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let count = rng.random_range(3..=5);
    let mut field = vec![0.0f64; n * n];
    for _ in 0..count {
        let cx: f64 = rng.random_range(-0.6..0.6);
        let cy: f64 = rng.random_range(-0.6..0.6);
        let sigma: f64 = rng.random_range(0.25..0.55);
        let amp: f64 = rng.random_range(0.3..1.0);
        for r in 0..n {
            for c in 0..n {
                let y = 2.0 * (r as f64 + 0.5) / n as f64 - 1.0;
                let x = 2.0 * (c as f64 + 0.5) / n as f64 - 1.0;
                let d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                field[r * n + c] += amp * (-d2 / (2.0 * sigma * sigma)).exp();
            }
        }
    }
    field
}

/// Zero-mean band-limited sinusoidal texture, frequencies in the upper half
/// of the representable band.
fn sinusoid_texture(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let waves = 6;
    let mut field = vec![0.0f64; n * n];
    let f_lo = n as f64 / 8.0;
    let f_hi = 3.0 * n as f64 / 8.0;
    for _ in 0..waves {
        let freq: f64 = rng.random_range(f_lo..f_hi);
        let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let amp: f64 = rng.random_range(0.5..1.0) / waves as f64;
        let (sa, ca) = angle.sin_cos();
        for r in 0..n {
            for c in 0..n {
                let y = (r as f64 + 0.5) / n as f64;
                let x = (c as f64 + 0.5) / n as f64;
                let t = std::f64::consts::TAU * freq * (ca * x + sa * y) + phase;
                field[r * n + c] += amp * t.sin();
            }
        }
    }
    field
}

fn normalize_max(field: &mut [f64]) {
    let max = field.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
    if max > 0.0 {
        for v in field.iter_mut() {
            *v /= max;
        }
    }
}

/// Gentle low-order phase field so phantoms are genuinely complex-valued.
fn phase_field(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let gx: f64 = rng.random_range(-0.6..0.6);
    let gy: f64 = rng.random_range(-0.6..0.6);
    let curve: f64 = rng.random_range(-0.4..0.4);
    let mut field = vec![0.0f64; n * n];
    for r in 0..n {
        for c in 0..n {
            let y = 2.0 * (r as f64 + 0.5) / n as f64 - 1.0;
            let x = 2.0 * (c as f64 + 0.5) / n as f64 - 1.0;
            field[r * n + c] = gx * x + gy * y + curve * (x * x - y * y);
        }
    }
    field
}

/// Generate a phantom image. Pure function of the spec.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<ComplexImage> {
    spec.validate()?;
    let n = spec.size;
    let mut rng = rng::seeded(spec.seed);

    let mut magnitude = match spec.family {
        PhantomFamily::Ellipses => ellipse_field(n, &mut rng),
        PhantomFamily::Smooth => gaussian_bump_field(n, &mut rng),
        PhantomFamily::Textured => {
            let mut base = gaussian_bump_field(n, &mut rng);
            let texture = sinusoid_texture(n, &mut rng);
            for (b, t) in base.iter_mut().zip(&texture) {
                *b *= 1.0 + 0.6 * t;
            }
            base
        }
    };
    normalize_max(&mut magnitude);
    let phase = phase_field(n, &mut rng);

    let values: Vec<Complex64> = magnitude
        .iter()
        .zip(&phase)
        .map(|(&m, &p)| Complex64::from_polar(m, p * m.min(1.0)))
        .collect();
    let image = ComplexImage::from_values(n, n, values)?;

    match (&spec.sparsity_basis, spec.sparsity_fraction) {
        (Some(basis), Some(fraction)) => project_to_sparsity(&image, basis, fraction),
        _ => Ok(image),
    }
}

/// Keep the `ceil(fraction * N^2)` largest-magnitude coefficients in `basis`
/// and zero the rest, then synthesize back.
pub fn project_to_sparsity(
    x: &ComplexImage,
    basis: &TransformSpec,
    fraction: f64,
) -> Result<ComplexImage> {
    let mut coeffs = analyze(x, basis)?;
    let total = coeffs.values().len();
    let keep = ((fraction * total as f64).ceil() as usize).min(total);
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| {
        let ma = coeffs.values()[a].norm();
        let mb = coeffs.values()[b].norm();
        mb.partial_cmp(&ma).unwrap().then(a.cmp(&b))
    });
    for &idx in order.iter().skip(keep) {
        coeffs.values_mut()[idx] = Complex64::new(0.0, 0.0);
    }
    synthesize(&coeffs, basis)
}

/// Simulate smooth complex coil profiles: Gaussian bumps centered at
/// equispaced angles around the image, each with a gentle linear phase, then
/// pixel-wise normalized so the sum of squared magnitudes is exactly one.
pub fn generate_sensitivities(n_coils: usize, size: usize, seed: u64) -> Result<CoilSensitivities> {
    if n_coils < 1 {
        return Err(Error::InvalidSpec("need at least one coil".into()));
    }
    if size < 2 {
        return Err(Error::InvalidSpec(format!("size must be >= 2, got {size}")));
    }
    let n = size;
    let mut rng = rng::seeded(seed);
    let angle_offset: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let radius = 0.6;
    let sigma: f64 = rng.random_range(0.45..0.6);

    let mut maps = Vec::with_capacity(n_coils);
    for i in 0..n_coils {
        let angle = angle_offset + std::f64::consts::TAU * i as f64 / n_coils as f64;
        let cx = radius * angle.cos();
        let cy = radius * angle.sin();
        let px: f64 = rng.random_range(-2.0..2.0);
        let py: f64 = rng.random_range(-2.0..2.0);
        let mut map = ComplexImage::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let y = 2.0 * (r as f64 + 0.5) / n as f64 - 1.0;
                let x = 2.0 * (c as f64 + 0.5) / n as f64 - 1.0;
                let d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                let mag = (-d2 / (2.0 * sigma * sigma)).exp();
                let phase = px * x + py * y;
                map.set(r, c, Complex64::from_polar(mag, phase));
            }
        }
        maps.push(map);
    }

    // pixel-wise normalization: sum_i |S_i|^2 = 1
    for idx in 0..n * n {
        let norm: f64 = maps.iter().map(|m| m.values()[idx].norm_sqr()).sum::<f64>().sqrt();
        for m in maps.iter_mut() {
            m.values_mut()[idx] /= norm;
        }
    }

    CoilSensitivities::new(maps)
}
