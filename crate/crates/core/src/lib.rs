//! Desk-scale simulation and robustness measurement for accelerated
//! multi-coil MRI reconstruction.
//!
//! The library simulates multi-coil k-space acquisition from synthetic
//! phantoms, reconstructs with sparsity-based, un-trained-network, and
//! trained-network methods, and measures sensitivity to adversarial
//! perturbations, distribution shifts, and small-feature loss.

pub mod error;
pub mod fourier;
pub mod image;
pub mod mask;
pub mod phantom;
pub mod rng;
pub mod transforms;

pub use error::{Error, Result};
pub use fourier::KSpaceVolume;
pub use image::{CoilSensitivities, ComplexImage, RealImage};
pub use mask::{MaskPattern, MaskSpec, SamplingMask};
pub use phantom::{PhantomFamily, PhantomSpec};
pub use transforms::{TransformKind, TransformSpec};
