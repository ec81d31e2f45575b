//! Wavelet-domain image toolkit built around Rule-of-Three detail estimation.
//!
//! The crate is organised per pipeline stage:
//!
//! - [`image`]: real-valued planes, PGM/PPM (and PNG/JPEG) I/O, padding, noise
//! - [`wavelet`]: separable 2-D DWT for Haar and Daubechies-4
//! - [`threshold`]: MAD noise estimate, universal threshold, hard/soft shrinkage
//! - [`ro3`]: detail-subband estimation and the ×2 / ×4 superresolution procedures
//! - [`deblur`]: the fixed 7×7 two-pass sharpening mask
//! - [`catalyst`]: the detail-discarding encoder/decoder around a pluggable codec
//! - [`metrics`]: MSE, PSNR, MAE, CR, PSS and histogram similarity
//!
//! All operations are pure functions over immutable values.

pub mod catalyst;
pub mod deblur;
pub mod error;
pub mod image;
pub mod metrics;
pub mod ro3;
pub mod threshold;
pub mod wavelet;

pub use crate::error::{Error, Result};
pub use crate::image::{ImageBuf, Plane};
pub use crate::ro3::{DetailGain, Ro3Params};
pub use crate::wavelet::{SubbandQuad, WaveletBasis};
