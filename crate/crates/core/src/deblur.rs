//! Fixed 7×7 two-pass sharpening mask applied after decoding.
//!
//! The image is zero-padded by `window/2` on every side. A vertical pass
//! replaces each interior row sample with `Σ vertical_tap · x` over the
//! window; a horizontal pass then sums that result across the window and adds
//! `center_boost` times the *unfiltered* sample. Both passes only touch the
//! interior, so after cropping the padding every pixel has been filtered,
//! with the zero border darkening the outer `window/2` rows and columns.

use crate::error::Result;
use crate::image::{ImageBuf, Plane};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeblurKernel {
    pub window: usize,
    pub vertical_tap: f64,
    pub center_boost: f64,
}

impl Default for DeblurKernel {
    fn default() -> Self {
        Self {
            window: 7,
            vertical_tap: -0.0129,
            center_boost: 1.63,
        }
    }
}

impl DeblurKernel {
    pub fn pad(&self) -> usize {
        self.window / 2
    }

    /// Response to a constant plane, away from the borders.
    pub fn dc_gain(&self) -> f64 {
        self.center_boost + (self.window * self.window) as f64 * self.vertical_tap
    }
}

pub fn deblur(img: &ImageBuf) -> Result<ImageBuf> {
    deblur_with(img, &DeblurKernel::default())
}

pub fn deblur_with(img: &ImageBuf, kernel: &DeblurKernel) -> Result<ImageBuf> {
    assert!(kernel.window % 2 == 1, "deblur window must be odd");
    img.try_map_planes(|p| Ok(deblur_plane(p, kernel)))
}

pub fn deblur_plane(p: &Plane, kernel: &DeblurKernel) -> Plane {
    let d = kernel.pad();
    let (w, h) = p.dims();
    let (pw, ph) = (w + 2 * d, h + 2 * d);
    let mut padded = vec![0.0; pw * ph];
    for r in 0..h {
        padded[(r + d) * pw + d..(r + d) * pw + d + w].copy_from_slice(p.row(r));
    }

    let mut vertical = padded.clone();
    for r in d..ph - d {
        for c in 0..pw {
            let mut acc = 0.0;
            for k in 0..kernel.window {
                acc += padded[(r + k - d) * pw + c] * kernel.vertical_tap;
            }
            vertical[r * pw + c] = acc;
        }
    }

    let mut out = Vec::with_capacity(w * h);
    for r in d..ph - d {
        for c in d..pw - d {
            let mut acc = 0.0;
            for k in 0..kernel.window {
                acc += vertical[r * pw + c + k - d];
            }
            out.push(acc + kernel.center_boost * padded[r * pw + c]);
        }
    }
    Plane::from_raw(w, h, out)
}
