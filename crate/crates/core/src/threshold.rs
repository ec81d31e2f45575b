//! Wavelet shrinkage: MAD noise estimate, universal threshold and the
//! hard/soft denoiser used as a baseline against Ro3.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::{pad_to_multiple, ImageBuf, Plane};
use crate::wavelet::{dwt2_multi, idwt2_multi, WaveletBasis};

/// Rescales the median absolute coefficient into a Gaussian std estimate.
pub const MAD_SCALE: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    Hard,
    /// Sign-symmetric shrinkage `sgn(x)·max(|x|−λ, 0)`.
    #[default]
    Soft,
    /// Compatibility variant: only positive survivors are shrunk, negative
    /// survivors pass through untouched.
    SoftPositiveOnly,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hard" => Ok(ThresholdMode::Hard),
            "soft" => Ok(ThresholdMode::Soft),
            "soft-positive" => Ok(ThresholdMode::SoftPositiveOnly),
            other => Err(Error::InvalidParameter(format!(
                "unknown threshold mode '{other}'"
            ))),
        }
    }
}

/// A resolved threshold for one subband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSpec {
    pub mode: ThresholdMode,
    pub sigma: f64,
    pub lambda: f64,
    /// Pixel count of the subband the threshold was derived from.
    pub n: usize,
}

impl ThresholdSpec {
    /// MAD sigma and universal lambda for `subband`.
    pub fn estimate(subband: &Plane, mode: ThresholdMode) -> Result<Self> {
        let sigma = mad_sigma(subband)?;
        let n = subband.data().len();
        Ok(Self {
            mode,
            sigma,
            lambda: universal_threshold(sigma, n)?,
            n,
        })
    }

    pub fn apply(&self, p: &Plane) -> Result<Plane> {
        apply_threshold(p, self.lambda, self.mode)
    }
}

/// `median(|c|) / 0.6745`; even counts average the two central order statistics.
pub fn mad_sigma(coeffs: &Plane) -> Result<f64> {
    let mut abs: Vec<f64> = coeffs.data().iter().map(|v| v.abs()).collect();
    if abs.is_empty() {
        return Err(Error::InvalidParameter("MAD of an empty subband".into()));
    }
    abs.sort_by(f64::total_cmp);
    let n = abs.len();
    let median = if n % 2 == 1 {
        abs[n / 2]
    } else {
        (abs[n / 2 - 1] + abs[n / 2]) / 2.0
    };
    Ok(median / MAD_SCALE)
}

/// `sigma · sqrt(2 ln n)`.
pub fn universal_threshold(sigma: f64, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "universal threshold needs n >= 1".into(),
        ));
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sigma must be finite and >= 0, got {sigma}"
        )));
    }
    Ok(sigma * (2.0 * (n as f64).ln()).sqrt())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "threshold must be finite and >= 0, got {lambda}"
        )))
    }
}

/// Zeroes every coefficient with `|x| <= lambda`, keeps the rest verbatim.
pub fn hard_threshold(p: &Plane, lambda: f64) -> Result<Plane> {
    check_lambda(lambda)?;
    Ok(p.map(|x| if x.abs() <= lambda { 0.0 } else { x }))
}

/// Zeroes `|x| <= lambda` and pulls every survivor toward zero by `lambda`.
pub fn soft_threshold(p: &Plane, lambda: f64) -> Result<Plane> {
    check_lambda(lambda)?;
    Ok(p.map(|x| {
        if x.abs() <= lambda {
            0.0
        } else {
            x - lambda.copysign(x)
        }
    }))
}

/// Zeroes `|x| <= lambda` and subtracts `lambda` only where `x > lambda`;
/// negative survivors are kept verbatim (`-10` at `lambda = 7` stays `-10`).
pub fn soft_threshold_positive_only(p: &Plane, lambda: f64) -> Result<Plane> {
    check_lambda(lambda)?;
    Ok(p.map(|x| {
        if x.abs() <= lambda {
            0.0
        } else if x > lambda {
            x - lambda
        } else {
            x
        }
    }))
}

pub fn apply_threshold(p: &Plane, lambda: f64, mode: ThresholdMode) -> Result<Plane> {
    match mode {
        ThresholdMode::Hard => hard_threshold(p, lambda),
        ThresholdMode::Soft => soft_threshold(p, lambda),
        ThresholdMode::SoftPositiveOnly => soft_threshold_positive_only(p, lambda),
    }
}

/// Per-channel wavelet shrinkage with a MAD/universal threshold computed
/// separately for every detail subband at every level. The approximation
/// band is left untouched.
pub fn denoise_threshold(
    img: &ImageBuf,
    basis: WaveletBasis,
    levels: usize,
    mode: ThresholdMode,
) -> Result<ImageBuf> {
    denoise_threshold_with(img, basis, levels, mode, |band| {
        ThresholdSpec::estimate(band, mode).map(|t| t.lambda)
    })
}

/// As [`denoise_threshold`] but with the per-subband threshold supplied by
/// the caller.
pub fn denoise_threshold_with(
    img: &ImageBuf,
    basis: WaveletBasis,
    levels: usize,
    mode: ThresholdMode,
    lambda_for: impl Fn(&Plane) -> Result<f64>,
) -> Result<ImageBuf> {
    if levels == 0 || levels > 16 {
        return Err(Error::InvalidParameter(format!(
            "levels must be in 1..=16, got {levels}"
        )));
    }
    let padded = pad_to_multiple(img, 1 << levels)?;
    let out = padded.try_map_planes(|plane| {
        let mut pyramid = dwt2_multi(plane, basis, levels)?;
        for quad in &mut pyramid.quads {
            for band in [&mut quad.lh, &mut quad.hl, &mut quad.hh] {
                let lambda = lambda_for(band)?;
                *band = apply_threshold(band, lambda, mode)?;
            }
        }
        idwt2_multi(&pyramid, basis)
    })?;
    Ok(out.cropped())
}
