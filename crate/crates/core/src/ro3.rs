//! Rule-of-Three detail estimation and the ×2 / ×4 superresolution built on it.
//!
//! Analysing a plane `I` gives a coarse approximation `LL` and coarse details
//! `D`. The missing fine-scale details one level up are assumed to keep the
//! same proportion to their approximation as the coarse ones do:
//!
//! ```text
//! D_fine(r, c) = D(r/2, c/2) · (ap + I(r, c)) / (ap + LL(r/2, c/2))
//! ```
//!
//! with a small anchoring term `ap` keeping near-black regions defined.
//! Synthesizing `2·I` together with the estimated details yields an image
//! twice the size of `I` per axis.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::{pad_to_multiple, ImageBuf, Plane};
use crate::wavelet::{dwt2, idwt2, SubbandQuad, WaveletBasis};

pub const DEFAULT_AP: f64 = 1e-4;

/// How estimated details are scaled when the approximation band is doubled
/// before synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetailGain {
    /// Details stay at the magnitude they were estimated with; only the
    /// approximation is doubled.
    #[default]
    Faithful,
    /// Details are doubled along with the approximation.
    Corrected,
}

impl DetailGain {
    fn factor(self) -> f64 {
        match self {
            DetailGain::Faithful => 1.0,
            DetailGain::Corrected => 2.0,
        }
    }
}

impl FromStr for DetailGain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "faithful" => Ok(DetailGain::Faithful),
            "corrected" => Ok(DetailGain::Corrected),
            other => Err(Error::InvalidParameter(format!(
                "unknown detail gain '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ro3Params {
    /// Anchoring parameter, `0 < ap << 1`.
    pub ap: f64,
    pub basis: WaveletBasis,
    pub detail_gain: DetailGain,
}

impl Default for Ro3Params {
    fn default() -> Self {
        Self {
            ap: DEFAULT_AP,
            basis: WaveletBasis::Haar,
            detail_gain: DetailGain::Faithful,
        }
    }
}

impl Ro3Params {
    pub fn validate(&self) -> Result<()> {
        check_ap(self.ap)
    }
}

fn check_ap(ap: f64) -> Result<()> {
    if ap > 0.0 && ap.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "anchoring parameter must be > 0, got {ap}"
        )))
    }
}

/// Estimates one fine-scale detail plane.
///
/// `ll_fine` is `2W×2H`; `ll_coarse` and `d_coarse` are `W×H`. Each fine
/// pixel `(r, c)` reads coarse cell `(r/2, c/2)`:
/// `out = d_coarse · (ap + ll_fine) / (ap + ll_coarse)`.
///
/// A denominator of exactly zero, or a non-finite result, is a domain error.
pub fn ro3_estimate_detail(
    ll_fine: &Plane,
    ll_coarse: &Plane,
    d_coarse: &Plane,
    ap: f64,
) -> Result<Plane> {
    check_ap(ap)?;
    let (w, h) = ll_coarse.dims();
    if d_coarse.dims() != (w, h) || ll_fine.dims() != (2 * w, 2 * h) {
        return Err(Error::Dimension(format!(
            "Ro3 expects fine {}x{} for coarse {w}x{h} (detail {:?}), got fine {:?}",
            2 * w,
            2 * h,
            d_coarse.dims(),
            ll_fine.dims()
        )));
    }
    let mut out = Plane::filled(2 * w, 2 * h, 0.0);
    for r2 in 0..h {
        for c2 in 0..w {
            let den = ap + ll_coarse.get(r2, c2);
            if den == 0.0 {
                return Err(Error::Domain(format!(
                    "Ro3 denominator vanishes at coarse ({r2}, {c2})"
                )));
            }
            let d = d_coarse.get(r2, c2);
            for (r1, c1) in [
                (2 * r2, 2 * c2),
                (2 * r2, 2 * c2 + 1),
                (2 * r2 + 1, 2 * c2),
                (2 * r2 + 1, 2 * c2 + 1),
            ] {
                let v = d * (ap + ll_fine.get(r1, c1)) / den;
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "Ro3 estimate overflows at ({r1}, {c1})"
                    )));
                }
                out.set(r1, c1, v);
            }
        }
    }
    Ok(out)
}

/// The three estimated fine-scale detail planes for `fine`, from its own
/// one-level analysis.
pub fn estimate_details(fine: &Plane, params: &Ro3Params) -> Result<[Plane; 3]> {
    let coarse = dwt2(fine, params.basis)?;
    let est = |d: &Plane| ro3_estimate_detail(fine, &coarse.ll, d, params.ap);
    Ok([est(&coarse.lh)?, est(&coarse.hl)?, est(&coarse.hh)?])
}

/// Doubles one plane (even extents required): analyse, estimate details,
/// double the approximation and synthesize.
pub fn superresolve_plane(p: &Plane, params: &Ro3Params) -> Result<Plane> {
    params.validate()?;
    let [lh, hl, hh] = estimate_details(p, params)?;
    let g = params.detail_gain.factor();
    let (lh, hl, hh) = if g == 1.0 {
        (lh, hl, hh)
    } else {
        (lh.scale(g), hl.scale(g), hh.scale(g))
    };
    let quad = SubbandQuad::new(p.scale(2.0), lh, hl, hh, 1)?;
    idwt2(&quad, params.basis)
}

/// ×2 per axis. The input is mirror-padded to a multiple of 4 first and the
/// result cropped to twice the original extent.
pub fn superresolve_once(img: &ImageBuf, params: &Ro3Params) -> Result<ImageBuf> {
    params.validate()?;
    let padded = pad_to_multiple(img, 4)?;
    let out = padded.try_map_planes(|p| superresolve_plane(p, params))?;
    Ok(out.cropped())
}

/// ×4 per axis: [`superresolve_once`] applied twice.
pub fn superresolve_twice(img: &ImageBuf, params: &Ro3Params) -> Result<ImageBuf> {
    superresolve_once(&superresolve_once(img, params)?, params)
}
