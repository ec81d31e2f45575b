//! Compression catalyst: drop the detail subbands, store the halved
//! approximation band through an ordinary still-image codec, and rebuild the
//! details with Rule-of-Three on decode.
//!
//! The stored plane has a quarter of the (padded) input's pixels, so any
//! back-end codec sees a quarter of the work. Decoding the stored plane `S`
//! is exactly a ×2 superresolution of `S`, whose doubled approximation
//! restores the original DC level.

pub mod backend;
pub mod container;

use crate::deblur::deblur;
use crate::error::{Error, Result};
use crate::image::{pad_to_multiple, ImageBuf, Plane};
use crate::ro3::{superresolve_plane, Ro3Params};
use crate::wavelet::{dwt2, WaveletBasis};

pub use backend::{BackendCodec, BytePlane, CodecRegistry, JpegCodec, PngCodec, StoreCodec};
pub use container::{CodecId, Ro3Container, FLAG_DEBLUR_RECOMMENDED, HEADER_LEN};

/// Images smaller than this many pixels get the deblur-recommended flag.
pub const DEBLUR_PIXEL_LIMIT: usize = 512 * 512;

/// Pads to a multiple of 4, analyses each channel once and returns the
/// approximation bands halved and quantized to 8 bits.
pub fn approximation_planes(img: &ImageBuf, basis: WaveletBasis) -> Result<Vec<BytePlane>> {
    let padded = pad_to_multiple(img, 4)?;
    padded
        .planes()
        .iter()
        .map(|p| {
            let ll = dwt2(p, basis)?.ll.scale(0.5);
            BytePlane::new(ll.width(), ll.height(), ll.to_u8())
        })
        .collect()
}

/// Rebuilds the full-size image from stored half-scale planes.
pub fn reconstruct(
    stored: &[BytePlane],
    orig_width: usize,
    orig_height: usize,
    params: &Ro3Params,
) -> Result<ImageBuf> {
    params.validate()?;
    let mut planes = Vec::with_capacity(stored.len());
    for s in stored {
        let (pw, ph) = (2 * s.width, 2 * s.height);
        let fits = |orig: usize, padded: usize| {
            orig <= padded && padded - orig < 4 && padded.is_multiple_of(4)
        };
        if !fits(orig_width, pw) || !fits(orig_height, ph) {
            return Err(Error::Container(format!(
                "stored {}x{} plane cannot hold a {orig_width}x{orig_height} image",
                s.width, s.height
            )));
        }
        let half = Plane::from_u8(s.width, s.height, &s.data)?;
        planes.push(superresolve_plane(&half, params)?);
    }
    let img = ImageBuf::with_orig(planes, orig_width, orig_height)?;
    Ok(img.cropped())
}

pub fn encode(
    img: &ImageBuf,
    basis: WaveletBasis,
    codec: &dyn BackendCodec,
    quality: u8,
    ap: f64,
) -> Result<Ro3Container> {
    if !(1..=100).contains(&quality) {
        return Err(Error::InvalidParameter(format!(
            "quality {quality} outside 1..=100"
        )));
    }
    if !ap.is_finite() || ap <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "anchoring parameter must be > 0, got {ap}"
        )));
    }
    let channels = img.channels();
    if channels != 1 && channels != 3 {
        return Err(Error::InvalidParameter(format!(
            "{channels}-channel images cannot be stored"
        )));
    }
    let (ow, oh) = (img.orig_width(), img.orig_height());
    let dims_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| Error::InvalidParameter(format!("extent {v} exceeds u32")))
    };
    let stored = approximation_planes(img, basis)?;
    let payload = codec.encode(&stored, quality)?;
    let flags = if ow * oh < DEBLUR_PIXEL_LIMIT {
        FLAG_DEBLUR_RECOMMENDED
    } else {
        0
    };
    Ok(Ro3Container {
        flags,
        codec: codec.id(),
        basis,
        channels: channels as u8,
        orig_width: dims_u32(ow)?,
        orig_height: dims_u32(oh)?,
        ap: ap as f32,
        payload,
    })
}

/// Decodes a container. `params.basis` must match the basis recorded in the
/// container; see [`params_for`] for the recorded defaults.
pub fn decode(
    c: &Ro3Container,
    registry: &CodecRegistry,
    params: &Ro3Params,
    apply_deblur: bool,
) -> Result<ImageBuf> {
    if params.basis != c.basis {
        return Err(Error::InvalidParameter(format!(
            "container was encoded with {}, decoder asked for {}",
            c.basis, params.basis
        )));
    }
    let codec = registry.get(c.codec)?;
    let stored = codec.decode(&c.payload, c.channels as usize)?;
    if stored.len() != c.channels as usize {
        return Err(Error::Container(format!(
            "payload holds {} channels, header says {}",
            stored.len(),
            c.channels
        )));
    }
    let img = reconstruct(
        &stored,
        c.orig_width as usize,
        c.orig_height as usize,
        params,
    )?;
    if apply_deblur {
        deblur(&img)
    } else {
        Ok(img)
    }
}

/// Decoder parameters recorded in the container (its basis and anchoring
/// parameter) with the default detail gain.
pub fn params_for(c: &Ro3Container) -> Ro3Params {
    Ro3Params {
        ap: f64::from(c.ap),
        basis: c.basis,
        ..Ro3Params::default()
    }
}

/// Encode/decode round trip through raw 8-bit storage, used as a denoiser.
pub fn denoise_ro3(img: &ImageBuf, params: &Ro3Params) -> Result<ImageBuf> {
    let stored = approximation_planes(img, params.basis)?;
    reconstruct(&stored, img.orig_width(), img.orig_height(), params)
}

/// Bytes of the raw 8-bit original: `width × height × channels`.
pub fn uncompressed_size(c: &Ro3Container) -> u64 {
    u64::from(c.orig_width) * u64::from(c.orig_height) * u64::from(c.channels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_trace_through_store() {
        let img = ImageBuf::gray(Plane::filled(4, 4, 100.0));
        let c = encode(&img, WaveletBasis::Haar, &StoreCodec, 75, 1e-4).unwrap();
        assert_eq!(&c.payload[..8], &[2, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&c.payload[8..], &[100; 4]);
        assert_eq!(c.to_bytes().len(), 32 + c.payload.len());
        assert!(c.deblur_recommended());
        let out = decode(&c, &CodecRegistry::default(), &params_for(&c), false).unwrap();
        assert!(out.planes()[0]
            .data()
            .iter()
            .all(|&v| (v - 100.0).abs() < 1e-9));
    }

    #[test]
    fn store_payload_size() {
        let img = ImageBuf::gray(Plane::from_fn(8, 8, |r, c| (r * 8 + c) as f64));
        let c = encode(&img, WaveletBasis::Haar, &StoreCodec, 75, 1e-4).unwrap();
        assert_eq!(c.payload.len(), 4 * 4 + 8);
    }

    #[test]
    fn unknown_or_missing_codec() {
        let img = ImageBuf::gray(Plane::filled(4, 4, 10.0));
        let mut bytes = encode(&img, WaveletBasis::Haar, &StoreCodec, 75, 1e-4)
            .unwrap()
            .to_bytes();
        bytes[6] = 9;
        assert!(matches!(
            Ro3Container::from_bytes(&bytes),
            Err(Error::UnknownCodec(9))
        ));
        bytes[6] = 2;
        let c = Ro3Container::from_bytes(&bytes).unwrap();
        assert!(matches!(
            decode(&c, &CodecRegistry::default(), &params_for(&c), false),
            Err(Error::Codec(_))
        ));
    }

    #[test]
    fn payload_dims_must_match_header() {
        let img = ImageBuf::gray(Plane::filled(8, 8, 10.0));
        let mut c = encode(&img, WaveletBasis::Haar, &StoreCodec, 75, 1e-4).unwrap();
        c.orig_width = 20;
        assert!(matches!(
            decode(&c, &CodecRegistry::default(), &params_for(&c), false),
            Err(Error::Container(_))
        ));
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let img = ImageBuf::gray(Plane::filled(8, 8, 10.0));
        let c = encode(&img, WaveletBasis::Haar, &StoreCodec, 75, 1e-4).unwrap();
        let params = Ro3Params {
            basis: WaveletBasis::Daub4,
            ..params_for(&c)
        };
        assert!(decode(&c, &CodecRegistry::default(), &params, false).is_err());
    }

    #[test]
    fn odd_sizes_round_trip_shape() {
        let img = ImageBuf::new(vec![
            Plane::from_fn(7, 5, |r, c| (r * 20 + c * 9) as f64);
            3
        ])
        .unwrap();
        let c = encode(&img, WaveletBasis::Haar, &PngCodec, 75, 1e-4).unwrap();
        assert!(!c.payload.is_empty());
        let out = decode(&c, &CodecRegistry::default(), &params_for(&c), true).unwrap();
        assert_eq!((out.width(), out.height(), out.channels()), (7, 5, 3));
    }

    #[test]
    fn invalid_quality_and_ap() {
        let img = ImageBuf::gray(Plane::filled(4, 4, 10.0));
        assert!(encode(&img, WaveletBasis::Haar, &StoreCodec, 0, 1e-4).is_err());
        assert!(encode(&img, WaveletBasis::Haar, &StoreCodec, 101, 1e-4).is_err());
        assert!(encode(&img, WaveletBasis::Haar, &StoreCodec, 50, 0.0).is_err());
    }
}
