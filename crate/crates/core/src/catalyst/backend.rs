//! Back-end still-image codecs that store the half-scale approximation planes.

use std::collections::HashMap;
use std::io::Cursor;

use ::image::codecs::jpeg::JpegEncoder;
use ::image::codecs::png::PngEncoder;
use ::image::{ColorType, DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};

use super::container::CodecId;
use crate::error::{Error, Result};

/// One 8-bit channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BytePlane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl BytePlane {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::Dimension(format!(
                "{} bytes for a {width}x{height} plane",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

/// A still-image codec usable behind the catalyst.
///
/// `quality` is interpreted by the codec; lossless codecs ignore it.
pub trait BackendCodec: Send + Sync {
    fn id(&self) -> CodecId;
    fn encode(&self, planes: &[BytePlane], quality: u8) -> Result<Vec<u8>>;
    fn decode(&self, bytes: &[u8], channels: usize) -> Result<Vec<BytePlane>>;
}

fn check_planes(planes: &[BytePlane]) -> Result<(usize, usize)> {
    let first = planes
        .first()
        .ok_or_else(|| Error::Codec("no planes to encode".into()))?;
    let dims = (first.width, first.height);
    if planes.iter().any(|p| (p.width, p.height) != dims) {
        return Err(Error::Codec("planes differ in size".into()));
    }
    Ok(dims)
}

/// Raw planes: per channel a `u32` LE width, `u32` LE height, then row-major bytes.
#[derive(Debug, Default, Clone, Copy)]
pub struct StoreCodec;

impl BackendCodec for StoreCodec {
    fn id(&self) -> CodecId {
        CodecId::Store
    }

    fn encode(&self, planes: &[BytePlane], _quality: u8) -> Result<Vec<u8>> {
        check_planes(planes)?;
        let mut out = Vec::new();
        for p in planes {
            out.extend_from_slice(&(p.width as u32).to_le_bytes());
            out.extend_from_slice(&(p.height as u32).to_le_bytes());
            out.extend_from_slice(&p.data);
        }
        Ok(out)
    }

    fn decode(&self, bytes: &[u8], channels: usize) -> Result<Vec<BytePlane>> {
        let mut rest = bytes;
        let mut planes = Vec::with_capacity(channels);
        for ch in 0..channels {
            if rest.len() < 8 {
                return Err(Error::Codec(format!(
                    "store payload truncated before channel {ch}"
                )));
            }
            let w = u32::from_le_bytes(rest[0..4].try_into().expect("4 bytes")) as usize;
            let h = u32::from_le_bytes(rest[4..8].try_into().expect("4 bytes")) as usize;
            let n = w
                .checked_mul(h)
                .ok_or_else(|| Error::Codec("store plane size overflows".into()))?;
            let data = rest
                .get(8..8 + n)
                .ok_or_else(|| Error::Codec(format!("store channel {ch} truncated")))?;
            planes.push(BytePlane::new(w, h, data.to_vec())?);
            rest = &rest[8 + n..];
        }
        if !rest.is_empty() {
            return Err(Error::Codec(format!(
                "{} trailing payload bytes",
                rest.len()
            )));
        }
        Ok(planes)
    }
}

fn interleave(planes: &[BytePlane]) -> (Vec<u8>, ExtendedColorType) {
    match planes.len() {
        1 => (planes[0].data.clone(), ExtendedColorType::L8),
        3 => {
            let n = planes[0].data.len();
            let mut out = Vec::with_capacity(3 * n);
            for i in 0..n {
                out.extend(planes.iter().map(|p| p.data[i]));
            }
            (out, ExtendedColorType::Rgb8)
        }
        n => unreachable!("{n} channels rejected earlier"),
    }
}

fn split(img: DynamicImage, channels: usize) -> Result<Vec<BytePlane>> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match channels {
        1 => Ok(vec![BytePlane::new(w, h, img.into_luma8().into_raw())?]),
        3 => {
            let rgb = img.into_rgb8().into_raw();
            (0..3)
                .map(|ch| BytePlane::new(w, h, rgb.iter().skip(ch).step_by(3).copied().collect()))
                .collect()
        }
        n => Err(Error::Codec(format!("{n} channels"))),
    }
}

fn check_channels(planes: &[BytePlane]) -> Result<(u32, u32)> {
    let (w, h) = check_planes(planes)?;
    if planes.len() != 1 && planes.len() != 3 {
        return Err(Error::Codec(format!(
            "{} channels (expected 1 or 3)",
            planes.len()
        )));
    }
    Ok((w as u32, h as u32))
}

/// Baseline JPEG through the `image` crate.
#[derive(Debug, Default, Clone, Copy)]
pub struct JpegCodec;

impl BackendCodec for JpegCodec {
    fn id(&self) -> CodecId {
        CodecId::Jpeg
    }

    fn encode(&self, planes: &[BytePlane], quality: u8) -> Result<Vec<u8>> {
        if !(1..=100).contains(&quality) {
            return Err(Error::InvalidParameter(format!(
                "JPEG quality {quality} outside 1..=100"
            )));
        }
        let (w, h) = check_channels(planes)?;
        let (buf, color) = interleave(planes);
        let mut out = Vec::new();
        JpegEncoder::new_with_quality(&mut out, quality)
            .write_image(&buf, w, h, color)
            .map_err(|e| Error::Codec(e.to_string()))?;
        Ok(out)
    }

    fn decode(&self, bytes: &[u8], channels: usize) -> Result<Vec<BytePlane>> {
        let img = ::image::load_from_memory_with_format(bytes, ImageFormat::Jpeg)
            .map_err(|e| Error::Codec(e.to_string()))?;
        split(img, channels)
    }
}

/// Lossless PNG through the `image` crate.
#[derive(Debug, Default, Clone, Copy)]
pub struct PngCodec;

impl BackendCodec for PngCodec {
    fn id(&self) -> CodecId {
        CodecId::Png
    }

    fn encode(&self, planes: &[BytePlane], _quality: u8) -> Result<Vec<u8>> {
        let (w, h) = check_channels(planes)?;
        let (buf, color) = interleave(planes);
        let mut out = Cursor::new(Vec::new());
        PngEncoder::new(&mut out)
            .write_image(&buf, w, h, color)
            .map_err(|e| Error::Codec(e.to_string()))?;
        Ok(out.into_inner())
    }

    fn decode(&self, bytes: &[u8], channels: usize) -> Result<Vec<BytePlane>> {
        let img = ::image::load_from_memory_with_format(bytes, ImageFormat::Png)
            .map_err(|e| Error::Codec(e.to_string()))?;
        if !matches!(
            img.color(),
            ColorType::L8 | ColorType::Rgb8 | ColorType::La8 | ColorType::Rgba8
        ) {
            return Err(Error::Codec(format!(
                "unexpected PNG color type {:?}",
                img.color()
            )));
        }
        split(img, channels)
    }
}

/// Maps container codec ids to implementations.
pub struct CodecRegistry {
    codecs: HashMap<CodecId, Box<dyn BackendCodec>>,
}

impl CodecRegistry {
    pub fn empty() -> Self {
        Self {
            codecs: HashMap::new(),
        }
    }

    pub fn register(&mut self, codec: Box<dyn BackendCodec>) {
        self.codecs.insert(codec.id(), codec);
    }

    pub fn get(&self, id: CodecId) -> Result<&dyn BackendCodec> {
        self.codecs
            .get(&id)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::Codec(format!("no back-end registered for {id:?}")))
    }

    pub fn contains(&self, id: CodecId) -> bool {
        self.codecs.contains_key(&id)
    }
}

impl Default for CodecRegistry {
    /// Store, JPEG and PNG. JPEG 2000 has no built-in back-end.
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(StoreCodec));
        r.register(Box::new(JpegCodec));
        r.register(Box::new(PngCodec));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planes(channels: usize) -> Vec<BytePlane> {
        (0..channels)
            .map(|k| {
                BytePlane::new(5, 3, (0..15).map(|i| (i * 17 + k * 50) as u8).collect()).unwrap()
            })
            .collect()
    }

    #[test]
    fn store_layout_and_round_trip() {
        let p = planes(1);
        let bytes = StoreCodec.encode(&p, 0).unwrap();
        assert_eq!(bytes.len(), 8 + 15);
        assert_eq!(&bytes[..8], &[5, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(StoreCodec.decode(&bytes, 1).unwrap(), p);

        let p = planes(3);
        let bytes = StoreCodec.encode(&p, 0).unwrap();
        assert_eq!(bytes.len(), 3 * 23);
        assert_eq!(StoreCodec.decode(&bytes, 3).unwrap(), p);
        assert!(StoreCodec.decode(&bytes[..40], 3).is_err());
        assert!(StoreCodec.decode(&bytes, 2).is_err());
    }

    #[test]
    fn png_is_lossless() {
        for ch in [1, 3] {
            let p = planes(ch);
            let bytes = PngCodec.encode(&p, 75).unwrap();
            assert_eq!(PngCodec.decode(&bytes, ch).unwrap(), p);
        }
    }

    #[test]
    fn jpeg_round_trip_shape() {
        let p = vec![BytePlane::new(16, 16, vec![120; 256]).unwrap()];
        let bytes = JpegCodec.encode(&p, 90).unwrap();
        let back = JpegCodec.decode(&bytes, 1).unwrap();
        assert_eq!((back[0].width, back[0].height), (16, 16));
        assert!(back[0].data.iter().all(|&v| v.abs_diff(120) <= 1));
        assert!(JpegCodec.encode(&p, 0).is_err());
        assert!(JpegCodec.decode(b"not a jpeg", 1).is_err());
    }

    #[test]
    fn registry_defaults() {
        let r = CodecRegistry::default();
        assert!(r.contains(CodecId::Store));
        assert!(r.contains(CodecId::Jpeg));
        assert!(r.contains(CodecId::Png));
        assert!(r.get(CodecId::Jpeg2000).is_err());
    }
}
