//! Real-valued image planes and their conversion to and from 8-bit files.
//!
//! Binary PGM (`P5`) and PPM (`P6`) are read and written natively. PNG and
//! JPEG go through the `image` crate.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// One channel of an image, stored row-major as `f64`.
///
/// Values nominally live in `[0, 255]` but are never clamped while a
/// pipeline runs; quantization happens only when writing 8-bit output.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!("empty plane {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::Dimension(format!(
                "{} samples for a {width}x{height} plane",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("plane contains non-finite samples".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a plane from nested rows. Panics on ragged or empty input,
    /// which makes it convenient for literals in tests.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let data: Vec<f64> = rows
            .iter()
            .inspect(|r| assert_eq!(r.as_ref().len(), width, "ragged rows"))
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        Self::new(width, height, data).expect("invalid plane literal")
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "empty plane");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "empty plane");
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Plane {
        Plane::from_raw(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Plane {
        self.map(|v| v * k)
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Keeps the top-left `width`×`height` window.
    pub fn crop(&self, width: usize, height: usize) -> Result<Plane> {
        if width == 0 || height == 0 || width > self.width || height > self.height {
            return Err(Error::Dimension(format!(
                "cannot crop {}x{} to {width}x{height}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            data.extend_from_slice(&self.row(r)[..width]);
        }
        Ok(Plane::from_raw(width, height, data))
    }

    /// 8-bit view of the plane (round half away from zero, then clamp).
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }

    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Plane> {
        Plane::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }
}

/// Round-to-nearest with ties away from zero, clamped to `[0, 255]`.
#[inline]
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// One to three planes of equal size plus the pre-padding extent.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuf {
    planes: Vec<Plane>,
    orig_width: usize,
    orig_height: usize,
}

impl ImageBuf {
    pub fn new(planes: Vec<Plane>) -> Result<Self> {
        let (w, h) = planes
            .first()
            .map(Plane::dims)
            .ok_or_else(|| Error::Dimension("image has no planes".into()))?;
        Self::with_orig(planes, w, h)
    }

    pub fn with_orig(planes: Vec<Plane>, orig_width: usize, orig_height: usize) -> Result<Self> {
        if planes.is_empty() || planes.len() > 3 {
            return Err(Error::Dimension(format!(
                "{} channels (expected 1 to 3)",
                planes.len()
            )));
        }
        let dims = planes[0].dims();
        if planes.iter().any(|p| p.dims() != dims) {
            return Err(Error::Dimension("planes differ in size".into()));
        }
        if orig_width == 0 || orig_height == 0 || orig_width > dims.0 || orig_height > dims.1 {
            return Err(Error::Dimension(format!(
                "original extent {orig_width}x{orig_height} does not fit in {}x{}",
                dims.0, dims.1
            )));
        }
        Ok(Self {
            planes,
            orig_width,
            orig_height,
        })
    }

    pub fn gray(plane: Plane) -> Self {
        let (w, h) = plane.dims();
        Self {
            planes: vec![plane],
            orig_width: w,
            orig_height: h,
        }
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn into_planes(self) -> Vec<Plane> {
        self.planes
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn orig_width(&self) -> usize {
        self.orig_width
    }

    pub fn orig_height(&self) -> usize {
        self.orig_height
    }

    /// Applies `f` to each plane; the result keeps this image's original extent
    /// scaled by whatever factor `f` changed the plane size by.
    pub fn try_map_planes(&self, f: impl Fn(&Plane) -> Result<Plane>) -> Result<ImageBuf> {
        let planes = self.planes.iter().map(f).collect::<Result<Vec<_>>>()?;
        let (w, h) = planes[0].dims();
        let ow = self.orig_width * w / self.width();
        let oh = self.orig_height * h / self.height();
        ImageBuf::with_orig(planes, ow.max(1), oh.max(1))
    }

    /// Drops any padding, returning planes of exactly the original extent.
    pub fn cropped(&self) -> ImageBuf {
        if self.orig_width == self.width() && self.orig_height == self.height() {
            return self.clone();
        }
        let planes = self
            .planes
            .iter()
            .map(|p| {
                p.crop(self.orig_width, self.orig_height)
                    .expect("orig extent fits")
            })
            .collect();
        ImageBuf {
            planes,
            orig_width: self.orig_width,
            orig_height: self.orig_height,
        }
    }
}

/// Reads a PGM/PPM, PNG or JPEG file. The format is detected from the content.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuf> {
    let bytes = fs::read(path.as_ref())?;
    decode_image(&bytes)
}

pub fn decode_image(bytes: &[u8]) -> Result<ImageBuf> {
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        return parse_pnm(bytes);
    }
    let format = ::image::guess_format(bytes)
        .map_err(|_| Error::UnsupportedFormat("unrecognised image signature".into()))?;
    if !matches!(
        format,
        ::image::ImageFormat::Png | ::image::ImageFormat::Jpeg
    ) {
        return Err(Error::UnsupportedFormat(format!("{format:?}")));
    }
    let img = ::image::load_from_memory_with_format(bytes, format)
        .map_err(|e| Error::Format(e.to_string()))?;
    from_dynamic(img)
}

pub(crate) fn from_dynamic(img: ::image::DynamicImage) -> Result<ImageBuf> {
    use ::image::ColorType;
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::Format("zero-sized image".into()));
    }
    match img.color() {
        ColorType::L8 | ColorType::La8 => {
            let luma = img.to_luma8();
            Ok(ImageBuf::gray(Plane::from_u8(w, h, luma.as_raw())?))
        }
        ColorType::Rgb8 | ColorType::Rgba8 => {
            let rgb = img.to_rgb8();
            ImageBuf::new(deinterleave(rgb.as_raw(), w, h, 3)?)
        }
        other => Err(Error::UnsupportedFormat(format!("{other:?} samples"))),
    }
}

/// Writes the cropped image. The format follows the file extension:
/// `pgm`/`ppm`/`pnm` give P5 or P6 by channel count, `png` and `jpg`/`jpeg`
/// use the `image` crate (JPEG at quality 95).
pub fn save_image(img: &ImageBuf, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let bytes = match ext.as_str() {
        "pgm" | "ppm" | "pnm" => encode_pnm(img),
        "png" => encode_with_image_crate(img, ::image::ImageFormat::Png)?,
        "jpg" | "jpeg" => encode_with_image_crate(img, ::image::ImageFormat::Jpeg)?,
        _ => {
            return Err(Error::UnsupportedFormat(format!(
                "cannot infer output format from {}",
                path.display()
            )))
        }
    };
    fs::write(path, bytes)?;
    Ok(())
}

/// Serializes to binary PGM (1 channel) or PPM (3 channels) after cropping.
/// Two-channel buffers are written as PGM of the first channel.
pub fn encode_pnm(img: &ImageBuf) -> Vec<u8> {
    let img = img.cropped();
    let (w, h) = (img.width(), img.height());
    let channels = if img.channels() == 3 { 3 } else { 1 };
    let magic = if channels == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{w} {h}\n255\n").into_bytes();
    out.extend(interleave(&img.planes()[..channels]));
    out
}

fn encode_with_image_crate(img: &ImageBuf, format: ::image::ImageFormat) -> Result<Vec<u8>> {
    let img = img.cropped();
    let (w, h) = (img.width() as u32, img.height() as u32);
    let dynamic = if img.channels() == 3 {
        let buf = ::image::RgbImage::from_raw(w, h, interleave(img.planes()))
            .expect("buffer sized from dims");
        ::image::DynamicImage::ImageRgb8(buf)
    } else {
        let buf = ::image::GrayImage::from_raw(w, h, img.planes()[0].to_u8())
            .expect("buffer sized from dims");
        ::image::DynamicImage::ImageLuma8(buf)
    };
    let mut cursor = Cursor::new(Vec::new());
    if format == ::image::ImageFormat::Jpeg {
        let encoder = ::image::codecs::jpeg::JpegEncoder::new_with_quality(&mut cursor, 95);
        dynamic
            .write_with_encoder(encoder)
            .map_err(|e| Error::Format(e.to_string()))?;
    } else {
        dynamic
            .write_to(&mut cursor, format)
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(cursor.into_inner())
}

pub(crate) fn interleave(planes: &[Plane]) -> Vec<u8> {
    let n = planes[0].data().len();
    let mut out = Vec::with_capacity(n * planes.len());
    for i in 0..n {
        for p in planes {
            out.push(quantize(p.data()[i]));
        }
    }
    out
}

pub(crate) fn deinterleave(
    bytes: &[u8],
    w: usize,
    h: usize,
    channels: usize,
) -> Result<Vec<Plane>> {
    (0..channels)
        .map(|ch| {
            let data = bytes
                .iter()
                .skip(ch)
                .step_by(channels)
                .map(|&b| f64::from(b))
                .collect();
            Plane::new(w, h, data)
        })
        .collect()
}

fn parse_pnm(bytes: &[u8]) -> Result<ImageBuf> {
    let channels = if &bytes[..2] == b"P6" { 3 } else { 1 };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments may separate header tokens
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Format("truncated PNM header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let token = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = token
            .parse()
            .map_err(|_| Error::Format("bad PNM header field".into()))?;
    }
    let [w, h, maxval] = fields;
    if w == 0 || h == 0 {
        return Err(Error::Format("zero-sized image".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedFormat(format!("PNM maxval {maxval}")));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format("missing whitespace after PNM header".into()));
    }
    pos += 1;
    let needed = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Format("PNM dimensions overflow".into()))?;
    let raster = bytes
        .get(pos..pos + needed)
        .ok_or_else(|| Error::Format(format!("truncated PNM raster: want {needed} bytes")))?;
    ImageBuf::new(deinterleave(raster, w, h, channels)?)
}

/// Extends every plane to the next multiple of `m` per axis by half-sample
/// mirror replication. The original extent is carried over unchanged.
pub fn pad_to_multiple(img: &ImageBuf, m: usize) -> Result<ImageBuf> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "padding multiple must be positive".into(),
        ));
    }
    let (w, h) = (img.width(), img.height());
    let (pw, ph) = (w.div_ceil(m) * m, h.div_ceil(m) * m);
    if (pw, ph) == (w, h) {
        return Ok(img.clone());
    }
    let planes = img
        .planes()
        .iter()
        .map(|p| Plane::from_fn(pw, ph, |r, c| p.get(mirror(r, h), mirror(c, w))))
        .collect();
    ImageBuf::with_orig(planes, img.orig_width(), img.orig_height())
}

/// Half-sample symmetric index folding into `0..n`.
#[inline]
pub(crate) fn mirror(i: usize, n: usize) -> usize {
    let j = i % (2 * n);
    if j < n {
        j
    } else {
        2 * n - 1 - j
    }
}

/// Adds seeded Gaussian noise on the normalized `[0, 1]` scale:
/// `v' = clamp(v/255 + N(mean, std), 0, 1) * 255`.
///
/// Samples are drawn channel by channel in row-major order from a
/// ChaCha8 stream, so a given seed is reproducible across platforms.
pub fn add_gaussian_noise(img: &ImageBuf, mean: f64, std: f64, seed: u64) -> Result<ImageBuf> {
    if !std.is_finite() || std < 0.0 || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise needs finite mean and std >= 0 (got mean {mean}, std {std})"
        )));
    }
    let normal = Normal::new(mean, std).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planes = img
        .planes()
        .iter()
        .map(|p| p.map(|v| (v / 255.0 + normal.sample(&mut rng)).clamp(0.0, 1.0) * 255.0))
        .collect();
    ImageBuf::with_orig(planes, img.orig_width(), img.orig_height())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgm(w: usize, h: usize, px: &[u8]) -> Vec<u8> {
        let mut v = format!("P5\n{w} {h}\n255\n").into_bytes();
        v.extend_from_slice(px);
        v
    }

    #[test]
    fn pgm_bytes_map_to_reals() {
        let img = decode_image(&pgm(2, 2, &[0, 128, 255, 64])).unwrap();
        assert_eq!(img.channels(), 1);
        assert_eq!(
            img.planes()[0],
            Plane::from_rows(&[[0.0, 128.0], [255.0, 64.0]])
        );
    }

    #[test]
    fn white_ppm_gives_three_planes() {
        let mut bytes = b"P6\n# comment line\n1 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 255, 255]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.channels(), 3);
        for p in img.planes() {
            assert_eq!(p, &Plane::from_rows(&[[255.0]]));
        }
    }

    #[test]
    fn truncated_and_empty_files_are_format_errors() {
        let short = pgm(4, 4, &[1, 2, 3]);
        assert!(matches!(decode_image(&short), Err(Error::Format(_))));
        assert!(matches!(decode_image(b"P5\n2"), Err(Error::Format(_))));
        assert!(matches!(
            decode_image(&pgm(0, 3, &[])),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            decode_image(b"GIF89a"),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn quantization_rounds_then_clamps() {
        assert_eq!(quantize(99.79), 100);
        assert_eq!(quantize(-3.2), 0);
        assert_eq!(quantize(260.0), 255);
        assert_eq!(quantize(2.5), 3);
        assert_eq!(quantize(0.49), 0);
    }

    #[test]
    fn save_crops_to_original_extent() {
        let plane = Plane::from_fn(5, 5, |r, c| (r * 5 + c) as f64);
        let img = ImageBuf::with_orig(vec![plane], 4, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.pgm");
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!((back.width(), back.height()), (4, 4));
        assert_eq!(back.planes()[0].get(3, 3), 18.0);
    }

    #[test]
    fn png_round_trip_is_exact() {
        let planes: Vec<Plane> = (0..3)
            .map(|k| Plane::from_fn(7, 3, |r, c| ((r * 31 + c * 17 + k * 80) % 256) as f64))
            .collect();
        let img = ImageBuf::new(planes).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        save_image(&img, &path).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);
    }

    #[test]
    fn mirror_padding() {
        let p = Plane::from_fn(3, 3, |r, c| (10 * r + c) as f64);
        let padded = pad_to_multiple(&ImageBuf::gray(p.clone()), 4).unwrap();
        assert_eq!((padded.width(), padded.height()), (4, 4));
        assert_eq!((padded.orig_width(), padded.orig_height()), (3, 3));
        let q = &padded.planes()[0];
        for c in 0..4 {
            assert_eq!(q.get(3, c), q.get(2, c));
        }
        for r in 0..4 {
            assert_eq!(q.get(r, 3), q.get(r, 2));
        }
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(q.get(r, c), p.get(r, c));
            }
        }
    }

    #[test]
    fn padding_identity_and_next_multiple() {
        let img = ImageBuf::gray(Plane::filled(4, 4, 1.0));
        assert_eq!(pad_to_multiple(&img, 4).unwrap(), img);
        let img = ImageBuf::gray(Plane::filled(5, 6, 1.0));
        let padded = pad_to_multiple(&img, 4).unwrap();
        assert_eq!((padded.width(), padded.height()), (8, 8));
        // folding wider than the source still lands inside it
        let tiny = ImageBuf::gray(Plane::filled(1, 1, 3.0));
        let padded = pad_to_multiple(&tiny, 8).unwrap();
        assert!(padded.planes()[0].data().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn noise_zero_std_and_constant_shift() {
        let img = ImageBuf::gray(Plane::from_fn(8, 8, |r, c| (r * 8 + c) as f64));
        let same = add_gaussian_noise(&img, 0.0, 0.0, 1).unwrap();
        for (a, b) in same.planes()[0].data().iter().zip(img.planes()[0].data()) {
            assert!((a - b).abs() < 1e-12);
        }
        let black = ImageBuf::gray(Plane::filled(4, 4, 0.0));
        let shifted = add_gaussian_noise(&black, 0.5, 0.0, 1).unwrap();
        assert!(shifted.planes()[0].data().iter().all(|&v| v == 127.5));
        assert!(add_gaussian_noise(&black, 0.0, -1.0, 1).is_err());
    }

    #[test]
    fn noise_statistics_and_determinism() {
        let img = ImageBuf::gray(Plane::filled(256, 256, 128.0));
        let a = add_gaussian_noise(&img, 0.0, 0.02, 42).unwrap();
        let b = add_gaussian_noise(&img, 0.0, 0.02, 42).unwrap();
        assert_eq!(a, b);
        let d: Vec<f64> = a.planes()[0]
            .data()
            .iter()
            .map(|v| (v - 128.0) / 255.0)
            .collect();
        let n = d.len() as f64;
        let m = d.iter().sum::<f64>() / n;
        let sd = (d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((sd - 0.02).abs() <= 0.002, "sample std {sd}");
        let c = add_gaussian_noise(&img, 0.0, 0.02, 43).unwrap();
        assert_ne!(a, c);
    }
}
