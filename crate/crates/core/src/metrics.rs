//! Quality and compression metrics, plus 256-bin histograms.

use crate::error::{Error, Result};
use crate::image::{quantize, ImageBuf, Plane};

/// Peak value for 8-bit samples, `2^8 - 1`.
pub const MAX_8BIT: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    /// `+∞` when the images are identical.
    pub psnr_db: f64,
    pub mae: f64,
    pub cr: Option<f64>,
    pub pss_percent: Option<f64>,
    pub max_value: f64,
}

impl MetricsReport {
    pub fn compare(reference: &ImageBuf, test: &ImageBuf) -> Result<Self> {
        Self::compare_with_max(reference, test, MAX_8BIT)
    }

    pub fn compare_with_max(reference: &ImageBuf, test: &ImageBuf, max_value: f64) -> Result<Self> {
        let mse = mse(reference, test)?;
        Ok(Self {
            mse,
            psnr_db: psnr_from_mse(mse, max_value),
            mae: mae(reference, test)?,
            cr: None,
            pss_percent: None,
            max_value,
        })
    }

    /// Adds CR and PSS from byte counts.
    pub fn with_sizes(mut self, uncompressed: u64, compressed: u64) -> Result<Self> {
        let ratio = cr(uncompressed, compressed)?;
        self.cr = Some(ratio);
        self.pss_percent = Some(pss(ratio)?);
        Ok(self)
    }
}

fn paired_samples<'a>(
    a: &'a ImageBuf,
    b: &'a ImageBuf,
) -> Result<impl Iterator<Item = (f64, f64)> + 'a> {
    if a.channels() != b.channels() || a.width() != b.width() || a.height() != b.height() {
        return Err(Error::Dimension(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    Ok(a.planes()
        .iter()
        .zip(b.planes())
        .flat_map(|(p, q)| p.data().iter().copied().zip(q.data().iter().copied())))
}

fn sample_count(a: &ImageBuf) -> f64 {
    (a.width() * a.height() * a.channels()) as f64
}

/// Mean squared error over every sample of every channel.
pub fn mse(a: &ImageBuf, b: &ImageBuf) -> Result<f64> {
    let sum: f64 = paired_samples(a, b)?.map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / sample_count(a))
}

pub fn mae(a: &ImageBuf, b: &ImageBuf) -> Result<f64> {
    let sum: f64 = paired_samples(a, b)?.map(|(x, y)| (x - y).abs()).sum();
    Ok(sum / sample_count(a))
}

pub fn psnr(a: &ImageBuf, b: &ImageBuf, max_value: f64) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?, max_value))
}

/// `10·log10(max² / mse)`, or `+∞` for a zero error.
pub fn psnr_from_mse(mse: f64, max_value: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (max_value * max_value / mse).log10()
    }
}

/// Compression ratio, uncompressed over compressed size.
pub fn cr(uncompressed: u64, compressed: u64) -> Result<f64> {
    if uncompressed == 0 || compressed == 0 {
        return Err(Error::InvalidParameter(
            "compression ratio of a zero size".into(),
        ));
    }
    Ok(uncompressed as f64 / compressed as f64)
}

/// Percent space savings, `(1 − 1/CR)·100`.
pub fn pss(cr: f64) -> Result<f64> {
    if cr.is_nan() || cr <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "CR must be positive, got {cr}"
        )));
    }
    Ok((1.0 - 1.0 / cr) * 100.0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: [u64; 256],
    pub total: u64,
}

impl Histogram {
    fn empty() -> Self {
        Self {
            bins: [0; 256],
            total: 0,
        }
    }

    fn add_plane(&mut self, p: &Plane) {
        for &v in p.data() {
            self.bins[quantize(v) as usize] += 1;
        }
        self.total += p.data().len() as u64;
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        let t = self.total as f64;
        self.bins.iter().map(move |&b| b as f64 / t)
    }
}

/// Samples are rounded and clamped into `0..=255` for binning only.
pub fn histogram(p: &Plane) -> Histogram {
    let mut h = Histogram::empty();
    h.add_plane(p);
    h
}

/// Pools every channel into one histogram.
pub fn histogram_image(img: &ImageBuf) -> Histogram {
    let mut h = Histogram::empty();
    for p in img.planes() {
        h.add_plane(p);
    }
    h
}

/// Normalized histogram intersection, `Σ min(p1, p2)` in `[0, 1]`.
pub fn histogram_similarity(h1: &Histogram, h2: &Histogram) -> Result<f64> {
    if h1.total == 0 || h2.total == 0 {
        return Err(Error::InvalidParameter(
            "similarity of an empty histogram".into(),
        ));
    }
    Ok(h1
        .probabilities()
        .zip(h2.probabilities())
        .map(|(a, b)| a.min(b))
        .sum())
}
