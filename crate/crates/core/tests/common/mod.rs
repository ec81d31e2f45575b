//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ro3::image::load_image;
use ro3::{ImageBuf, Plane};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

/// 512×512 grayscale fundus photograph (public domain), box-downsampled
/// by two from the source and center-cropped.
pub fn retina() -> ImageBuf {
    load_image(data_path("retina.pgm")).expect("retina fixture")
}

/// Central 256×256 window of [`retina`].
pub fn retina_256() -> ImageBuf {
    let full = retina();
    let p = &full.planes()[0];
    ImageBuf::gray(Plane::from_fn(256, 256, |r, c| p.get(r + 128, c + 128)))
}

pub fn random_plane(w: usize, h: usize, seed: u64) -> Plane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Plane::from_fn(w, h, |_, _| rng.random_range(0.0..255.0))
}

pub fn max_abs_diff(a: &Plane, b: &Plane) -> f64 {
    assert_eq!(a.dims(), b.dims());
    a.data()
        .iter()
        .zip(b.data())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Rule-of-Three detail estimate written as the reference listing's
/// 1-based double loop: coarse cell (r2, c2) feeds fine pixels
/// (2r2-1 .. 2r2, 2c2-1 .. 2c2).
pub fn ro3_loop_oracle(
    ll1: &[Vec<f64>],
    ll2: &[Vec<f64>],
    d2: &[Vec<f64>],
    ap: f64,
) -> Vec<Vec<f64>> {
    let rows = ll1.len();
    let cols = ll1[0].len();
    let mut out = vec![vec![0.0; cols]; rows];
    let at = |m: &[Vec<f64>], r: usize, c: usize| m[r - 1][c - 1];
    for r2 in 1..=rows / 2 {
        for c2 in 1..=cols / 2 {
            let r1 = 2 * r2;
            let c1 = 2 * c2;
            for (r, c) in [(r1 - 1, c1 - 1), (r1 - 1, c1), (r1, c1 - 1), (r1, c1)] {
                out[r - 1][c - 1] = at(d2, r2, c2) * (ap + at(ll1, r, c)) / (ap + at(ll2, r2, c2));
            }
        }
    }
    out
}

/// Literal 1-based transcription of the two-pass deblurring listing:
/// zero-pad by 3, vertical pass, horizontal pass, crop.
pub fn deblur_loop_oracle(img: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let r_ib = img.len();
    let c_ib = img[0].len();
    let m = 7usize;
    let d = m / 2;
    let rows = r_ib + 2 * d;
    let cols = c_ib + 2 * d;
    let mut ib = vec![vec![0.0; cols + 1]; rows + 1];
    for r in 1..=r_ib {
        for c in 1..=c_ib {
            ib[r + d][c + d] = img[r - 1][c - 1];
        }
    }
    let w = 7usize;
    let half = w / 2;
    let mut ibaux = ib.clone();
    let mut id = ib.clone();
    for r in 1 + half..=rows - half {
        for c in 1..=cols {
            let mut acuv = 0.0;
            for rw in 1..=w {
                acuv += ib[r - (1 + half) + rw][c] * (-0.0129);
            }
            ibaux[r][c] = acuv;
        }
    }
    for c in 1 + half..=cols - half {
        for r in 1 + half..=rows - half {
            let mut acuh = 0.0;
            for cw in 1..=w {
                acuh += ibaux[r][c - (1 + half) + cw];
            }
            id[r][c] = acuh + 1.63 * ib[r][c];
        }
    }
    (1..=r_ib)
        .map(|r| (1..=c_ib).map(|c| id[r + d][c + d]).collect())
        .collect()
}

pub fn to_rows(p: &Plane) -> Vec<Vec<f64>> {
    (0..p.height()).map(|r| p.row(r).to_vec()).collect()
}
