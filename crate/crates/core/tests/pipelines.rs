mod common;

use common::*;
use ro3::catalyst::{self, CodecRegistry, PngCodec, Ro3Container, StoreCodec};
use ro3::image::{add_gaussian_noise, decode_image, encode_pnm, quantize};
use ro3::metrics::{histogram, histogram_similarity, mse, psnr, MAX_8BIT};
use ro3::ro3::{superresolve_once, DetailGain};
use ro3::threshold::{denoise_threshold, ThresholdMode};
use ro3::wavelet::dwt2;
use ro3::{ImageBuf, Plane, Ro3Params, WaveletBasis};

fn store_round_trip(img: &ImageBuf, params: &Ro3Params) -> ImageBuf {
    let c = catalyst::encode(img, params.basis, &StoreCodec, 75, params.ap).unwrap();
    let c = Ro3Container::from_bytes(&c.to_bytes()).unwrap();
    catalyst::decode(&c, &CodecRegistry::default(), params, false).unwrap()
}

/// Orthonormal synthesis preserves energy, so the round-trip error splits
/// into the approximation quantization error plus the detail estimation
/// error, both measured in the wavelet domain.
#[test]
fn store_round_trip_error_matches_subband_budget() {
    for seed in 0..8 {
        let x = random_plane(16, 16, seed);
        let img = ImageBuf::gray(x.clone());
        let params = Ro3Params::default();
        let out = store_round_trip(&img, &params);

        let q = dwt2(&x, WaveletBasis::Haar).unwrap();
        let stored = q.ll.map(|v| f64::from(quantize(v / 2.0)));
        let coarse = dwt2(&stored, WaveletBasis::Haar).unwrap();
        let mut budget =
            q.ll.data()
                .iter()
                .zip(stored.data())
                .map(|(a, s)| (a - 2.0 * s).powi(2))
                .sum::<f64>();
        for (truth, d) in q.details().into_iter().zip(coarse.details()) {
            let est = ro3_loop_oracle(
                &to_rows(&stored),
                &to_rows(&coarse.ll),
                &to_rows(d),
                params.ap,
            );
            for (r, row) in est.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    budget += (truth.get(r, c) - e).powi(2);
                }
            }
        }
        let got = mse(&img, &out).unwrap() * 256.0;
        assert!(
            (got - budget).abs() <= 1e-9 * budget.max(1.0),
            "seed {seed}: {got} vs {budget}"
        );
    }
}

#[test]
fn second_round_trip_is_stable() {
    let img = retina_256();
    let params = Ro3Params::default();
    let once = store_round_trip(&img, &params);
    let twice = store_round_trip(&once, &params);
    assert!(max_abs_diff(&once.planes()[0], &twice.planes()[0]) <= 1.0);
}

#[test]
fn store_payload_is_a_quarter_for_color() {
    let img = ImageBuf::new(vec![
        random_plane(64, 32, 1),
        random_plane(64, 32, 2),
        random_plane(64, 32, 3),
    ])
    .unwrap();
    let c = catalyst::encode(&img, WaveletBasis::Haar, &StoreCodec, 75, 1e-4).unwrap();
    assert_eq!(c.payload.len(), 3 * (32 * 16 + 8));
    assert_eq!(catalyst::uncompressed_size(&c), 64 * 32 * 3);
}

#[test]
fn lossless_backends_agree() {
    let img = ImageBuf::gray(random_plane(30, 18, 4));
    let params = Ro3Params::default();
    let registry = CodecRegistry::default();
    let a = catalyst::encode(&img, WaveletBasis::Haar, &StoreCodec, 75, 1e-4).unwrap();
    let b = catalyst::encode(&img, WaveletBasis::Haar, &PngCodec, 75, 1e-4).unwrap();
    let da = catalyst::decode(&a, &registry, &params, false).unwrap();
    let db = catalyst::decode(&b, &registry, &params, false).unwrap();
    assert_eq!(da, db);
}

#[test]
fn daub4_container_round_trip() {
    let img = retina_256();
    let params = Ro3Params {
        basis: WaveletBasis::Daub4,
        ..Ro3Params::default()
    };
    let out = store_round_trip(&img, &params);
    assert_eq!((out.width(), out.height()), (256, 256));
    assert!(psnr(&img, &out, MAX_8BIT).unwrap() > 30.0);
}

#[test]
fn denoise_ro3_leaves_constants() {
    let img = ImageBuf::gray(Plane::filled(20, 12, 77.0));
    let out = catalyst::denoise_ro3(&img, &Ro3Params::default()).unwrap();
    assert!(max_abs_diff(&img.planes()[0], &out.planes()[0]) < 1e-9);
}

#[test]
fn denoisers_improve_a_second_seed() {
    let clean = retina_256();
    let noisy = add_gaussian_noise(&clean, 0.0, 0.02, 42).unwrap();
    let base = psnr(&clean, &noisy, MAX_8BIT).unwrap();
    for mode in [ThresholdMode::Soft, ThresholdMode::Hard] {
        let out = denoise_threshold(&noisy, WaveletBasis::Daub4, 1, mode).unwrap();
        assert!(
            psnr(&clean, &out, MAX_8BIT).unwrap() > base + 2.0,
            "{mode:?}"
        );
    }
    let out = catalyst::denoise_ro3(&noisy, &Ro3Params::default()).unwrap();
    assert!(psnr(&clean, &out, MAX_8BIT).unwrap() > base + 2.0);
}

#[test]
fn multi_level_denoise_keeps_shape() {
    let clean = ImageBuf::gray(Plane::from_fn(50, 37, |r, c| {
        100.0 + 40.0 * ((r as f64) / 9.0).sin() * ((c as f64) / 7.0).cos()
    }));
    let noisy = add_gaussian_noise(&clean, 0.0, 0.02, 3).unwrap();
    for levels in 1..=3 {
        let out =
            denoise_threshold(&noisy, WaveletBasis::Daub4, levels, ThresholdMode::Soft).unwrap();
        assert_eq!((out.width(), out.height()), (50, 37));
        assert!(psnr(&clean, &out, MAX_8BIT).unwrap() > psnr(&clean, &noisy, MAX_8BIT).unwrap());
    }
}

#[test]
fn superresolved_patch_keeps_its_histogram() {
    let img = retina_256();
    let patch = ImageBuf::gray(Plane::from_fn(8, 8, |r, c| {
        img.planes()[0].get(120 + r, 120 + c)
    }));
    for gain in [DetailGain::Faithful, DetailGain::Corrected] {
        let params = Ro3Params {
            detail_gain: gain,
            ..Ro3Params::default()
        };
        let sr = superresolve_once(&patch, &params).unwrap();
        let s = histogram_similarity(&histogram(&patch.planes()[0]), &histogram(&sr.planes()[0]))
            .unwrap();
        assert!(s >= 0.5, "{gain:?}: {s}");
    }
}

#[test]
fn pnm_round_trip_of_superresolved_output() {
    let sr = superresolve_once(&retina_256(), &Ro3Params::default()).unwrap();
    let back = decode_image(&encode_pnm(&sr)).unwrap();
    assert_eq!((back.width(), back.height()), (512, 512));
    let expect = sr.planes()[0].map(|v| f64::from(quantize(v)));
    assert_eq!(back.planes()[0], expect);
}
