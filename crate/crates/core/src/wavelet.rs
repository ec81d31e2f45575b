//! Separable 2-D discrete wavelet transform.
//!
//! Filters are orthonormal, so a constant plane of value `c` analyses to an
//! approximation band of `2c` and synthesis is the exact transpose of
//! analysis. Boundaries wrap periodically, which keeps every level
//! critically sampled (each subband is exactly half the parent per axis)
//! and orthogonal. For Haar the two-tap support never reaches across a
//! boundary, so the extension mode has no effect on it at all.
//!
//! Subband naming follows the usual row-then-column order:
//!
//! | band | along rows | along columns | detail |
//! |------|------------|---------------|--------|
//! | `ll` | low        | low           | approximation |
//! | `lh` | high       | low           | vertical edges |
//! | `hl` | low        | high          | horizontal edges |
//! | `hh` | high       | high          | diagonal |

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::Plane;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

const HAAR_LOWPASS: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];

// Daubechies, four vanishing moments (8 taps), orthonormal.
const DAUB4_LOWPASS: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_6,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_08,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WaveletBasis {
    /// Daubechies 1.
    #[default]
    Haar,
    Daub4,
}

impl WaveletBasis {
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            WaveletBasis::Haar => &HAAR_LOWPASS,
            WaveletBasis::Daub4 => &DAUB4_LOWPASS,
        }
    }

    /// Quadrature mirror of the lowpass: `g[n] = (-1)^n h[L-1-n]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|n| {
                if n % 2 == 0 {
                    h[l - 1 - n]
                } else {
                    -h[l - 1 - n]
                }
            })
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            WaveletBasis::Haar => "haar",
            WaveletBasis::Daub4 => "db4",
        }
    }
}

impl fmt::Display for WaveletBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WaveletBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(WaveletBasis::Haar),
            "db4" | "daub4" => Ok(WaveletBasis::Daub4),
            other => Err(Error::InvalidParameter(format!(
                "unknown wavelet basis '{other}'"
            ))),
        }
    }
}

/// The four subbands from one analysis step.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandQuad {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
    pub level: usize,
}

impl SubbandQuad {
    pub fn new(ll: Plane, lh: Plane, hl: Plane, hh: Plane, level: usize) -> Result<Self> {
        let dims = ll.dims();
        if lh.dims() != dims || hl.dims() != dims || hh.dims() != dims {
            return Err(Error::Dimension(format!(
                "subbands disagree: ll {:?}, lh {:?}, hl {:?}, hh {:?}",
                dims,
                lh.dims(),
                hl.dims(),
                hh.dims()
            )));
        }
        Ok(Self {
            ll,
            lh,
            hl,
            hh,
            level,
        })
    }

    pub fn details(&self) -> [&Plane; 3] {
        [&self.lh, &self.hl, &self.hh]
    }

    pub fn energy(&self) -> f64 {
        self.ll.energy() + self.detail_energy()
    }

    pub fn detail_energy(&self) -> f64 {
        self.lh.energy() + self.hl.energy() + self.hh.energy()
    }
}

/// One level of analysis on an even-sized line.
fn analyze_line(x: &[f64], lo: &[f64], hi: &[f64], approx: &mut [f64], detail: &mut [f64]) {
    let n = x.len();
    for k in 0..n / 2 {
        let mut a = 0.0;
        let mut d = 0.0;
        for (t, (&h, &g)) in lo.iter().zip(hi).enumerate() {
            let v = x[(2 * k + t) % n];
            a += h * v;
            d += g * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// Transpose of [`analyze_line`]; `out` must be zeroed.
fn synthesize_line(approx: &[f64], detail: &[f64], lo: &[f64], hi: &[f64], out: &mut [f64]) {
    let n = out.len();
    for k in 0..n / 2 {
        for (t, (&h, &g)) in lo.iter().zip(hi).enumerate() {
            out[(2 * k + t) % n] += approx[k] * h + detail[k] * g;
        }
    }
}

/// Filters every row of `p`, returning (lowpass, highpass) half-width planes.
fn analyze_rows(p: &Plane, lo: &[f64], hi: &[f64]) -> (Plane, Plane) {
    let (w, h) = p.dims();
    let half = w / 2;
    let mut a = vec![0.0; half * h];
    let mut d = vec![0.0; half * h];
    for r in 0..h {
        analyze_line(
            p.row(r),
            lo,
            hi,
            &mut a[r * half..(r + 1) * half],
            &mut d[r * half..(r + 1) * half],
        );
    }
    (Plane::from_raw(half, h, a), Plane::from_raw(half, h, d))
}

/// Filters every column of `p`, returning (lowpass, highpass) half-height planes.
fn analyze_cols(p: &Plane, lo: &[f64], hi: &[f64]) -> (Plane, Plane) {
    let (w, h) = p.dims();
    let half = h / 2;
    let mut a = vec![0.0; w * half];
    let mut d = vec![0.0; w * half];
    let mut col = vec![0.0; h];
    let mut ca = vec![0.0; half];
    let mut cd = vec![0.0; half];
    for c in 0..w {
        for (r, v) in col.iter_mut().enumerate() {
            *v = p.get(r, c);
        }
        analyze_line(&col, lo, hi, &mut ca, &mut cd);
        for k in 0..half {
            a[k * w + c] = ca[k];
            d[k * w + c] = cd[k];
        }
    }
    (Plane::from_raw(w, half, a), Plane::from_raw(w, half, d))
}

fn synthesize_rows(a: &Plane, d: &Plane, lo: &[f64], hi: &[f64]) -> Plane {
    let (half, h) = a.dims();
    let w = half * 2;
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        synthesize_line(a.row(r), d.row(r), lo, hi, &mut out[r * w..(r + 1) * w]);
    }
    Plane::from_raw(w, h, out)
}

fn synthesize_cols(a: &Plane, d: &Plane, lo: &[f64], hi: &[f64]) -> Plane {
    let (w, half) = a.dims();
    let h = half * 2;
    let mut out = vec![0.0; w * h];
    let mut ca = vec![0.0; half];
    let mut cd = vec![0.0; half];
    let mut col = vec![0.0; h];
    for c in 0..w {
        for k in 0..half {
            ca[k] = a.get(k, c);
            cd[k] = d.get(k, c);
        }
        col.fill(0.0);
        synthesize_line(&ca, &cd, lo, hi, &mut col);
        for (r, v) in col.iter().enumerate() {
            out[r * w + c] = *v;
        }
    }
    Plane::from_raw(w, h, out)
}

/// Single analysis step. Both extents of `p` must be even.
pub fn dwt2(p: &Plane, basis: WaveletBasis) -> Result<SubbandQuad> {
    let (w, h) = p.dims();
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::Dimension(format!(
            "dwt2 needs even extents, got {w}x{h}"
        )));
    }
    let lo = basis.lowpass();
    let hi = basis.highpass();
    let (row_lo, row_hi) = analyze_rows(p, lo, &hi);
    let (ll, hl) = analyze_cols(&row_lo, lo, &hi);
    let (lh, hh) = analyze_cols(&row_hi, lo, &hi);
    Ok(SubbandQuad {
        ll,
        lh,
        hl,
        hh,
        level: 1,
    })
}

/// Exact inverse of [`dwt2`].
pub fn idwt2(q: &SubbandQuad, basis: WaveletBasis) -> Result<Plane> {
    let dims = q.ll.dims();
    if q.lh.dims() != dims || q.hl.dims() != dims || q.hh.dims() != dims {
        return Err(Error::Dimension("idwt2 subbands differ in size".into()));
    }
    let lo = basis.lowpass();
    let hi = basis.highpass();
    let row_lo = synthesize_cols(&q.ll, &q.hl, lo, &hi);
    let row_hi = synthesize_cols(&q.lh, &q.hh, lo, &hi);
    Ok(synthesize_rows(&row_lo, &row_hi, lo, &hi))
}

/// Multi-level decomposition, finest level first.
///
/// Every quad keeps its own `ll`; only the last (coarsest) one is needed for
/// reconstruction, the others are retained for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    pub quads: Vec<SubbandQuad>,
}

impl Pyramid {
    pub fn levels(&self) -> usize {
        self.quads.len()
    }

    pub fn coarsest(&self) -> &SubbandQuad {
        self.quads.last().expect("pyramid has at least one level")
    }
}

pub fn dwt2_multi(p: &Plane, basis: WaveletBasis, levels: usize) -> Result<Pyramid> {
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be at least 1".into()));
    }
    let m = 1usize
        .checked_shl(levels as u32)
        .ok_or_else(|| Error::InvalidParameter(format!("{levels} levels")))?;
    let (w, h) = p.dims();
    if w % m != 0 || h % m != 0 {
        return Err(Error::Dimension(format!(
            "{levels} levels need extents divisible by {m}, got {w}x{h}"
        )));
    }
    let mut quads = Vec::with_capacity(levels);
    let mut current = dwt2(p, basis)?;
    for level in 2..=levels {
        let next = dwt2(&current.ll, basis)?;
        quads.push(current);
        current = SubbandQuad { level, ..next };
    }
    quads.push(current);
    Ok(Pyramid { quads })
}

/// Rebuilds the plane from the coarsest approximation and every level's details.
pub fn idwt2_multi(pyramid: &Pyramid, basis: WaveletBasis) -> Result<Plane> {
    let mut quads = pyramid.quads.iter().rev();
    let coarsest = quads
        .next()
        .ok_or_else(|| Error::Dimension("empty pyramid".into()))?;
    let mut approx = idwt2(coarsest, basis)?;
    for q in quads {
        let step = SubbandQuad::new(approx, q.lh.clone(), q.hl.clone(), q.hh.clone(), q.level)?;
        approx = idwt2(&step, basis)?;
    }
    Ok(approx)
}
