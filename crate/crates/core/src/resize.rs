//! Bilinear resampling with half-pixel centres.
//!
//! Output pixel `i` samples the source at `(i + 0.5) * src / dst - 0.5`,
//! clamped to `[0, src - 1]`. The same kernel serves both up- and
//! down-scaling.

use crate::error::{Error, Result};
use crate::par;
use crate::plane::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingConvention {
    HalfPixel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResizeSpec {
    pub target_width: usize,
    pub target_height: usize,
    pub sampling: SamplingConvention,
}

impl ResizeSpec {
    /// Any positive target size.
    pub fn new(target_width: usize, target_height: usize) -> Result<Self> {
        if target_width == 0 || target_height == 0 {
            return Err(Error::Config(format!(
                "resize target {target_width}x{target_height} must be positive"
            )));
        }
        Ok(Self {
            target_width,
            target_height,
            sampling: SamplingConvention::HalfPixel,
        })
    }

    /// A target the wavelet stage can consume: both dims even and >= 2.
    pub fn even(target_width: usize, target_height: usize) -> Result<Self> {
        if target_width < 2 || target_height < 2 || !target_width.is_multiple_of(2) || !target_height.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "resize target {target_width}x{target_height} must be even and at least 2x2"
            )));
        }
        Self::new(target_width, target_height)
    }
}

#[derive(Debug, Clone, Copy)]
struct Tap {
    lo: usize,
    hi: usize,
    t: f64,
}

fn taps(src: usize, dst: usize) -> Vec<Tap> {
    let ratio = src as f64 / dst as f64;
    let max = (src - 1) as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * ratio - 0.5).clamp(0.0, max);
            let lo = pos.floor() as usize;
            Tap {
                lo,
                hi: (lo + 1).min(src - 1),
                t: pos - lo as f64,
            }
        })
        .collect()
}

// `a + (b - a) t` is exact when a == b; the clamp keeps rounding from
// stepping outside [min(a, b), max(a, b)].
#[inline(always)]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    let v = a + (b - a) * t;
    if a <= b {
        v.clamp(a, b)
    } else {
        v.clamp(b, a)
    }
}

pub fn resize_bilinear(plane: &Plane<f64>, spec: ResizeSpec) -> Result<Plane<f64>> {
    let (sw, sh) = plane.dims();
    if sw < 2 || sh < 2 {
        return Err(Error::DegenerateDimension { width: sw, height: sh });
    }
    let SamplingConvention::HalfPixel = spec.sampling;
    let (dw, dh) = (spec.target_width, spec.target_height);
    let xs = taps(sw, dw);
    let ys = taps(sh, dh);
    let mut out = Plane::zeros(dw, dh);
    par::for_each_row(out.as_mut_slice(), dw, |y, row| {
        let ty = ys[y];
        let top = plane.row(ty.lo);
        let bottom = plane.row(ty.hi);
        for (o, tx) in row.iter_mut().zip(&xs) {
            let a = lerp(top[tx.lo], top[tx.hi], tx.t);
            let b = lerp(bottom[tx.lo], bottom[tx.hi], tx.t);
            *o = lerp(a, b, ty.t);
        }
    });
    Ok(out)
}
