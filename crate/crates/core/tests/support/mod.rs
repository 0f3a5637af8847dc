#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavelet_prep::dwt::FilterBank;
use wavelet_prep::io::{ImageBuffer, Samples};
use wavelet_prep::Plane;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_int_plane(rng: &mut impl Rng, w: usize, h: usize, bits: u32) -> Plane<i32> {
    let max = (1i32 << bits) - 1;
    Plane::from_fn(w, h, |_, _| rng.gen_range(0..=max))
}

pub fn random_float_plane(rng: &mut impl Rng, w: usize, h: usize) -> Plane<f64> {
    Plane::from_fn(w, h, |_, _| rng.gen::<f64>())
}

pub fn noise_image(rng: &mut impl Rng, w: usize, h: usize, channels: usize) -> ImageBuffer {
    let data = (0..w * h * channels).map(|_| rng.gen::<u8>()).collect();
    ImageBuffer::new(w, h, channels, Samples::U8(data)).unwrap()
}

pub fn max_abs_diff(a: &Plane<f64>, b: &Plane<f64>) -> f64 {
    assert_eq!(a.dims(), b.dims());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Mirror without repeating the end sample, applied until in range.
fn mirror(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    while i < 0 || i >= n {
        i = if i < 0 { -i } else { 2 * (n - 1) - i };
    }
    i as usize
}

/// Direct 2D reference: convolve the symmetrically extended plane with the
/// outer-product kernels F_l⊗F_l, F_h⊗F_l, F_l⊗F_h, F_h⊗F_h (horizontal
/// factor first) and keep every other output in both axes. Returns
/// [LL, HL, LH, HH].
pub fn outer_product_oracle(plane: &Plane<f64>, bank: &FilterBank) -> [Plane<f64>; 4] {
    let (w, h) = plane.dims();
    let lo = (bank.lowpass_taps(), bank.lowpass_center_index() as isize, 0isize);
    let hi = (bank.highpass_taps(), bank.highpass_center_index() as isize, 1isize);
    let band = |horizontal: (&[f64], isize, isize), vertical: (&[f64], isize, isize)| {
        Plane::from_fn(w / 2, h / 2, |n, m| {
            let (htaps, hc, hphase) = horizontal;
            let (vtaps, vc, vphase) = vertical;
            let mut acc = 0.0;
            for (ky, vt) in vtaps.iter().enumerate() {
                let y = mirror(2 * m as isize + vphase + ky as isize - vc, h);
                for (kx, ht) in htaps.iter().enumerate() {
                    let x = mirror(2 * n as isize + hphase + kx as isize - hc, w);
                    acc += vt * ht * plane.get(x, y);
                }
            }
            acc
        })
    };
    [band(lo, lo), band(hi, lo), band(lo, hi), band(hi, hi)]
}
