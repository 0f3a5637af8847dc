use super::filter::{BoundaryExtension, FilterBank};
use super::ladder::{self, Ladder};
use crate::error::{Error, Result};

fn check_even(len: usize) -> Result<()> {
    if len < 2 {
        return Err(Error::DegenerateSignal(len));
    }
    if !len.is_multiple_of(2) {
        return Err(Error::OddLength(len));
    }
    Ok(())
}

fn check_bands<T>(low: &[T], high: &[T]) -> Result<()> {
    if low.len() != high.len() {
        return Err(Error::LengthMismatch {
            low: low.len(),
            high: high.len(),
        });
    }
    if low.is_empty() {
        return Err(Error::DegenerateSignal(0));
    }
    Ok(())
}

/// Splits a real signal into its low- and high-pass halves.
///
/// `low[n]` is `F_l` centred on `x[2n]`, `high[n]` is `F_h` centred on
/// `x[2n+1]`, both over the symmetrically extended signal.
pub fn analyze_1d(
    signal: &[f64],
    bank: &FilterBank,
    extension: BoundaryExtension,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let BoundaryExtension::WholeSampleSymmetric = extension;
    check_even(signal.len())?;
    if let Some(index) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSample { index });
    }
    let half = signal.len() / 2;
    let mut low = vec![0.0; half];
    let mut high = vec![0.0; half];
    ladder::split_line(f64::params(bank), signal, &mut low, &mut high)?;
    Ok((low, high))
}

/// Exact inverse of [`analyze_1d`].
pub fn synthesize_1d(
    low: &[f64],
    high: &[f64],
    bank: &FilterBank,
    extension: BoundaryExtension,
) -> Result<Vec<f64>> {
    let BoundaryExtension::WholeSampleSymmetric = extension;
    check_bands(low, high)?;
    let mut out = vec![0.0; 2 * low.len()];
    ladder::merge_line(f64::params(bank), low, high, &mut out)?;
    Ok(out)
}

/// Reversible integer 5/3 lifting: returns `(s, d)`.
pub fn lift_forward_1d(signal: &[i32]) -> Result<(Vec<i32>, Vec<i32>)> {
    check_even(signal.len())?;
    let half = signal.len() / 2;
    let mut low = vec![0; half];
    let mut high = vec![0; half];
    ladder::split_line((), signal, &mut low, &mut high)?;
    Ok((low, high))
}

/// Bit-exact inverse of [`lift_forward_1d`].
pub fn lift_inverse_1d(low: &[i32], high: &[i32]) -> Result<Vec<i32>> {
    check_bands(low, high)?;
    let mut out = vec![0; 2 * low.len()];
    ladder::merge_line((), low, high, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const EXT: BoundaryExtension = BoundaryExtension::WholeSampleSymmetric;

    // Materializes the mirrored signal and convolves at every index, then
    // keeps even (low) / odd (high) outputs.
    fn convolve_decimate_oracle(x: &[f64], bank: &FilterBank) -> (Vec<f64>, Vec<f64>) {
        let n = x.len() as isize;
        let pad = 4isize;
        let ext: Vec<f64> = (-pad..n + pad)
            .map(|i| {
                let mut j = i;
                while j < 0 || j >= n {
                    if j < 0 {
                        j = -j;
                    }
                    if j >= n {
                        j = 2 * (n - 1) - j;
                    }
                }
                x[j as usize]
            })
            .collect();
        let at = |i: isize| ext[(i + pad) as usize];
        let conv = |taps: &[f64], center: usize, i: isize| -> f64 {
            taps.iter()
                .enumerate()
                .map(|(k, t)| t * at(i + k as isize - center as isize))
                .sum()
        };
        let full_low: Vec<f64> = (0..n)
            .map(|i| conv(bank.lowpass_taps(), bank.lowpass_center_index(), i))
            .collect();
        let full_high: Vec<f64> = (0..n)
            .map(|i| conv(bank.highpass_taps(), bank.highpass_center_index(), i))
            .collect();
        (
            full_low.iter().step_by(2).copied().collect(),
            full_high.iter().skip(1).step_by(2).copied().collect(),
        )
    }

    // Literal lifting with an explicitly extended signal.
    fn lifting_oracle(x: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let n = x.len() as isize;
        let xe = |i: isize| -> i64 {
            let mut j = i;
            while j < 0 || j >= n {
                j = if j < 0 { -j } else { 2 * (n - 1) - j };
            }
            x[j as usize]
        };
        let half = n / 2;
        let d = |k: isize| -> i64 {
            let i = 2 * k + 1;
            xe(i) - (xe(i - 1) + xe(i + 1)).div_euclid(2)
        };
        let ds: Vec<i64> = (0..half).map(d).collect();
        let ss: Vec<i64> = (0..half)
            .map(|k| xe(2 * k) + (d(k - 1) + d(k) + 2).div_euclid(4))
            .collect();
        (ss, ds)
    }

    #[test]
    fn constant_signal() {
        let (low, high) = analyze_1d(&[5.0; 6], &FilterBank::paper(), EXT).unwrap();
        assert_eq!(low, vec![5.0; 3]);
        assert_eq!(high, vec![0.0; 3]);
        let back = synthesize_1d(&low, &high, &FilterBank::paper(), EXT).unwrap();
        assert_eq!(back, vec![5.0; 6]);
    }

    #[test]
    fn impulse_matches_convolution_exactly() {
        let x = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        for bank in [FilterBank::paper(), FilterBank::jpeg2000()] {
            let (low, high) = analyze_1d(&x, &bank, EXT).unwrap();
            let (ol, oh) = convolve_decimate_oracle(&x, &bank);
            assert_eq!(low, ol);
            assert_eq!(high, oh);
            let back = synthesize_1d(&low, &high, &bank, EXT).unwrap();
            let err = back.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
        // frozen from the oracle
        let (low, high) = analyze_1d(&x, &FilterBank::paper(), EXT).unwrap();
        assert_eq!(low, vec![-0.25, 0.75, -0.125]);
        assert_eq!(high, vec![-0.25, -0.25, 0.0]);
    }

    #[test]
    fn random_signals_match_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in (2..=40).step_by(2) {
            let x: Vec<f64> = (0..len).map(|_| rng.gen::<f64>()).collect();
            for bank in [FilterBank::paper(), FilterBank::jpeg2000()] {
                let (low, high) = analyze_1d(&x, &bank, EXT).unwrap();
                let (ol, oh) = convolve_decimate_oracle(&x, &bank);
                for (a, b) in low.iter().chain(&high).zip(ol.iter().chain(&oh)) {
                    assert!((a - b).abs() < 1e-12, "len {len}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn random_roundtrip_256() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..256).map(|_| rng.gen::<f64>()).collect();
        let bank = FilterBank::paper();
        let (low, high) = analyze_1d(&x, &bank, EXT).unwrap();
        let back = synthesize_1d(&low, &high, &bank, EXT).unwrap();
        let err = back.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn length_errors() {
        let bank = FilterBank::paper();
        assert!(matches!(analyze_1d(&[1.0; 5], &bank, EXT), Err(Error::OddLength(5))));
        assert!(matches!(analyze_1d(&[1.0], &bank, EXT), Err(Error::DegenerateSignal(1))));
        assert!(matches!(lift_forward_1d(&[1; 3]), Err(Error::OddLength(3))));
        assert!(matches!(
            synthesize_1d(&[1.0; 3], &[0.0; 2], &bank, EXT),
            Err(Error::LengthMismatch { low: 3, high: 2 })
        ));
        assert!(matches!(lift_inverse_1d(&[1; 2], &[0; 3]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(
            analyze_1d(&[1.0, f64::NAN], &bank, EXT),
            Err(Error::NonFiniteSample { index: 1 })
        ));
    }

    #[test]
    fn lifting_constant() {
        let (s, d) = lift_forward_1d(&[7; 4]).unwrap();
        assert_eq!((s.as_slice(), d.as_slice()), (&[7, 7][..], &[0, 0][..]));
        assert_eq!(lift_inverse_1d(&[7, 7], &[0, 0]).unwrap(), vec![7; 4]);
    }

    #[test]
    fn lifting_ramp_matches_oracle() {
        let x = [0, 1, 2, 3, 4, 5];
        let (s, d) = lift_forward_1d(&x).unwrap();
        let (os, od) = lifting_oracle(&x.map(i64::from));
        assert_eq!(s.iter().map(|&v| v as i64).collect::<Vec<_>>(), os);
        assert_eq!(d.iter().map(|&v| v as i64).collect::<Vec<_>>(), od);
        // frozen from the oracle
        assert_eq!(s, vec![0, 2, 4]);
        assert_eq!(d, vec![0, 0, 1]);
        assert_eq!(lift_inverse_1d(&s, &d).unwrap(), x.to_vec());
    }

    #[test]
    fn lifting_random_8bit_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        for _ in 0..1000 {
            let len = 2 * rng.gen_range(1..=256);
            let x: Vec<i32> = (0..len).map(|_| rng.gen_range(0..=255)).collect();
            let (s, d) = lift_forward_1d(&x).unwrap();
            let (os, od) = lifting_oracle(&x.iter().map(|&v| v as i64).collect::<Vec<_>>());
            assert_eq!(s.iter().map(|&v| v as i64).collect::<Vec<_>>(), os);
            assert_eq!(d.iter().map(|&v| v as i64).collect::<Vec<_>>(), od);
            assert_eq!(lift_inverse_1d(&s, &d).unwrap(), x);
        }
    }

    #[test]
    fn lifting_random_16bit_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..200 {
            let len = 2 * rng.gen_range(1..=256);
            let x: Vec<i32> = (0..len).map(|_| rng.gen_range(0..=65535)).collect();
            let (s, d) = lift_forward_1d(&x).unwrap();
            assert_eq!(lift_inverse_1d(&s, &d).unwrap(), x);
        }
    }

    #[test]
    fn lifting_overflow_is_reported() {
        let x = [i32::MIN, i32::MAX, i32::MIN, i32::MAX];
        assert!(matches!(lift_forward_1d(&x), Err(Error::Overflow(_))));
    }
}
