use serde::{Deserialize, Serialize};

/// How the analysis high-pass taps are scaled.
///
/// `Paper` keeps `F_h = {-1/4, 1/2, -1/4}`; `Jpeg2000` uses the standard
/// reversible-path taps `{-1/2, 1, -1/2}`. The low-pass filter is the same
/// in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingConvention {
    #[default]
    Paper,
    Jpeg2000,
}

impl ScalingConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalingConvention::Paper => "paper",
            ScalingConvention::Jpeg2000 => "jpeg2000",
        }
    }
}

impl std::str::FromStr for ScalingConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "jpeg2000" => Ok(Self::Jpeg2000),
            other => Err(format!("unknown scaling convention '{other}'")),
        }
    }
}

/// Boundary extension used by every transform in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum BoundaryExtension {
    /// Mirror about the end samples without repeating them:
    /// `x[-n] = x[n]`, `x[N-1+n] = x[N-1-n]`.
    #[default]
    WholeSampleSymmetric,
}

impl BoundaryExtension {
    /// Maps a possibly out-of-range index onto `0..len`.
    #[inline]
    pub fn reflect(self, index: isize, len: usize) -> usize {
        match self {
            BoundaryExtension::WholeSampleSymmetric => reflect_whole_sample(index, len),
        }
    }
}

#[inline]
fn reflect_whole_sample(index: isize, len: usize) -> usize {
    debug_assert!(len >= 1);
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let mut i = index.rem_euclid(period);
    if i >= len as isize {
        i = period - i;
    }
    i as usize
}

const HALF_GAIN_LOWPASS: [f64; 5] = [-1.0 / 8.0, 1.0 / 4.0, 3.0 / 4.0, 1.0 / 4.0, -1.0 / 8.0];
const HALF_GAIN_HIGHPASS: [f64; 3] = [-1.0 / 4.0, 1.0 / 2.0, -1.0 / 4.0];
const JPEG2000_HIGHPASS: [f64; 3] = [-1.0 / 2.0, 1.0, -1.0 / 2.0];

/// LeGall 5/3 analysis taps with their phase alignment.
///
/// Low-pass output `n` is centred on input `2n` (tap index 2), high-pass
/// output `n` on input `2n + 1` (tap index 1).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    lowpass_taps: [f64; 5],
    highpass_taps: [f64; 3],
    lowpass_center_index: usize,
    highpass_center_index: usize,
    convention: ScalingConvention,
}

impl FilterBank {
    pub fn new(convention: ScalingConvention) -> Self {
        let highpass_taps = match convention {
            ScalingConvention::Paper => HALF_GAIN_HIGHPASS,
            ScalingConvention::Jpeg2000 => JPEG2000_HIGHPASS,
        };
        Self {
            lowpass_taps: HALF_GAIN_LOWPASS,
            highpass_taps,
            lowpass_center_index: 2,
            highpass_center_index: 1,
            convention,
        }
    }

    pub fn paper() -> Self {
        Self::new(ScalingConvention::Paper)
    }

    pub fn jpeg2000() -> Self {
        Self::new(ScalingConvention::Jpeg2000)
    }

    pub fn lowpass_taps(&self) -> &[f64] {
        &self.lowpass_taps
    }

    pub fn highpass_taps(&self) -> &[f64] {
        &self.highpass_taps
    }

    pub fn lowpass_center_index(&self) -> usize {
        self.lowpass_center_index
    }

    pub fn highpass_center_index(&self) -> usize {
        self.highpass_center_index
    }

    pub fn convention(&self) -> ScalingConvention {
        self.convention
    }

    /// Factor between the lifting ladder's prediction residual and this
    /// bank's high band (the centre high-pass tap).
    #[inline]
    pub(crate) fn highpass_scale(&self) -> f64 {
        self.highpass_taps[self.highpass_center_index]
    }
}

impl Default for FilterBank {
    fn default() -> Self {
        Self::paper()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_taps_exact() {
        let bank = FilterBank::paper();
        assert_eq!(bank.highpass_taps(), &[-0.25, 0.5, -0.25]);
        assert_eq!(bank.lowpass_taps(), &[-0.125, 0.25, 0.75, 0.25, -0.125]);
    }

    #[test]
    fn tap_sums() {
        for bank in [FilterBank::paper(), FilterBank::jpeg2000()] {
            assert_eq!(bank.lowpass_taps().iter().sum::<f64>(), 1.0);
            assert_eq!(bank.highpass_taps().iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn jpeg2000_highpass_is_doubled() {
        let p = FilterBank::paper();
        let j = FilterBank::jpeg2000();
        for (a, b) in p.highpass_taps().iter().zip(j.highpass_taps()) {
            assert_eq!(2.0 * a, *b);
        }
        assert_eq!(p.lowpass_taps(), j.lowpass_taps());
    }

    #[test]
    fn reflection() {
        let ext = BoundaryExtension::WholeSampleSymmetric;
        let got: Vec<usize> = (-4..10).map(|i| ext.reflect(i, 6)).collect();
        assert_eq!(got, vec![4, 3, 2, 1, 0, 1, 2, 3, 4, 5, 4, 3, 2, 1]);
        assert_eq!(ext.reflect(-1, 2), 1);
        assert_eq!(ext.reflect(2, 2), 0);
        assert_eq!(ext.reflect(-2, 2), 0);
    }
}
