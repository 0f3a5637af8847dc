use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dwt::{BoundaryExtension, FilterBank, ScalingConvention, Subband, TransformMode};
use crate::error::{Error, Result};

/// A subset of {LL, HL, LH, HH}, always iterated in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelMask(u8);

impl ChannelMask {
    pub const ALL: ChannelMask = ChannelMask(0b1111);
    pub const LL_ONLY: ChannelMask = ChannelMask(0b0001);
    pub const EMPTY: ChannelMask = ChannelMask(0);

    /// The five channel combinations of the ablation study.
    pub const ABLATION_SET: [ChannelMask; 5] = [
        ChannelMask(0b1101), // LL LH HH
        ChannelMask(0b1011), // LL HL HH
        ChannelMask(0b0111), // LL HL LH
        ChannelMask(0b0001), // LL
        ChannelMask(0b1111), // LL HL LH HH
    ];

    pub fn from_bands(bands: &[Subband]) -> Self {
        ChannelMask(bands.iter().fold(0, |m, b| m | (1 << b.index())))
    }

    pub fn contains(self, band: Subband) -> bool {
        self.0 & (1 << band.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_full(self) -> bool {
        self == Self::ALL
    }

    pub fn iter(self) -> impl Iterator<Item = Subband> {
        Subband::ALL.into_iter().filter(move |b| self.contains(*b))
    }

    /// The mask restricted to detail bands (everything but LL).
    pub fn details(self) -> ChannelMask {
        ChannelMask(self.0 & !1)
    }
}

impl Default for ChannelMask {
    fn default() -> Self {
        Self::ALL
    }
}

impl fmt::Display for ChannelMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Subband::as_str).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for ChannelMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bands = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            bands.push(part.parse::<Subband>().map_err(Error::Config)?);
        }
        let mask = ChannelMask::from_bands(&bands);
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Coefficients exactly as the transform produced them.
    #[default]
    Raw,
    /// Divide by the largest representable input sample value.
    UnitInterval,
    /// Per-channel `(x - mean) / std`, constants recorded in the metadata.
    PerChannelAffine,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::UnitInterval => "unit_interval",
            Normalization::PerChannelAffine => "per_channel_affine",
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "unit_interval" | "unit" => Ok(Self::UnitInterval),
            "per_channel_affine" | "affine" => Ok(Self::PerChannelAffine),
            other => Err(Error::Config(format!("unknown normalization '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorPolicy {
    /// Rec. 601 luma of RGB(A) input; the first channel of gray+alpha.
    #[default]
    GrayscaleSinglePlane,
    /// Every source channel is transformed on its own.
    PerChannelFanout,
}

impl ColorPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ColorPolicy::GrayscaleSinglePlane => "grayscale_single_plane",
            ColorPolicy::PerChannelFanout => "per_channel_fanout",
        }
    }
}

impl FromStr for ColorPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grayscale_single_plane" | "gray" => Ok(Self::GrayscaleSinglePlane),
            "per_channel_fanout" | "fanout" => Ok(Self::PerChannelFanout),
            other => Err(Error::Config(format!("unknown color policy '{other}'"))),
        }
    }
}

/// Everything that determines a preprocessing run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// `(W, H)`: the spatial size the network expects. Images are resized
    /// to `(2W, 2H)` before the transform.
    pub network_input_dims: (usize, usize),
    pub mode: TransformMode,
    pub levels: usize,
    pub channel_mask: ChannelMask,
    pub normalization: Normalization,
    pub color_policy: ColorPolicy,
    pub scaling_convention: ScalingConvention,
    pub boundary_extension: BoundaryExtension,
}

/// Field names accepted by [`PipelineConfig::from_key_values`].
pub const CONFIG_KEYS: [&str; 8] = [
    "network_input_dims",
    "mode",
    "levels",
    "channel_mask",
    "normalization",
    "color_policy",
    "scaling_convention",
    "boundary_extension",
];

impl PipelineConfig {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            network_input_dims: (width, height),
            mode: TransformMode::Float,
            levels: 1,
            channel_mask: ChannelMask::ALL,
            normalization: Normalization::Raw,
            color_policy: ColorPolicy::GrayscaleSinglePlane,
            scaling_convention: ScalingConvention::Paper,
            boundary_extension: BoundaryExtension::WholeSampleSymmetric,
        }
    }

    pub fn with_mode(mut self, mode: TransformMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    pub fn with_mask(mut self, mask: ChannelMask) -> Self {
        self.channel_mask = mask;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_color(mut self, policy: ColorPolicy) -> Self {
        self.color_policy = policy;
        self
    }

    pub fn with_convention(mut self, convention: ScalingConvention) -> Self {
        self.scaling_convention = convention;
        self
    }

    pub fn filter_bank(&self) -> FilterBank {
        FilterBank::new(self.scaling_convention)
    }

    /// `(2W, 2H)`, the size fed to the transform.
    pub fn transform_input_dims(&self) -> (usize, usize) {
        (2 * self.network_input_dims.0, 2 * self.network_input_dims.1)
    }

    pub fn validate(&self) -> Result<()> {
        let (w, h) = self.network_input_dims;
        if w == 0 || h == 0 {
            return Err(Error::Config(format!("network input {w}x{h} must be positive")));
        }
        if self.channel_mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        if self.levels == 0 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if self.levels > 1 {
            let unit = u32::try_from(self.levels - 1)
                .ok()
                .and_then(|s| 1usize.checked_shl(s))
                .unwrap_or(usize::MAX);
            if w % unit != 0 || h % unit != 0 {
                return Err(Error::Config(format!(
                    "{} levels need W and H divisible by {unit}, got {w}x{h}",
                    self.levels
                )));
            }
        }
        Ok(())
    }

    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        let (w, h) = self.network_input_dims;
        vec![
            ("network_input_dims", format!("{w}x{h}")),
            ("mode", self.mode.as_str().to_string()),
            ("levels", self.levels.to_string()),
            ("channel_mask", self.channel_mask.to_string()),
            ("normalization", self.normalization.as_str().to_string()),
            ("color_policy", self.color_policy.as_str().to_string()),
            ("scaling_convention", self.scaling_convention.as_str().to_string()),
            ("boundary_extension", "whole_sample_symmetric".to_string()),
        ]
    }

    /// Builds a config from flat `field=value` pairs named after the struct
    /// fields. `network_input_dims` is required; every other key falls back
    /// to its default. Unknown keys are rejected by name.
    pub fn from_key_values<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut dims = None;
        let mut config = PipelineConfig::new(1, 1);
        for (key, value) in pairs {
            let bad = |msg: String| Error::Config(format!("{key}: {msg}"));
            match key {
                "network_input_dims" => dims = Some(parse_dims(value).map_err(bad)?),
                "mode" => config.mode = value.parse().map_err(bad)?,
                "levels" => {
                    config.levels = value.parse().map_err(|_| bad(format!("'{value}' is not an integer")))?
                }
                "channel_mask" => config.channel_mask = value.parse()?,
                "normalization" => config.normalization = value.parse()?,
                "color_policy" => config.color_policy = value.parse()?,
                "scaling_convention" => config.scaling_convention = value.parse().map_err(bad)?,
                "boundary_extension" => {
                    if value != "whole_sample_symmetric" {
                        return Err(bad(format!("unsupported extension '{value}'")));
                    }
                }
                other => return Err(Error::Config(format!("unknown config key '{other}'"))),
            }
        }
        config.network_input_dims =
            dims.ok_or_else(|| Error::Config("missing config key 'network_input_dims'".into()))?;
        config.validate()?;
        Ok(config)
    }
}

/// Parses `WxH`.
pub fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| format!("bad dimension '{v}' in '{s}'"))
    };
    Ok((parse(w)?, parse(h)?))
}
