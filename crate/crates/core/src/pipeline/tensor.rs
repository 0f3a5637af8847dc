//! Packed tensors, their normalization, and their container metadata.
//!
//! Each packed tensor becomes one container tensor with dims
//! `(channels, H, W)`. Metadata keys written per tensor:
//!
//! | key | value |
//! |-----|-------|
//! | `source` | source file name, when known |
//! | pipeline config fields | see [`PipelineConfig::to_key_values`] |
//! | `level` | decomposition level of the tensor's planes (0: baseline) |
//! | `channels` | comma list of `c<channel>/<band>/<level>` labels |
//! | `normalization` | policy actually applied |
//! | `scale` | divisor used by `unit_interval` |
//! | `affine` | comma list of `mean:std` per channel |
//! | `zero_variance` | comma list of channel indices that fell back to shift-only |

use std::fmt;
use std::str::FromStr;

use crate::dwt::Subband;
use crate::error::{Error, Result};
use crate::io::{ContainerTensor, DType, Metadata, TensorData};

use super::config::{Normalization, PipelineConfig};

/// What one channel of a packed tensor holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChannelLabel {
    pub source_channel: usize,
    /// `None` for the resized image itself (baseline tensors).
    pub subband: Option<Subband>,
    pub level: usize,
}

impl fmt::Display for ChannelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let band = self.subband.map_or("image", Subband::as_str);
        write!(f, "c{}/{band}/{}", self.source_channel, self.level)
    }
}

impl FromStr for ChannelLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::CorruptContainer(format!("bad channel label '{s}'"));
        let mut parts = s.split('/');
        let channel = parts.next().and_then(|c| c.strip_prefix('c')).ok_or_else(bad)?;
        let band = parts.next().ok_or_else(bad)?;
        let level = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(ChannelLabel {
            source_channel: channel.parse().map_err(|_| bad())?,
            subband: match band {
                "image" => None,
                b => Some(b.parse().map_err(|_| bad())?),
            },
            level: level.parse().map_err(|_| bad())?,
        })
    }
}

/// Per-channel affine constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChannel {
    pub mean: f64,
    pub std: f64,
    /// The channel was constant; only the mean was subtracted.
    pub zero_variance: bool,
}

/// Exactly what [`normalize`] did, so it can be undone.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalizationRecord {
    pub policy: Normalization,
    pub scale: Option<f64>,
    pub affine: Vec<AffineChannel>,
}

/// `(channels, H, W)` samples, channel-major, with a label per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedTensor {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: TensorData,
    pub labels: Vec<ChannelLabel>,
    pub level: usize,
    pub normalization: NormalizationRecord,
}

impl PackedTensor {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn dtype(&self) -> DType {
        self.data.dtype()
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    /// Channel `c` widened to `f64`.
    pub fn channel_f64(&self, c: usize) -> Vec<f64> {
        let n = self.plane_len();
        (c * n..(c + 1) * n).map(|i| self.data.get_f64(i)).collect()
    }

    /// Index of the channel carrying `label`.
    pub fn find(&self, label: ChannelLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn to_container(&self, config: &PipelineConfig, source: Option<&str>) -> Result<ContainerTensor> {
        let mut meta = Metadata::new();
        if let Some(name) = source {
            meta.push("source", name);
        }
        for (k, v) in config.to_key_values() {
            if k != "normalization" {
                meta.push(k, v);
            }
        }
        meta.push("level", self.level.to_string());
        meta.push("channels", join(self.labels.iter()));
        meta.push("normalization", self.normalization.policy.as_str());
        if let Some(scale) = self.normalization.scale {
            meta.push("scale", scale.to_string());
        }
        if !self.normalization.affine.is_empty() {
            meta.push(
                "affine",
                join(self.normalization.affine.iter().map(|a| format!("{}:{}", a.mean, a.std))),
            );
            let zero: Vec<String> = self
                .normalization
                .affine
                .iter()
                .enumerate()
                .filter(|(_, a)| a.zero_variance)
                .map(|(i, _)| i.to_string())
                .collect();
            if !zero.is_empty() {
                meta.push("zero_variance", zero.join(","));
            }
        }
        ContainerTensor::new(
            vec![self.channels, self.height, self.width],
            self.data.clone(),
            meta,
        )
    }

    pub fn from_container(tensor: &ContainerTensor) -> Result<Self> {
        let corrupt = |m: &str| Error::CorruptContainer(m.to_string());
        let [channels, height, width] = tensor.dims[..] else {
            return Err(corrupt("packed tensors are 3-dimensional"));
        };
        let meta = &tensor.metadata;
        let labels = meta
            .get("channels")
            .ok_or_else(|| corrupt("missing 'channels' metadata"))?
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<ChannelLabel>>>()?;
        if labels.len() != channels {
            return Err(corrupt("channel label count does not match dims"));
        }
        let level = meta
            .get("level")
            .and_then(|l| l.parse().ok())
            .ok_or_else(|| corrupt("missing or bad 'level' metadata"))?;
        let policy: Normalization = meta
            .get("normalization")
            .unwrap_or("raw")
            .parse()
            .map_err(|_| corrupt("bad 'normalization' metadata"))?;
        let scale = match meta.get("scale") {
            Some(s) => Some(s.parse().map_err(|_| corrupt("bad 'scale' metadata"))?),
            None => None,
        };
        let zero: Vec<usize> = meta
            .get("zero_variance")
            .map(|z| z.split(',').filter_map(|i| i.parse().ok()).collect())
            .unwrap_or_default();
        let affine = match meta.get("affine") {
            Some(list) => list
                .split(',')
                .enumerate()
                .map(|(i, pair)| {
                    let (m, s) = pair.split_once(':').ok_or_else(|| corrupt("bad 'affine' entry"))?;
                    Ok(AffineChannel {
                        mean: m.parse().map_err(|_| corrupt("bad affine mean"))?,
                        std: s.parse().map_err(|_| corrupt("bad affine std"))?,
                        zero_variance: zero.contains(&i),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        Ok(PackedTensor {
            channels,
            height,
            width,
            data: tensor.data.clone(),
            labels,
            level,
            normalization: NormalizationRecord { policy, scale, affine },
        })
    }
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

/// Applies `policy` to a raw tensor. `sample_max` is the largest value the
/// source image format can represent. Any policy other than `Raw` yields
/// float32 data.
pub fn normalize(tensor: PackedTensor, policy: Normalization, sample_max: f64) -> Result<PackedTensor> {
    if tensor.normalization.policy != Normalization::Raw {
        return Err(Error::Config("tensor is already normalized".into()));
    }
    let n = tensor.plane_len();
    let len = tensor.data.len();
    if (0..len).any(|i| !tensor.data.get_f64(i).is_finite()) {
        return Err(Error::Config("tensor holds non-finite values".into()));
    }
    match policy {
        Normalization::Raw => Ok(tensor),
        Normalization::UnitInterval => {
            let data = (0..len).map(|i| (tensor.data.get_f64(i) / sample_max) as f32).collect();
            Ok(PackedTensor {
                data: TensorData::Float32(data),
                normalization: NormalizationRecord {
                    policy,
                    scale: Some(sample_max),
                    affine: Vec::new(),
                },
                ..tensor
            })
        }
        Normalization::PerChannelAffine => {
            let mut data = Vec::with_capacity(len);
            let mut affine = Vec::with_capacity(tensor.channels);
            for c in 0..tensor.channels {
                let values = tensor.channel_f64(c);
                let mean = values.iter().sum::<f64>() / n as f64;
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                let std = var.sqrt();
                let zero_variance = std.is_nan() || std <= 0.0;
                let divisor = if zero_variance { 1.0 } else { std };
                data.extend(values.iter().map(|v| ((v - mean) / divisor) as f32));
                affine.push(AffineChannel { mean, std, zero_variance });
            }
            Ok(PackedTensor {
                data: TensorData::Float32(data),
                normalization: NormalizationRecord { policy, scale: None, affine },
                ..tensor
            })
        }
    }
}

/// Undoes [`normalize`]. Values come back as `f64`; callers rounding to
/// integers recover reversible-mode coefficients.
pub fn denormalize(tensor: &PackedTensor) -> Vec<f64> {
    let n = tensor.plane_len();
    let rec = &tensor.normalization;
    (0..tensor.data.len())
        .map(|i| {
            let v = tensor.data.get_f64(i);
            match rec.policy {
                Normalization::Raw => v,
                Normalization::UnitInterval => v * rec.scale.unwrap_or(1.0),
                Normalization::PerChannelAffine => {
                    let a = rec.affine[i / n];
                    let scale = if a.zero_variance { 1.0 } else { a.std };
                    v * scale + a.mean
                }
            }
        })
        .collect()
}
