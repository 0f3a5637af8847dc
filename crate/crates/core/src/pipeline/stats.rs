use serde::Serialize;

use crate::dwt::{MultiLevelDecomposition, Subband};
use crate::error::Result;
use crate::io::ImageBuffer;
use crate::plane::Plane;

use super::{decompose, transform_input, Decomposition, PipelineConfig};

/// Summary of one coefficient plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubbandStats {
    pub source_channel: usize,
    pub level: usize,
    pub subband: Subband,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// Share of this source channel's total coefficient variance. When the
    /// total is zero the deepest LL is credited with all of it.
    pub variance_fraction: f64,
}

fn describe(plane: &Plane<f64>) -> (f64, f64, f64, f64) {
    let v = plane.as_slice();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let variance = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, variance, min, max)
}

fn channel_stats(c: usize, d: &MultiLevelDecomposition<f64>) -> Vec<SubbandStats> {
    let depth = d.depth();
    let mut out = Vec::new();
    for set in d.levels.iter().rev() {
        for band in Subband::ALL {
            if band == Subband::LL && set.level != depth {
                continue;
            }
            let (mean, variance, min, max) = describe(set.get(band));
            out.push(SubbandStats {
                source_channel: c,
                level: set.level,
                subband: band,
                mean,
                variance,
                min,
                max,
                variance_fraction: 0.0,
            });
        }
    }
    let total: f64 = out.iter().map(|s| s.variance).sum();
    for s in &mut out {
        s.variance_fraction = if total > 0.0 {
            s.variance / total
        } else if s.subband == Subband::LL {
            1.0
        } else {
            0.0
        };
    }
    out
}

/// Statistics of every packed plane: the deepest LL and each level's
/// details, per source channel. Computed in double precision regardless of
/// mode.
pub fn subband_statistics(image: &ImageBuffer, config: &PipelineConfig) -> Result<Vec<SubbandStats>> {
    let planes = transform_input(image, config)?;
    let decomposition = match decompose(&planes, config)? {
        Decomposition::Float(d) => d,
        Decomposition::Reversible(d) => d
            .into_iter()
            .map(|m| MultiLevelDecomposition {
                levels: m
                    .levels
                    .into_iter()
                    .map(|s| crate::dwt::SubbandSet {
                        ll: s.ll.map(f64::from),
                        hl: s.hl.map(f64::from),
                        lh: s.lh.map(f64::from),
                        hh: s.hh.map(f64::from),
                        level: s.level,
                        source_dims: s.source_dims,
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(decomposition
        .iter()
        .enumerate()
        .flat_map(|(c, d)| channel_stats(c, d))
        .collect())
}
