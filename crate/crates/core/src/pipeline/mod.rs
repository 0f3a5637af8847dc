//! Image to packed subband tensors.
//!
//! `decode -> color policy -> bilinear resize to (2W, 2H) -> DWT -> mask ->
//! pack -> normalize`. Packed channel order is LL, HL, LH, HH for each source
//! channel, source channels in order. With `levels > 1` the output holds one
//! tensor per level, coarsest first: the deepest tensor carries LL plus that
//! level's details, every finer tensor only its details.

mod batch;
mod config;
mod stats;
mod tensor;

pub use batch::{list_images, preprocess_batch, BatchReport, FileOutcome, FileStatus};
pub use config::{parse_dims, ChannelMask, ColorPolicy, Normalization, PipelineConfig, CONFIG_KEYS};
pub use stats::{subband_statistics, SubbandStats};
pub use tensor::{
    denormalize, normalize, AffineChannel, ChannelLabel, NormalizationRecord, PackedTensor,
};

use crate::dwt::{decompose_multilevel, inverse_2d, Coefficient, MultiLevelDecomposition, Subband, SubbandSet};
use crate::dwt::TransformMode;
use crate::error::{Error, Result};
use crate::io::{decode_container, encode_container, BitDepth, ContainerTensor, ImageBuffer, TensorData};
use crate::plane::Plane;
use crate::resize::{resize_bilinear, ResizeSpec};

/// Per-channel planes in one arithmetic domain.
#[derive(Debug, Clone, PartialEq)]
pub enum PlaneSet {
    Float(Vec<Plane<f64>>),
    Reversible(Vec<Plane<i32>>),
}

impl PlaneSet {
    pub fn len(&self) -> usize {
        match self {
            PlaneSet::Float(p) => p.len(),
            PlaneSet::Reversible(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Channel `c` widened to `f64`.
    pub fn channel_f64(&self, c: usize) -> Plane<f64> {
        match self {
            PlaneSet::Float(p) => p[c].clone(),
            PlaneSet::Reversible(p) => p[c].map(f64::from),
        }
    }
}

/// Per-channel decompositions in one arithmetic domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Decomposition {
    Float(Vec<MultiLevelDecomposition<f64>>),
    Reversible(Vec<MultiLevelDecomposition<i32>>),
}

impl Decomposition {
    pub fn reconstruct(&self, config: &PipelineConfig) -> Result<PlaneSet> {
        let bank = config.filter_bank();
        Ok(match self {
            Decomposition::Float(d) => {
                PlaneSet::Float(d.iter().map(|m| m.reconstruct(&bank)).collect::<Result<_>>()?)
            }
            Decomposition::Reversible(d) => {
                PlaneSet::Reversible(d.iter().map(|m| m.reconstruct(&bank)).collect::<Result<_>>()?)
            }
        })
    }
}

/// Result of preprocessing one image.
#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    pub tensors: Vec<PackedTensor>,
}

impl Preprocessed {
    /// The first (coarsest) tensor; with one level, the only one.
    pub fn primary(&self) -> &PackedTensor {
        &self.tensors[0]
    }

    pub fn to_container(&self, config: &PipelineConfig, source: Option<&str>) -> Result<Vec<ContainerTensor>> {
        self.tensors.iter().map(|t| t.to_container(config, source)).collect()
    }

    pub fn encode(&self, config: &PipelineConfig, source: Option<&str>) -> Result<Vec<u8>> {
        encode_container(&self.to_container(config, source)?)
    }
}

/// Keeps the bands of `subbands` selected by `mask`, in canonical order.
pub fn apply_channel_mask<T>(subbands: &SubbandSet<T>, mask: ChannelMask) -> Result<Vec<(Subband, &Plane<T>)>> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(mask.iter().map(|b| (b, subbands.get(b))).collect())
}

fn rec601(image: &ImageBuffer) -> Plane<f64> {
    let r = image.channel_plane(0);
    let g = image.channel_plane(1);
    let b = image.channel_plane(2);
    let data = r
        .as_slice()
        .iter()
        .zip(g.as_slice())
        .zip(b.as_slice())
        .map(|((r, g), b)| 0.299 * r + 0.587 * g + 0.114 * b)
        .collect();
    Plane::from_vec(image.width(), image.height(), data).expect("same dims")
}

/// Source planes after the color policy, at the image's own size.
pub fn color_planes(image: &ImageBuffer, policy: ColorPolicy) -> Vec<Plane<f64>> {
    match policy {
        ColorPolicy::PerChannelFanout => (0..image.channels()).map(|c| image.channel_plane(c)).collect(),
        ColorPolicy::GrayscaleSinglePlane => match image.channels() {
            1 | 2 => vec![image.channel_plane(0)],
            _ => vec![rec601(image)],
        },
    }
}

fn to_domain(planes: Vec<Plane<f64>>, mode: TransformMode, depth: BitDepth) -> Result<PlaneSet> {
    match mode {
        TransformMode::Float => Ok(PlaneSet::Float(planes)),
        TransformMode::Reversible => {
            if depth == BitDepth::Float32 {
                return Err(Error::Config("reversible mode needs integer samples".into()));
            }
            let max = depth.max_value();
            Ok(PlaneSet::Reversible(
                planes
                    .iter()
                    .map(|p| p.map(|v| v.round().clamp(0.0, max) as i32))
                    .collect(),
            ))
        }
    }
}

/// The planes the transform consumes: color policy applied, resized to
/// `(2W, 2H)`, and rounded to integers in reversible mode.
pub fn transform_input(image: &ImageBuffer, config: &PipelineConfig) -> Result<PlaneSet> {
    config.validate()?;
    let (w, h) = config.transform_input_dims();
    let spec = ResizeSpec::even(w, h)?;
    let resized = color_planes(image, config.color_policy)
        .iter()
        .map(|p| resize_bilinear(p, spec))
        .collect::<Result<Vec<_>>>()?;
    to_domain(resized, config.mode, image.bit_depth())
}

pub fn decompose(planes: &PlaneSet, config: &PipelineConfig) -> Result<Decomposition> {
    let bank = config.filter_bank();
    Ok(match planes {
        PlaneSet::Float(p) => Decomposition::Float(
            p.iter()
                .map(|p| decompose_multilevel(p, config.levels, &bank))
                .collect::<Result<_>>()?,
        ),
        PlaneSet::Reversible(p) => Decomposition::Reversible(
            p.iter()
                .map(|p| decompose_multilevel(p, config.levels, &bank))
                .collect::<Result<_>>()?,
        ),
    })
}

trait PackSample: Coefficient {
    fn pack(values: Vec<Self>) -> TensorData;
}

impl PackSample for f64 {
    fn pack(values: Vec<f64>) -> TensorData {
        TensorData::Float32(values.into_iter().map(|v| v as f32).collect())
    }
}

impl PackSample for i32 {
    fn pack(values: Vec<i32>) -> TensorData {
        TensorData::Int32(values)
    }
}

fn pack_levels<T: PackSample>(decomps: &[MultiLevelDecomposition<T>], mask: ChannelMask) -> Result<Vec<PackedTensor>> {
    let depth = decomps.first().map_or(0, |d| d.depth());
    let mut tensors = Vec::with_capacity(depth);
    for level in (1..=depth).rev() {
        let level_mask = if level == depth { mask } else { mask.details() };
        if level_mask.is_empty() {
            continue;
        }
        let mut values = Vec::new();
        let mut labels = Vec::new();
        let mut dims = (0, 0);
        for (c, d) in decomps.iter().enumerate() {
            let set = &d.levels[level - 1];
            dims = set.band_dims();
            for (band, plane) in apply_channel_mask(set, level_mask)? {
                values.extend_from_slice(plane.as_slice());
                labels.push(ChannelLabel { source_channel: c, subband: Some(band), level });
            }
        }
        tensors.push(PackedTensor {
            channels: labels.len(),
            height: dims.1,
            width: dims.0,
            data: T::pack(values),
            labels,
            level,
            normalization: NormalizationRecord::default(),
        });
    }
    Ok(tensors)
}

/// Packs a decomposition without normalizing it.
pub fn pack(decomposition: &Decomposition, mask: ChannelMask) -> Result<Vec<PackedTensor>> {
    match decomposition {
        Decomposition::Float(d) => pack_levels(d, mask),
        Decomposition::Reversible(d) => pack_levels(d, mask),
    }
}

/// Full preprocessing of one image.
pub fn preprocess_image(image: &ImageBuffer, config: &PipelineConfig) -> Result<Preprocessed> {
    let planes = transform_input(image, config)?;
    let decomposition = decompose(&planes, config)?;
    let sample_max = image.bit_depth().max_value();
    let tensors = pack(&decomposition, config.channel_mask)?
        .into_iter()
        .map(|t| normalize(t, config.normalization, sample_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(Preprocessed { tensors })
}

/// The comparison input: a plain bilinear resize straight to `(W, H)`,
/// one channel per source channel, no transform.
pub fn preprocess_baseline(image: &ImageBuffer, config: &PipelineConfig) -> Result<PackedTensor> {
    config.validate()?;
    let (w, h) = config.network_input_dims;
    let spec = ResizeSpec::new(w, h)?;
    let resized = color_planes(image, config.color_policy)
        .iter()
        .map(|p| resize_bilinear(p, spec))
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..resized.len())
        .map(|c| ChannelLabel { source_channel: c, subband: None, level: 0 })
        .collect();
    let data = match to_domain(resized, config.mode, image.bit_depth())? {
        PlaneSet::Float(p) => f64::pack(p.into_iter().flat_map(Plane::into_vec).collect()),
        PlaneSet::Reversible(p) => i32::pack(p.into_iter().flat_map(Plane::into_vec).collect()),
    };
    let tensor = PackedTensor {
        channels: data.len() / (w * h),
        height: h,
        width: w,
        data,
        labels,
        level: 0,
        normalization: NormalizationRecord::default(),
    };
    normalize(tensor, config.normalization, image.bit_depth().max_value())
}

fn take_plane<T>(values: Vec<T>, w: usize, h: usize) -> Plane<T> {
    Plane::from_vec(w, h, values).expect("tensor channel length matches dims")
}

fn unpack_typed<T: Coefficient>(
    tensors: &[PackedTensor],
    convert: impl Fn(f64) -> T,
    config: &PipelineConfig,
) -> Result<Vec<MultiLevelDecomposition<T>>> {
    let missing = |l: ChannelLabel| Error::Config(format!("packed tensors lack channel {l}"));
    let depth = tensors.iter().map(|t| t.level).max().unwrap_or(0);
    let sources = tensors
        .iter()
        .flat_map(|t| t.labels.iter().map(|l| l.source_channel + 1))
        .max()
        .unwrap_or(0);
    if depth == 0 || sources == 0 {
        return Err(Error::Config("nothing to unpack".into()));
    }
    let channel = |label: ChannelLabel| -> Result<Plane<T>> {
        let t = tensors.iter().find(|t| t.level == label.level).ok_or_else(|| missing(label))?;
        let c = t.find(label).ok_or_else(|| missing(label))?;
        let raw = denormalize(t);
        let n = t.plane_len();
        Ok(take_plane(raw[c * n..(c + 1) * n].iter().map(|&v| convert(v)).collect(), t.width, t.height))
    };
    let bank = config.filter_bank();
    let mut out = Vec::with_capacity(sources);
    for source_channel in 0..sources {
        let label = |subband, level| ChannelLabel { source_channel, subband: Some(subband), level };
        let mut ll = channel(label(Subband::LL, depth))?;
        let mut levels = Vec::with_capacity(depth);
        for level in (1..=depth).rev() {
            let hl = channel(label(Subband::HL, level))?;
            let set = SubbandSet {
                source_dims: (2 * hl.width(), 2 * hl.height()),
                lh: channel(label(Subband::LH, level))?,
                hh: channel(label(Subband::HH, level))?,
                hl,
                ll,
                level,
            };
            ll = inverse_2d(&set, &bank)?;
            levels.push(set);
        }
        levels.reverse();
        out.push(MultiLevelDecomposition { levels });
    }
    Ok(out)
}

/// Rebuilds per-channel decompositions from full-mask packed tensors,
/// undoing any recorded normalization first. Int32 data, or any data
/// produced in reversible mode, comes back as integers.
pub fn unpack(tensors: &[PackedTensor], config: &PipelineConfig) -> Result<Decomposition> {
    let integer = config.mode == TransformMode::Reversible
        || tensors.iter().all(|t| t.dtype() == crate::io::DType::Int32);
    if integer {
        Ok(Decomposition::Reversible(unpack_typed(tensors, |v| v.round() as i32, config)?))
    } else {
        Ok(Decomposition::Float(unpack_typed(tensors, |v| v, config)?))
    }
}

/// Outcome of a reconstruction check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOutcome {
    /// Largest absolute difference; float mode reports it on the `[0, 1]`
    /// sample scale.
    pub max_abs_error: f64,
    pub passed: bool,
}

fn compare(reference: &PlaneSet, rebuilt: &PlaneSet, scale: f64, tolerance: f64) -> Result<VerifyOutcome> {
    if reference.len() != rebuilt.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} reconstructed channels for {} source channels",
            rebuilt.len(),
            reference.len()
        )));
    }
    let mut max_abs_error = 0.0f64;
    let mut exact = true;
    for c in 0..reference.len() {
        let (a, b) = (reference.channel_f64(c), rebuilt.channel_f64(c));
        if a.dims() != b.dims() {
            return Err(Error::DimensionMismatch(format!("channel {c} has the wrong size")));
        }
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            exact &= x == y;
            max_abs_error = max_abs_error.max((x - y).abs() / scale);
        }
    }
    let passed = match rebuilt {
        PlaneSet::Reversible(_) => exact,
        PlaneSet::Float(_) => max_abs_error < tolerance,
    };
    Ok(VerifyOutcome { max_abs_error, passed })
}

/// Checks that the transform stage loses nothing for `image`.
///
/// Reversible mode runs the whole pipeline, serializes the tensors to
/// container bytes, parses them back, unpacks, inverts and requires a
/// bit-identical match with the resized `(2W, 2H)` planes. Float mode
/// scales those planes to `[0, 1]` and checks the double-precision
/// decomposition round trip against `tolerance`. Mask and normalization in
/// `config` are overridden to full/raw.
pub fn verify_image(image: &ImageBuffer, config: &PipelineConfig, tolerance: f64) -> Result<VerifyOutcome> {
    let config = config
        .clone()
        .with_mask(ChannelMask::ALL)
        .with_normalization(Normalization::Raw);
    let reference = transform_input(image, &config)?;
    match config.mode {
        TransformMode::Reversible => {
            let tensors = decode_container(&preprocess_image(image, &config)?.encode(&config, None)?)?;
            verify_tensors(&reference, &tensors, &config, tolerance, 1.0)
        }
        TransformMode::Float => {
            let scale = image.bit_depth().max_value();
            let PlaneSet::Float(planes) = &reference else { unreachable!("float mode") };
            let unit = PlaneSet::Float(planes.iter().map(|p| p.map(|v| v / scale)).collect());
            let rebuilt = decompose(&unit, &config)?.reconstruct(&config)?;
            compare(&unit, &rebuilt, 1.0, tolerance)
        }
    }
}

/// Checks previously written container tensors against `image`, using the
/// pipeline settings recorded in the container metadata.
pub fn verify_container(image: &ImageBuffer, tensors: &[ContainerTensor], tolerance: f64) -> Result<VerifyOutcome> {
    let first = tensors
        .first()
        .ok_or_else(|| Error::CorruptContainer("container holds no tensors".into()))?;
    let pairs = crate::pipeline::CONFIG_KEYS
        .iter()
        .filter_map(|k| first.metadata.get(k).map(|v| (*k, v)));
    let config = PipelineConfig::from_key_values(pairs).map_err(|e| Error::CorruptContainer(e.to_string()))?;
    let reference = transform_input(image, &config)?;
    let scale = match config.mode {
        TransformMode::Float => image.bit_depth().max_value(),
        TransformMode::Reversible => 1.0,
    };
    verify_tensors(&reference, tensors, &config, tolerance, scale)
}

fn verify_tensors(
    reference: &PlaneSet,
    tensors: &[ContainerTensor],
    config: &PipelineConfig,
    tolerance: f64,
    scale: f64,
) -> Result<VerifyOutcome> {
    let packed = tensors.iter().map(PackedTensor::from_container).collect::<Result<Vec<_>>>()?;
    let rebuilt = unpack(&packed, config)?.reconstruct(config)?;
    compare(reference, &rebuilt, scale, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::Samples;

    fn noise(w: usize, h: usize, channels: usize, seed: u64) -> ImageBuffer {
        let mut s = seed | 1;
        let data = (0..w * h * channels)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 24) as u8
            })
            .collect();
        ImageBuffer::new(w, h, channels, Samples::U8(data)).unwrap()
    }

    #[test]
    fn grayscale_shape() {
        let out = preprocess_image(&noise(100, 80, 1, 1), &PipelineConfig::new(32, 24)).unwrap();
        assert_eq!(out.tensors.len(), 1);
        assert_eq!(out.primary().dims(), (4, 24, 32));
        assert_eq!(out.primary().dtype(), crate::io::DType::Float32);
    }

    #[test]
    fn rgb_fanout_gives_twelve_channels() {
        let config = PipelineConfig::new(16, 16).with_color(ColorPolicy::PerChannelFanout);
        let out = preprocess_image(&noise(40, 40, 3, 2), &config).unwrap();
        assert_eq!(out.primary().dims(), (12, 16, 16));
        let order: Vec<String> = out.primary().labels.iter().map(|l| l.to_string()).collect();
        assert_eq!(&order[..5], ["c0/LL/1", "c0/HL/1", "c0/LH/1", "c0/HH/1", "c1/LL/1"]);
        let gray = preprocess_image(&noise(40, 40, 3, 2), &PipelineConfig::new(16, 16)).unwrap();
        assert_eq!(gray.primary().channels, 4);
    }

    #[test]
    fn constant_white() {
        let img = ImageBuffer::gray8(50, 30, vec![255; 1500]).unwrap();
        for mode in [TransformMode::Float, TransformMode::Reversible] {
            let out = preprocess_image(&img, &PipelineConfig::new(20, 20).with_mode(mode)).unwrap();
            let t = out.primary();
            assert!(t.channel_f64(0).iter().all(|&v| v == 255.0));
            for c in 1..4 {
                assert!(t.channel_f64(c).iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn mask_selection() {
        let set = forward(&Plane::from_fn(8, 8, |x, y| (x * y) as f64));
        assert_eq!(apply_channel_mask(&set, ChannelMask::ALL).unwrap().len(), 4);
        let ll = apply_channel_mask(&set, ChannelMask::LL_ONLY).unwrap();
        assert_eq!(ll.len(), 1);
        assert_eq!(ll[0].1, &set.ll);
        let three = apply_channel_mask(&set, "LL,LH,HH".parse().unwrap()).unwrap();
        assert_eq!(three.iter().map(|(b, _)| *b).collect::<Vec<_>>(), [Subband::LL, Subband::LH, Subband::HH]);
        assert!(matches!(apply_channel_mask(&set, ChannelMask::EMPTY), Err(Error::EmptyMask)));
    }

    fn forward(p: &Plane<f64>) -> SubbandSet<f64> {
        crate::dwt::forward_2d(p, &crate::dwt::FilterBank::paper()).unwrap()
    }

    #[test]
    fn baseline_shape_and_range() {
        let img = noise(300, 260, 1, 5);
        let t = preprocess_baseline(&img, &PipelineConfig::new(224, 224)).unwrap();
        assert_eq!(t.dims(), (1, 224, 224));
        let v = t.channel_f64(0);
        assert!(v.iter().all(|&x| (0.0..=255.0).contains(&x)));
        let flat = ImageBuffer::gray8(10, 10, vec![42; 100]).unwrap();
        let t = preprocess_baseline(&flat, &PipelineConfig::new(299, 299)).unwrap();
        assert!(t.channel_f64(0).iter().all(|&x| x == 42.0));
    }

    #[test]
    fn multilevel_layout() {
        let config = PipelineConfig::new(16, 16).with_levels(3).with_mode(TransformMode::Reversible);
        let out = preprocess_image(&noise(64, 64, 1, 8), &config).unwrap();
        let dims: Vec<_> = out.tensors.iter().map(|t| (t.dims(), t.level)).collect();
        assert_eq!(dims, [((4, 4, 4), 3), ((3, 8, 8), 2), ((3, 16, 16), 1)]);
        let ll_only = preprocess_image(&noise(64, 64, 1, 8), &config.clone().with_mask(ChannelMask::LL_ONLY)).unwrap();
        assert_eq!(ll_only.tensors.len(), 1);
        assert_eq!(ll_only.primary().dims(), (1, 4, 4));
    }

    #[test]
    fn reversible_information_is_preserved() {
        for levels in [1, 2] {
            let config = PipelineConfig::new(24, 16).with_mode(TransformMode::Reversible).with_levels(levels);
            let img = noise(70, 50, 3, 9);
            let out = verify_image(&img, &config.clone().with_color(ColorPolicy::PerChannelFanout), 0.0).unwrap();
            assert!(out.passed && out.max_abs_error == 0.0);
            let bytes = preprocess_image(&img, &config).unwrap().encode(&config, Some("n.png")).unwrap();
            let tensors = decode_container(&bytes).unwrap();
            assert!(verify_container(&img, &tensors, 0.0).unwrap().passed);
        }
    }

    #[test]
    fn float_verify() {
        let out = verify_image(&noise(64, 64, 1, 10), &PipelineConfig::new(40, 40), 1e-8).unwrap();
        assert!(out.passed, "{out:?}");
        assert!(out.max_abs_error < 1e-12);
    }

    #[test]
    fn reversible_rejects_float_images() {
        let img = ImageBuffer::new(4, 4, 1, Samples::F32(vec![0.5; 16])).unwrap();
        let config = PipelineConfig::new(4, 4).with_mode(TransformMode::Reversible);
        assert!(matches!(preprocess_image(&img, &config), Err(Error::Config(_))));
        assert!(preprocess_image(&img, &PipelineConfig::new(4, 4)).is_ok());
    }
}
