use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::filter::FilterBank;
use super::ladder::{self, Ladder};
use crate::error::{Error, Result};
use crate::plane::Plane;

/// Arithmetic domain of a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformMode {
    /// Double-precision filtering with the configured tap scaling.
    #[default]
    Float,
    /// Integer-to-integer lifting, exactly invertible.
    Reversible,
}

impl TransformMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TransformMode::Float => "float",
            TransformMode::Reversible => "reversible",
        }
    }
}

impl FromStr for TransformMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" => Ok(Self::Float),
            "reversible" => Ok(Self::Reversible),
            other => Err(format!("unknown transform mode '{other}'")),
        }
    }
}

/// Sample types a 2D transform can run on. `f64` selects float mode,
/// `i32` reversible mode.
pub trait Coefficient: Ladder {
    const MODE: TransformMode;
}

impl Coefficient for f64 {
    const MODE: TransformMode = TransformMode::Float;
}

impl Coefficient for i32 {
    const MODE: TransformMode = TransformMode::Reversible;
}

/// One of the four subbands of a decomposition level. The first letter is
/// the filter applied along rows, the second the filter applied along
/// columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subband {
    LL,
    HL,
    LH,
    HH,
}

impl Subband {
    /// Canonical packing order.
    pub const ALL: [Subband; 4] = [Subband::LL, Subband::HL, Subband::LH, Subband::HH];

    pub fn as_str(self) -> &'static str {
        match self {
            Subband::LL => "LL",
            Subband::HL => "HL",
            Subband::LH => "LH",
            Subband::HH => "HH",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Subband {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Subband {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LL" => Ok(Subband::LL),
            "HL" => Ok(Subband::HL),
            "LH" => Ok(Subband::LH),
            "HH" => Ok(Subband::HH),
            other => Err(format!("unknown subband '{other}'")),
        }
    }
}

/// Which axis the separable transform processes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraversalOrder {
    #[default]
    RowsFirst,
    ColumnsFirst,
}

/// The four coefficient planes of one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSet<T> {
    pub ll: Plane<T>,
    pub hl: Plane<T>,
    pub lh: Plane<T>,
    pub hh: Plane<T>,
    pub level: usize,
    pub source_dims: (usize, usize),
}

impl<T> SubbandSet<T> {
    pub fn get(&self, band: Subband) -> &Plane<T> {
        match band {
            Subband::LL => &self.ll,
            Subband::HL => &self.hl,
            Subband::LH => &self.lh,
            Subband::HH => &self.hh,
        }
    }

    /// Planes in LL, HL, LH, HH order.
    pub fn planes(&self) -> [&Plane<T>; 4] {
        [&self.ll, &self.hl, &self.lh, &self.hh]
    }

    /// Dimensions shared by all four planes.
    pub fn band_dims(&self) -> (usize, usize) {
        self.ll.dims()
    }

    fn validate(&self) -> Result<()> {
        let dims = self.ll.dims();
        for (band, plane) in Subband::ALL.iter().zip(self.planes()) {
            if plane.dims() != dims {
                return Err(Error::DimensionMismatch(format!(
                    "{band} is {}x{} but LL is {}x{}",
                    plane.width(),
                    plane.height(),
                    dims.0,
                    dims.1
                )));
            }
        }
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::DimensionMismatch("subbands are empty".into()));
        }
        Ok(())
    }
}

fn check_even_dims<T>(plane: &Plane<T>) -> Result<()> {
    let (w, h) = plane.dims();
    if w < 2 || h < 2 || w % 2 != 0 || h % 2 != 0 {
        return Err(Error::OddDimension { width: w, height: h });
    }
    Ok(())
}

/// One-level 2D decomposition, rows first.
pub fn forward_2d<T: Coefficient>(plane: &Plane<T>, bank: &FilterBank) -> Result<SubbandSet<T>> {
    forward_2d_ordered(plane, bank, TraversalOrder::RowsFirst)
}

pub fn forward_2d_ordered<T: Coefficient>(
    plane: &Plane<T>,
    bank: &FilterBank,
    order: TraversalOrder,
) -> Result<SubbandSet<T>> {
    check_even_dims(plane)?;
    let p = T::params(bank);
    let (ll, hl, lh, hh) = match order {
        TraversalOrder::RowsFirst => {
            let (l0, h0) = ladder::split_rows(p, plane)?;
            let (ll, lh) = ladder::split_columns(p, &l0)?;
            let (hl, hh) = ladder::split_columns(p, &h0)?;
            (ll, hl, lh, hh)
        }
        TraversalOrder::ColumnsFirst => {
            let (cl, ch) = ladder::split_columns(p, plane)?;
            let (ll, hl) = ladder::split_rows(p, &cl)?;
            let (lh, hh) = ladder::split_rows(p, &ch)?;
            (ll, hl, lh, hh)
        }
    };
    Ok(SubbandSet {
        ll,
        hl,
        lh,
        hh,
        level: 1,
        source_dims: plane.dims(),
    })
}

/// Inverse of [`forward_2d`].
pub fn inverse_2d<T: Coefficient>(subbands: &SubbandSet<T>, bank: &FilterBank) -> Result<Plane<T>> {
    inverse_2d_ordered(subbands, bank, TraversalOrder::RowsFirst)
}

/// Inverse of [`forward_2d_ordered`] with the same `order`.
pub fn inverse_2d_ordered<T: Coefficient>(
    subbands: &SubbandSet<T>,
    bank: &FilterBank,
    order: TraversalOrder,
) -> Result<Plane<T>> {
    subbands.validate()?;
    let p = T::params(bank);
    let SubbandSet { ll, hl, lh, hh, .. } = subbands;
    match order {
        TraversalOrder::RowsFirst => {
            let l0 = ladder::merge_columns(p, ll, lh)?;
            let h0 = ladder::merge_columns(p, hl, hh)?;
            ladder::merge_rows(p, &l0, &h0)
        }
        TraversalOrder::ColumnsFirst => {
            let cl = ladder::merge_rows(p, ll, hl)?;
            let ch = ladder::merge_rows(p, lh, hh)?;
            ladder::merge_columns(p, &cl, &ch)
        }
    }
}

/// A dyadic pyramid: level `k + 1` decomposes level `k`'s LL.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLevelDecomposition<T> {
    pub levels: Vec<SubbandSet<T>>,
}

impl<T: Coefficient> MultiLevelDecomposition<T> {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn deepest(&self) -> &SubbandSet<T> {
        self.levels.last().expect("decomposition has at least one level")
    }

    /// Rebuilds the source plane from the deepest LL and every level's
    /// detail bands. Intermediate LL planes are not consulted.
    pub fn reconstruct(&self, bank: &FilterBank) -> Result<Plane<T>> {
        let mut levels = self.levels.iter().rev();
        let deepest = levels.next().ok_or_else(|| Error::Config("empty decomposition".into()))?;
        let mut current = inverse_2d(deepest, bank)?;
        for level in levels {
            let set = SubbandSet {
                ll: current,
                hl: level.hl.clone(),
                lh: level.lh.clone(),
                hh: level.hh.clone(),
                level: level.level,
                source_dims: level.source_dims,
            };
            current = inverse_2d(&set, bank)?;
        }
        Ok(current)
    }
}

/// Decomposes `plane` `depth` times, each time on the previous LL.
pub fn decompose_multilevel<T: Coefficient>(
    plane: &Plane<T>,
    depth: usize,
    bank: &FilterBank,
) -> Result<MultiLevelDecomposition<T>> {
    if depth == 0 {
        return Err(Error::Config("decomposition depth must be at least 1".into()));
    }
    let (w, h) = plane.dims();
    let divisible = u32::try_from(depth)
        .ok()
        .and_then(|d| 1usize.checked_shl(d))
        .is_some_and(|unit| w > 0 && h > 0 && w % unit == 0 && h % unit == 0);
    if !divisible {
        return Err(Error::DepthTooLarge { width: w, height: h, depth });
    }
    let mut levels: Vec<SubbandSet<T>> = Vec::with_capacity(depth);
    let mut set = forward_2d(plane, bank)?;
    for level in 2..=depth {
        levels.push(set);
        let next_input = &levels.last().expect("just pushed").ll;
        set = forward_2d(next_input, bank)?;
        set.level = level;
    }
    levels.push(set);
    Ok(MultiLevelDecomposition { levels })
}
