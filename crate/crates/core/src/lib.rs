//! Wavelet down-sampling for CNN inputs.
//!
//! Images are resized to twice the network's input size and split by a
//! one-level LeGall 5/3 transform into four half-size subbands (LL, HL, LH,
//! HH) that together carry everything in the enlarged image. In reversible
//! mode the split is an integer lifting transform and inverts bit-exactly.
//!
//! Modules:
//! - [`dwt`]: 1D/2D analysis, synthesis and multi-level pyramids.
//! - [`resize`]: half-pixel bilinear resampling.
//! - [`pipeline`]: the image-to-tensor pipeline, batches, statistics and
//!   reconstruction checks.
//! - [`io`]: PGM/PPM/PNG decoding and the `.wvt` container.
//!
//! Rows are processed in parallel with rayon when the `parallel` feature
//! (on by default) is enabled; results are identical either way.

pub mod dwt;
mod error;
pub mod io;
mod par;
pub mod pipeline;
mod plane;
pub mod resize;

pub use error::{Error, Result};
pub use par::{with_parallelism, PARALLEL};
pub use plane::Plane;
