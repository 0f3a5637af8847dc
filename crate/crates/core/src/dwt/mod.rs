//! LeGall 5/3 analysis and synthesis.
//!
//! Two arithmetic domains share one lifting ladder: `f64` planes run the
//! float transform (taps scaled per [`ScalingConvention`]), `i32` planes run
//! the reversible integer transform, which always uses the JPEG2000 integer
//! steps. All boundaries use whole-sample symmetric extension.

mod filter;
mod ladder;
mod oned;
mod transform;

pub use filter::{BoundaryExtension, FilterBank, ScalingConvention};
pub use ladder::Ladder;
pub use oned::{analyze_1d, lift_forward_1d, lift_inverse_1d, synthesize_1d};
pub use transform::{
    decompose_multilevel, forward_2d, forward_2d_ordered, inverse_2d, inverse_2d_ordered,
    Coefficient, MultiLevelDecomposition, Subband, SubbandSet, TransformMode, TraversalOrder,
};
