//! Image decoding and the `.wvt` tensor container.

mod container;
mod image;

pub use container::{
    decode_container, encode_container, read_container, write_container, ContainerTensor, DType,
    Metadata, TensorData, HEADER_LEN, MAGIC, VERSION,
};
pub use image::{decode_image, encode_png, encode_pnm, BitDepth, ImageBuffer, Samples};

/// File extension of tensor containers.
pub const CONTAINER_EXTENSION: &str = "wvt";
