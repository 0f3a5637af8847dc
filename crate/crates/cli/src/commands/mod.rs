pub mod bench;
pub mod pipeline;
pub mod stats;
pub mod verify;

use std::fmt;
use std::fs;
use std::path::Path;

use wavelet_prep::io::{decode_image, ImageBuffer};
use wavelet_prep::pipeline::PipelineConfig;

use crate::args::TransformArgs;

/// A failure that stops the whole command.
#[derive(Debug)]
pub struct Fatal(pub String);

impl fmt::Display for Fatal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<wavelet_prep::Error> for Fatal {
    fn from(e: wavelet_prep::Error) -> Self {
        Fatal(format!("{}: {e}", e.name()))
    }
}

impl From<std::io::Error> for Fatal {
    fn from(e: std::io::Error) -> Self {
        Fatal(format!("output: {e}"))
    }
}

pub type CmdResult = Result<u8, Fatal>;

pub fn apply(config: PipelineConfig, t: &TransformArgs) -> PipelineConfig {
    config
        .with_levels(t.levels)
        .with_color(t.color)
        .with_convention(t.convention)
}

/// `size` when given, otherwise half the image in each axis.
pub fn network_dims(size: Option<(usize, usize)>, image: &ImageBuffer) -> (usize, usize) {
    size.unwrap_or(((image.width() / 2).max(1), (image.height() / 2).max(1)))
}

pub fn load_image(path: &Path) -> wavelet_prep::Result<ImageBuffer> {
    decode_image(&fs::read(path)?)
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

pub fn exit_for(failed: usize) -> u8 {
    if failed == 0 {
        crate::EXIT_OK
    } else {
        crate::EXIT_PARTIAL
    }
}
