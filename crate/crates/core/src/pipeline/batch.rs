use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{decode_image, CONTAINER_EXTENSION};
use crate::par;

use super::{preprocess_image, PipelineConfig};

const IMAGE_EXTENSIONS: [&str; 4] = ["png", "pgm", "ppm", "pnm"];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FileStatus {
    Ok {
        output: String,
        /// `(channels, H, W)` of each tensor written.
        tensors: Vec<(usize, usize, usize)>,
        bytes: usize,
    },
    Error {
        kind: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileOutcome {
    pub file: String,
    pub megapixels: f64,
    #[serde(flatten)]
    pub status: FileStatus,
}

impl FileOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self.status, FileStatus::Ok { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    /// Sorted by file name.
    pub files: Vec<FileOutcome>,
    pub succeeded: usize,
    pub failed: usize,
    pub wall_seconds: f64,
    pub megapixels: f64,
    pub megapixels_per_second: f64,
}

/// Image files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let supported = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if supported && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("{CONTAINER_EXTENSION}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn process_one(path: &Path, output_dir: &Path, config: &PipelineConfig) -> (f64, Result<FileStatus>) {
    let name = file_name(path);
    let image = match fs::read(path).map_err(Error::from).and_then(|b| decode_image(&b)) {
        Ok(image) => image,
        Err(e) => return (0.0, Err(e)),
    };
    let megapixels = image.pixel_count() as f64 / 1e6;
    let run = || -> Result<FileStatus> {
        let out = preprocess_image(&image, config)?;
        let bytes = out.encode(config, Some(&name))?;
        let stem = path.file_stem().map_or_else(|| name.clone(), |s| s.to_string_lossy().into_owned());
        let target = output_dir.join(format!("{stem}.{CONTAINER_EXTENSION}"));
        write_atomically(&target, &bytes)?;
        Ok(FileStatus::Ok {
            output: file_name(&target),
            tensors: out.tensors.iter().map(|t| t.dims()).collect(),
            bytes: bytes.len(),
        })
    };
    (megapixels, run())
}

/// Preprocesses every image in `input_dir` into `<stem>.wvt` files in
/// `output_dir`, using up to `parallelism` threads (0: all cores).
///
/// Per-file failures are recorded in the report; only problems with the
/// directories themselves abort the batch.
pub fn preprocess_batch(
    input_dir: &Path,
    output_dir: &Path,
    config: &PipelineConfig,
    parallelism: usize,
) -> Result<BatchReport> {
    config.validate()?;
    let files = list_images(input_dir)?;
    fs::create_dir_all(output_dir)?;

    // Two inputs with the same stem would overwrite each other's output.
    let mut seen = HashSet::new();
    let collisions: Vec<bool> = files
        .iter()
        .map(|p| !seen.insert(p.file_stem().map(|s| s.to_os_string())))
        .collect();

    let start = Instant::now();
    let indices: Vec<usize> = (0..files.len()).collect();
    let results = par::with_parallelism(parallelism, || {
        par::map_collect(&indices, |&i| {
            if collisions[i] {
                let msg = format!("output name collides with an earlier file of stem {:?}", files[i].file_stem());
                return (0.0, Err(Error::Config(msg)));
            }
            process_one(&files[i], output_dir, config)
        })
    });
    let wall_seconds = start.elapsed().as_secs_f64();

    let mut report = BatchReport {
        files: Vec::with_capacity(files.len()),
        succeeded: 0,
        failed: 0,
        wall_seconds,
        megapixels: 0.0,
        megapixels_per_second: 0.0,
    };
    for (path, (megapixels, result)) in files.iter().zip(results) {
        let status = match result {
            Ok(status) => {
                report.succeeded += 1;
                report.megapixels += megapixels;
                status
            }
            Err(e) => {
                report.failed += 1;
                FileStatus::Error { kind: e.name().to_string(), message: e.to_string() }
            }
        };
        report.files.push(FileOutcome { file: file_name(path), megapixels, status });
    }
    if wall_seconds > 0.0 {
        report.megapixels_per_second = report.megapixels / wall_seconds;
    }
    Ok(report)
}
