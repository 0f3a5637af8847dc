use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use wavelet_prep::io::{read_container, CONTAINER_EXTENSION};
use wavelet_prep::pipeline::{list_images, verify_container, verify_image, PipelineConfig, VerifyOutcome};
use wavelet_prep::{with_parallelism, Result};

use super::{apply, exit_for, file_name, load_image, network_dims, CmdResult};
use crate::args::VerifyArgs;
use crate::output::Output;

#[derive(Serialize)]
struct Record {
    file: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Summary {
    checked: usize,
    passed: usize,
    failed: usize,
}

fn check(a: &VerifyArgs, path: &Path) -> Result<VerifyOutcome> {
    let image = load_image(path)?;
    match &a.containers {
        Some(dir) => {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy();
            let mut file = fs::File::open(dir.join(format!("{stem}.{CONTAINER_EXTENSION}")))?;
            let tensors = read_container(&mut file)?;
            verify_container(&image, &tensors, a.tolerance)
        }
        None => {
            let (w, h) = network_dims(a.size, &image);
            let config = apply(PipelineConfig::new(w, h), &a.transform).with_mode(a.mode);
            verify_image(&image, &config, a.tolerance)
        }
    }
}

pub fn run(a: &VerifyArgs, out: &mut Output<impl Write>) -> CmdResult {
    if let Some((w, h)) = a.size {
        apply(PipelineConfig::new(w, h), &a.transform).with_mode(a.mode).validate()?;
    }
    let files = list_images(&a.input)?;
    let records: Vec<Record> = with_parallelism(a.jobs.jobs, || {
        files
            .iter()
            .map(|path| {
                let file = file_name(path);
                match check(a, path) {
                    Ok(o) => Record { file, passed: o.passed, max_abs_error: Some(o.max_abs_error), error: None },
                    Err(e) => Record {
                        file,
                        passed: false,
                        max_abs_error: None,
                        error: Some(format!("{}: {e}", e.name())),
                    },
                }
            })
            .collect()
    });

    let passed = records.iter().filter(|r| r.passed).count();
    let summary = Summary { checked: records.len(), passed, failed: records.len() - passed };
    for r in &records {
        if out.json() {
            out.record(r)?;
            continue;
        }
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let detail = match (&r.error, r.max_abs_error) {
            (Some(e), _) => e.clone(),
            (None, Some(err)) => format!("max abs error {err:e}"),
            (None, None) => String::new(),
        };
        out.line(format!("{verdict}  {}  {detail}", r.file))?;
    }
    if out.json() {
        #[derive(Serialize)]
        struct Wrapped<'a> {
            summary: &'a Summary,
        }
        out.record(&Wrapped { summary: &summary })?;
    } else {
        out.line(format!("{} checked, {} passed, {} failed", summary.checked, summary.passed, summary.failed))?;
    }
    out.flush()?;
    Ok(exit_for(summary.failed))
}
