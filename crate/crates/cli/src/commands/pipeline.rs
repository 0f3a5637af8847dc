use std::io::Write;

use serde::Serialize;
use wavelet_prep::pipeline::{preprocess_batch, FileStatus, PipelineConfig};

use super::{apply, exit_for, CmdResult};
use crate::args::PipelineArgs;
use crate::output::Output;

#[derive(Serialize)]
struct Summary {
    succeeded: usize,
    failed: usize,
    wall_seconds: f64,
    megapixels: f64,
    megapixels_per_second: f64,
}

pub fn config(a: &PipelineArgs) -> PipelineConfig {
    let (w, h) = a.size;
    apply(PipelineConfig::new(w, h), &a.transform)
        .with_mode(a.mode)
        .with_mask(a.channels)
        .with_normalization(a.normalize)
}

pub fn run(a: &PipelineArgs, out: &mut Output<impl Write>) -> CmdResult {
    let config = config(a);
    config.validate()?;
    let report = preprocess_batch(&a.input, &a.output, &config, a.jobs.jobs)?;
    for f in &report.files {
        if out.json() {
            out.record(f)?;
            continue;
        }
        match &f.status {
            FileStatus::Ok { output, tensors, bytes } => {
                let shapes: Vec<String> = tensors.iter().map(|(c, h, w)| format!("({c}, {h}, {w})")).collect();
                out.line(format!("ok    {} -> {output} {} {bytes} bytes", f.file, shapes.join(" ")))?;
            }
            FileStatus::Error { kind, message } => out.line(format!("FAIL  {}: {kind}: {message}", f.file))?,
        }
    }
    let summary = Summary {
        succeeded: report.succeeded,
        failed: report.failed,
        wall_seconds: report.wall_seconds,
        megapixels: report.megapixels,
        megapixels_per_second: report.megapixels_per_second,
    };
    if out.json() {
        #[derive(Serialize)]
        struct Wrapped<'a> {
            summary: &'a Summary,
        }
        out.record(&Wrapped { summary: &summary })?;
    } else {
        out.line(format!(
            "{} succeeded, {} failed, {:.2} MP in {:.3} s ({:.1} MP/s)",
            summary.succeeded, summary.failed, summary.megapixels, summary.wall_seconds, summary.megapixels_per_second
        ))?;
    }
    out.flush()?;
    Ok(exit_for(report.failed))
}
