use std::io::Write;

use serde::Serialize;
use wavelet_prep::pipeline::{list_images, subband_statistics, PipelineConfig, SubbandStats};

use super::{apply, exit_for, file_name, load_image, network_dims, CmdResult};
use crate::args::StatsArgs;
use crate::output::Output;

#[derive(Serialize)]
struct Record<'a> {
    file: &'a str,
    #[serde(flatten)]
    stats: &'a SubbandStats,
}

#[derive(Serialize)]
struct Failure<'a> {
    file: &'a str,
    error: String,
}

pub fn run(a: &StatsArgs, out: &mut Output<impl Write>) -> CmdResult {
    if let Some((w, h)) = a.size {
        apply(PipelineConfig::new(w, h), &a.transform).with_mode(a.mode).validate()?;
    }
    let mut failed = 0;
    for path in list_images(&a.input)? {
        let file = file_name(&path);
        let result = load_image(&path).and_then(|image| {
            let (w, h) = network_dims(a.size, &image);
            let config = apply(PipelineConfig::new(w, h), &a.transform).with_mode(a.mode);
            subband_statistics(&image, &config)
        });
        match result {
            Ok(stats) => {
                for s in &stats {
                    if out.json() {
                        out.record(&Record { file: &file, stats: s })?;
                    } else {
                        out.line(format!(
                            "{file}  c{} L{} {:<2}  mean {:>12.6}  var {:>14.6}  min {:>12.6}  max {:>12.6}  frac {:.6}",
                            s.source_channel, s.level, s.subband, s.mean, s.variance, s.min, s.max, s.variance_fraction
                        ))?;
                    }
                }
            }
            Err(e) => {
                failed += 1;
                let error = format!("{}: {e}", e.name());
                if out.json() {
                    out.record(&Failure { file: &file, error })?;
                } else {
                    out.line(format!("FAIL  {file}: {error}"))?;
                }
            }
        }
    }
    out.flush()?;
    Ok(exit_for(failed))
}
