use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wavelet_prep::dwt::{forward_2d, TransformMode};
use wavelet_prep::io::{ImageBuffer, Samples};
use wavelet_prep::pipeline::{preprocess_image, PipelineConfig};
use wavelet_prep::resize::{resize_bilinear, ResizeSpec};
use wavelet_prep::{with_parallelism, Result};

use super::{CmdResult, Fatal};
use crate::args::BenchArgs;
use crate::output::Output;

#[derive(Serialize)]
struct Record {
    stage: &'static str,
    mode: &'static str,
    jobs: usize,
    /// Pixels processed per sample; the source image for resize and
    /// pipeline, the `2W x 2H` plane for the forward transform.
    megapixels: f64,
    samples: Vec<f64>,
    median_seconds: f64,
    megapixels_per_second: f64,
}

fn time(iterations: usize, warmup: usize, mut f: impl FnMut() -> Result<()>) -> Result<Vec<f64>> {
    for _ in 0..warmup {
        f()?;
    }
    (0..iterations)
        .map(|_| {
            let t = Instant::now();
            f()?;
            Ok(t.elapsed().as_secs_f64())
        })
        .collect()
}

fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn run(a: &BenchArgs, out: &mut Output<impl Write>) -> CmdResult {
    if a.iterations == 0 {
        return Err(Fatal("--iterations must be at least 1".into()));
    }
    let (w, h) = a.size;
    let base = PipelineConfig::new(w, h);
    base.validate()?;
    let (sw, sh) = a.source;
    let (tw, th) = base.transform_input_dims();

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let pixels: Vec<u8> = (0..sw * sh).map(|_| rng.gen()).collect();
    let image = ImageBuffer::new(sw, sh, 1, Samples::U8(pixels))?;
    let source = image.channel_plane(0);
    let spec = ResizeSpec::even(tw, th)?;
    let resized = resize_bilinear(&source, spec)?;
    let rounded = resized.map(|v| v.round().clamp(0.0, 255.0) as i32);
    let jobs = a.jobs.jobs;
    let source_mp = (sw * sh) as f64 / 1e6;
    let transform_mp = (tw * th) as f64 / 1e6;

    let mut records = Vec::new();
    for mode in a.mode.modes() {
        let config = base.clone().with_mode(mode);
        let bank = config.filter_bank();
        let stages: Vec<(&'static str, f64, Vec<f64>)> = with_parallelism(jobs, || -> Result<_> {
            let resize = time(a.iterations, a.warmup, || {
                black_box(resize_bilinear(&source, spec)?);
                Ok(())
            })?;
            let forward = time(a.iterations, a.warmup, || {
                match mode {
                    TransformMode::Float => drop(black_box(forward_2d(&resized, &bank)?)),
                    TransformMode::Reversible => drop(black_box(forward_2d::<i32>(&rounded, &bank)?)),
                }
                Ok(())
            })?;
            let pipeline = time(a.iterations, a.warmup, || {
                black_box(preprocess_image(&image, &config)?);
                Ok(())
            })?;
            Ok(vec![
                ("resize", source_mp, resize),
                ("forward2d", transform_mp, forward),
                ("pipeline", source_mp, pipeline),
            ])
        })?;
        for (stage, megapixels, samples) in stages {
            let median_seconds = median(&samples);
            records.push(Record {
                stage,
                mode: mode.as_str(),
                jobs,
                megapixels,
                megapixels_per_second: megapixels / median_seconds.max(f64::MIN_POSITIVE),
                median_seconds,
                samples,
            });
        }
    }

    if !out.json() {
        out.line(format!(
            "source {sw}x{sh}, network {w}x{h}, jobs {}, {} samples after {} warmup",
            if jobs == 0 { "all".to_string() } else { jobs.to_string() },
            a.iterations,
            a.warmup
        ))?;
    }
    for r in &records {
        if out.json() {
            out.record(r)?;
        } else {
            out.line(format!(
                "{:<10} {:<10} {:>9.3} ms  {:>8.1} MP/s",
                r.mode,
                r.stage,
                r.median_seconds * 1e3,
                r.megapixels_per_second
            ))?;
        }
    }
    out.flush()?;
    Ok(crate::EXIT_OK)
}
