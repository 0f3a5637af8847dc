//! Exit criteria for the library, one line per criterion.
//!
//! Run with `cargo test -p wavelet-prep-core --test acceptance`.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;
use support::*;
use wavelet_prep::dwt::{decompose_multilevel, forward_2d, inverse_2d, FilterBank};
use wavelet_prep::io::{decode_container, encode_container, ContainerTensor, Metadata, TensorData};
use wavelet_prep::pipeline::{preprocess_image, ChannelMask, ColorPolicy, PipelineConfig};
use wavelet_prep::{dwt::TransformMode, with_parallelism, Error, Plane};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Corpus {
    planes: Vec<(Plane<i32>, u32)>,
}

fn corpus() -> Corpus {
    let mut rng = rng(0x5eed);
    let planes = (0..1000)
        .map(|i| {
            let w = 2 * rng.gen_range(1..=512);
            let h = 2 * rng.gen_range(1..=512);
            let bits = if i % 2 == 0 { 8 } else { 16 };
            (random_int_plane(&mut rng, w, h, bits), bits)
        })
        .collect();
    Corpus { planes }
}

fn reversible_reconstruction(corpus: &Corpus) -> Check {
    let bank = FilterBank::paper();
    let start = Instant::now();
    with_parallelism(1, || -> Result<(), String> {
        for (i, (plane, bits)) in corpus.planes.iter().enumerate() {
            let set = forward_2d(plane, &bank).map_err(|e| format!("plane {i}: {e}"))?;
            let back = inverse_2d(&set, &bank).map_err(|e| format!("plane {i}: {e}"))?;
            ensure(&back == plane, || {
                format!("plane {i} ({}x{}, {bits}-bit) differs", plane.width(), plane.height())
            })?;
        }
        Ok(())
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s single-threaded (limit 60s)"))?;
    Ok(format!("1000/1000 planes bit-exact, {secs:.1}s single-threaded"))
}

fn float_reconstruction(corpus: &Corpus) -> Check {
    let bank = FilterBank::paper();
    let mut worst = 0.0f64;
    for (i, (plane, bits)) in corpus.planes.iter().enumerate() {
        let scale = f64::from((1u32 << bits) - 1);
        let unit = plane.map(|v| f64::from(v) / scale);
        let set = forward_2d(&unit, &bank).map_err(|e| format!("plane {i}: {e}"))?;
        let back = inverse_2d(&set, &bank).map_err(|e| format!("plane {i}: {e}"))?;
        worst = worst.max(max_abs_diff(&unit, &back));
    }
    ensure(worst < 1e-10, || format!("max abs error {worst:e} >= 1e-10"))?;
    Ok(format!("max abs error {worst:.3e} < 1e-10"))
}

fn oracle_equivalence() -> Check {
    let mut rng = rng(42);
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut check = |plane: &Plane<f64>, bank: &FilterBank| -> Result<(), String> {
        let set = forward_2d(plane, bank).map_err(|e| e.to_string())?;
        let oracle = outer_product_oracle(plane, bank);
        for (got, want) in set.planes().into_iter().zip(&oracle) {
            worst = worst.max(max_abs_diff(got, want));
        }
        count += 1;
        Ok(())
    };
    for bank in [FilterBank::paper(), FilterBank::jpeg2000()] {
        for w in (2..=16).step_by(2) {
            for h in (2..=16).step_by(2) {
                for _ in 0..10 {
                    let plane = random_float_plane(&mut rng, w, h);
                    check(&plane, &bank)?;
                }
            }
        }
        for _ in 0..100 {
            let w = 2 * rng.gen_range(9..=64);
            let h = 2 * rng.gen_range(9..=64);
            let plane = random_float_plane(&mut rng, w, h);
            check(&plane, &bank)?;
        }
    }
    ensure(worst < 1e-12, || format!("max deviation from oracle {worst:e}"))?;
    Ok(format!("{count} planes, max deviation {worst:.3e} < 1e-12"))
}

fn filter_identities() -> Check {
    let bank = FilterBank::paper();
    ensure(bank.highpass_taps() == [-0.25, 0.5, -0.25], || "F_h taps differ".into())?;
    ensure(bank.lowpass_taps() == [-0.125, 0.25, 0.75, 0.25, -0.125], || "F_l taps differ".into())?;
    let mut rng = rng(7);
    let mut values = vec![0.0, 1.0, -1.0, 255.0, 65535.0, 1e-300, -3.75e12, std::f64::consts::PI];
    values.extend((0..50).map(|_| rng.gen_range(-1e6..1e6)));
    for c in values {
        for (w, h) in [(2, 2), (8, 6), (32, 32)] {
            let set = forward_2d(&Plane::filled(w, h, c), &bank).map_err(|e| e.to_string())?;
            let tol = 4.0 * f64::EPSILON * c.abs();
            ensure(set.ll.as_slice().iter().all(|&v| (v - c).abs() <= tol), || format!("LL != {c}"))?;
            for band in [&set.hl, &set.lh, &set.hh] {
                ensure(band.as_slice().iter().all(|&v| v.abs() <= tol), || format!("detail != 0 for {c}"))?;
            }
        }
    }
    Ok("taps exact; constants give LL = c, HL = LH = HH = 0".into())
}

fn shape_contract() -> Check {
    let mut rng = rng(3);
    let mut seen = Vec::new();
    for side in [224, 299, 512] {
        for (sw, sh) in [(1024, 1024), (613, 457), (300, 300)] {
            let gray = noise_image(&mut rng, sw, sh, 1);
            for mode in [TransformMode::Float, TransformMode::Reversible] {
                let config = PipelineConfig::new(side, side).with_mode(mode);
                let out = preprocess_image(&gray, &config).map_err(|e| e.to_string())?;
                ensure(out.tensors.len() == 1 && out.primary().dims() == (4, side, side), || {
                    format!("gray {sw}x{sh} -> {:?} for W=H={side}", out.primary().dims())
                })?;
            }
        }
        let rgb = noise_image(&mut rng, 700, 500, 3);
        let config = PipelineConfig::new(side, side).with_color(ColorPolicy::PerChannelFanout);
        let out = preprocess_image(&rgb, &config).map_err(|e| e.to_string())?;
        ensure(out.primary().dims() == (12, side, side), || {
            format!("rgb fanout -> {:?} for W=H={side}", out.primary().dims())
        })?;
        seen.push(side);
    }
    Ok(format!("(4, W, H) gray and (12, W, H) RGB for W=H in {seen:?}"))
}

fn mask_coverage() -> Check {
    let mut rng = rng(11);
    let img = noise_image(&mut rng, 333, 271, 3);
    for mode in [TransformMode::Float, TransformMode::Reversible] {
        for color in [ColorPolicy::GrayscaleSinglePlane, ColorPolicy::PerChannelFanout] {
            let base = PipelineConfig::new(64, 48).with_mode(mode).with_color(color);
            let full = preprocess_image(&img, &base).map_err(|e| e.to_string())?;
            let full = full.primary();
            for mask in ChannelMask::ABLATION_SET {
                let out = preprocess_image(&img, &base.clone().with_mask(mask)).map_err(|e| e.to_string())?;
                let t = out.primary();
                let sources = full.channels / 4;
                ensure(t.channels == mask.len() * sources, || format!("{mask}: {} channels", t.channels))?;
                for (c, label) in t.labels.iter().enumerate() {
                    let fc = full.find(*label).ok_or_else(|| format!("{mask}: label {label} not in full tensor"))?;
                    ensure(t.channel_f64(c) == full.channel_f64(fc), || format!("{mask}: {label} values differ"))?;
                }
            }
        }
    }
    Ok("all 5 ablation masks are exact channel subsets (both modes, gray and fanout)".into())
}

fn multilevel_roundtrip() -> Check {
    let bank = FilterBank::paper();
    let mut rng = rng(64);
    for trial in 0..100 {
        let bits = if trial % 2 == 0 { 8 } else { 16 };
        let plane = random_int_plane(&mut rng, 64, 64, bits);
        let ml = decompose_multilevel(&plane, 3, &bank).map_err(|e| e.to_string())?;
        ensure(ml.deepest().band_dims() == (8, 8), || "depth-3 LL is not 8x8".into())?;
        let back = ml.reconstruct(&bank).map_err(|e| e.to_string())?;
        ensure(back == plane, || format!("trial {trial} differs"))?;
    }
    Ok("100 random 64x64 planes, depth 3, bit-exact".into())
}

fn random_container(rng: &mut impl Rng) -> Vec<ContainerTensor> {
    let int = rng.gen::<bool>();
    (0..rng.gen_range(1..=3))
        .map(|i| {
            let dims: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=6)).collect();
            let n: usize = dims.iter().product();
            let data = if int {
                TensorData::Int32((0..n).map(|_| rng.gen()).collect())
            } else {
                TensorData::Float32((0..n).map(|_| f32::from_bits(rng.gen())).collect())
            };
            let meta = Metadata::new().with("level", i.to_string()).with("mask", "LL,HL,LH,HH");
            ContainerTensor::new(dims, data, meta).unwrap()
        })
        .collect()
}

/// Byte offsets of the structural header fields, found by walking a valid
/// file. The version byte is left out: it has its own error.
fn structural_offsets(bytes: &[u8]) -> (Vec<usize>, usize) {
    let mut offsets = vec![0, 1, 2, 3, 5, 6, 7];
    let count = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
    let mut pos = 8;
    for _ in 0..count {
        let ndim = bytes[pos] as usize;
        offsets.push(pos);
        let mut elems = 1;
        for d in 0..ndim {
            let at = pos + 1 + 4 * d;
            offsets.extend(at..at + 4);
            elems *= u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
        }
        pos += 1 + 4 * ndim;
        offsets.extend(pos..pos + 4);
        let meta = u32::from_le_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
        pos += 4 + meta + 4 * elems;
    }
    (offsets, 5)
}

fn container_format() -> Check {
    let mut rng = rng(0xc0ffee);
    for i in 0..500 {
        let tensors = random_container(&mut rng);
        let bytes = encode_container(&tensors).map_err(|e| e.to_string())?;
        let back = decode_container(&bytes).map_err(|e| format!("roundtrip {i}: {e}"))?;
        ensure(back == tensors, || format!("roundtrip {i} not bitwise identical"))?;
        ensure(encode_container(&back).unwrap() == bytes, || format!("re-encode {i} differs"))?;
    }

    let mut rejected = 0;
    while rejected < 1000 {
        let bytes = encode_container(&random_container(&mut rng)).unwrap();
        let (offsets, dtype_at) = structural_offsets(&bytes);
        let mut mutated = bytes.clone();
        match rng.gen_range(0..4) {
            0 | 1 => {
                let at = offsets[rng.gen_range(0..offsets.len())];
                let value = loop {
                    let v = rng.gen::<u8>();
                    // 1 <-> 2 at the dtype byte is another valid file, not a corrupt one.
                    if v != bytes[at] && !(at == dtype_at && (v == 1 || v == 2)) {
                        break v;
                    }
                };
                mutated[at] = value;
            }
            2 => mutated.truncate(rng.gen_range(0..bytes.len())),
            _ => mutated.extend((0..rng.gen_range(1..16)).map(|_| rng.gen::<u8>())),
        }
        let outcome = catch_unwind(AssertUnwindSafe(|| decode_container(&mutated)));
        match outcome {
            Err(_) => return Err(format!("reader panicked on mutated file {rejected}")),
            Ok(Err(Error::CorruptContainer(_))) => rejected += 1,
            Ok(other) => return Err(format!("mutated file {rejected} gave {other:?}")),
        }
    }
    let mut bad_version = encode_container(&random_container(&mut rng)).unwrap();
    bad_version[4] = 7;
    ensure(
        matches!(decode_container(&bad_version), Err(Error::VersionMismatch { found: 7, .. })),
        || "unknown version not rejected".into(),
    )?;
    Ok("500 random roundtrips bitwise; 1000 mutated headers -> CorruptContainer, no panics".into())
}

fn throughput() -> Check {
    let mut rng = rng(1024);
    let img = noise_image(&mut rng, 1024, 1024, 1);
    let megapixels = img.pixel_count() as f64 / 1e6;
    let mut report = Vec::new();
    for mode in [TransformMode::Float, TransformMode::Reversible] {
        let config = PipelineConfig::new(512, 512).with_mode(mode);
        let mut times = with_parallelism(1, || {
            for _ in 0..2 {
                preprocess_image(&img, &config).unwrap();
            }
            (0..7)
                .map(|_| {
                    let t = Instant::now();
                    std::hint::black_box(preprocess_image(&img, &config).unwrap());
                    t.elapsed().as_secs_f64()
                })
                .collect::<Vec<_>>()
        });
        times.sort_by(f64::total_cmp);
        let mps = megapixels / times[times.len() / 2];
        ensure(mps >= 20.0, || format!("{} mode: {mps:.1} MP/s < 20", mode.as_str()))?;
        report.push(format!("{} {mps:.1} MP/s", mode.as_str()));
    }
    Ok(format!("1024x1024 8-bit, single thread, median of 7: {}", report.join(", ")))
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("perfect reconstruction, reversible", Box::new(|| reversible_reconstruction(&corpus))),
        ("perfect reconstruction, float", Box::new(|| float_reconstruction(&corpus))),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("filter identities", Box::new(filter_identities)),
        ("shape contract", Box::new(shape_contract)),
        ("channel mask coverage", Box::new(mask_coverage)),
        ("multi-level roundtrip", Box::new(multilevel_roundtrip)),
        ("container format", Box::new(container_format)),
        ("throughput gate", Box::new(throughput)),
    ];
    let mut failures = 0;
    for (name, run) in &criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
