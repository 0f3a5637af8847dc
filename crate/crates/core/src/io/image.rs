use std::io::Cursor;

use crate::error::{Error, Result};
use crate::plane::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitDepth {
    Eight,
    Sixteen,
    Float32,
}

impl BitDepth {
    /// Largest representable sample value; `1.0` for float images.
    pub fn max_value(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
            BitDepth::Float32 => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BitDepth::Eight => "8",
            BitDepth::Sixteen => "16",
            BitDepth::Float32 => "float32",
        }
    }
}

/// Planar sample storage: channel `c` occupies `[c*w*h, (c+1)*w*h)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    U8(Vec<u8>),
    U16(Vec<u16>),
    F32(Vec<f32>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::U8(v) => v.len(),
            Samples::U16(v) => v.len(),
            Samples::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A decoded raster in planar row-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Samples,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, samples: Samples) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Decode(format!("image has zero extent ({width}x{height})")));
        }
        if !(1..=4).contains(&channels) {
            return Err(Error::Decode(format!("{channels} channels; expected 1 to 4")));
        }
        let expected = width * height * channels;
        if samples.len() != expected {
            return Err(Error::Decode(format!(
                "{} samples for a {width}x{height}x{channels} image (expected {expected})",
                samples.len()
            )));
        }
        if let Samples::F32(v) = &samples {
            if v.iter().any(|s| !s.is_finite()) {
                return Err(Error::Decode("non-finite float sample".into()));
            }
        }
        Ok(Self { width, height, channels, samples })
    }

    /// Builds a single-channel 8-bit image from row-major bytes.
    pub fn gray8(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 1, Samples::U8(data))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn bit_depth(&self) -> BitDepth {
        match self.samples {
            Samples::U8(_) => BitDepth::Eight,
            Samples::U16(_) => BitDepth::Sixteen,
            Samples::F32(_) => BitDepth::Float32,
        }
    }

    /// Channel `c` widened to `f64`.
    pub fn channel_plane(&self, c: usize) -> Plane<f64> {
        assert!(c < self.channels, "channel {c} out of range");
        let n = self.pixel_count();
        let range = c * n..(c + 1) * n;
        let data: Vec<f64> = match &self.samples {
            Samples::U8(v) => v[range].iter().map(|&s| f64::from(s)).collect(),
            Samples::U16(v) => v[range].iter().map(|&s| f64::from(s)).collect(),
            Samples::F32(v) => v[range].iter().map(|&s| f64::from(s)).collect(),
        };
        Plane::from_vec(self.width, self.height, data).expect("channel length matches dims")
    }
}

/// Decodes PGM (P5), PPM (P6) or PNG bytes.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a]) {
        decode_png(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::UnsupportedFormat(format!(
            "netpbm variant P{} (only binary P5/P6 are supported)",
            bytes[1] as char
        )))
    } else {
        Err(Error::UnsupportedFormat("unrecognized file signature".into()))
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Decode(format!("PNM header: missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Decode(format!("PNM header: bad {what}")))
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<ImageBuffer> {
    let channels = if bytes[1] == b'5' { 1 } else { 3 };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Decode(format!("PNM maxval {maxval} outside 1..=65535")));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::Decode("PNM header: missing separator after maxval".into())),
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Decode("PNM dimensions overflow".into()))?;
    let wide = maxval > 255;
    let needed = count * if wide { 2 } else { 1 };
    let data = &bytes[cur.pos..];
    if data.len() < needed {
        return Err(Error::Decode(format!(
            "PNM raster truncated: {} of {needed} bytes",
            data.len()
        )));
    }
    let interleaved: Vec<u16> = if wide {
        data[..needed]
            .chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]))
            .collect()
    } else {
        data[..needed].iter().map(|&b| u16::from(b)).collect()
    };
    if interleaved.iter().any(|&v| usize::from(v) > maxval) {
        return Err(Error::Decode(format!("PNM sample exceeds maxval {maxval}")));
    }
    let planar = deinterleave(&interleaved, channels);
    let samples = if wide {
        Samples::U16(planar)
    } else {
        Samples::U8(planar.into_iter().map(|v| v as u8).collect())
    };
    ImageBuffer::new(width, height, channels, samples)
}

fn deinterleave<T: Copy>(data: &[T], channels: usize) -> Vec<T> {
    if channels == 1 {
        return data.to_vec();
    }
    let n = data.len() / channels;
    let mut out = Vec::with_capacity(data.len());
    for c in 0..channels {
        out.extend((0..n).map(|i| data[i * channels + c]));
    }
    out
}

fn interleave<T: Copy>(data: &[T], channels: usize) -> Vec<T> {
    let n = data.len() / channels;
    let mut out = Vec::with_capacity(data.len());
    for i in 0..n {
        out.extend((0..channels).map(|c| data[c * n + i]));
    }
    out
}

fn decode_png(bytes: &[u8]) -> Result<ImageBuffer> {
    let png_err = |e: png::DecodingError| Error::Decode(format!("PNG: {e}"));
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Decode("PNG: image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;
    buf.truncate(info.buffer_size());
    let channels = info.color_type.samples();
    let (width, height) = (info.width as usize, info.height as usize);
    let samples = match info.bit_depth {
        png::BitDepth::Eight => Samples::U8(deinterleave(&buf, channels)),
        png::BitDepth::Sixteen => {
            let wide: Vec<u16> = buf
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]))
                .collect();
            Samples::U16(deinterleave(&wide, channels))
        }
        other => return Err(Error::UnsupportedFormat(format!("PNG bit depth {other:?}"))),
    };
    ImageBuffer::new(width, height, channels, samples)
}

/// Writes a binary PGM (1 channel) or PPM (3 channels).
pub fn encode_pnm(image: &ImageBuffer) -> Result<Vec<u8>> {
    let magic = match image.channels() {
        1 => "P5",
        3 => "P6",
        n => return Err(Error::UnsupportedFormat(format!("PNM cannot hold {n} channels"))),
    };
    let (maxval, body) = match image.samples() {
        Samples::U8(v) => (255, interleave(v, image.channels())),
        Samples::U16(v) => (
            65535,
            interleave(v, image.channels())
                .into_iter()
                .flat_map(u16::to_be_bytes)
                .collect(),
        ),
        Samples::F32(_) => return Err(Error::UnsupportedFormat("PNM cannot hold float samples".into())),
    };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(&body);
    Ok(out)
}

/// Writes an 8- or 16-bit PNG.
pub fn encode_png(image: &ImageBuffer) -> Result<Vec<u8>> {
    let color = match image.channels() {
        1 => png::ColorType::Grayscale,
        2 => png::ColorType::GrayscaleAlpha,
        3 => png::ColorType::Rgb,
        _ => png::ColorType::Rgba,
    };
    let (depth, body): (png::BitDepth, Vec<u8>) = match image.samples() {
        Samples::U8(v) => (png::BitDepth::Eight, interleave(v, image.channels())),
        Samples::U16(v) => (
            png::BitDepth::Sixteen,
            interleave(v, image.channels())
                .into_iter()
                .flat_map(u16::to_be_bytes)
                .collect(),
        ),
        Samples::F32(_) => return Err(Error::UnsupportedFormat("PNG cannot hold float samples".into())),
    };
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
        encoder.set_color(color);
        encoder.set_depth(depth);
        let enc_err = |e: png::EncodingError| Error::Decode(format!("PNG encode: {e}"));
        let mut writer = encoder.write_header().map_err(enc_err)?;
        writer.write_image_data(&body).map_err(enc_err)?;
        writer.finish().map_err(enc_err)?;
    }
    Ok(out)
}
