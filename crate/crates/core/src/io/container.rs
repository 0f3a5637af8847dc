//! The `.wvt` tensor container.
//!
//! All integers are little-endian.
//!
//! ```text
//! header   "WVLT" | version u8 (=1) | dtype u8 | tensor_count u16
//! tensor   ndim u8 | dims ndim x u32 | meta_len u32 | meta (UTF-8) | payload
//! ```
//!
//! `dtype` is 1 for float32 and 2 for int32 and applies to every tensor in
//! the file. Metadata is `key=value` lines, each terminated by `\n`. The
//! payload is `product(dims) * 4` bytes in row-major order. A file with no
//! tensors is the 8-byte header alone.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"WVLT";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DType {
    Float32,
    Int32,
}

impl DType {
    pub fn code(self) -> u8 {
        match self {
            DType::Float32 => 1,
            DType::Int32 => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(DType::Float32),
            2 => Some(DType::Int32),
            _ => None,
        }
    }

    pub fn size(self) -> usize {
        4
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DType::Float32 => "float32",
            DType::Int32 => "int32",
        }
    }
}

#[derive(Debug, Clone)]
pub enum TensorData {
    Float32(Vec<f32>),
    Int32(Vec<i32>),
}

impl TensorData {
    pub fn dtype(&self) -> DType {
        match self {
            TensorData::Float32(_) => DType::Float32,
            TensorData::Int32(_) => DType::Int32,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TensorData::Float32(v) => v.len(),
            TensorData::Int32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Element `i` widened to `f64`.
    pub fn get_f64(&self, i: usize) -> f64 {
        match self {
            TensorData::Float32(v) => f64::from(v[i]),
            TensorData::Int32(v) => f64::from(v[i]),
        }
    }
}

// Bitwise comparison, so NaN payloads and signed zeros count.
impl PartialEq for TensorData {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (TensorData::Float32(a), TensorData::Float32(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            (TensorData::Int32(a), TensorData::Int32(b)) => a == b,
            _ => false,
        }
    }
}

/// Ordered `key=value` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an entry; keys may repeat.
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.push(key, value);
        self
    }

    /// First value stored under `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn encode(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.entries {
            if k.is_empty() || k.contains(['=', '\n']) || v.contains('\n') {
                return Err(Error::Config(format!("metadata entry {k:?}={v:?} cannot be encoded")));
            }
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        Ok(out)
    }

    fn decode(text: &str) -> Result<Self> {
        let mut meta = Metadata::new();
        if text.is_empty() {
            return Ok(meta);
        }
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| Error::CorruptContainer("metadata is not newline-terminated".into()))?;
        for line in body.split('\n') {
            match line.split_once('=') {
                Some((k, v)) if !k.is_empty() => meta.push(k, v),
                _ => {
                    return Err(Error::CorruptContainer(format!("malformed metadata line {line:?}")));
                }
            }
        }
        Ok(meta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainerTensor {
    pub dims: Vec<usize>,
    pub data: TensorData,
    pub metadata: Metadata,
}

impl ContainerTensor {
    pub fn new(dims: Vec<usize>, data: TensorData, metadata: Metadata) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if expected != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} describe {expected} elements but {} were given",
                data.len()
            )));
        }
        Ok(Self { dims, data, metadata })
    }
}

/// Serializes `tensors`; all of them must share one dtype.
pub fn encode_container(tensors: &[ContainerTensor]) -> Result<Vec<u8>> {
    let dtype = tensors.first().map_or(DType::Float32, |t| t.data.dtype());
    let count = u16::try_from(tensors.len())
        .map_err(|_| Error::Config(format!("{} tensors exceed the 65535 limit", tensors.len())))?;
    let mut out = Vec::with_capacity(
        HEADER_LEN + tensors.iter().map(|t| 64 + t.data.len() * 4).sum::<usize>(),
    );
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(dtype.code());
    out.extend_from_slice(&count.to_le_bytes());
    for (i, t) in tensors.iter().enumerate() {
        if t.data.dtype() != dtype {
            return Err(Error::Config(format!(
                "tensor {i} is {} but the container holds {}",
                t.data.dtype().as_str(),
                dtype.as_str()
            )));
        }
        let elements: usize = t.dims.iter().product();
        if elements != t.data.len() {
            return Err(Error::DimensionMismatch(format!("tensor {i}: dims {:?} vs {} elements", t.dims, t.data.len())));
        }
        let ndim = u8::try_from(t.dims.len())
            .map_err(|_| Error::Config(format!("tensor {i} has {} dims (max 255)", t.dims.len())))?;
        out.push(ndim);
        for &d in &t.dims {
            let d = u32::try_from(d).map_err(|_| Error::Config(format!("tensor {i}: dim {d} exceeds u32")))?;
            out.extend_from_slice(&d.to_le_bytes());
        }
        let meta = t.metadata.encode()?;
        let meta_len = u32::try_from(meta.len()).map_err(|_| Error::Config("metadata too long".into()))?;
        out.extend_from_slice(&meta_len.to_le_bytes());
        out.extend_from_slice(meta.as_bytes());
        match &t.data {
            TensorData::Float32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::Int32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
    }
    Ok(out)
}

/// Writes `tensors` to `sink`, returning the number of bytes written.
pub fn write_container<W: Write>(tensors: &[ContainerTensor], mut sink: W) -> Result<usize> {
    let bytes = encode_container(tensors)?;
    sink.write_all(&bytes)?;
    Ok(bytes.len())
}

/// Reads a whole container from `source`.
pub fn read_container<R: Read>(mut source: R) -> Result<Vec<ContainerTensor>> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    decode_container(&bytes)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::CorruptContainer(format!(
                    "{what} needs {n} bytes at offset {} but only {} remain",
                    self.pos,
                    self.bytes.len() - self.pos
                ))
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

/// Parses a container held in memory. Never reads past a declared length;
/// any inconsistency is reported as [`Error::CorruptContainer`].
pub fn decode_container(bytes: &[u8]) -> Result<Vec<ContainerTensor>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::CorruptContainer("bad magic".into()));
    }
    let version = r.u8("version")?;
    if version != VERSION {
        return Err(Error::VersionMismatch { found: version, expected: VERSION });
    }
    let code = r.u8("dtype")?;
    let dtype = DType::from_code(code)
        .ok_or_else(|| Error::CorruptContainer(format!("unknown dtype code {code}")))?;
    let count = r.u16("tensor count")?;
    let mut tensors = Vec::with_capacity(usize::from(count).min(r.remaining()));
    for i in 0..count {
        let ndim = r.u8("ndim")?;
        let mut dims = Vec::with_capacity(usize::from(ndim));
        for _ in 0..ndim {
            dims.push(r.u32("dim")? as usize);
        }
        let meta_len = r.u32("metadata length")? as usize;
        let meta_bytes = r.take(meta_len, "metadata")?;
        let text = std::str::from_utf8(meta_bytes)
            .map_err(|_| Error::CorruptContainer(format!("tensor {i}: metadata is not UTF-8")))?;
        let metadata = Metadata::decode(text)?;
        let payload_len = dims
            .iter()
            .try_fold(dtype.size(), |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::CorruptContainer(format!("tensor {i}: dims {dims:?} overflow")))?;
        let payload = r.take(payload_len, "payload")?;
        let words = payload.chunks_exact(4).map(|b| [b[0], b[1], b[2], b[3]]);
        let data = match dtype {
            DType::Float32 => TensorData::Float32(words.map(f32::from_le_bytes).collect()),
            DType::Int32 => TensorData::Int32(words.map(i32::from_le_bytes).collect()),
        };
        tensors.push(ContainerTensor { dims, data, metadata });
    }
    if r.remaining() != 0 {
        return Err(Error::CorruptContainer(format!(
            "{} trailing bytes after the last tensor",
            r.remaining()
        )));
    }
    Ok(tensors)
}
