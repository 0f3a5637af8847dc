use std::io::{self, Write};

use serde::Serialize;

use crate::args::ReportFormat;

/// The one place command output goes, so json-lines records are never
/// interleaved.
pub struct Output<W: Write> {
    out: W,
    pub format: ReportFormat,
}

impl<W: Write> Output<W> {
    pub fn new(out: W, format: ReportFormat) -> Self {
        Output { out, format }
    }

    pub fn json(&self) -> bool {
        self.format == ReportFormat::JsonLines
    }

    pub fn line(&mut self, text: impl AsRef<str>) -> io::Result<()> {
        writeln!(self.out, "{}", text.as_ref())
    }

    pub fn record(&mut self, value: &impl Serialize) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, value)?;
        writeln!(self.out)
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}
