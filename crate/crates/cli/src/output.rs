//! Artifact writers. JSON floats are printed with 17 significant digits so
//! identical runs produce identical bytes.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

struct FixedFormatter;

impl Formatter for FixedFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        // serde_json routes non-finite values to write_null before this point
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut buf = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut buf, FixedFormatter))?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

/// `{:.16e}` for the CSV columns too.
pub fn fixed(v: f64) -> String {
    if v.is_finite() { format!("{v:.16e}") } else { v.to_string() }
}
