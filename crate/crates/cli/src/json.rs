//! Deterministic JSON: struct field order as declared, every float with 17
//! significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_report<W: Write, T: Serialize>(mut w: W, command: &str, body: &T) -> io::Result<()> {
    let mut ser = Serializer::with_formatter(&mut w, FixedFloats);
    Envelope { schema_version: SCHEMA_VERSION, command, body }.serialize(&mut ser).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()
}

/// Same float format for CSV cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
