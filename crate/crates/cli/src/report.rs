//! Report document and deterministic serialization.
//!
//! Machine output is byte-stable: struct fields serialize in declaration
//! order and every float is printed with 17 significant digits, which
//! round-trips `f64` exactly. Human output rounds to 6 significant digits.

use std::io::{self, Write};

use serde::Serialize;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Overall outcome of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
        }
    }
}

/// Envelope shared by every command.
#[derive(Debug, Serialize)]
pub struct Report<P: Serialize, R: Serialize> {
    pub command: &'static str,
    pub parameters: P,
    pub results: R,
    pub status: Status,
    pub tool_version: &'static str,
}

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// JSON with fixed float formatting (17 significant digits).
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    value.serialize(&mut ser).expect("report serialization is infallible");
    let mut s = String::from_utf8(buf).expect("json is utf-8");
    s.push('\n');
    s
}

/// Machine float: 17 significant digits, round-trip exact.
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Human float: 6 significant digits.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..9).contains(&mag) {
        return format!("{v:.5e}");
    }
    let dec = (5 - mag).max(0) as usize;
    format!("{v:.dec$}")
}

/// Quote a CSV field when it contains separators or quotes.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
