//! JSON and text rendering of verification reports.
//!
//! Every float is written with 17 significant digits, so a report parses back
//! to the identical bit pattern.

use std::cmp::Ordering;
use std::io;

use rqkz_core::idsuite::{ParamValue, VerificationReport};
use rqkz_core::C;
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

/// Pretty JSON with fixed-width scientific floats.
pub struct ExactFormatter<'a>(PrettyFormatter<'a>);

impl ExactFormatter<'_> {
    pub fn new() -> Self {
        Self(PrettyFormatter::with_indent(b"  "))
    }
}

impl Default for ExactFormatter<'_> {
    fn default() -> Self {
        Self::new()
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Formatter for ExactFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` with [`ExactFormatter`].
pub fn to_exact_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFormatter::new());
    value
        .serialize(&mut ser)
        .expect("serialization into memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex(pub C);

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.0.re)?;
        seq.serialize_element(&self.0.im)?;
        seq.end()
    }
}

struct Param<'a>(&'a ParamValue);

impl Serialize for Param<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ParamValue::Int(v) => s.serialize_i64(*v),
            ParamValue::Real(v) => s.serialize_f64(*v),
            ParamValue::Complex(v) => Complex(*v).serialize(s),
            ParamValue::Text(v) => s.serialize_str(v),
        }
    }
}

struct Params<'a>(&'a [(String, ParamValue)]);

impl Serialize for Params<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, &Param(v))?;
        }
        map.end()
    }
}

struct Scalars<'a>(&'a [(String, C)]);

impl Serialize for Scalars<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, &Complex(*v))?;
        }
        map.end()
    }
}

/// One report in the output schema.
pub struct ReportJson<'a>(pub &'a VerificationReport);

impl Serialize for ReportJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let r = self.0;
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("name", &r.name)?;
        map.serialize_entry("params", &Params(&r.params))?;
        map.serialize_entry("residual", &r.residual)?;
        map.serialize_entry("tolerance", &r.tolerance)?;
        map.serialize_entry("passed", &r.passed)?;
        if !r.extracted_scalars.is_empty() {
            map.serialize_entry("extracted_scalars", &Scalars(&r.extracted_scalars))?;
        }
        if let Some(e) = &r.error {
            map.serialize_entry("error", e)?;
        }
        map.serialize_entry("wall_ms", &r.wall_ms)?;
        map.end()
    }
}

pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let wrapped: Vec<ReportJson> = reports.iter().map(ReportJson).collect();
    to_exact_json(&wrapped)
}

fn param_text(v: &ParamValue) -> String {
    match v {
        ParamValue::Int(i) => i.to_string(),
        ParamValue::Real(x) => format_f64(*x),
        ParamValue::Complex(z) => format!("{},{}", format_f64(z.re), format_f64(z.im)),
        ParamValue::Text(t) => t.clone(),
    }
}

/// `k=v` pairs joined by spaces, used both for display and as the sort key.
pub fn params_key(r: &VerificationReport) -> String {
    r.params
        .iter()
        .map(|(k, v)| format!("{k}={}", param_text(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Orders by check name, then by the rendered parameters.
pub fn report_order(a: &VerificationReport, b: &VerificationReport) -> Ordering {
    a.name.cmp(&b.name).then_with(|| params_key(a).cmp(&params_key(b)))
}

pub fn reports_to_text(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{status} {:<28} residual={:.3e} tol={:.1e} {}",
            r.name,
            r.residual,
            r.tolerance,
            params_key(r)
        ));
        if let Some(e) = &r.error {
            out.push_str(&format!(" error=\"{e}\""));
        }
        out.push('\n');
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", reports.len(), failed));
    out
}
