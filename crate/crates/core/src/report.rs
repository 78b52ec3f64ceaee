//! JSON/CSV rendering of pipeline reports.
//!
//! Exact quantities are written as `{"num": .., "den": .., "value": ..}`
//! objects; the float is for reading only.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::Serializer;

use crate::error::Result;
use crate::extract::PipelineReport;

/// Version of the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

pub fn ser_ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Ratio", 3)?;
    st.serialize_field("num", r.numer())?;
    st.serialize_field("den", r.denom())?;
    st.serialize_field("value", &(*r.numer() as f64 / *r.denom() as f64))?;
    st.end()
}

/// Big ratios are written with decimal-string numerator and denominator.
pub fn ser_big_ratio<S: Serializer>(r: &Ratio<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Ratio", 3)?;
    st.serialize_field("num", &r.numer().to_string())?;
    st.serialize_field("den", &r.denom().to_string())?;
    let value = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    st.serialize_field("value", &value)?;
    st.end()
}

/// Pretty JSON with a trailing newline.
pub fn to_json(report: &PipelineReport) -> Result<String> {
    let mut out = serde_json::to_string_pretty(report)?;
    out.push('\n');
    Ok(out)
}

/// The same report with its `timing` member removed, for reproducibility checks.
pub fn to_json_without_timing(report: &PipelineReport) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    if let Some(obj) = value.as_object_mut() {
        obj.remove("timing");
    }
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

pub const CSV_HEADER: &str = "label,size,energy,e_size,e_energy,meets_theorem";

/// One row per certificate: `label,size,energy,e_size,e_energy,meets_theorem`.
pub fn to_csv(report: &PipelineReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for cert in &report.certificates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_field(&cert.label.to_string()),
            cert.size,
            cert.energy.value(),
            cert.e_size,
            cert.e_energy,
            cert.meets_theorem
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
