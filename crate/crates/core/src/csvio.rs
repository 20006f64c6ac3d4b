//! CSV ingestion of detector scans and emission of intensity profiles.
//!
//! Positions are written and read in µm. Profile files open with `#` lines
//! echoing the model tag and its parameters.

use std::io::Write;

use crate::analysis::ScanDataset;
use crate::geometry::MICRON;
use crate::profile::{IntensityProfile, ProfileMeta};
use crate::{Error, Result};

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, e.to_string())
}

fn number(line: usize, column: &str, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("{column}: '{field}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("{column}: non-finite value")));
    }
    Ok(v)
}

fn header_line(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|i| i + 1)
        .unwrap_or(1)
}

/// Parses a scan with header `x_um,counts` or `x_um,counts,err`.
pub fn read_scan_csv(text: &str) -> Result<ScanDataset> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let with_err = match names.as_slice() {
        ["x_um", "counts"] => false,
        ["x_um", "counts", "err"] => true,
        _ => {
            return Err(Error::parse(
                header_line(text),
                format!("expected header 'x_um,counts[,err]', got '{}'", names.join(",")),
            ))
        }
    };
    let width = names.len();

    let (mut xs, mut counts, mut errs) = (Vec::new(), Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != width {
            return Err(Error::parse(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let x = number(line, "x_um", &record[0])? * MICRON;
        let c = number(line, "counts", &record[1])?;
        if c < 0.0 {
            return Err(Error::parse(line, format!("negative counts {c}")));
        }
        if let Some(&prev) = xs.last() {
            if !(x > prev) {
                return Err(Error::parse(line, "positions must be strictly increasing"));
            }
        }
        if with_err {
            let e = number(line, "err", &record[2])?;
            if e < 0.0 {
                return Err(Error::parse(line, format!("negative error {e}")));
            }
            errs.push(e);
        }
        xs.push(x);
        counts.push(c);
    }
    if xs.is_empty() {
        return Err(Error::invalid("scan has no data rows"));
    }
    ScanDataset::new(xs, counts, with_err.then_some(errs))
}

/// Canonical profile text: comment header, then `x_um,intensity` rows in
/// 12-significant-digit scientific notation.
pub fn write_profile_csv(profile: &IntensityProfile) -> String {
    let mut out = Vec::with_capacity(32 * profile.len() + 256);
    writeln!(out, "# model: {}", profile.meta.model).unwrap();
    for (k, v) in &profile.meta.params {
        writeln!(out, "# {k}: {v}").unwrap();
    }
    writeln!(out, "# units: x_um = micrometre, intensity = relative").unwrap();
    writeln!(out, "x_um,intensity").unwrap();
    for (x, v) in profile.xs().iter().zip(profile.values()) {
        writeln!(out, "{:.11e},{:.11e}", x / MICRON, v).unwrap();
    }
    String::from_utf8(out).expect("formatted output is ASCII")
}

/// Reads text produced by [`write_profile_csv`].
pub fn read_profile_csv(text: &str) -> Result<IntensityProfile> {
    let mut meta = ProfileMeta::default();
    for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
        let body = line.trim_start_matches('#').trim();
        let Some((key, value)) = body.split_once(": ") else {
            continue;
        };
        match key {
            "model" => meta.model = value.to_string(),
            "units" => {}
            _ => meta.params.push((key.to_string(), value.to_string())),
        }
    }

    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x_um", "intensity"] {
        return Err(Error::parse(header_line(text), "expected header 'x_um,intensity'"));
    }
    let (mut xs, mut values) = (Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 2 {
            return Err(Error::parse(line, format!("expected 2 fields, found {}", record.len())));
        }
        xs.push(number(line, "x_um", &record[0])? * MICRON);
        values.push(number(line, "intensity", &record[1])?);
    }
    IntensityProfile::new(xs, values, meta)
}

/// True when the text carries a profile header rather than a scan header.
pub fn is_profile_csv(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.replace(' ', "") == "x_um,intensity")
}
