//! Text formats shared by the pipeline: the tensor text format, design
//! and trace CSVs, histogram CSVs, interval reports and flat `key = value`
//! files. Everything written here is re-parseable by the matching loader,
//! byte-exactly for floats (shortest round-trip formatting).

use crate::analysis::{HistogramBin, HpdInterval};
use crate::error::{Error, Result};
use crate::sampler::Trace;
use crate::tensor::DenseTensor;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Content lines of a text file with their 1-based line numbers;
/// `#`-prefixed and blank lines are skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Read a tensor from the text format: a `dims: m1 m2 ... mk` header line
/// followed by whitespace-separated values in the mode-1-fastest layout.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = content_lines(&text);

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty tensor file"))?;
    let Some(dims_str) = header.strip_prefix("dims:") else {
        return Err(parse_err(
            path,
            header_line,
            format!("expected `dims: ...` header, got `{header}`"),
        ));
    };
    let dims: Vec<usize> = dims_str
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| parse_err(path, header_line, format!("bad dimension `{tok}`")))
        })
        .collect::<Result<_>>()?;
    if dims.is_empty() {
        return Err(parse_err(path, header_line, "dims header lists no dimensions"));
    }

    let expect: usize = dims.iter().product();
    let mut data = Vec::with_capacity(expect);
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad value `{tok}`")))?;
            data.push(v);
        }
    }
    if data.len() != expect {
        return Err(parse_err(
            path,
            last_line,
            format!("expected {expect} values for dims {dims:?}, found {}", data.len()),
        ));
    }
    DenseTensor::new(dims, data)
}

/// Write a tensor in the text format, one mode-1 fiber per line.
pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    if t.rank() == 0 {
        return Err(Error::Precondition(
            "rank-0 tensors have no file representation".into(),
        ));
    }
    let mut out = String::new();
    out.push_str("dims:");
    for d in t.dims() {
        let _ = write!(out, " {d}");
    }
    out.push('\n');
    let m1 = t.dims()[0];
    for (i, v) in t.data().iter().enumerate() {
        out.push_str(&v.to_string());
        out.push(if (i + 1) % m1 == 0 { '\n' } else { ' ' });
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a design-point CSV (`s1,s2` header, one point per row).
pub fn read_design(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = content_lines(&text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty design file"))?;
    if header.split(',').map(str::trim).collect::<Vec<_>>() != ["s1", "s2"] {
        return Err(parse_err(
            path,
            header_line,
            format!("expected header `s1,s2`, got `{header}`"),
        ));
    }
    let mut points = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 2 comma-separated values, got {}", fields.len()),
            ));
        }
        let mut point = Vec::with_capacity(2);
        for tok in fields {
            point.push(
                tok.parse::<f64>()
                    .map_err(|_| parse_err(path, line_no, format!("bad value `{tok}`")))?,
            );
        }
        points.push(point);
    }
    Ok(points)
}

pub fn write_design(path: impl AsRef<Path>, points: &[Vec<f64>]) -> Result<()> {
    let mut out = String::from("s1,s2\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p[0], p[1]);
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write one chain as CSV: `iter,<active parameter names...>,log_target`.
pub fn write_trace(path: impl AsRef<Path>, trace: &Trace) -> Result<()> {
    let names = trace.active_names();
    let mut out = String::from("iter");
    for n in &names {
        let _ = write!(out, ",{n}");
    }
    out.push_str(",log_target\n");
    for (i, sample) in trace.samples.iter().enumerate() {
        let _ = write!(out, "{}", trace.recorded_iters[i]);
        for v in sample.active_values() {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", trace.log_target[i]);
    }
    fs::write(path, out)?;
    Ok(())
}

/// A trace CSV read back from disk.
#[derive(Debug, Clone)]
pub struct TraceFile {
    pub param_names: Vec<String>,
    pub iters: Vec<usize>,
    /// One row per stored sample, columns in `param_names` order.
    pub samples: Vec<Vec<f64>>,
    pub log_target: Vec<f64>,
}

impl TraceFile {
    /// Marginal samples of one named column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.param_names.iter().position(|n| n == name)?;
        Some(self.samples.iter().map(|row| row[idx]).collect())
    }
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<TraceFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = content_lines(&text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty trace file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "iter" || *cols.last().unwrap() != "log_target" {
        return Err(parse_err(
            path,
            header_line,
            "expected header `iter,<params...>,log_target`",
        ));
    }
    let param_names: Vec<String> = cols[1..cols.len() - 1].iter().map(|s| s.to_string()).collect();
    let mut file = TraceFile {
        param_names,
        iters: Vec::new(),
        samples: Vec::new(),
        log_target: Vec::new(),
    };
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {} fields, got {}", cols.len(), fields.len()),
            ));
        }
        file.iters.push(
            fields[0]
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad iteration `{}`", fields[0])))?,
        );
        let mut row = Vec::with_capacity(cols.len() - 2);
        for tok in &fields[1..fields.len() - 1] {
            row.push(
                tok.parse::<f64>()
                    .map_err(|_| parse_err(path, line_no, format!("bad value `{tok}`")))?,
            );
        }
        file.samples.push(row);
        file.log_target.push(
            fields[fields.len() - 1].parse::<f64>().map_err(|_| {
                parse_err(
                    path,
                    line_no,
                    format!("bad log_target `{}`", fields[fields.len() - 1]),
                )
            })?,
        );
    }
    Ok(file)
}

/// Write a histogram as `bin_center,count` CSV.
pub fn write_histogram(path: impl AsRef<Path>, bins: &[HistogramBin]) -> Result<()> {
    let mut out = String::from("bin_center,count\n");
    for b in bins {
        let _ = writeln!(out, "{},{}", b.center, b.count);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_histogram(path: impl AsRef<Path>) -> Result<Vec<HistogramBin>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = content_lines(&text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty histogram file"))?;
    if header.split(',').map(str::trim).collect::<Vec<_>>() != ["bin_center", "count"] {
        return Err(parse_err(path, header_line, "expected header `bin_center,count`"));
    }
    let mut bins = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(path, line_no, "expected 2 fields"));
        }
        bins.push(HistogramBin {
            center: fields[0]
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad center `{}`", fields[0])))?,
            count: fields[1]
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("bad count `{}`", fields[1])))?,
        });
    }
    Ok(bins)
}

/// One line of an interval report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub interval: HpdInterval,
    pub mode: f64,
}

/// Write a plain-text interval table: one row per parameter with the
/// interval endpoints and the histogram mode.
pub fn write_report(path: impl AsRef<Path>, title: &str, rows: &[ReportRow]) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out, "{:<20} {:<24} {:<24} {:<24}", "parameter", "lower", "upper", "mode");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<20} {:<24} {:<24} {:<24}",
            r.name, r.interval.lower, r.interval.upper, r.mode
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parse an interval report; the mass on the returned intervals is the
/// conventional 0.95 carried by every report this crate writes.
pub fn read_report(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = content_lines(&text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty report file"))?;
    let cols: Vec<&str> = header.split_whitespace().collect();
    if cols != ["parameter", "lower", "upper", "mode"] {
        return Err(parse_err(
            path,
            header_line,
            "expected header `parameter lower upper mode`",
        ));
    }
    let mut rows = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let num = |tok: &str| -> Result<f64> {
            tok.parse()
                .map_err(|_| parse_err(path, line_no, format!("bad value `{tok}`")))
        };
        rows.push(ReportRow {
            name: fields[0].to_string(),
            interval: HpdInterval {
                lower: num(fields[1])?,
                upper: num(fields[2])?,
                mass: 0.95,
            },
            mode: num(fields[3])?,
        });
    }
    Ok(rows)
}

/// Parse a flat `key = value` file, preserving order. Keys are trimmed;
/// values keep internal whitespace.
pub fn read_key_values(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (line_no, line) in content_lines(&text) {
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(
                path,
                line_no,
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

pub fn write_key_values(path: impl AsRef<Path>, pairs: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    fs::write(path, out)?;
    Ok(())
}
