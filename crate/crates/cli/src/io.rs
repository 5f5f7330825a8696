//! File formats and output plumbing shared by the subcommands.

use std::fs::{self, File};
use std::io::{self, BufWriter, IsTerminal, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use weighted_savgol::{FilterCoefficients, FilterSpec, MetricsReport, WeightKind, WeightVector};

use crate::error::{failure, usage, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Where results go: a file given by `--output`, or stdout.
pub struct Sink {
    writer: Box<dyn Write>,
    color: bool,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        match path {
            Some(p) => {
                let file = File::create(p)
                    .map_err(|e| usage(format!("cannot create {}: {e}", p.display())))?;
                Ok(Sink {
                    writer: Box::new(BufWriter::new(file)),
                    color: false,
                })
            }
            None => {
                let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
                Ok(Sink {
                    color: !no_color && io::stdout().is_terminal(),
                    writer: Box::new(BufWriter::new(io::stdout())),
                })
            }
        }
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        &mut self.writer
    }

    pub fn write_str(&mut self, s: &str) -> CliResult<()> {
        self.writer.write_all(s.as_bytes()).map_err(write_error)
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush().map_err(write_error)
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut self.writer, value)
            .map_err(|e| failure(format!("cannot write JSON: {e}")))?;
        self.write_str("\n")
    }

    pub fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(&mut self.writer);
        w.write_record(header).map_err(csv_error)?;
        for row in rows {
            w.write_record(row).map_err(csv_error)?;
        }
        w.flush().map_err(write_error)
    }

    /// Columns padded to their widest cell, right-aligned, header in bold when
    /// writing to a terminal that allows color.
    pub fn table(&mut self, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let head = line(header.to_vec());
        let head = if self.color {
            format!("\x1b[1m{head}\x1b[0m")
        } else {
            head
        };
        let mut out = head + "\n";
        for row in rows {
            out += &line(row.iter().map(String::as_str).collect());
            out += "\n";
        }
        self.write_str(&out)
    }

    /// Rows in one of the three formats; JSON renders an array of objects
    /// keyed by the header, with empty cells as `null` and numeric cells as
    /// numbers.
    pub fn rows(&mut self, format: Format, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        match format {
            Format::Csv => self.csv(header, rows),
            Format::Table => self.table(header, rows),
            Format::Json => {
                let objects: Vec<serde_json::Map<String, serde_json::Value>> = rows
                    .iter()
                    .map(|row| {
                        header
                            .iter()
                            .zip(row)
                            .map(|(h, cell)| (h.to_string(), json_cell(cell)))
                            .collect()
                    })
                    .collect();
                self.json(&objects)
            }
        }
    }
}

fn json_cell(cell: &str) -> serde_json::Value {
    if cell.is_empty() {
        return serde_json::Value::Null;
    }
    match cell {
        "true" => return serde_json::Value::Bool(true),
        "false" => return serde_json::Value::Bool(false),
        _ => {}
    }
    serde_json::from_str::<serde_json::Number>(cell)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|_| serde_json::Value::String(cell.to_string()))
}

fn write_error(e: io::Error) -> crate::error::CliError {
    failure(format!("cannot write output: {e}"))
}

fn csv_error(e: csv::Error) -> crate::error::CliError {
    failure(format!("cannot write CSV: {e}"))
}

/// 17 significant digits: enough for any `f64` to parse back to itself.
pub fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fixed-point for tables.
pub fn short(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

pub fn opt(x: Option<f64>, fmt: fn(f64) -> String) -> String {
    x.map(fmt).unwrap_or_default()
}

fn exact_number<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::Error;
    RawValue::from_string(exact(*x))
        .map_err(S::Error::custom)?
        .serialize(s)
}

fn exact_numbers<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::{Error, SerializeSeq};
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&RawValue::from_string(exact(*x)).map_err(S::Error::custom)?)?;
    }
    seq.end()
}

/// The coefficient file written by `design` and read by `smooth --coeff-file`.
#[derive(Debug, Serialize, Deserialize)]
pub struct CoefficientDocument {
    pub q: usize,
    pub degree: usize,
    pub weight_kind: String,
    #[serde(serialize_with = "exact_numbers")]
    pub weights: Vec<f64>,
    #[serde(serialize_with = "exact_numbers")]
    pub coefficients: Vec<f64>,
    #[serde(serialize_with = "exact_number")]
    pub r: f64,
    #[serde(serialize_with = "exact_number")]
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<serde_json::Value>,
}

impl CoefficientDocument {
    pub fn new(c: &FilterCoefficients, report: &MetricsReport) -> Self {
        let spec = c.spec();
        CoefficientDocument {
            q: spec.q(),
            degree: spec.degree(),
            weight_kind: spec.weights().kind().to_string(),
            weights: spec.weights().values().to_vec(),
            coefficients: c.taps().to_vec(),
            r: report.r,
            s: report.s,
            metrics: Some(metrics_json(report)),
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| {
            usage(format!(
                "{} is not a coefficient document: {e}",
                path.display()
            ))
        })
    }

    /// Rebuild the filter: generated kinds are regenerated (and must agree
    /// with the stored weights), custom weights are taken as stored.
    pub fn into_filter(self) -> CliResult<FilterCoefficients> {
        let kind: WeightKind = self.weight_kind.parse()?;
        if self.weights.len() != self.q || self.coefficients.len() != self.q {
            return Err(usage(format!(
                "coefficient document has q = {} but {} weights and {} coefficients",
                self.q,
                self.weights.len(),
                self.coefficients.len()
            )));
        }
        let weights = match kind {
            WeightKind::Custom => WeightVector::custom(self.weights)?,
            generated => {
                let w = generated.generate(self.q)?;
                let scale = w.values().iter().fold(0.0f64, |a, b| a.max(b.abs()));
                let drift = w
                    .values()
                    .iter()
                    .zip(&self.weights)
                    .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                if drift > 1e-12 * scale {
                    return Err(usage(format!(
                        "stored weights do not match the {generated} family"
                    )));
                }
                w
            }
        };
        let spec = FilterSpec::centered(self.degree, weights)?;
        Ok(FilterCoefficients::from_parts(self.coefficients, spec)?)
    }
}

fn metrics_json(report: &MetricsReport) -> serde_json::Value {
    let closed = report.closed_forms.map(|c| {
        serde_json::json!({
            "r0": c.r0, "s0": c.s0, "r2": c.r2, "s2": c.s2,
            "r0_over_r2": c.r0_over_r2(), "s0_over_s2": c.s0_over_s2(),
        })
    });
    let by_q = report
        .degree_zero_approximations
        .map(|a| serde_json::json!({ "r0_over_r2": a.r0_over_r2, "s0_over_s2": a.s0_over_s2 }));
    let by_mn = report.approximations.map(|a| {
        serde_json::json!({
            "r0_over_r2": a.r0_over_r2, "s0_over_s2": a.s0_over_s2, "s0_over_s1": a.s0_over_s1,
        })
    });
    serde_json::json!({
        "n": report.n,
        "m": report.m,
        "closed_forms": closed,
        "window_length_approximations": by_q,
        "ratio_approximations": by_mn,
    })
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Weights from a file: a JSON array, a coefficient document (its `weights`),
/// or plain numbers separated by commas, whitespace or newlines.
pub fn read_weight_file(path: &Path) -> CliResult<WeightVector> {
    let text = read_text(path)?;
    let trimmed = text.trim_start();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(&text)
            .map_err(|e| usage(format!("{}: bad weight array: {e}", path.display())))?
    } else if trimmed.starts_with('{') {
        CoefficientDocument::read(path)?.weights
    } else {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| usage(format!("{}: `{t}` is not a number", path.display())))
            })
            .collect::<CliResult<_>>()?
    };
    WeightVector::custom(values).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// `a:b:c` (inclusive, step `c`), `a:b` (step 1), a single value, or a comma
/// list of any of those. Result is sorted and deduplicated.
pub fn parse_grid(text: &str, what: &str) -> CliResult<Vec<usize>> {
    let bad = |t: &str| usage(format!("bad {what} grid `{t}`"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Vec<usize> = part
            .split(':')
            .map(|t| t.trim().parse::<usize>().map_err(|_| bad(part)))
            .collect::<CliResult<_>>()?;
        match nums[..] {
            [v] => out.push(v),
            [a, b] if a <= b => out.extend(a..=b),
            [a, b, step] if a <= b && step > 0 => out.extend((a..=b).step_by(step)),
            _ => return Err(bad(part)),
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(usage(format!("empty {what} grid")));
    }
    Ok(out)
}

/// Comma list of weight kinds, or `all` for the three generated families.
/// Order follows the family order, not the order given.
pub fn parse_weight_kinds(text: &str) -> CliResult<Vec<WeightKind>> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(WeightKind::GENERATED.to_vec());
    }
    let mut kinds = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<WeightKind>()? {
            WeightKind::Custom => Err(usage("use --weight-file for custom weights")),
            k => Ok(k),
        })
        .collect::<CliResult<Vec<_>>>()?;
    kinds.sort_unstable();
    kinds.dedup();
    if kinds.is_empty() {
        return Err(usage("empty weight list"));
    }
    Ok(kinds)
}
