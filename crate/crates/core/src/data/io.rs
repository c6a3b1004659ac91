//! Sparse `label idx:val ...` text files and dense CSV.

use std::fs;
use std::path::Path;

use super::{Dataset, RegressionDataset};
use crate::error::{Result, SvmError};
use crate::kernel::FeatureVector;

fn parse_err(line: usize, msg: impl Into<String>) -> SvmError {
    SvmError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

/// Parses the sparse text format: one sample per line,
/// `<label> <idx>:<val> ...`, indices 1-based and strictly ascending.
/// Everything after `#` is ignored; blank lines are skipped.
pub fn parse_sparse(text: &str) -> Result<RegressionDataset> {
    let mut samples = Vec::new();
    let mut targets = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let label = parse_real(toks.next().unwrap_or_default(), line_no)?;
        let mut pairs = Vec::new();
        let mut last = 0u32;
        for tok in toks {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, format!("expected idx:val, got `{tok}`")))?;
            let idx: u32 = i
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid index `{i}`")))?;
            if idx == 0 {
                return Err(parse_err(line_no, "indices are 1-based"));
            }
            if idx <= last {
                return Err(parse_err(
                    line_no,
                    format!("indices not strictly ascending ({idx} after {last})"),
                ));
            }
            last = idx;
            pairs.push((idx, parse_real(v, line_no)?));
        }
        samples.push(FeatureVector::sparse(pairs).map_err(|e| parse_err(line_no, e.to_string()))?);
        targets.push(label);
    }
    Ok(Dataset { samples, targets })
}

pub fn read_sparse(path: impl AsRef<Path>) -> Result<RegressionDataset> {
    parse_sparse(&fs::read_to_string(path)?)
}

/// Renders the sparse text format. Reals use the shortest representation
/// that parses back to the same value.
pub fn format_sparse(data: &RegressionDataset) -> String {
    let mut out = String::new();
    for (x, y) in data.samples.iter().zip(&data.targets) {
        out.push_str(&y.to_string());
        for (i, v) in x.nonzeros() {
            out.push(' ');
            out.push_str(&format!("{i}:{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn write_sparse(path: impl AsRef<Path>, data: &RegressionDataset) -> Result<()> {
    fs::write(path, format_sparse(data))?;
    Ok(())
}

/// Reads dense CSV rows `label,v1,...,vd`. A first line whose leading field
/// is not numeric is treated as a header.
pub fn read_csv(path: impl AsRef<Path>) -> Result<RegressionDataset> {
    let text = fs::read_to_string(path)?;
    let mut samples = Vec::new();
    let mut targets = Vec::new();
    let mut width = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if samples.is_empty() && width.is_none() && fields[0].parse::<f64>().is_err() {
            continue;
        }
        if fields.len() < 2 {
            return Err(parse_err(line_no, "expected label and at least one feature"));
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(parse_err(
                    line_no,
                    format!("expected {w} fields, found {}", fields.len()),
                ))
            }
            _ => {}
        }
        targets.push(parse_real(fields[0], line_no)?);
        let values = fields[1..]
            .iter()
            .map(|f| parse_real(f, line_no))
            .collect::<Result<Vec<_>>>()?;
        samples.push(FeatureVector::dense(values)?);
    }
    Ok(Dataset { samples, targets })
}

pub fn write_csv(path: impl AsRef<Path>, data: &RegressionDataset) -> Result<()> {
    let dim = data.dim();
    let mut out = String::new();
    for (x, y) in data.samples.iter().zip(&data.targets) {
        out.push_str(&y.to_string());
        for v in x.to_dense(dim) {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Dispatches on extension: `.csv` is dense CSV, anything else sparse text.
pub fn read_dataset(path: impl AsRef<Path>) -> Result<RegressionDataset> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        read_csv(path)
    } else {
        read_sparse(path)
    }
}
