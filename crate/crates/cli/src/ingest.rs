//! Delimited-text readers for count histograms and probability tables.

use std::collections::BTreeMap;
use std::path::Path;

use spd_core::estimate::CountHistogram;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("input is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: count {count} appears more than once")]
    DuplicateCount { line: usize, count: u64 },
    #[error("line {line}: negative value {value}")]
    Negative { line: usize, value: String },
    #[error("probabilities sum to {0}, too far from 1 to normalize")]
    NotNormalizable(f64),
    #[error("{0}")]
    Invalid(String),
}

pub fn read_input(path: &Path) -> Result<String, IngestError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| IngestError::Io {
            path: "<stdin>".into(),
            message: e.to_string(),
        })?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Non-blank, non-comment rows split on the detected delimiter, with 1-based line numbers.
fn rows(text: &str) -> Result<Vec<(usize, Vec<String>)>, IngestError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let first = lines.first().ok_or(IngestError::Empty)?.1;
    let delimiter = [',', '\t', ';'].into_iter().find(|&d| first.contains(d));
    Ok(lines
        .into_iter()
        .map(|(n, l)| {
            let fields = match delimiter {
                Some(d) => l.split(d).map(|f| f.trim().to_string()).collect(),
                None => l.split_whitespace().map(str::to_string).collect(),
            };
            (n, fields)
        })
        .collect())
}

fn looks_like_header(fields: &[String]) -> bool {
    fields.iter().any(|f| f.parse::<f64>().is_err())
}

fn parse_count(field: &str, line: usize, what: &str) -> Result<u64, IngestError> {
    if field.starts_with('-') && field[1..].parse::<f64>().is_ok() {
        return Err(IngestError::Negative { line, value: field.to_string() });
    }
    field.parse::<u64>().map_err(|_| IngestError::Malformed {
        line,
        message: format!("{what} {field:?} is not a nonnegative integer"),
    })
}

/// Parses `count,frequency` rows (comma, tab, semicolon or whitespace separated,
/// optional header line).
pub fn parse_histogram(text: &str) -> Result<CountHistogram, IngestError> {
    let mut rows = rows(text)?;
    if looks_like_header(&rows[0].1) {
        rows.remove(0);
    }
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }
    let mut bins = BTreeMap::new();
    for (line, fields) in rows {
        if fields.len() != 2 {
            return Err(IngestError::Malformed {
                line,
                message: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let count = parse_count(&fields[0], line, "count")?;
        let freq = parse_count(&fields[1], line, "frequency")?;
        if bins.insert(count, freq).is_some() {
            return Err(IngestError::DuplicateCount { line, count });
        }
    }
    CountHistogram::new(bins).map_err(|e| IngestError::Invalid(e.to_string()))
}

pub fn ingest(path: &Path) -> Result<CountHistogram, IngestError> {
    parse_histogram(&read_input(path)?)
}

/// A probability table after optional normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPmf {
    pub probs: Vec<f64>,
    /// Set when the input did not sum to one and was rescaled.
    pub normalized_from: Option<f64>,
}

/// Largest deviation of the total mass from one that is silently rescaled.
pub const NORMALIZE_TOL: f64 = 1e-6;

/// Parses either `value,probability` rows or one probability per row (values 0, 1, ...).
pub fn parse_pmf(text: &str) -> Result<ParsedPmf, IngestError> {
    let mut rows = rows(text)?;
    if looks_like_header(&rows[0].1) {
        rows.remove(0);
    }
    if rows.is_empty() {
        return Err(IngestError::Empty);
    }
    let mut probs: Vec<f64> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (index, (line, fields)) in rows.into_iter().enumerate() {
        let (value, prob_field) = match fields.as_slice() {
            [p] => (index as u64, p.clone()),
            [k, p] => (parse_count(k, line, "value")?, p.clone()),
            _ => {
                return Err(IngestError::Malformed {
                    line,
                    message: format!("expected 1 or 2 fields, found {}", fields.len()),
                })
            }
        };
        let p: f64 = prob_field.parse().map_err(|_| IngestError::Malformed {
            line,
            message: format!("probability {prob_field:?} is not a number"),
        })?;
        if !p.is_finite() {
            return Err(IngestError::Malformed { line, message: "non-finite probability".into() });
        }
        if p < 0.0 {
            return Err(IngestError::Negative { line, value: prob_field });
        }
        if !seen.insert(value) {
            return Err(IngestError::DuplicateCount { line, count: value });
        }
        let k = value as usize;
        if probs.len() <= k {
            probs.resize(k + 1, 0.0);
        }
        probs[k] = p;
    }
    let mass: f64 = probs.iter().sum();
    let normalized_from = if (mass - 1.0).abs() > 1e-12 {
        if (mass - 1.0).abs() >= NORMALIZE_TOL {
            return Err(IngestError::NotNormalizable(mass));
        }
        probs.iter_mut().for_each(|p| *p /= mass);
        Some(mass)
    } else {
        None
    };
    Ok(ParsedPmf { probs, normalized_from })
}
