//! CSV formats: masked-point tables for black-box attribution and point lists.
//!
//! Masked table: header `mask,value`, one row per subset `I`, where `mask` is
//! the 1-based index list of `I` joined by `+` (empty for ∅) and `value` is
//! `F(p_I(x))`. Exactly `2^d` rows.
//!
//! Points: header `x1,…,xd`, one point per row.

use thiserror::Error;

use crate::coords::{CoordError, Dimension, Point, Subset, SUBSET_CAP};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed CSV at line {line}: {detail}")]
    Malformed { line: u64, detail: String },
    #[error("incomplete masked table: {count} of {expected} subsets missing (first: {{{first}}})")]
    Incomplete { count: usize, expected: usize, first: String },
    #[error(transparent)]
    Coord(#[from] CoordError),
}

impl From<csv::Error> for IoError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line());
        IoError::Malformed { line, detail: e.to_string() }
    }
}

fn parse_value(field: &str, line: u64) -> Result<f64, IoError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| IoError::Malformed { line, detail: format!("{field:?} is not a number") })?;
    if !v.is_finite() {
        return Err(IoError::Malformed { line, detail: format!("{field:?} is not finite") });
    }
    Ok(v)
}

/// Reads a masked table into values indexed by subset mask.
pub fn read_masked_table(text: &str, d: Dimension) -> Result<Vec<f64>, IoError> {
    d.ensure_at_most(SUBSET_CAP, "masked tables")?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "mask" || &headers[1] != "value" {
        return Err(IoError::Malformed { line: 1, detail: format!("expected header mask,value, got {:?}", headers) });
    }
    let mut values: Vec<Option<f64>> = vec![None; d.subset_count()];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let s = Subset::parse_one_based(&record[0], '+', d)
            .map_err(|e| IoError::Malformed { line, detail: e.to_string() })?;
        let v = parse_value(&record[1], line)?;
        if values[s.mask() as usize].replace(v).is_some() {
            return Err(IoError::Malformed { line, detail: format!("subset {{{}}} listed twice", s.to_one_based(",")) });
        }
    }
    let missing: Vec<usize> = values.iter().enumerate().filter(|(_, v)| v.is_none()).map(|(m, _)| m).collect();
    if let Some(&first) = missing.first() {
        return Err(IoError::Incomplete {
            count: missing.len(),
            expected: values.len(),
            first: Subset::from_mask(first as u64, d)?.to_one_based(","),
        });
    }
    Ok(values.into_iter().map(|v| v.expect("checked complete")).collect())
}

/// Writes a masked table; values are printed in shortest round-trip form so
/// re-reading reproduces them bitwise.
pub fn write_masked_table(values: &[f64], d: Dimension) -> Result<String, IoError> {
    d.ensure_at_most(SUBSET_CAP, "masked tables")?;
    if values.len() != d.subset_count() {
        return Err(CoordError::DimensionMismatch { expected: d.subset_count(), got: values.len() }.into());
    }
    let mut out = String::from("mask,value\n");
    for s in Subset::all(d) {
        out.push_str(&format!("{},{:?}\n", s.to_one_based("+"), values[s.mask() as usize]));
    }
    Ok(out)
}

/// Reads a points CSV with header `x1..xd`.
pub fn read_points(text: &str, d: Dimension) -> Result<Vec<Point>, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let expected: Vec<String> = (1..=d.get()).map(|i| format!("x{i}")).collect();
    if headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(IoError::Malformed {
            line: 1,
            detail: format!("expected header {}, got {:?}", expected.join(","), headers),
        });
    }
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let coords = record.iter().map(|f| parse_value(f, line)).collect::<Result<Vec<_>, _>>()?;
        points.push(Point::new(coords)?);
    }
    Ok(points)
}
