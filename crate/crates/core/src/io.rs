//! CSV readers for observation data and weight files.
//!
//! Data files hold one observation per row: an integer group label
//! (1-based, contiguous) followed by the `p` coordinates. Weight files hold
//! one row per coordinate with the columns `omega_sq, alpha`. Either kind may
//! start with a header row, detected by a non-numeric first field.

use std::io::Read;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::sample::GroupedSample;
use crate::weight::WeightSpec;

fn records<R: Read>(input: R) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(rec);
    }
    Ok(out)
}

fn drop_header(recs: &mut Vec<csv::StringRecord>) {
    let is_header = recs
        .first()
        .and_then(|r| r.get(0))
        .is_some_and(|f| f.parse::<f64>().is_err());
    if is_header {
        recs.remove(0);
    }
}

fn number(raw: &str, line: usize, col: usize) -> Result<f64> {
    raw.parse()
        .map_err(|_| Error::Parse(format!("line {line}, column {col}: {raw:?} is not a number")))
}

/// Parses grouped observations from CSV text.
pub fn read_sample<R: Read>(input: R) -> Result<GroupedSample> {
    let mut recs = records(input)?;
    drop_header(&mut recs);
    if recs.is_empty() {
        return Err(Error::invalid("data file contains no observations"));
    }
    let width = recs[0].len();
    if width < 2 {
        return Err(Error::Parse(
            "each row needs a group label and at least one coordinate".into(),
        ));
    }
    let p = width - 1;
    let mut labelled: Vec<(usize, Vec<f64>)> = Vec::with_capacity(recs.len());
    for (i, rec) in recs.iter().enumerate() {
        let line = i + 1;
        if rec.len() != width {
            return Err(Error::Parse(format!(
                "line {line} has {} fields, expected {width}",
                rec.len()
            )));
        }
        let raw = &rec[0];
        let label: i64 = raw
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: group label {raw:?} is not an integer")))?;
        if label < 1 {
            return Err(Error::invalid(format!(
                "line {line}: group labels start at 1, found {label}"
            )));
        }
        let values = (1..width)
            .map(|c| number(&rec[c], line, c + 1))
            .collect::<Result<Vec<_>>>()?;
        labelled.push((label as usize, values));
    }
    let k = labelled.iter().map(|(l, _)| *l).max().unwrap_or(0);
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); k];
    for (label, values) in labelled {
        rows[label - 1].extend(values);
    }
    if let Some(missing) = rows.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!(
            "group labels must be contiguous, label {} has no rows",
            missing + 1
        )));
    }
    let groups = rows
        .into_iter()
        .map(|flat| {
            let n = flat.len() / p;
            Array2::from_shape_vec((n, p), flat).expect("row widths checked")
        })
        .collect();
    GroupedSample::new(groups)
}

pub fn read_sample_file(path: impl AsRef<Path>) -> Result<GroupedSample> {
    read_sample(std::fs::File::open(path)?)
}

/// Parses a weight file with columns `omega_sq, alpha`.
pub fn read_weights<R: Read>(input: R) -> Result<WeightSpec> {
    let mut recs = records(input)?;
    drop_header(&mut recs);
    let mut omega_sq = Vec::with_capacity(recs.len());
    let mut alpha = Vec::with_capacity(recs.len());
    for (i, rec) in recs.iter().enumerate() {
        if rec.len() != 2 {
            return Err(Error::Parse(format!(
                "weight line {} has {} fields, expected 2",
                i + 1,
                rec.len()
            )));
        }
        omega_sq.push(number(&rec[0], i + 1, 1)?);
        alpha.push(number(&rec[1], i + 1, 2)?);
    }
    WeightSpec::new(Array1::from(omega_sq), Array1::from(alpha))
}

pub fn read_weights_file(path: impl AsRef<Path>) -> Result<WeightSpec> {
    read_weights(std::fs::File::open(path)?)
}
