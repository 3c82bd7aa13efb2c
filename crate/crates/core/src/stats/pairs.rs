//! Pairs file: CSV with header `cv_cm,ref_cm[,label...]`, one pair per row.
//! Extra columns are labels keyed by their header name.

use std::collections::BTreeSet;

use super::agreement::MethodPair;
use crate::error::{Error, Result};

pub fn parse_pairs(input: &[u8]) -> Result<Vec<MethodPair>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| csv_err(e, 1))?
        .iter()
        .map(str::to_string)
        .collect::<Vec<_>>();
    if headers.len() < 2 || headers[0] != "cv_cm" || headers[1] != "ref_cm" {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "header must start with `cv_cm,ref_cm`, found `{}`",
                headers.join(",")
            ),
        });
    }
    let label_keys = &headers[2..];
    let mut seen = BTreeSet::new();
    if let Some(dup) = label_keys.iter().find(|k| !seen.insert(k.as_str())) {
        return Err(Error::Parse {
            line: 1,
            message: format!("duplicate column `{dup}`"),
        });
    }

    let mut pairs = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| csv_err(e, line))?;
        let num = |idx: usize, name: &str| -> Result<f64> {
            record[idx].trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("{name}: cannot parse `{}`", &record[idx]),
            })
        };
        let mut pair = MethodPair::new(num(0, "cv_cm")?, num(1, "ref_cm")?);
        for (key, value) in label_keys.iter().zip(record.iter().skip(2)) {
            pair.labels.insert(key.clone(), value.to_string());
        }
        pair.validate().map_err(|e| match e {
            Error::Validation { message, .. } => Error::invalid_at(line, message),
            other => other,
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

fn csv_err(e: csv::Error, fallback_line: usize) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Writes pairs with the given label columns (missing labels become empty cells).
pub fn serialize_pairs(pairs: &[MethodPair], label_keys: &[&str]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["cv_cm", "ref_cm"];
    header.extend_from_slice(label_keys);
    w.write_record(&header).expect("in-memory write");
    for p in pairs {
        let mut row = vec![format!("{:.6}", p.cv_cm), format!("{:.6}", p.ref_cm)];
        row.extend(
            label_keys
                .iter()
                .map(|k| p.labels.get(*k).cloned().unwrap_or_default()),
        );
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
