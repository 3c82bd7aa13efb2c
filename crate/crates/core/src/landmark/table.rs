//! Landmark table: UTF-8, comma separated, LF line endings.
//!
//! ```text
//! frame,t,landmark_id,x,y,confidence
//! 0,0.000000,4,512.250000,880.500000,0.970000
//! ```
//!
//! Rows may appear in any order across landmarks, but within one landmark
//! the timestamps must strictly increase in file order. Frames where the
//! tracker lost the hand are simply absent.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::types::{LandmarkId, LandmarkSample, LandmarkTrack, Recording, RecordingMeta};
use crate::error::{Error, Result};

pub const HEADER: &str = "frame,t,landmark_id,x,y,confidence";

/// Parses a landmark table and attaches it to `meta`.
pub fn parse_landmark_file(input: &[u8], meta: RecordingMeta) -> Result<Recording> {
    let tracks = parse_tracks(input)?;
    Recording::new(meta, tracks)
}

/// Parses a landmark table into per-landmark tracks, without recording-level checks.
pub fn parse_tracks(input: &[u8]) -> Result<BTreeMap<LandmarkId, LandmarkTrack>> {
    let text = std::str::from_utf8(input).map_err(|e| Error::Parse {
        line: 1 + input[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        message: "input is not valid UTF-8".into(),
    })?;

    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{HEADER}`, found `{h}`"),
            })
        }
        None => unreachable!("split yields at least one item"),
    }

    let mut grouped: BTreeMap<LandmarkId, Vec<LandmarkSample>> = BTreeMap::new();
    let body: Vec<(usize, &str)> = lines.collect();
    let n_body = body.len();
    for (k, (line_no, line)) in body.into_iter().enumerate() {
        if line.is_empty() {
            if k + 1 == n_body {
                break; // trailing newline
            }
            return Err(Error::Parse {
                line: line_no,
                message: "empty line".into(),
            });
        }
        let sample = parse_row(line_no, line)?;
        let samples = grouped.entry(sample.landmark_id).or_default();
        if let Some(prev) = samples.last() {
            if sample.t <= prev.t {
                return Err(Error::invalid_at(
                    line_no,
                    format!(
                        "landmark {}: timestamp {} does not increase past {}",
                        sample.landmark_id, sample.t, prev.t
                    ),
                ));
            }
        }
        samples.push(sample);
    }

    grouped
        .into_iter()
        .map(|(id, samples)| LandmarkTrack::new(id, samples).map(|t| (id, t)))
        .collect()
}

fn parse_row(line_no: usize, line: &str) -> Result<LandmarkSample> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 6 {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected 6 fields, found {}", fields.len()),
        });
    }
    let parse_err = |name: &str, raw: &str| Error::Parse {
        line: line_no,
        message: format!("{name}: cannot parse `{raw}`"),
    };
    let real = |idx: usize, name: &str| -> Result<f64> {
        let v: f64 = fields[idx]
            .parse()
            .map_err(|_| parse_err(name, fields[idx]))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::invalid_at(
                line_no,
                format!("{name}={} is not finite", fields[idx]),
            ))
        }
    };

    let frame_index: u64 = fields[0]
        .parse()
        .map_err(|_| parse_err("frame", fields[0]))?;
    let t = real(1, "t")?;
    let raw_id: u8 = fields[2]
        .parse()
        .map_err(|_| parse_err("landmark_id", fields[2]))?;
    let landmark_id = LandmarkId::new(raw_id).map_err(|_| {
        Error::invalid_at(
            line_no,
            format!("unknown landmark_id {raw_id} (expected 0..=20)"),
        )
    })?;
    let x = real(3, "x")?;
    let y = real(4, "y")?;
    let confidence = real(5, "confidence")?;

    let sample = LandmarkSample {
        frame_index,
        t,
        landmark_id,
        x,
        y,
        confidence,
    };
    sample.validate().map_err(|e| match e {
        Error::Validation { message, .. } => Error::invalid_at(line_no, message),
        other => other,
    })?;
    Ok(sample)
}

/// Canonical landmark table: rows sorted by (frame, landmark id), reals
/// written with six digits after the decimal point.
pub fn serialize_landmark_file(rec: &Recording) -> Vec<u8> {
    let mut rows: Vec<&LandmarkSample> = rec.tracks().values().flat_map(|t| t.samples()).collect();
    rows.sort_by_key(|s| (s.frame_index, s.landmark_id));

    let mut out = String::with_capacity(HEADER.len() + 1 + rows.len() * 48);
    out.push_str(HEADER);
    out.push('\n');
    for s in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{},{:.6},{:.6},{:.6}",
            s.frame_index, s.t, s.landmark_id, s.x, s.y, s.confidence
        );
    }
    out.into_bytes()
}
