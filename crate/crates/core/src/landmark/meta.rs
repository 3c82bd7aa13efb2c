//! Recording metadata file, a flat TOML document:
//!
//! ```toml
//! depth_cm = 75.0
//! fps = 60.0
//! width_px = 1080
//! height_px = 1920
//!
//! [camera]            # optional; falls back to the caller's default camera
//! f_mm = 2.87
//! fe_mm = 32.0
//! aspect_sensor = 0.75
//! aspect_video = 0.5625
//! res_h_px = 1080
//! # sensor_width_override_mm = 1.75
//!
//! [labels]            # free-form
//! subject = "A"
//! fitzpatrick = "II"
//! ```
//!
//! Dotted keys (`camera.f_mm = 2.87`) are equivalent to the table form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::types::RecordingMeta;
use crate::camera::CameraSpec;
use crate::error::{Error, Result};

/// The bundled camera description (iPhone XR front camera).
pub const DEFAULT_CAMERA_TOML: &str = include_str!("../../data/iphone_xr_front.toml");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaDoc {
    depth_cm: f64,
    fps: f64,
    width_px: u32,
    height_px: u32,
    camera: Option<CameraSpec>,
    #[serde(default)]
    labels: BTreeMap<String, toml::Value>,
}

#[derive(Serialize)]
struct MetaDocOut<'a> {
    depth_cm: f64,
    fps: f64,
    width_px: u32,
    height_px: u32,
    camera: &'a CameraSpec,
    labels: &'a BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct CameraDoc {
    camera: CameraSpec,
}

fn toml_err_in(text: &str, e: toml::de::Error) -> Error {
    // line 0 when the error has no source location
    let line = e.span().map_or(0, |span| {
        1 + text[..span.start.min(text.len())].matches('\n').count()
    });
    Error::Parse {
        line,
        message: e.message().to_string(),
    }
}

/// Parses a metadata document. `default_camera` is used when the document
/// has no `[camera]` table.
pub fn parse_meta(text: &str, default_camera: &CameraSpec) -> Result<RecordingMeta> {
    let doc: MetaDoc = toml::from_str(text).map_err(|e| toml_err_in(text, e))?;
    let labels = doc
        .labels
        .into_iter()
        .map(|(k, v)| {
            let s = match v {
                toml::Value::String(s) => s,
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Boolean(b) => b.to_string(),
                other => {
                    return Err(Error::invalid(format!(
                        "labels.{k} must be a scalar, found {}",
                        other.type_str()
                    )))
                }
            };
            Ok((k, s))
        })
        .collect::<Result<_>>()?;
    let meta = RecordingMeta {
        depth_cm: doc.depth_cm,
        fps: doc.fps,
        width_px: doc.width_px,
        height_px: doc.height_px,
        camera: doc.camera.unwrap_or(*default_camera),
        labels,
    };
    meta.validate()?;
    Ok(meta)
}

pub fn serialize_meta(meta: &RecordingMeta) -> String {
    let doc = MetaDocOut {
        depth_cm: meta.depth_cm,
        fps: meta.fps,
        width_px: meta.width_px,
        height_px: meta.height_px,
        camera: &meta.camera,
        labels: &meta.labels,
    };
    toml::to_string(&doc).expect("metadata is always representable as TOML")
}

/// Reads the `[camera]` table of a camera file (or of a full metadata file).
pub fn parse_camera(text: &str) -> Result<CameraSpec> {
    let doc: CameraDoc = toml::from_str(text).map_err(|e| toml_err_in(text, e))?;
    doc.camera.validate()?;
    Ok(doc.camera)
}

pub fn default_camera() -> CameraSpec {
    parse_camera(DEFAULT_CAMERA_TOML).expect("bundled camera file is valid")
}
