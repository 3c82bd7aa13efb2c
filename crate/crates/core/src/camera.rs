//! Pinhole back-projection from image pixels to centimetres in the plane of
//! the hand.
//!
//! The horizontal field of view of a portrait video is set by the part of the
//! sensor the video crop keeps. That width is recovered from the lens focal
//! length and its 35mm-equivalent (the crop factor), the sensor aspect and the
//! video aspect. By similar triangles the scene width at depth `d` is then
//! `w = v_w * d / f` and one pixel spans `w / r_h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal of a 36 x 24 mm full-frame sensor, in millimetres.
pub const FULL_FRAME_DIAGONAL_MM: f64 = 43.2666;

/// Depth-sensor RMS error at 40 cm, in centimetres.
pub const DEPTH_RMSE_40CM: f64 = 0.12;
/// Depth-sensor RMS error at 100 cm, in centimetres.
pub const DEPTH_RMSE_100CM: f64 = 0.38;

/// Intrinsics of a portrait-oriented video camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    /// Physical lens focal length.
    pub f_mm: f64,
    /// 35mm-equivalent focal length.
    pub fe_mm: f64,
    /// Sensor width / height in portrait orientation.
    pub aspect_sensor: f64,
    /// Video frame width / height in portrait orientation.
    pub aspect_video: f64,
    /// Horizontal video resolution (portrait), in pixels.
    pub res_h_px: u32,
    /// Measured effective sensor width; bypasses the crop-factor derivation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensor_width_override_mm: Option<f64>,
}

impl CameraSpec {
    /// iPhone XR front-facing camera recording 1080p portrait video.
    pub const IPHONE_XR_FRONT: CameraSpec = CameraSpec {
        f_mm: 2.87,
        fe_mm: 32.0,
        aspect_sensor: 0.75,
        aspect_video: 0.5625,
        res_h_px: 1080,
        sensor_width_override_mm: None,
    };

    pub fn validate(&self) -> Result<()> {
        let finite = [self.f_mm, self.fe_mm, self.aspect_sensor, self.aspect_video]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("camera parameters must be finite"));
        }
        if self.f_mm <= 0.0 {
            return Err(Error::invalid(format!(
                "camera.f_mm must be > 0, got {}",
                self.f_mm
            )));
        }
        if self.fe_mm < self.f_mm {
            return Err(Error::invalid(format!(
                "camera.fe_mm ({}) must be >= camera.f_mm ({})",
                self.fe_mm, self.f_mm
            )));
        }
        if !(self.aspect_video > 0.0
            && self.aspect_video <= self.aspect_sensor
            && self.aspect_sensor <= 1.0)
        {
            return Err(Error::invalid(format!(
                "camera aspects must satisfy 0 < aspect_video ({}) <= aspect_sensor ({}) <= 1",
                self.aspect_video, self.aspect_sensor
            )));
        }
        if self.res_h_px < 1 {
            return Err(Error::invalid("camera.res_h_px must be >= 1"));
        }
        if let Some(w) = self.sensor_width_override_mm {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!(
                    "camera.sensor_width_override_mm must be > 0, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn crop_factor(&self) -> f64 {
        self.fe_mm / self.f_mm
    }
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self::IPHONE_XR_FRONT
    }
}

/// Geometry of the scene plane at a given depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneScale {
    pub v_w_mm: f64,
    pub depth_cm: f64,
    pub view_width_mm: f64,
    pub mm_per_px: f64,
}

/// Width of the sensor region used by the video crop, in millimetres.
pub fn effective_sensor_width(cam: &CameraSpec) -> f64 {
    if let Some(w) = cam.sensor_width_override_mm {
        return w;
    }
    let diagonal = FULL_FRAME_DIAGONAL_MM / cam.crop_factor();
    let height = diagonal / (1.0 + cam.aspect_sensor * cam.aspect_sensor).sqrt();
    height * cam.aspect_video
}

pub fn scene_scale(cam: &CameraSpec, depth_cm: f64) -> Result<SceneScale> {
    check_depth(depth_cm)?;
    let v_w_mm = effective_sensor_width(cam);
    let view_width_mm = v_w_mm * (depth_cm * 10.0) / cam.f_mm;
    Ok(SceneScale {
        v_w_mm,
        depth_cm,
        view_width_mm,
        mm_per_px: view_width_mm / f64::from(cam.res_h_px),
    })
}

/// Converts a horizontal pixel distance to centimetres at the given depth.
pub fn pixels_to_cm(pix: f64, cam: &CameraSpec, depth_cm: f64) -> Result<f64> {
    if !(pix >= 0.0 && pix.is_finite()) {
        return Err(Error::Domain(format!(
            "pixel distance must be finite and >= 0, got {pix}"
        )));
    }
    let scale = scene_scale(cam, depth_cm)?;
    Ok(pix * scale.view_width_mm / f64::from(cam.res_h_px) / 10.0)
}

/// Inverse of [`pixels_to_cm`].
pub fn cm_to_pixels(dist_cm: f64, cam: &CameraSpec, depth_cm: f64) -> Result<f64> {
    if !dist_cm.is_finite() {
        return Err(Error::Domain(format!(
            "distance must be finite, got {dist_cm}"
        )));
    }
    let scale = scene_scale(cam, depth_cm)?;
    Ok(dist_cm * 10.0 * f64::from(cam.res_h_px) / scale.view_width_mm)
}

/// First-order amplitude error caused by an error in the measured depth.
///
/// Amplitude scales linearly with depth, so a relative depth error carries
/// over unchanged to the amplitude.
pub fn propagate_depth_error(amplitude_cm: f64, depth_cm: f64, depth_err_cm: f64) -> Result<f64> {
    check_depth(depth_cm)?;
    if !(depth_err_cm >= 0.0) {
        return Err(Error::Domain(format!(
            "depth error must be >= 0, got {depth_err_cm}"
        )));
    }
    Ok(amplitude_cm * (depth_err_cm / depth_cm))
}

fn check_depth(depth_cm: f64) -> Result<()> {
    if depth_cm > 0.0 && depth_cm.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "depth must be > 0 cm, got {depth_cm}"
        )))
    }
}
