use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::camera::CameraSpec;
use crate::error::{Error, Result};

/// Index into the 21-point hand model (0 = wrist, 4 = thumb tip, 8 = index tip, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct LandmarkId(u8);

impl LandmarkId {
    pub const COUNT: u8 = 21;

    pub const THUMB_MCP: LandmarkId = LandmarkId(2);
    pub const THUMB_IP: LandmarkId = LandmarkId(3);
    pub const THUMB_TIP: LandmarkId = LandmarkId(4);
    pub const INDEX_MCP: LandmarkId = LandmarkId(5);
    pub const INDEX_PIP: LandmarkId = LandmarkId(6);
    pub const INDEX_TIP: LandmarkId = LandmarkId(8);

    /// Base, middle and tip of the thumb and forefinger.
    pub const MONITORED: [LandmarkId; 6] = [
        Self::THUMB_MCP,
        Self::THUMB_IP,
        Self::THUMB_TIP,
        Self::INDEX_MCP,
        Self::INDEX_PIP,
        Self::INDEX_TIP,
    ];

    pub fn new(id: u8) -> Result<Self> {
        if id < Self::COUNT {
            Ok(LandmarkId(id))
        } else {
            Err(Error::invalid(format!(
                "landmark id {id} outside the 21-point hand model [0, 20]"
            )))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = LandmarkId> {
        (0..Self::COUNT).map(LandmarkId)
    }
}

impl TryFrom<u8> for LandmarkId {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        LandmarkId::new(id)
    }
}

impl From<LandmarkId> for u8 {
    fn from(id: LandmarkId) -> u8 {
        id.0
    }
}

impl fmt::Display for LandmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandmarkSample {
    pub frame_index: u64,
    /// Seconds from the start of the recording.
    pub t: f64,
    pub landmark_id: LandmarkId,
    /// Horizontal pixel position in the portrait frame.
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl LandmarkSample {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t", self.t), ("x", self.x), ("y", self.y)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.t < 0.0 {
            return Err(Error::invalid(format!("t must be >= 0, got {}", self.t)));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::invalid(format!(
                "confidence must lie in [0, 1], got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// Time series of one landmark; timestamps strictly increase.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkTrack {
    landmark_id: LandmarkId,
    samples: Vec<LandmarkSample>,
}

impl LandmarkTrack {
    pub fn new(landmark_id: LandmarkId, samples: Vec<LandmarkSample>) -> Result<Self> {
        for (k, s) in samples.iter().enumerate() {
            if s.landmark_id != landmark_id {
                return Err(Error::invalid(format!(
                    "sample {k} has landmark id {} in track {landmark_id}",
                    s.landmark_id
                )));
            }
            s.validate()?;
        }
        if let Some(k) = samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(Error::invalid(format!(
                "landmark {landmark_id}: timestamps not strictly increasing at t = {}",
                samples[k + 1].t
            )));
        }
        Ok(Self {
            landmark_id,
            samples,
        })
    }

    pub fn landmark_id(&self) -> LandmarkId {
        self.landmark_id
    }

    pub fn samples(&self) -> &[LandmarkSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Per-recording context that does not vary frame to frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    /// Camera-to-hand distance.
    pub depth_cm: f64,
    pub fps: f64,
    pub width_px: u32,
    pub height_px: u32,
    pub camera: CameraSpec,
    pub labels: BTreeMap<String, String>,
}

impl RecordingMeta {
    /// Metadata for a portrait video of the given camera: width is the camera's
    /// horizontal resolution and height follows from the video aspect.
    pub fn for_camera(camera: CameraSpec, depth_cm: f64, fps: f64) -> Self {
        let height = (f64::from(camera.res_h_px) / camera.aspect_video).round() as u32;
        Self {
            depth_cm,
            fps,
            width_px: camera.res_h_px,
            height_px: height,
            camera,
            labels: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth_cm > 0.0 && self.depth_cm.is_finite()) {
            return Err(Error::invalid(format!(
                "depth_cm must be > 0, got {}",
                self.depth_cm
            )));
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(Error::invalid(format!("fps must be > 0, got {}", self.fps)));
        }
        if self.width_px == 0 || self.height_px == 0 {
            return Err(Error::invalid("width_px and height_px must be positive"));
        }
        self.camera.validate()?;
        let aspect = f64::from(self.width_px) / f64::from(self.height_px);
        let rel = (aspect - self.camera.aspect_video).abs() / self.camera.aspect_video;
        if rel > 0.01 {
            return Err(Error::invalid(format!(
                "frame {}x{} (aspect {aspect:.4}) disagrees with camera.aspect_video {} by more than 1%",
                self.width_px, self.height_px, self.camera.aspect_video
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    meta: RecordingMeta,
    tracks: BTreeMap<LandmarkId, LandmarkTrack>,
}

impl Recording {
    pub fn new(meta: RecordingMeta, tracks: BTreeMap<LandmarkId, LandmarkTrack>) -> Result<Self> {
        meta.validate()?;
        for (id, track) in &tracks {
            if *id != track.landmark_id() {
                return Err(Error::invalid(format!(
                    "track keyed {id} holds landmark {}",
                    track.landmark_id()
                )));
            }
        }
        let max_frame = tracks
            .values()
            .flat_map(|t| t.samples())
            .map(|s| s.frame_index)
            .max();
        if let Some(max_frame) = max_frame {
            let limit = (max_frame as f64 + 1.0) / meta.fps;
            // half-microsecond slack for six-decimal timestamps
            let slack = 5e-7;
            if let Some(s) = tracks
                .values()
                .flat_map(|t| t.samples())
                .find(|s| s.t > limit + slack)
            {
                return Err(Error::invalid(format!(
                    "landmark {} frame {}: t = {} beyond recording end {limit:.6} s",
                    s.landmark_id, s.frame_index, s.t
                )));
            }
        }
        Ok(Self { meta, tracks })
    }

    pub fn meta(&self) -> &RecordingMeta {
        &self.meta
    }

    pub fn tracks(&self) -> &BTreeMap<LandmarkId, LandmarkTrack> {
        &self.tracks
    }

    pub fn track(&self, id: LandmarkId) -> Option<&LandmarkTrack> {
        self.tracks.get(&id)
    }

    pub fn into_parts(self) -> (RecordingMeta, BTreeMap<LandmarkId, LandmarkTrack>) {
        (self.meta, self.tracks)
    }
}
