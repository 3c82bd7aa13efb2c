//! Synthetic landmark recordings with a known tremor amplitude.
//!
//! Each monitored landmark follows
//!
//! ```text
//! x(t) = offset + drift * t + r(t) * (A_px / 2) * sin(2 pi f t + phase) + noise
//! r(t) = min(t / ramp, 1)
//! ```
//!
//! where `A_px` is the peak-to-trough amplitude projected to pixels at the
//! recording depth. Noise is Gaussian, drawn from a ChaCha8 stream seeded
//! with `seed`, in the order landmark (ascending id), frame, then x before y.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::camera::CameraSpec;
use crate::error::{Error, Result};
use crate::landmark::{LandmarkId, LandmarkSample, LandmarkTrack, Recording, RecordingMeta};

pub use crate::camera::cm_to_pixels;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    /// Ground-truth peak-to-trough amplitude.
    pub amplitude_cm: f64,
    pub freq_hz: f64,
    pub phase_rad: f64,
    pub duration_s: f64,
    pub fps: f64,
    pub depth_cm: f64,
    pub camera: CameraSpec,
    /// Linear gross movement along x.
    pub drift_px_per_s: f64,
    /// Standard deviation of per-sample Gaussian jitter.
    pub noise_px: f64,
    /// Time over which the tremor grows linearly from rest; 0 disables.
    pub ramp_s: f64,
    pub seed: u64,
    pub landmark_ids: BTreeSet<LandmarkId>,
    /// Static x position of each landmark; unlisted landmarks sit at the frame centre.
    #[serde(with = "offset_map")]
    pub per_landmark_offset_px: BTreeMap<LandmarkId, f64>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        let offsets = [
            (2, 470.0),
            (3, 500.0),
            (4, 530.0),
            (5, 560.0),
            (6, 590.0),
            (8, 640.0),
        ]
        .into_iter()
        .map(|(id, x)| (LandmarkId::new(id).expect("valid id"), x))
        .collect();
        Self {
            amplitude_cm: 2.0,
            freq_hz: 4.0,
            phase_rad: 0.0,
            duration_s: 12.0,
            fps: 60.0,
            depth_cm: 75.0,
            camera: CameraSpec::IPHONE_XR_FRONT,
            drift_px_per_s: 0.0,
            noise_px: 0.5,
            ramp_s: 0.0,
            seed: 0,
            landmark_ids: LandmarkId::MONITORED.into(),
            per_landmark_offset_px: offsets,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("amplitude_cm", self.amplitude_cm),
            ("freq_hz", self.freq_hz),
            ("phase_rad", self.phase_rad),
            ("duration_s", self.duration_s),
            ("fps", self.fps),
            ("depth_cm", self.depth_cm),
            ("drift_px_per_s", self.drift_px_per_s),
            ("noise_px", self.noise_px),
            ("ramp_s", self.ramp_s),
        ];
        if let Some((name, v)) = reals.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite, got {v}")));
        }
        if self.amplitude_cm < 0.0 {
            return Err(Error::invalid("amplitude_cm must be >= 0"));
        }
        if self.freq_hz < 0.0 {
            return Err(Error::invalid("freq_hz must be >= 0"));
        }
        if !(self.fps > 2.0 * self.freq_hz) {
            return Err(Error::invalid(format!(
                "sampling inadequate: fps ({}) must exceed twice the tremor frequency ({} Hz)",
                self.fps, self.freq_hz
            )));
        }
        if !(self.duration_s > 0.0) {
            return Err(Error::invalid("duration_s must be > 0"));
        }
        if !(self.ramp_s >= 0.0 && self.ramp_s < self.duration_s) {
            return Err(Error::invalid(format!(
                "ramp_s must lie in [0, duration_s), got {}",
                self.ramp_s
            )));
        }
        if !(self.depth_cm > 0.0) {
            return Err(Error::invalid("depth_cm must be > 0"));
        }
        if self.noise_px < 0.0 {
            return Err(Error::invalid("noise_px must be >= 0"));
        }
        if self.landmark_ids.is_empty() {
            return Err(Error::invalid("landmark_ids must not be empty"));
        }
        if self.frame_count() == 0 {
            return Err(Error::invalid("duration_s * fps rounds to zero frames"));
        }
        self.camera.validate()
    }

    pub fn frame_count(&self) -> usize {
        (self.duration_s * self.fps).round() as usize
    }
}

/// Severity band used to label a ground-truth amplitude.
pub fn amplitude_category(amplitude_cm: f64) -> &'static str {
    match amplitude_cm {
        a if a <= 0.0 => "none",
        a if a < 1.0 => "small",
        a if a < 3.5 => "medium",
        a if a < 7.5 => "large",
        _ => "very_large",
    }
}

pub fn generate(spec: &SynthSpec) -> Result<Recording> {
    spec.validate()?;
    let amp_px = cm_to_pixels(spec.amplitude_cm, &spec.camera, spec.depth_cm)?;
    let mut meta = RecordingMeta::for_camera(spec.camera, spec.depth_cm, spec.fps);
    let centre_x = f64::from(meta.width_px) / 2.0;
    let centre_y = f64::from(meta.height_px) / 2.0;
    meta.labels.extend([
        ("source".to_string(), "synthetic".to_string()),
        ("amplitude_cm".to_string(), spec.amplitude_cm.to_string()),
        (
            "amplitude_category".to_string(),
            amplitude_category(spec.amplitude_cm).to_string(),
        ),
        ("depth_cm".to_string(), spec.depth_cm.to_string()),
        ("seed".to_string(), spec.seed.to_string()),
    ]);

    let omega = 2.0 * std::f64::consts::PI * spec.freq_hz;
    let n = spec.frame_count();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut tracks = BTreeMap::new();
    for &id in &spec.landmark_ids {
        let x0 = spec
            .per_landmark_offset_px
            .get(&id)
            .copied()
            .unwrap_or(centre_x);
        let y0 = centre_y + 20.0 * (f64::from(id.get()) - 10.0);
        let samples = (0..n)
            .map(|k| {
                let t = k as f64 / spec.fps;
                let ramp = if spec.ramp_s > 0.0 {
                    (t / spec.ramp_s).min(1.0)
                } else {
                    1.0
                };
                let nx: f64 = StandardNormal.sample(&mut rng);
                let ny: f64 = StandardNormal.sample(&mut rng);
                LandmarkSample {
                    frame_index: k as u64,
                    t,
                    landmark_id: id,
                    x: x0
                        + spec.drift_px_per_s * t
                        + ramp * 0.5 * amp_px * (omega * t + spec.phase_rad).sin()
                        + spec.noise_px * nx,
                    y: y0 + spec.noise_px * ny,
                    confidence: 1.0,
                }
            })
            .collect();
        tracks.insert(id, LandmarkTrack::new(id, samples)?);
    }
    Recording::new(meta, tracks)
}

#[derive(Debug, Clone)]
pub struct GridRecording {
    pub recording: Recording,
    pub ground_truth_cm: f64,
    pub depth_cm: f64,
    pub replicate: usize,
    pub seed: u64,
}

impl GridRecording {
    pub fn amplitude_category(&self) -> &'static str {
        amplitude_category(self.ground_truth_cm)
    }
}

/// Every amplitude x depth x replicate combination, amplitude-major, each
/// with its own seed `base.seed + index`.
pub fn generate_grid(
    base: &SynthSpec,
    amplitudes_cm: &[f64],
    depths_cm: &[f64],
    replicates: usize,
) -> Result<Vec<GridRecording>> {
    if amplitudes_cm.is_empty() || depths_cm.is_empty() || replicates == 0 {
        return Err(Error::Config(
            "grid needs at least one amplitude, one depth and one replicate".into(),
        ));
    }
    let mut out = Vec::with_capacity(amplitudes_cm.len() * depths_cm.len() * replicates);
    for &amplitude_cm in amplitudes_cm {
        for &depth_cm in depths_cm {
            for replicate in 0..replicates {
                let seed = base.seed.wrapping_add(out.len() as u64);
                let spec = SynthSpec {
                    amplitude_cm,
                    depth_cm,
                    seed,
                    ..base.clone()
                };
                let (meta, tracks) = generate(&spec)?.into_parts();
                let mut meta = meta;
                meta.labels
                    .insert("replicate".into(), replicate.to_string());
                out.push(GridRecording {
                    recording: Recording::new(meta, tracks)?,
                    ground_truth_cm: amplitude_cm,
                    depth_cm,
                    replicate,
                    seed,
                });
            }
        }
    }
    Ok(out)
}

mod offset_map {
    use std::collections::BTreeMap;

    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use crate::landmark::LandmarkId;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<LandmarkId, f64>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        map.iter()
            .map(|(id, v)| (id.to_string(), *v))
            .collect::<BTreeMap<String, f64>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<LandmarkId, f64>, D::Error> {
        BTreeMap::<String, f64>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                let id: u8 = k.parse().map_err(D::Error::custom)?;
                let id = LandmarkId::new(id).map_err(D::Error::custom)?;
                Ok((id, v))
            })
            .collect()
    }
}
