//! Tremor amplitude in pixels from a landmark trajectory.
//!
//! The trajectory along one image axis is differentiated with a forward
//! difference; sign changes of that gradient mark peaks and troughs. Each
//! pair of adjacent extrema gives one instantaneous peak-to-trough amplitude,
//! and the median of those is the landmark's amplitude. Slow gross movement
//! of the arm produces no sign changes, so it contributes nothing, and the
//! median discounts the small swings of a tremor that is still ramping up.
//! Landmarks are fused by taking the median of their amplitudes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::camera::pixels_to_cm;
use crate::error::{Error, Result};
use crate::landmark::{select_monitored_tracks, LandmarkId, LandmarkTrack, Recording};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    X,
    Y,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            other => Err(Error::Config(format!(
                "axis must be `x` or `y`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplitudeConfig {
    pub axis: Axis,
    /// Samples below this tracker confidence are dropped.
    pub min_confidence: f64,
    /// Centered moving-average width in samples; 1 disables smoothing.
    pub smooth_window: usize,
    pub landmark_ids: BTreeSet<LandmarkId>,
    /// Dropouts longer than this split the trajectory instead of being interpolated.
    pub max_gap_s: f64,
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        Self {
            axis: Axis::X,
            min_confidence: 0.5,
            smooth_window: 1,
            landmark_ids: LandmarkId::MONITORED.into(),
            max_gap_s: 0.5,
        }
    }
}

impl AmplitudeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(Error::Config(format!(
                "min_confidence must lie in [0, 1], got {}",
                self.min_confidence
            )));
        }
        if self.smooth_window == 0 || self.smooth_window.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "smooth_window must be an odd integer >= 1, got {}",
                self.smooth_window
            )));
        }
        if self.landmark_ids.is_empty() {
            return Err(Error::Config("landmark_ids must not be empty".into()));
        }
        if !(self.max_gap_s > 0.0) {
            return Err(Error::Config(format!(
                "max_gap_s must be > 0, got {}",
                self.max_gap_s
            )));
        }
        Ok(())
    }
}

/// A contiguous stretch of one coordinate over time.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
}

impl Waveform {
    pub fn new(t: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if t.len() != x.len() || t.is_empty() {
            return Err(Error::invalid(format!(
                "waveform needs matching non-empty t and x (got {} and {})",
                t.len(),
                x.len()
            )));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("waveform timestamps must strictly increase"));
        }
        if t.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(Error::invalid("waveform values must be finite"));
        }
        Ok(Self { t, x })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Alternating peaks and troughs of a waveform.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtremaSeries {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl ExtremaSeries {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Turns a track into one or more waveforms along `config.axis`.
///
/// Low-confidence samples are dropped and the frames they (or the tracker)
/// left empty are filled by linear interpolation, except where consecutive
/// retained samples are more than `max_gap_s` apart: there the trajectory is
/// split. Each piece is then smoothed independently.
pub fn preprocess(track: &LandmarkTrack, config: &AmplitudeConfig) -> Result<Vec<Waveform>> {
    let kept: Vec<(u64, f64, f64)> = track
        .samples()
        .iter()
        .filter(|s| s.confidence >= config.min_confidence)
        .map(|s| {
            let v = match config.axis {
                Axis::X => s.x,
                Axis::Y => s.y,
            };
            (s.frame_index, s.t, v)
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyWaveform {
            landmark: track.landmark_id().get(),
        });
    }

    let mut segments = Vec::new();
    let mut t = vec![kept[0].1];
    let mut x = vec![kept[0].2];
    for pair in kept.windows(2) {
        let (f0, t0, x0) = pair[0];
        let (f1, t1, x1) = pair[1];
        if t1 - t0 > config.max_gap_s {
            segments.push((std::mem::take(&mut t), std::mem::take(&mut x)));
        } else if f1 > f0 + 1 {
            let steps = (f1 - f0) as f64;
            for k in 1..(f1 - f0) {
                let a = k as f64 / steps;
                t.push(t0 + a * (t1 - t0));
                x.push(x0 + a * (x1 - x0));
            }
        }
        t.push(t1);
        x.push(x1);
    }
    segments.push((t, x));

    segments
        .into_iter()
        .map(|(t, x)| Waveform::new(t, moving_average(&x, config.smooth_window)))
        .collect()
}

/// Centered moving average; the window shrinks at the edges.
fn moving_average(x: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return x.to_vec();
    }
    let half = window / 2;
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(x.len());
            x[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Peaks and troughs located at sign changes of the forward difference.
///
/// The extremum is placed on the first sample after the last step in the old
/// direction, so a flat top reports its leading edge. Flat runs do not break
/// a direction; leading flat samples and monotone ends yield no extremum.
pub fn find_extrema(x: &[f64]) -> Result<ExtremaSeries> {
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.len(),
        });
    }
    let mut out = ExtremaSeries::default();
    // (index, sign) of the last nonzero step
    let mut last: Option<(usize, bool)> = None;
    for i in 0..x.len() - 1 {
        let g = x[i + 1] - x[i];
        if g == 0.0 {
            continue;
        }
        let rising = g > 0.0;
        if let Some((j, was_rising)) = last {
            if was_rising != rising {
                out.indices.push(j + 1);
                out.values.push(x[j + 1]);
            }
        }
        last = Some((i, rising));
    }
    Ok(out)
}

/// Absolute differences between adjacent extrema.
pub fn instantaneous_amplitudes(e: &ExtremaSeries) -> Vec<f64> {
    e.values.windows(2).map(|w| (w[1] - w[0]).abs()).collect()
}

/// Median, with the mean of the two central values for even lengths and
/// zero for an empty input (no oscillation means no tremor).
pub fn median_amplitude(a: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let mut v = a.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkAmplitude {
    pub amplitude_px: f64,
    pub n_extrema: usize,
    pub n_pairs: usize,
    /// Pieces the trajectory was split into by long dropouts.
    pub n_segments: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TremorMeasurement {
    pub amplitude_px: f64,
    pub amplitude_cm: f64,
    pub axis: Axis,
    pub per_landmark: BTreeMap<LandmarkId, LandmarkAmplitude>,
    /// Landmarks that were present but could not be measured.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub failed: BTreeMap<LandmarkId, String>,
    /// Requested landmarks absent from the recording.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<LandmarkId>,
    pub config: AmplitudeConfig,
}

/// Amplitude of a single landmark track.
pub fn landmark_amplitude(
    track: &LandmarkTrack,
    config: &AmplitudeConfig,
) -> Result<LandmarkAmplitude> {
    let segments = preprocess(track, config)?;
    let mut amplitudes = Vec::new();
    let mut n_extrema = 0;
    let mut usable = 0;
    for seg in segments.iter().filter(|s| s.len() >= 2) {
        let extrema = find_extrema(&seg.x)?;
        n_extrema += extrema.len();
        amplitudes.extend(instantaneous_amplitudes(&extrema));
        usable += 1;
    }
    if usable == 0 {
        let longest = segments.iter().map(Waveform::len).max().unwrap_or(0);
        return Err(Error::InsufficientData {
            needed: 2,
            got: longest,
        });
    }
    Ok(LandmarkAmplitude {
        amplitude_px: median_amplitude(&amplitudes),
        n_extrema,
        n_pairs: amplitudes.len(),
        n_segments: segments.len(),
    })
}

/// Measures the recording's tremor amplitude over the configured landmarks.
pub fn measure_tremor(rec: &Recording, config: &AmplitudeConfig) -> Result<TremorMeasurement> {
    config.validate()?;
    let selection = select_monitored_tracks(rec, &config.landmark_ids)?;

    let mut per_landmark = BTreeMap::new();
    let mut failed = BTreeMap::new();
    for track in &selection.tracks {
        match landmark_amplitude(track, config) {
            Ok(a) => {
                per_landmark.insert(track.landmark_id(), a);
            }
            Err(e) => {
                failed.insert(track.landmark_id(), e.to_string());
            }
        }
    }
    if per_landmark.is_empty() {
        let reasons: Vec<String> = failed.iter().map(|(id, e)| format!("{id}: {e}")).collect();
        return Err(Error::Measurement(format!(
            "no landmark could be measured ({})",
            reasons.join("; ")
        )));
    }

    let amplitudes: Vec<f64> = per_landmark.values().map(|a| a.amplitude_px).collect();
    let amplitude_px = median_amplitude(&amplitudes);
    let meta = rec.meta();
    let amplitude_cm = pixels_to_cm(amplitude_px, &meta.camera, meta.depth_cm)?;
    Ok(TremorMeasurement {
        amplitude_px,
        amplitude_cm,
        axis: config.axis,
        per_landmark,
        failed,
        missing: selection.missing,
        config: config.clone(),
    })
}
