//! Hand-tremor amplitude from smartphone-video landmark tracks.
//!
//! The pipeline takes per-frame pixel positions of hand landmarks
//! ([`landmark`]), reduces each trajectory to a peak-to-trough amplitude in
//! pixels ([`amplitude`]), and converts that to centimetres using the camera
//! intrinsics and the camera-to-hand depth ([`camera`]). [`synth`] produces
//! recordings with a known amplitude, and [`stats`] scores a set of
//! measurements against a reference with Bland-Altman analysis.
//!
//! Runnable walkthroughs of each part live in `examples/`:
//!
//! ```bash
//! cargo run --example measure_synthetic
//! ```

// negated float comparisons are how the validators reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod camera;
pub mod cli;
pub mod error;
pub mod landmark;
pub mod stats;
pub mod synth;

pub use amplitude::{measure_tremor, AmplitudeConfig, Axis, TremorMeasurement};
pub use camera::{pixels_to_cm, scene_scale, CameraSpec, SceneScale};
pub use error::{Error, Result};
pub use landmark::{LandmarkId, Recording, RecordingMeta};
