//! Robustness of the amplitude estimate: slow hand drift, a frequency ramp-up,
//! and tracking dropouts.
//!
//!     cargo run --example drift_and_dropouts

use std::collections::BTreeMap;

use tremor_core::landmark::LandmarkTrack;
use tremor_core::synth::{generate, SynthSpec};
use tremor_core::{measure_tremor, AmplitudeConfig, Recording, Result};

fn measured(spec: &SynthSpec) -> Result<f64> {
    Ok(measure_tremor(&generate(spec)?, &AmplitudeConfig::default())?.amplitude_cm)
}

fn main() -> Result<()> {
    let base = SynthSpec {
        amplitude_cm: 5.0,
        depth_cm: 50.0,
        ..SynthSpec::default()
    };
    println!("clean:            {:.3} cm", measured(&base)?);

    for drift in [5.0, 20.0] {
        let spec = SynthSpec {
            drift_px_per_s: drift,
            ..base.clone()
        };
        println!("drift {drift:>4} px/s:  {:.3} cm", measured(&spec)?);
    }

    let ramp = SynthSpec {
        ramp_s: 2.0,
        ..base.clone()
    };
    println!("2 s ramp-up:      {:.3} cm", measured(&ramp)?);

    // zero the confidence of every landmark for 0.8 s mid-recording
    let (meta, tracks) = generate(&base)?.into_parts();
    let tracks = tracks
        .into_iter()
        .map(|(id, track)| {
            let mut samples = track.samples().to_vec();
            for s in samples.iter_mut().filter(|s| (5.0..5.8).contains(&s.t)) {
                s.confidence = 0.0;
            }
            Ok((id, LandmarkTrack::new(id, samples)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let m = measure_tremor(&Recording::new(meta, tracks)?, &AmplitudeConfig::default())?;
    let segments = m
        .per_landmark
        .values()
        .map(|a| a.n_segments)
        .max()
        .unwrap_or(0);
    println!(
        "0.8 s dropout:    {:.3} cm ({segments} segments)",
        m.amplitude_cm
    );
    Ok(())
}
