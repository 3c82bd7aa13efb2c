//! Renders a Bland-Altman plot for a synthetic validation set to an SVG file.
//!
//!     cargo run --example bland_altman_plot [out.svg]

use tremor_core::stats::{bland_altman, bland_altman_svg, MethodPair};
use tremor_core::synth::{generate, SynthSpec};
use tremor_core::{measure_tremor, AmplitudeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "bland_altman.svg".into());
    let cfg = AmplitudeConfig::default();

    let mut pairs = Vec::new();
    for (seed, amplitude_cm) in [0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0].into_iter().enumerate() {
        let spec = SynthSpec {
            amplitude_cm,
            seed: seed as u64,
            duration_s: 6.0,
            ..SynthSpec::default()
        };
        let m = measure_tremor(&generate(&spec)?, &cfg)?;
        pairs.push(MethodPair::new(m.amplitude_cm, amplitude_cm));
    }

    let r = bland_altman(&pairs)?;
    std::fs::write(&out, bland_altman_svg(&pairs, &r)?)?;
    println!("wrote {out} (bias {:+.4} cm, n={})", r.bias_cm, r.n);
    Ok(())
}
