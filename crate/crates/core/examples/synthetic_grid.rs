//! End-to-end validation: 60 synthetic recordings (5 amplitudes x 3 depths x
//! 4 replicates) measured in parallel and scored with Bland-Altman.
//!
//!     cargo run --release --example synthetic_grid

use rayon::prelude::*;
use tremor_core::stats::{bland_altman, subgroup_compare, GroupTest, MethodPair, TTestVariant};
use tremor_core::synth::{generate_grid, SynthSpec};
use tremor_core::{measure_tremor, AmplitudeConfig};

fn main() -> tremor_core::Result<()> {
    let start = std::time::Instant::now();
    let grid = generate_grid(
        &SynthSpec::default(),
        &[0.0, 0.5, 2.0, 5.0, 10.0],
        &[50.0, 75.0, 100.0],
        4,
    )?;
    let cfg = AmplitudeConfig::default();
    let pairs = grid
        .par_iter()
        .map(|g| {
            let m = measure_tremor(&g.recording, &cfg)?;
            Ok(MethodPair::new(m.amplitude_cm, g.ground_truth_cm)
                .with_label("depth_cm", g.depth_cm.to_string())
                .with_label("amplitude_category", g.amplitude_category()))
        })
        .collect::<tremor_core::Result<Vec<_>>>()?;

    let r = bland_altman(&pairs)?;
    println!(
        "n={} bias={:+.4} cm  LoA [{:+.4}, {:+.4}] cm  ({:.2?})",
        r.n,
        r.bias_cm,
        r.loa_low_cm,
        r.loa_high_cm,
        start.elapsed()
    );

    for key in ["depth_cm", "amplitude_category"] {
        let cmp = subgroup_compare(&pairs, key, TTestVariant::Welch)?;
        for (value, g) in &cmp.groups {
            println!(
                "  {key}={value:<8} bias {:+.4}  half-width {:.4}",
                g.bias_cm,
                g.loa_half_width()
            );
        }
        if let GroupTest::Unsupported { reason } = &cmp.test {
            println!("  ({reason})");
        }
    }
    Ok(())
}
