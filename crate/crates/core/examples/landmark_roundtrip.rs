//! Writes a recording to the landmark table and metadata formats, reads it
//! back, and shows what malformed input looks like.
//!
//!     cargo run --example landmark_roundtrip

use tremor_core::landmark::{parse_landmark_file, read_recording, write_recording, HEADER};
use tremor_core::synth::{generate, SynthSpec};
use tremor_core::RecordingMeta;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SynthSpec {
        duration_s: 1.0,
        ..SynthSpec::default()
    };
    let rec = generate(&spec)?;

    let dir = tempfile::tempdir()?;
    let (csv, meta) = (
        dir.path().join("hand.csv"),
        dir.path().join("hand.meta.toml"),
    );
    write_recording(&rec, &csv, &meta)?;

    println!("{}", std::fs::read_to_string(&meta)?);
    for line in std::fs::read_to_string(&csv)?.lines().take(4) {
        println!("{line}");
    }

    let back = read_recording(&csv, &meta, &spec.camera)?;
    let worst = rec
        .tracks()
        .values()
        .zip(back.tracks().values())
        .flat_map(|(a, b)| a.samples().iter().zip(b.samples()))
        .map(|(a, b)| (a.x - b.x).abs().max((a.y - b.y).abs()))
        .fold(0.0, f64::max);
    println!(
        "\n{} tracks read back, worst coordinate error {worst:.2e} px",
        back.tracks().len()
    );

    let meta = RecordingMeta::for_camera(spec.camera, 75.0, 60.0);
    for bad in [
        format!("{HEADER}\n0,0.0,4,1.0,2.0,1.0\n1,0.016,4,NaN,2.0,1.0\n"),
        format!("{HEADER}\n0,0.0,4,1.0,2.0\n"),
        format!("{HEADER}\n0,0.0,21,1.0,2.0,1.0\n"),
        "frame,time,id,x,y,c\n".to_string(),
    ] {
        let err = parse_landmark_file(bad.as_bytes(), meta.clone()).unwrap_err();
        println!("rejected (exit {}): {err}", err.exit_code());
    }
    Ok(())
}
