//! Acceptance checks. Each test prints one `PASS name: detail` or
//! `FAIL name: detail` line to stderr (uncaptured) and asserts the verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tremor_core::amplitude::median_amplitude;
use tremor_core::camera::{cm_to_pixels, propagate_depth_error};
use tremor_core::landmark::{
    default_camera, parse_landmark_file, parse_meta, serialize_landmark_file, serialize_meta,
    LandmarkSample, LandmarkTrack,
};
use tremor_core::stats::{bland_altman, welch_t_test, MethodPair};
use tremor_core::synth::{generate, generate_grid, SynthSpec};
use tremor_core::{
    measure_tremor, pixels_to_cm, AmplitudeConfig, LandmarkId, Recording, RecordingMeta,
};

fn verdict(name: &str, pass: bool, detail: impl std::fmt::Display) {
    let line = format!("{} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "{name}: {detail}");
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn tremor(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tremor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn grid_base() -> SynthSpec {
    SynthSpec {
        freq_hz: 4.0,
        fps: 60.0,
        duration_s: 12.0,
        noise_px: 0.5,
        drift_px_per_s: 5.0,
        ramp_s: 1.0,
        ..SynthSpec::default()
    }
}

const GRID_AMPLITUDES: [f64; 5] = [0.0, 0.5, 2.0, 5.0, 10.0];
const GRID_DEPTHS: [f64; 3] = [50.0, 75.0, 100.0];

#[test]
fn synthetic_grid_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid");
    let pairs = dir.path().join("pairs.csv");
    let svg = dir.path().join("ba.svg");
    let start = Instant::now();

    let synth = tremor(&[
        "synth",
        "--grid",
        "--out",
        p(&grid),
        "--amplitudes",
        "0,0.5,2,5,10",
        "--depths",
        "50,75,100",
        "--replicates",
        "4",
        "--freq",
        "4",
        "--fps",
        "60",
        "--duration",
        "12",
        "--noise",
        "0.5",
        "--drift",
        "5",
        "--ramp",
        "1",
    ]);
    assert!(
        synth.status.success(),
        "{}",
        String::from_utf8_lossy(&synth.stderr)
    );
    let analyze = tremor(&[
        "analyze",
        "--manifest",
        p(&grid.join("manifest.csv")),
        "--pairs-out",
        p(&pairs),
    ]);
    assert!(
        analyze.status.success(),
        "{}",
        String::from_utf8_lossy(&analyze.stderr)
    );
    let agree = tremor(&["agree", "--pairs", p(&pairs), "--svg", p(&svg)]);
    assert!(
        agree.status.success(),
        "{}",
        String::from_utf8_lossy(&agree.stderr)
    );
    let elapsed = start.elapsed();

    let text = String::from_utf8(agree.stdout).unwrap();
    let field = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .map(|v| v.trim().parse().unwrap())
            .unwrap_or_else(|| panic!("{key} missing from:\n{text}"))
    };
    let (n, bias, low, high) = (
        field("n "),
        field("bias_cm "),
        field("loa_low_cm "),
        field("loa_high_cm "),
    );
    let four_decimals = text
        .lines()
        .filter(|l| l.contains("_cm"))
        .all(|l| l.rsplit('.').next().is_some_and(|d| d.len() == 4));
    let half_width = (high - low) / 2.0;
    let svg_points = std::fs::read_to_string(&svg)
        .unwrap()
        .matches("<circle")
        .count();

    let pass = n == 60.0
        && bias.abs() <= 0.05
        && half_width <= 0.25
        && elapsed <= Duration::from_secs(10)
        && four_decimals
        && svg_points == 60;
    verdict(
        "synthetic_grid_agreement",
        pass,
        format!(
            "n={n} bias={bias:+.4} cm (|.|<=0.05), LoA [{low:+.4}, {high:+.4}] half-width {half_width:.4} cm (<=0.25), {:.2} s (<=10)",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn noise_free_recovery() {
    let spec = SynthSpec {
        amplitude_cm: 5.0,
        depth_cm: 75.0,
        noise_px: 0.0,
        drift_px_per_s: 0.0,
        ramp_s: 0.0,
        ..SynthSpec::default()
    };
    let m = measure_tremor(&generate(&spec).unwrap(), &AmplitudeConfig::default()).unwrap();
    let err = rel_err(m.amplitude_cm, 5.0);
    verdict(
        "noise_free_recovery",
        err <= 0.005,
        format!(
            "5 cm at 75 cm, {} Hz at {} fps: recovered {:.4} cm, error {:.3}% (limit 0.5%)",
            spec.freq_hz,
            spec.fps,
            m.amplitude_cm,
            100.0 * err
        ),
    );
}

#[test]
fn drift_rejection() {
    let worst = (0..10)
        .map(|seed| {
            let spec = SynthSpec {
                amplitude_cm: 0.0,
                drift_px_per_s: 20.0,
                noise_px: 0.5,
                depth_cm: 100.0,
                seed,
                ..SynthSpec::default()
            };
            measure_tremor(&generate(&spec).unwrap(), &AmplitudeConfig::default())
                .unwrap()
                .amplitude_cm
        })
        .fold(0.0, f64::max);
    verdict(
        "drift_rejection",
        worst < 0.1,
        format!("20 px/s drift, 0.5 px noise, 100 cm, 10 seeds: worst {worst:.4} cm (<0.1)"),
    );
}

#[test]
fn depth_error_propagation() {
    let relative = propagate_depth_error(1.0, 100.0, 0.38).unwrap();
    let five = propagate_depth_error(5.0, 100.0, 0.38).unwrap();
    let pass = (relative - 0.0038).abs() <= 1e-12 && (five - 0.019).abs() <= 1e-12;
    verdict(
        "depth_error_propagation",
        pass,
        format!(
            "0.38 cm at 100 cm: {:.4}% relative, 5 cm -> +/-{five} cm",
            100.0 * relative
        ),
    );
}

#[test]
fn camera_linearity_and_inverse() {
    let cam = default_camera();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = rng.random_range(0.0..2000.0);
        let b = rng.random_range(0.0..2000.0);
        let k = rng.random_range(0.01..50.0);
        let d = rng.random_range(10.0..300.0);
        let to_cm = |px: f64, depth: f64| pixels_to_cm(px, &cam, depth).unwrap();
        let cm = to_cm(a, d);
        worst = worst
            .max(rel_err(to_cm(a + b, d), cm + to_cm(b, d)))
            .max(rel_err(to_cm(k * a, d), k * cm))
            .max(rel_err(to_cm(a, k * d), k * cm))
            .max(rel_err(cm_to_pixels(cm, &cam, d).unwrap(), a));
    }
    verdict(
        "camera_linearity_and_inverse",
        worst <= 1e-9,
        format!("1000 samples, worst relative error {worst:.2e} (<=1e-9)"),
    );
}

#[test]
fn statistics_suite() {
    let mut failures = Vec::new();

    let diffs = [1.0, -1.0, 0.0, 0.0];
    let pairs: Vec<_> = diffs
        .iter()
        .map(|d| MethodPair::new(5.0 + d, 5.0))
        .collect();
    let ba = bland_altman(&pairs).unwrap();
    if ba.bias_cm.abs() > 1e-4
        || (ba.sd_cm - 0.8165).abs() > 1e-4
        || (ba.loa_high_cm - 1.6003).abs() > 1e-4
        || (ba.loa_low_cm + 1.6003).abs() > 1e-4
    {
        failures.push(format!("bland-altman {ba:?}"));
    }

    let w = welch_t_test(&[1.0, 2.0, 3.0, 4.0], &[2.0, 3.0, 4.0, 5.0]).unwrap();
    if (w.t_stat + 1.0954).abs() > 1e-4
        || (w.df - 6.0).abs() > 1e-9
        || (w.p_two_sided - 0.315).abs() > 1e-3
    {
        failures.push(format!("welch {w:?}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let n = rng.random_range(2..40);
        let pairs: Vec<_> = (0..n)
            .map(|_| MethodPair::new(rng.random_range(0.0..12.0), rng.random_range(0.0..12.0)))
            .collect();
        let r = bland_altman(&pairs).unwrap();

        let swapped: Vec<_> = pairs
            .iter()
            .map(|p| MethodPair::new(p.ref_cm, p.cv_cm))
            .collect();
        let s = bland_altman(&swapped).unwrap();
        if (s.bias_cm + r.bias_cm).abs() > 1e-12
            || (s.loa_low_cm + r.loa_high_cm).abs() > 1e-12
            || (s.loa_high_cm + r.loa_low_cm).abs() > 1e-12
        {
            failures.push(format!("antisymmetry case {case}"));
        }

        let c = rng.random_range(0.0..5.0);
        let shifted: Vec<_> = pairs
            .iter()
            .map(|p| MethodPair::new(p.cv_cm + c, p.ref_cm))
            .collect();
        let h = bland_altman(&shifted).unwrap();
        if (h.bias_cm - r.bias_cm - c).abs() > 1e-9
            || (h.loa_low_cm - r.loa_low_cm - c).abs() > 1e-9
            || (h.loa_high_cm - r.loa_high_cm - c).abs() > 1e-9
            || (h.sd_cm - r.sd_cm).abs() > 1e-9
        {
            failures.push(format!("shift invariance case {case}"));
        }

        let a: Vec<f64> = (0..rng.random_range(2..20))
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let b: Vec<f64> = (0..rng.random_range(2..20))
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let (ab, ba) = (welch_t_test(&a, &b).unwrap(), welch_t_test(&b, &a).unwrap());
        if ab.t_stat != -ba.t_stat || (ab.p_two_sided - ba.p_two_sided).abs() > 1e-12 {
            failures.push(format!("welch swap case {case}"));
        }
    }

    verdict(
        "statistics_suite",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "sd {:.4}, LoA +/-{:.4}; welch t {:.4} df {} p {:.4}; 200 randomized cases",
                ba.sd_cm, ba.loa_high_cm, w.t_stat, w.df, w.p_two_sided
            )
        } else {
            failures.join("; ")
        },
    );
}

/// Single-landmark recording whose x track is `x`.
fn recording_from(x: &[f64]) -> Recording {
    let id = LandmarkId::new(8).unwrap();
    let samples = x
        .iter()
        .enumerate()
        .map(|(k, &x)| LandmarkSample {
            frame_index: k as u64,
            t: k as f64 / 60.0,
            landmark_id: id,
            x,
            y: 0.0,
            confidence: 1.0,
        })
        .collect();
    let tracks = BTreeMap::from([(id, LandmarkTrack::new(id, samples).unwrap())]);
    Recording::new(
        RecordingMeta::for_camera(default_camera(), 75.0, 60.0),
        tracks,
    )
    .unwrap()
}

fn amplitude_px(x: &[f64]) -> f64 {
    measure_tremor(&recording_from(x), &AmplitudeConfig::default())
        .unwrap()
        .amplitude_px
}

/// Random waveform on a 1/1024 px grid so shifts and power-of-two scalings are exact.
fn dyadic_waveform(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = rng.random_range(2..400);
    let (amp, freq, phase) = (
        rng.random_range(0.0..200.0),
        rng.random_range(0.5..12.0),
        rng.random_range(0.0..6.3),
    );
    let drift = rng.random_range(-30.0..30.0);
    let noise = rng.random_range(0.0..3.0);
    (0..n)
        .map(|k| {
            let t = k as f64 / 60.0;
            let v = 500.0
                + drift * t
                + amp * (std::f64::consts::TAU * freq * t + phase).sin()
                + noise * rng.random_range(-1.0..1.0);
            (v * 1024.0).round() / 1024.0
        })
        .collect()
}

#[test]
fn amplitude_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = Vec::new();
    for case in 0..500 {
        let x = dyadic_waveform(&mut rng);
        let base = amplitude_px(&x);

        let c = f64::from(rng.random_range(-4_000_000..4_000_000)) / 1024.0;
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        if amplitude_px(&shifted) != base {
            failures.push(format!("translation case {case}"));
        }

        let reflected: Vec<f64> = x.iter().map(|v| -v).collect();
        if amplitude_px(&reflected) != base {
            failures.push(format!("reflection case {case}"));
        }

        let s = [0.25, 0.5, 2.0, 8.0][case % 4];
        let scaled: Vec<f64> = x.iter().map(|v| s * v).collect();
        if amplitude_px(&scaled) != s * base {
            failures.push(format!("scaling by {s} case {case}"));
        }
        let s = rng.random_range(0.1..10.0);
        let scaled: Vec<f64> = x.iter().map(|v| s * v).collect();
        if rel_err(amplitude_px(&scaled), s * base) > 1e-12 {
            failures.push(format!("scaling by {s} case {case}"));
        }

        let mut level = rng.random_range(-1000.0..1000.0);
        let mut monotone: Vec<f64> = (0..x.len())
            .map(|_| {
                level += rng.random_range(1e-3..20.0);
                level
            })
            .collect();
        if case % 2 == 1 {
            monotone.reverse();
        }
        if amplitude_px(&monotone) != 0.0 {
            failures.push(format!("monotone case {case}"));
        }

        let v = rng.random_range(0.0..100.0);
        let big = v + rng.random_range(0.0..1e6);
        let mut a = vec![v; rng.random_range(3..20)];
        if a.len() % 2 == 0 {
            a.push(v);
        }
        a.push(big);
        if median_amplitude(&a) != v {
            failures.push(format!("median robustness case {case}"));
        }

        if measure_tremor(&recording_from(&x), &AmplitudeConfig::default()).unwrap()
            != measure_tremor(&recording_from(&x), &AmplitudeConfig::default()).unwrap()
        {
            failures.push(format!("determinism case {case}"));
        }
    }
    verdict(
        "amplitude_properties",
        failures.is_empty(),
        if failures.is_empty() {
            "translation, reflection, scaling, monotone drift, median robustness on 500 waveforms"
                .to_string()
        } else {
            failures.join("; ")
        },
    );
}

fn random_recording(rng: &mut ChaCha8Rng) -> Recording {
    let fps = [24.0, 30.0, 59.94, 60.0, 120.0][rng.random_range(0..5)];
    let mut meta = RecordingMeta::for_camera(default_camera(), rng.random_range(20.0..200.0), fps);
    for k in 0..rng.random_range(0..4) {
        meta.labels.insert(
            format!("label{k}"),
            format!("value {}", rng.random::<u16>()),
        );
    }
    let frames = rng.random_range(1..80u64);
    let ids: BTreeSet<u8> = (0..rng.random_range(1..=21))
        .map(|_| rng.random_range(0..21))
        .collect();
    let mut tracks = BTreeMap::new();
    for id in ids {
        let id = LandmarkId::new(id).unwrap();
        let kept: Vec<u64> = (0..frames).filter(|_| rng.random_bool(0.9)).collect();
        let samples: Vec<_> = kept
            .into_iter()
            .map(|frame_index| LandmarkSample {
                frame_index,
                t: frame_index as f64 / fps,
                landmark_id: id,
                x: rng.random_range(-50.0..1130.0),
                y: rng.random_range(-50.0..1970.0),
                confidence: rng.random_range(0.0..=1.0),
            })
            .collect();
        if !samples.is_empty() {
            tracks.insert(id, LandmarkTrack::new(id, samples).unwrap());
        }
    }
    Recording::new(meta, tracks).unwrap()
}

const HEADER: &str = "frame,t,landmark_id,x,y,confidence";
const GOOD_META: &str = "depth_cm = 75.0\nfps = 60.0\nwidth_px = 1080\nheight_px = 1920\n";

#[test]
fn parser_round_trip_and_rejection() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    for case in 0..200 {
        let rec = random_recording(&mut rng);
        let meta = parse_meta(&serialize_meta(rec.meta()), &default_camera()).unwrap();
        if &meta != rec.meta() {
            failures.push(format!("metadata case {case}"));
        }
        let back = parse_landmark_file(&serialize_landmark_file(&rec), meta).unwrap();
        let same_shape = back.tracks().len() == rec.tracks().len()
            && back
                .tracks()
                .iter()
                .zip(rec.tracks())
                .all(|((ia, a), (ib, b))| ia == ib && a.len() == b.len());
        let close = rec
            .tracks()
            .values()
            .zip(back.tracks().values())
            .flat_map(|(a, b)| a.samples().iter().zip(b.samples()))
            .all(|(a, b)| {
                a.frame_index == b.frame_index
                    && a.landmark_id == b.landmark_id
                    && (a.t - b.t).abs() <= 1e-6
                    && (a.x - b.x).abs() <= 1e-5
                    && (a.y - b.y).abs() <= 1e-5
                    && (a.confidence - b.confidence).abs() <= 1e-6
            });
        if !(same_shape && close) {
            failures.push(format!("landmark table case {case}"));
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let good_rows = format!("{HEADER}\n0,0.000000,4,500.0,900.0,1.0\n1,0.016667,4,510.0,900.0,1.0\n2,0.033333,4,500.0,900.0,1.0\n");
    let low_confidence = good_rows.replace(",1.0\n", ",0.1\n");
    let cases: Vec<(&str, String, String, i32)> = vec![
        (
            "wrong header",
            "frame,t,id,x,y,c\n0,0,4,1,1,1\n".into(),
            GOOD_META.into(),
            2,
        ),
        (
            "missing field",
            format!("{HEADER}\n0,0.0,4,1.0,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "extra field",
            format!("{HEADER}\n0,0.0,4,1.0,1.0,1.0,9\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "non-numeric",
            format!("{HEADER}\n0,0.0,4,abc,1.0,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "NaN coordinate",
            format!("{HEADER}\n0,0.0,4,NaN,1.0,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "infinite coordinate",
            format!("{HEADER}\n0,0.0,4,1.0,inf,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "landmark 21",
            format!("{HEADER}\n0,0.0,21,1.0,1.0,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "negative frame",
            format!("{HEADER}\n-1,0.0,4,1.0,1.0,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "confidence above 1",
            format!("{HEADER}\n0,0.0,4,1.0,1.0,1.5\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "time not increasing",
            format!("{HEADER}\n0,0.0,4,1.0,1.0,1.0\n1,0.0,4,1.0,1.0,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        (
            "time past end",
            format!("{HEADER}\n0,5.0,4,1.0,1.0,1.0\n"),
            GOOD_META.into(),
            2,
        ),
        ("empty file", String::new(), GOOD_META.into(), 2),
        (
            "unknown meta key",
            good_rows.clone(),
            format!("{GOOD_META}colour = 1\n"),
            2,
        ),
        (
            "missing fps",
            good_rows.clone(),
            GOOD_META.replace("fps = 60.0\n", ""),
            2,
        ),
        (
            "zero depth",
            good_rows.clone(),
            GOOD_META.replace("75.0", "0.0"),
            2,
        ),
        (
            "aspect mismatch",
            good_rows.clone(),
            GOOD_META.replace("1920", "1080"),
            2,
        ),
        (
            "bad camera",
            good_rows.clone(),
            format!("{GOOD_META}[camera]\nf_mm = 0.0\n"),
            2,
        ),
        (
            "meta not toml",
            good_rows.clone(),
            "depth_cm = = 1\n".into(),
            2,
        ),
        ("all below confidence", low_confidence, GOOD_META.into(), 3),
        ("valid", good_rows, GOOD_META.into(), 0),
    ];
    let mut rejected = 0;
    for (k, (name, rows, meta, want)) in cases.iter().enumerate() {
        let l = dir.path().join(format!("case{k}.csv"));
        let m = dir.path().join(format!("case{k}.meta.toml"));
        std::fs::write(&l, rows).unwrap();
        std::fs::write(&m, meta).unwrap();
        let got = tremor(&["analyze", "--landmarks", p(&l), "--meta", p(&m)])
            .status
            .code()
            .unwrap();
        if got != *want {
            failures.push(format!("{name}: exit {got}, expected {want}"));
        } else if *want != 0 {
            rejected += 1;
        }
    }

    verdict(
        "parser_round_trip_and_rejection",
        failures.is_empty(),
        if failures.is_empty() {
            format!("200 recordings round-tripped; {rejected} malformed inputs rejected with expected exit codes")
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn batch_performance() {
    let grid = generate_grid(&grid_base(), &GRID_AMPLITUDES, &GRID_DEPTHS, 4).unwrap();
    let frames = grid[0].recording.tracks().values().next().unwrap().len();
    let cfg = AmplitudeConfig::default();
    let start = Instant::now();
    let measured: Vec<_> = grid
        .par_iter()
        .map(|g| measure_tremor(&g.recording, &cfg).unwrap())
        .collect();
    let elapsed = start.elapsed();
    verdict(
        "batch_performance",
        measured.len() == 60 && elapsed < Duration::from_secs(1),
        format!(
            "{} recordings x {frames} frames x 6 landmarks measured in {:.1} ms (<1000)",
            measured.len(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
}
