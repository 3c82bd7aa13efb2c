//! The `tremor` command line: `analyze`, `convert`, `agree` and `synth`.
//!
//! Exit codes: 0 success, 2 bad input (unreadable or invalid files, bad
//! flags), 3 the computation itself failed. Diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{measure_tremor, AmplitudeConfig, Axis, TremorMeasurement};
use crate::camera::{pixels_to_cm, scene_scale, CameraSpec, SceneScale};
use crate::error::{Error, Result};
use crate::landmark::{default_camera, parse_camera, read_recording, write_recording, LandmarkId};
use crate::stats::{
    bland_altman, bland_altman_svg, parse_pairs, serialize_pairs, subgroup_compare,
    AgreementResult, GroupTest, MethodPair, SubgroupComparison, TTestVariant,
};
use crate::synth::{generate, generate_grid, SynthSpec};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "tremor",
    version,
    about = "Hand-tremor amplitude from landmark time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure tremor amplitude of one recording, or of every recording in a manifest.
    Analyze(AnalyzeArgs),
    /// Convert a pixel distance to centimetres.
    Convert(ConvertArgs),
    /// Bland-Altman agreement between pipeline and reference measurements.
    Agree(AgreeArgs),
    /// Generate synthetic recordings with a known amplitude.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Landmark table (CSV).
    #[arg(
        long,
        required_unless_present = "manifest",
        conflicts_with = "manifest"
    )]
    pub landmarks: Option<PathBuf>,
    /// Metadata file (TOML).
    #[arg(
        long,
        required_unless_present = "manifest",
        conflicts_with = "manifest"
    )]
    pub meta: Option<PathBuf>,
    /// Batch mode: CSV with columns `path[,ground_truth_cm,depth_cm,amplitude_category]`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Batch mode: also write a pairs file (measured vs ground truth).
    #[arg(long, requires = "manifest")]
    pub pairs_out: Option<PathBuf>,
    /// Camera file; overrides the camera in the metadata. Default: bundled iPhone XR spec.
    #[arg(long)]
    pub camera: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Debug, Args, Default)]
pub struct ConfigFlags {
    /// TOML file with amplitude settings; its keys take precedence over flags.
    #[arg(long = "config")]
    pub config_file: Option<PathBuf>,
    #[arg(long)]
    pub axis: Option<Axis>,
    #[arg(long)]
    pub min_confidence: Option<f64>,
    #[arg(long)]
    pub smooth_window: Option<usize>,
    /// Comma-separated landmark ids, e.g. `2,3,4,5,6,8`.
    #[arg(long, value_delimiter = ',')]
    pub landmark_ids: Option<Vec<u8>>,
    #[arg(long)]
    pub max_gap_s: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub pixels: f64,
    /// Camera-to-hand distance in centimetres.
    #[arg(long = "depth", default_value_t = 100.0, allow_hyphen_values = true)]
    pub depth_cm: f64,
    #[arg(long)]
    pub camera: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AgreeArgs {
    /// Pairs file: CSV with header `cv_cm,ref_cm[,label...]`.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Label column to split by for per-group agreement and a t-test.
    #[arg(long)]
    pub group_by: Option<String>,
    /// Write a Bland-Altman plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Use the pooled-variance t-test instead of Welch's.
    #[arg(long)]
    pub pooled: bool,
    /// Emit JSON instead of the text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// TOML spec; its keys take precedence over flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub camera: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub freq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub duration: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub fps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub depth: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub drift: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub noise: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ramp: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Generate the amplitude x depth x replicate grid and a manifest.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,2,5,10")]
    pub amplitudes: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "50,75,100")]
    pub depths: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub replicates: usize,
}

/// One line of `analyze` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub recording: String,
    pub measurement: TremorMeasurement,
    pub scene_scale: SceneScale,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth_cm: Option<f64>,
}

/// Batch line for a recording that could not be analysed.
#[derive(Debug, Serialize)]
struct FailureLine<'a> {
    schema_version: u32,
    recording: &'a str,
    error: String,
    exit_code: i32,
}

#[derive(Debug, Serialize)]
struct AgreeOutput<'a> {
    overall: &'a AgreementResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    subgroups: Option<&'a SubgroupComparison>,
}

#[derive(Debug, Deserialize)]
struct ManifestRow {
    path: PathBuf,
    ground_truth_cm: Option<f64>,
    depth_cm: Option<f64>,
    amplitude_category: Option<String>,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => analyze(&a, out),
        Command::Convert(a) => convert(&a, out),
        Command::Agree(a) => agree(&a, out),
        Command::Synth(a) => synth(&a, out),
    }
}

fn load_camera(path: Option<&Path>) -> Result<Option<CameraSpec>> {
    path.map(|p| read_text(p).and_then(|t| parse_camera(&t).map_err(|e| e.in_file(p))))
        .transpose()
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::from(e).in_file(path))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::from(e).in_file(path))
}

/// Lays the keys of a TOML file over `base`, so keys present in the file win
/// and everything else keeps the value already in `base`.
fn overlay_toml<T>(base: &T, path: &Path) -> Result<T>
where
    T: Serialize + for<'de> Deserialize<'de>,
{
    let text = read_text(path)?;
    let file: toml::Table = toml::from_str(&text)
        .map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| {
                1 + text[..s.start.min(text.len())].matches('\n').count()
            }),
            message: e.message().to_string(),
        })
        .map_err(|e| e.in_file(path))?;
    let mut merged = toml::Table::try_from(base)
        .map_err(|e| Error::Config(format!("cannot represent settings as TOML: {e}")))?;
    merged.extend(file);
    toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("{}: {}", path.display(), e.message())))
}

pub fn resolve_config(flags: &ConfigFlags) -> Result<AmplitudeConfig> {
    let mut cfg = AmplitudeConfig::default();
    if let Some(axis) = flags.axis {
        cfg.axis = axis;
    }
    if let Some(v) = flags.min_confidence {
        cfg.min_confidence = v;
    }
    if let Some(v) = flags.smooth_window {
        cfg.smooth_window = v;
    }
    if let Some(ids) = &flags.landmark_ids {
        cfg.landmark_ids = ids
            .iter()
            .map(|&id| LandmarkId::new(id).map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<_>>()?;
    }
    if let Some(v) = flags.max_gap_s {
        cfg.max_gap_s = v;
    }
    if let Some(path) = &flags.config_file {
        cfg = overlay_toml(&cfg, path)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn analyze_one(
    landmarks: &Path,
    meta: &Path,
    camera_override: Option<&CameraSpec>,
    config: &AmplitudeConfig,
) -> Result<AnalysisReport> {
    let fallback = camera_override.copied().unwrap_or_else(default_camera);
    let rec = read_recording(landmarks, meta, &fallback)?;
    let rec = match camera_override {
        Some(cam) if rec.meta().camera != *cam => {
            let (mut m, tracks) = rec.into_parts();
            m.camera = *cam;
            crate::landmark::Recording::new(m, tracks)?
        }
        _ => rec,
    };
    let measurement = measure_tremor(&rec, config)?;
    let scale = scene_scale(&rec.meta().camera, rec.meta().depth_cm)?;

    let mut warnings = Vec::new();
    for id in &measurement.missing {
        warnings.push(format!("landmark {id} not present in recording"));
    }
    for (id, reason) in &measurement.failed {
        warnings.push(format!("landmark {id} excluded: {reason}"));
    }
    for (id, a) in &measurement.per_landmark {
        if a.n_segments > 1 {
            warnings.push(format!(
                "landmark {id} split into {} segments by dropouts longer than {} s",
                a.n_segments, config.max_gap_s
            ));
        }
    }
    Ok(AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        recording: landmarks.display().to_string(),
        measurement,
        scene_scale: scale,
        warnings,
        ground_truth_cm: None,
    })
}

/// Metadata path paired with a landmark table: `rec.csv` -> `rec.meta.toml`.
pub fn meta_path_for(landmarks: &Path) -> PathBuf {
    landmarks.with_extension("meta.toml")
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let config = resolve_config(&args.config)?;
    let camera = load_camera(args.camera.as_deref())?;

    let Some(manifest) = &args.manifest else {
        let (l, m) = (
            args.landmarks
                .as_deref()
                .expect("clap enforces --landmarks"),
            args.meta.as_deref().expect("clap enforces --meta"),
        );
        let report = analyze_one(l, m, camera.as_ref(), &config)?;
        writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        )?;
        return Ok(());
    };

    let base = manifest.parent().unwrap_or(Path::new(""));
    let rows = read_manifest(manifest)?;
    let results: Vec<Result<AnalysisReport>> = rows
        .par_iter()
        .map(|row| {
            let landmarks = base.join(&row.path);
            let mut report = analyze_one(
                &landmarks,
                &meta_path_for(&landmarks),
                camera.as_ref(),
                &config,
            )?;
            report.recording = row.path.display().to_string();
            report.ground_truth_cm = row.ground_truth_cm;
            Ok(report)
        })
        .collect();

    let mut first_err = None;
    let mut pairs = Vec::new();
    for (row, result) in rows.iter().zip(results) {
        match result {
            Ok(report) => {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&report).expect("report serializes")
                )?;
                if let Some(truth) = row.ground_truth_cm {
                    let mut pair = MethodPair::new(report.measurement.amplitude_cm, truth);
                    if let Some(d) = row.depth_cm {
                        pair = pair.with_label("depth_cm", d.to_string());
                    }
                    if let Some(c) = &row.amplitude_category {
                        pair = pair.with_label("amplitude_category", c.clone());
                    }
                    pairs.push(pair);
                }
            }
            Err(e) => {
                let line = FailureLine {
                    schema_version: REPORT_SCHEMA_VERSION,
                    recording: &row.path.to_string_lossy(),
                    error: e.to_string(),
                    exit_code: e.exit_code(),
                };
                writeln!(out, "{}", serde_json::to_string(&line).expect("serializes"))?;
                first_err.get_or_insert(e);
            }
        }
    }
    if let Some(path) = &args.pairs_out {
        if pairs.len() != rows.len() {
            return Err(first_err.unwrap_or_else(|| {
                Error::invalid("--pairs-out needs a ground_truth_cm for every manifest row")
            }));
        }
        write_file(
            path,
            &serialize_pairs(&pairs, &["depth_cm", "amplitude_category"]),
        )?;
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let bytes = read_bytes(path)?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    reader
        .deserialize()
        .enumerate()
        .map(|(k, row)| {
            row.map_err(|e: csv::Error| Error::Parse {
                line: e.position().map_or(k + 2, |p| p.line() as usize),
                message: e.to_string(),
            })
            .map_err(|e| e.in_file(path))
        })
        .collect()
}

fn convert(args: &ConvertArgs, out: &mut dyn Write) -> Result<()> {
    let camera = load_camera(args.camera.as_deref())?.unwrap_or_else(default_camera);
    let cm = pixels_to_cm(args.pixels, &camera, args.depth_cm)?;
    writeln!(out, "{cm:?}")?;
    Ok(())
}

fn agree(args: &AgreeArgs, out: &mut dyn Write) -> Result<()> {
    let pairs = parse_pairs(&read_bytes(&args.pairs)?).map_err(|e| e.in_file(&args.pairs))?;
    let overall = bland_altman(&pairs)?;
    let variant = if args.pooled {
        TTestVariant::Pooled
    } else {
        TTestVariant::Welch
    };
    let subgroups = args
        .group_by
        .as_deref()
        .map(|key| subgroup_compare(&pairs, key, variant))
        .transpose()?;
    if let Some(path) = &args.svg {
        write_file(path, &bland_altman_svg(&pairs, &overall)?)?;
    }

    if args.json {
        let doc = AgreeOutput {
            overall: &overall,
            subgroups: subgroups.as_ref(),
        };
        writeln!(out, "{}", serde_json::to_string(&doc).expect("serializes"))?;
        return Ok(());
    }
    write_agreement(out, "", &overall)?;
    if let Some(sub) = &subgroups {
        for (value, r) in &sub.groups {
            writeln!(out)?;
            write_agreement(out, &format!("{}={value} ", sub.label_key), r)?;
        }
        writeln!(out)?;
        match &sub.test {
            GroupTest::SingleGroup => writeln!(out, "t_test       skipped (single group)")?,
            GroupTest::Compared {
                first,
                second,
                result,
            } => {
                writeln!(
                    out,
                    "t_test       {first} vs {second} ({:?})",
                    result.variant
                )?;
                writeln!(out, "t            {:.4}", result.t_stat)?;
                writeln!(out, "df           {:.4}", result.df)?;
                writeln!(out, "p            {:.4}", result.p_two_sided)?;
            }
            GroupTest::Unsupported { reason } | GroupTest::Failed { reason } => {
                writeln!(out, "t_test       skipped ({reason})")?
            }
        }
    }
    Ok(())
}

fn write_agreement(out: &mut dyn Write, prefix: &str, r: &AgreementResult) -> Result<()> {
    writeln!(out, "{prefix}n            {}", r.n)?;
    writeln!(out, "{prefix}bias_cm      {:.4}", r.bias_cm)?;
    writeln!(out, "{prefix}sd_cm        {:.4}", r.sd_cm)?;
    writeln!(out, "{prefix}loa_low_cm   {:.4}", r.loa_low_cm)?;
    writeln!(out, "{prefix}loa_high_cm  {:.4}", r.loa_high_cm)?;
    Ok(())
}

pub fn resolve_synth_spec(args: &SynthArgs) -> Result<SynthSpec> {
    let mut spec = SynthSpec::default();
    let flags = [
        (args.amplitude, &mut spec.amplitude_cm),
        (args.freq, &mut spec.freq_hz),
        (args.phase, &mut spec.phase_rad),
        (args.duration, &mut spec.duration_s),
        (args.fps, &mut spec.fps),
        (args.depth, &mut spec.depth_cm),
        (args.drift, &mut spec.drift_px_per_s),
        (args.noise, &mut spec.noise_px),
        (args.ramp, &mut spec.ramp_s),
    ];
    for (flag, field) in flags {
        if let Some(v) = flag {
            *field = v;
        }
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(cam) = load_camera(args.camera.as_deref())? {
        spec.camera = cam;
    }
    if let Some(path) = &args.spec {
        spec = overlay_toml(&spec, path)?;
    }
    spec.validate()?;
    Ok(spec)
}

fn synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let spec = resolve_synth_spec(args)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::from(e).in_file(&args.out))?;

    if !args.grid {
        let rec = generate(&spec)?;
        let landmarks = args.out.join("recording.csv");
        write_recording(&rec, &landmarks, meta_path_for(&landmarks))?;
        writeln!(out, "{}", landmarks.display())?;
        return Ok(());
    }

    let grid = generate_grid(&spec, &args.amplitudes, &args.depths, args.replicates)?;
    let mut manifest = csv::Writer::from_writer(Vec::new());
    manifest
        .write_record(["path", "ground_truth_cm", "depth_cm", "amplitude_category"])
        .expect("in-memory write");
    for (i, g) in grid.iter().enumerate() {
        let name = format!("rec_{i:03}.csv");
        let landmarks = args.out.join(&name);
        write_recording(&g.recording, &landmarks, meta_path_for(&landmarks))?;
        manifest
            .write_record([
                name,
                g.ground_truth_cm.to_string(),
                g.depth_cm.to_string(),
                g.amplitude_category().to_string(),
            ])
            .expect("in-memory write");
    }
    let manifest_path = args.out.join("manifest.csv");
    write_file(
        &manifest_path,
        &manifest.into_inner().expect("in-memory flush"),
    )?;
    writeln!(out, "{}", manifest_path.display())?;
    Ok(())
}
