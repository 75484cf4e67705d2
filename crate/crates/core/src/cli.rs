//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 internal invariant violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::assessment::{
    assess_sequence, extract_raw, load_model, save_model, to_canonical_json, train_with_report,
    write_atomic, Assessment, PipelineConfig,
};
use crate::error::{GaitError, Result};
use crate::frames::{load_sequence, save_sequence, DepthSequence, META_FILE};
use crate::evaluation::{evaluate, TestSequence};
use crate::sequence_models::{delta_sequence, HammingMode};
use crate::synthgait::{generate_walk, SynthParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const SEED_ENV: &str = "GAITSCORE_SEED";

#[derive(Debug, Parser)]
#[command(name = "gaitscore", version, about = "Gait normality scoring from depth silhouettes")]
struct Cli {
    /// Worker threads for frame-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a synthetic walking sequence.
    Synth(SynthArgs),
    /// Fit a normal-gait model on a directory of sequences.
    Train(TrainArgs),
    /// Score one sequence with a trained model.
    Score(ScoreArgs),
    /// Per-frame and per-sequence EER over a labeled test set.
    Eval(EvalArgs),
    /// Dump per-frame features of a sequence.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 120)]
    frames: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 13.0)]
    fps: f64,
    #[arg(long, default_value_t = 212)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value_t = 0.9)]
    stride_hz: f64,
    #[arg(long, default_value_t = 3.0)]
    swing_amp: f64,
    #[arg(long, visible_alias = "limp", default_value_t = 0.0)]
    limp_asym: f64,
    #[arg(long, default_value_t = 0.0)]
    sole_pad_px: f64,
    #[arg(long, default_value_t = 2500.0)]
    depth_base: f64,
    #[arg(long, default_value_t = 4.0)]
    noise_mm: f64,
    /// Replace an existing output directory.
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    #[arg(long, default_value_t = 30.0)]
    fast_threshold_mm: f64,
    #[arg(long, default_value_t = 5)]
    q: usize,
    #[arg(long = "window", visible_alias = "window-w", default_value_t = 10)]
    window_w: usize,
    #[arg(long, default_value_t = 8)]
    n_states: usize,
    #[arg(long, default_value_t = 3)]
    n_mix: usize,
    #[arg(long, default_value_t = 10)]
    proj_bins: usize,
    #[arg(long, default_value_t = HammingMode::Occupancy)]
    hamming_mode: HammingMode,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    threshold_margin: f64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// A sequence directory or a directory of sequence directories.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    /// Include the per-frame scores.
    #[arg(long)]
    per_frame: bool,
    #[arg(long)]
    json: bool,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    seq: PathBuf,
    /// Add PoI histograms and deltas computed with this model.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0)]
    fast_threshold_mm: f64,
    #[arg(long, default_value_t = 10)]
    proj_bins: usize,
    #[arg(long)]
    json: bool,
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // a pool may already exist when run() is called repeatedly in-process
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("global thread pool already initialized");
        }
    }
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_internal() {
                EXIT_INTERNAL
            } else {
                EXIT_DATA
            }
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// `--seed`, else `GAITSCORE_SEED`, else 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| GaitError::InvalidConfig(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn echo<T: Serialize>(what: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string(&serde_json::to_value(value).map_err(|e| GaitError::Internal(e.to_string()))?)
        .map_err(|e| GaitError::Internal(e.to_string()))?;
    eprintln!("{what}: {text}");
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| GaitError::io("<stdout>", e))
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Synth(a) => synth(a),
        Command::Train(a) => train_cmd(a),
        Command::Score(a) => score_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Inspect(a) => inspect_cmd(a),
    }
}

fn synth(a: SynthArgs) -> Result<()> {
    let params = SynthParams {
        frames: a.frames,
        fps: a.fps,
        width: a.width,
        height: a.height,
        stride_hz: a.stride_hz,
        swing_amp: a.swing_amp,
        limp_asym: a.limp_asym,
        sole_pad_px: a.sole_pad_px,
        depth_base: a.depth_base,
        noise_mm: a.noise_mm,
        seed: resolve_seed(a.seed)?,
    };
    eprintln!("synth: {params:?}");
    let seq = generate_walk(&params)?;

    if a.out.exists() {
        let empty = a.out.is_dir()
            && fs::read_dir(&a.out)
                .map_err(|e| GaitError::io(&a.out, e))?
                .next()
                .is_none();
        if !empty && !a.force {
            return Err(GaitError::InvalidConfig(format!(
                "{} already exists (use --force to replace it)",
                a.out.display()
            )));
        }
    }
    let parent = match a.out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| GaitError::io(&parent, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".gaitscore-synth")
        .tempdir_in(&parent)
        .map_err(|e| GaitError::io(&parent, e))?;
    save_sequence(&seq, staging.path())?;
    if a.out.is_dir() {
        fs::remove_dir_all(&a.out).map_err(|e| GaitError::io(&a.out, e))?;
    } else if a.out.exists() {
        fs::remove_file(&a.out).map_err(|e| GaitError::io(&a.out, e))?;
    }
    let staged = staging.keep();
    fs::rename(&staged, &a.out).map_err(|e| GaitError::io(&a.out, e))?;
    Ok(())
}

fn pipeline_config(a: &ConfigArgs) -> Result<PipelineConfig> {
    let cfg = PipelineConfig {
        fast_threshold_mm: a.fast_threshold_mm,
        q: a.q,
        window_w: a.window_w,
        n_states: a.n_states,
        n_mix: a.n_mix,
        proj_bins: a.proj_bins,
        hamming_mode: a.hamming_mode,
        seed: resolve_seed(a.seed)?,
        threshold_margin: a.threshold_margin,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `dir` itself when it holds a sequence, otherwise its sequence
/// subdirectories in name order.
pub fn sequence_dirs(dir: &Path) -> Result<Vec<PathBuf>> {
    if dir.join(META_FILE).is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let entries = fs::read_dir(dir).map_err(|e| GaitError::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| GaitError::io(dir, e))?.path();
        if path.join(META_FILE).is_file() {
            out.push(path);
        }
    }
    if out.is_empty() {
        return Err(GaitError::MissingMeta(dir.to_path_buf()));
    }
    out.sort();
    Ok(out)
}

fn load_all(dir: &Path) -> Result<Vec<(PathBuf, DepthSequence)>> {
    sequence_dirs(dir)?
        .into_iter()
        .map(|p| load_sequence(&p).map(|s| (p, s)))
        .collect()
}

fn dir_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

#[derive(Serialize)]
struct TrainSummary {
    n_sequences: usize,
    n_windows: usize,
    n_keypoints: usize,
    em_iterations: usize,
    em_converged: bool,
    w_poi: f64,
    w_lops: f64,
    threshold: f64,
    sequence_scores: Vec<f64>,
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let cfg = pipeline_config(&a.config)?;
    echo("config", &cfg)?;
    let loaded = load_all(&a.data)?;
    let seqs: Vec<DepthSequence> = loaded.into_iter().map(|(_, s)| s).collect();
    let (model, report) = train_with_report(&seqs, &cfg)?;
    save_model(&model, &a.out)?;
    let summary = TrainSummary {
        n_sequences: seqs.len(),
        n_windows: report.n_windows,
        n_keypoints: report.n_keypoints,
        em_iterations: report.trace.iterations,
        em_converged: report.trace.converged,
        w_poi: model.weights.w_poi,
        w_lops: model.weights.w_lops,
        threshold: model.threshold,
        sequence_scores: report.sequence_scores,
    };
    if a.json {
        emit(None, &to_canonical_json(&summary)?)
    } else {
        println!(
            "trained on {} sequences ({} windows, {} keypoints); weights poi={} lops={}; threshold {}",
            summary.n_sequences,
            summary.n_windows,
            summary.n_keypoints,
            summary.w_poi,
            summary.w_lops,
            summary.threshold
        );
        Ok(())
    }
}

#[derive(Serialize)]
struct ScoreOutput<'a> {
    sequence_score: f64,
    decision: crate::frames::Label,
    windows: &'a [crate::assessment::WindowScore],
    #[serde(skip_serializing_if = "Option::is_none")]
    per_frame: Option<&'a [crate::assessment::FrameScore]>,
}

fn score_text(a: &Assessment, per_frame: bool) -> String {
    let mut s = format!("sequence_score {}\ndecision {}\n", a.sequence_score, a.decision);
    for w in &a.windows {
        s.push_str(&format!(
            "window {} s_poi {} s_lops {} s_final {}\n",
            w.start_frame, w.s_poi, w.s_lops, w.s_final
        ));
    }
    if per_frame {
        for f in &a.per_frame {
            s.push_str(&format!("frame {} {}\n", f.frame, f.score));
        }
    }
    s
}

fn score_cmd(a: ScoreArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    echo("config", &model.config)?;
    let seq = load_sequence(&a.seq)?;
    let assessment = assess_sequence(&model, &seq)?;
    let bytes = if a.json {
        to_canonical_json(&ScoreOutput {
            sequence_score: assessment.sequence_score,
            decision: assessment.decision,
            windows: &assessment.windows,
            per_frame: a.per_frame.then_some(&assessment.per_frame[..]),
        })?
    } else {
        score_text(&assessment, a.per_frame).into_bytes()
    };
    emit(a.out.as_deref(), &bytes)
}

fn eval_cmd(a: EvalArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    echo("config", &model.config)?;
    let tests: Vec<TestSequence> = load_all(&a.data)?
        .into_iter()
        .map(|(p, s)| TestSequence {
            subject_id: dir_name(&p),
            sequence_id: dir_name(&p),
            sequence: s,
        })
        .collect();
    let report = evaluate(&model, &tests)?;
    let bytes = to_canonical_json(&report)?;
    if let Some(out) = &a.out {
        write_atomic(out, &bytes)?;
    }
    if a.json || a.out.is_none() {
        emit(None, &bytes)
    } else {
        println!(
            "per-frame EER {} per-sequence EER {} ({} sequences, {} windows)",
            report.per_frame_eer, report.per_sequence_eer, report.n_sequences, report.n_windows
        );
        Ok(())
    }
}

#[derive(Serialize)]
struct InspectFrame {
    frame: usize,
    n_keypoints: usize,
    ratio_left: f64,
    ratio_right: f64,
    left_hist: Vec<f64>,
    right_hist: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poi_bins: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
}

fn inspect_cmd(a: InspectArgs) -> Result<()> {
    let seq = load_sequence(&a.seq)?;
    let model = a.model.as_deref().map(load_model).transpose()?;
    let cfg = match &model {
        Some(m) => m.config.clone(),
        None => PipelineConfig {
            fast_threshold_mm: a.fast_threshold_mm,
            proj_bins: a.proj_bins,
            ..PipelineConfig::default()
        },
    };
    cfg.validate()?;
    echo("config", &cfg)?;
    let raw = extract_raw(&seq, &cfg, true)?;
    let hists = model.as_ref().map(|m| {
        raw.iter()
            .map(|(f, _)| {
                let proj: Vec<_> = f.iter().map(|r| m.pca.project(r)).collect();
                crate::poi::build_histogram(&proj, &m.bounds)
            })
            .collect::<Vec<_>>()
    });
    let deltas = match (&hists, &model) {
        (Some(h), Some(m)) => Some(delta_sequence(h, m.config.hamming_mode)?),
        _ => None,
    };
    let frames: Vec<InspectFrame> = raw
        .iter()
        .enumerate()
        .map(|(i, (f, l))| InspectFrame {
            frame: i,
            n_keypoints: f.len(),
            ratio_left: l.ratio_left,
            ratio_right: l.ratio_right,
            left_hist: l.left_hist.clone(),
            right_hist: l.right_hist.clone(),
            poi_bins: hists.as_ref().map(|h| h[i].bins.clone()),
            delta: deltas.as_ref().and_then(|d| i.checked_sub(1).map(|j| d[j])),
        })
        .collect();
    if a.json {
        emit(None, &to_canonical_json(&frames)?)
    } else {
        let mut s = String::new();
        for f in &frames {
            s.push_str(&format!(
                "frame {} keypoints {} ratio {:.4}/{:.4}",
                f.frame, f.n_keypoints, f.ratio_left, f.ratio_right
            ));
            if let Some(d) = f.delta {
                s.push_str(&format!(" delta {d}"));
            }
            s.push('\n');
        }
        emit(None, s.as_bytes())
    }
}
