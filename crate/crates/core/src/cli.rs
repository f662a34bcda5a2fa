//! Command-line front end: `track`, `eval`, `synth` and `ablate`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::descriptor::DistanceMode;
use crate::error::Error;
use crate::io::{self, SequenceBundle, SequencePaths};
use crate::metrics::{aggregate, evaluate, LocGrid, MetricFamilies, SequenceMetrics};
use crate::report::{write_report, MetricReport, ReportFormat};
use crate::synth::{self, generate_scenario, IdScript, Scenario, ScenarioSpec};
use crate::tracker::{run_sequence, Age, FusionMode, SequenceInput, TrackerConfig};
use crate::types::{Detection, DetectionKind, TrajectorySet};

pub const THREADS_ENV: &str = "TGRMPT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "tgrmpt", version, about = "Head-shoulder aided multi-person tracking and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Track one sequence of detections and embeddings.
    Track(TrackArgs),
    /// Score tracker output against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic sequence.
    Synth(SynthArgs),
    /// Sweep one tracker setting and tabulate the metrics.
    Ablate(AblateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct TrackerArgs {
    #[arg(long, default_value = "wb+hs")]
    pub fusion: FusionMode,
    /// Maximum gallery distance for a match.
    #[arg(long, default_value_t = 0.85)]
    pub tau: f64,
    /// Missed frames before a track is deleted, or `inf`.
    #[arg(long, default_value = "inf")]
    pub age: Age,
    /// Descriptors kept per track.
    #[arg(long, default_value_t = 100)]
    pub gallery: usize,
    #[arg(long, default_value = "mean")]
    pub distance: DistanceMode,
    /// Age-prioritized matching cascade (ablation).
    #[arg(long)]
    pub cascade: bool,
    #[arg(long, default_value_t = 3)]
    pub n_init: u32,
    /// Minimum containment IoU for pairing a head-shoulder box to a body box.
    #[arg(long, default_value_t = crate::fusion::DEFAULT_MIN_CONTAINMENT)]
    pub min_containment: f64,
    /// Weight of the head-shoulder block in the fused descriptor.
    #[arg(long, default_value_t = 1.0)]
    pub hs_weight: f64,
    /// Drop detections below this confidence before tracking.
    #[arg(long, default_value_t = 0.0)]
    pub min_conf: f64,
}

impl TrackerArgs {
    pub fn config(&self) -> TrackerConfig {
        TrackerConfig {
            tau: self.tau,
            age: self.age,
            gallery_size: self.gallery,
            distance_mode: self.distance,
            fusion_mode: self.fusion,
            n_init: self.n_init,
            cascade: self.cascade,
            min_containment: self.min_containment,
            hs_weight: self.hs_weight,
        }
    }
}

#[derive(Args, Debug)]
pub struct TrackArgs {
    #[arg(long)]
    pub detections_wb: Option<PathBuf>,
    #[arg(long)]
    pub detections_hs: Option<PathBuf>,
    #[arg(long)]
    pub embeddings_wb: Option<PathBuf>,
    #[arg(long)]
    pub embeddings_hs: Option<PathBuf>,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    /// Tracker output; the run log goes next to it with a `.log` suffix.
    #[arg(long)]
    pub out: PathBuf,
    /// Reserved; tracking is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Ground truth file; repeat together with `--res` for several sequences.
    #[arg(long, required = true)]
    pub gt: Vec<PathBuf>,
    #[arg(long, required = true)]
    pub res: Vec<PathBuf>,
    /// Sequence names, defaulting to seq01, seq02, ...
    #[arg(long = "seq")]
    pub seq: Vec<String>,
    /// Which ground-truth boxes to score against.
    #[arg(long, default_value = "wb")]
    pub gt_kind: DetectionKind,
    #[arg(long, default_value = "mota,idf1,hota,tgrhota")]
    pub metrics: MetricFamilies,
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub loc_grid: LocGrid,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "tsv")]
    pub format: ReportFormat,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// long-occlusion, same-cloth or fig4.
    #[arg(long)]
    pub preset: Option<String>,
    /// Overrides the seed of the spec.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AblateArgs {
    /// Directories written by `synth`; repeatable.
    #[arg(long, conflicts_with_all = ["preset", "spec"])]
    pub data: Vec<PathBuf>,
    #[arg(long, conflicts_with = "spec")]
    pub preset: Option<String>,
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `name=v1,v2,...` with name one of tau, age, gallery, distance, fusion,
    /// cascade, n-init, min-containment, hs-weight.
    #[arg(long)]
    pub sweep: String,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    /// Ground truth kind; `auto` scores head-shoulder tracking against
    /// head-shoulder boxes and everything else against body boxes.
    #[arg(long, default_value = "auto")]
    pub gt_kind: String,
    #[arg(long, default_value = "mota,idf1,hota,tgrhota")]
    pub metrics: MetricFamilies,
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub loc_grid: LocGrid,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "tsv")]
    pub format: ReportFormat,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses arguments, runs the command and maps failures to exit codes:
/// 2 for usage errors, 1 for everything else.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Track(a) => cmd_track(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Ablate(a) => cmd_ablate(&a),
    }
}

fn thread_count() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            v.trim().parse().map_err(|_| usage(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))
        }
        Err(_) => Ok(0),
    }
}

fn configure_threads() -> CliResult<()> {
    let n = thread_count()?;
    if n > 0 {
        // A pool may already exist when running in-process more than once.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn validated(cfg: TrackerConfig) -> CliResult<TrackerConfig> {
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn filter_conf(dets: &mut Vec<Detection>, min_conf: f64) {
    if min_conf > 0.0 {
        dets.retain(|d| d.confidence >= min_conf);
    }
}

fn log_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".log");
    PathBuf::from(s)
}

fn config_lines(cfg: &TrackerConfig, min_conf: f64) -> Vec<(String, String)> {
    vec![
        ("fusion".into(), cfg.fusion_mode.to_string()),
        ("tau".into(), cfg.tau.to_string()),
        ("age".into(), cfg.age.to_string()),
        ("gallery".into(), cfg.gallery_size.to_string()),
        ("distance".into(), cfg.distance_mode.to_string()),
        ("cascade".into(), cfg.cascade.to_string()),
        ("n_init".into(), cfg.n_init.to_string()),
        ("min_containment".into(), cfg.min_containment.to_string()),
        ("hs_weight".into(), cfg.hs_weight.to_string()),
        ("min_conf".into(), min_conf.to_string()),
    ]
}

fn cmd_track(a: &TrackArgs) -> CliResult<()> {
    let cfg = validated(a.tracker.config())?;
    let need = |flag: &str, p: &Option<PathBuf>| {
        if p.is_none() {
            Err(usage(format!("--fusion {} requires --{flag}", cfg.fusion_mode)))
        } else {
            Ok(())
        }
    };
    if cfg.fusion_mode.uses_wb() {
        need("detections-wb", &a.detections_wb)?;
        need("embeddings-wb", &a.embeddings_wb)?;
    }
    if cfg.fusion_mode.uses_hs() {
        need("detections-hs", &a.detections_hs)?;
        need("embeddings-hs", &a.embeddings_hs)?;
    }
    let keep = |p: &Option<PathBuf>, used: bool| if used { p.clone() } else { None };
    let (w, h) = (cfg.fusion_mode.uses_wb(), cfg.fusion_mode.uses_hs());
    let mut bundle = SequenceBundle::load(SequencePaths {
        gt: None,
        detections_wb: keep(&a.detections_wb, w),
        detections_hs: keep(&a.detections_hs, h),
        embeddings_wb: keep(&a.embeddings_wb, w),
        embeddings_hs: keep(&a.embeddings_hs, h),
    })?;
    filter_conf(&mut bundle.detections_wb, a.tracker.min_conf);
    filter_conf(&mut bundle.detections_hs, a.tracker.min_conf);
    let input = SequenceInput {
        wb_detections: &bundle.detections_wb,
        hs_detections: &bundle.detections_hs,
        wb_embeddings: &bundle.embeddings_wb,
        hs_embeddings: &bundle.embeddings_hs,
        num_frames: None,
    };
    let pred = run_sequence(&input, &cfg)?;

    let mut log = String::from("# tgrmpt track run\n");
    log.push_str(&format!("version={}\n", env!("CARGO_PKG_VERSION")));
    for (k, v) in config_lines(&cfg, a.tracker.min_conf) {
        log.push_str(&format!("{k}={v}\n"));
    }
    log.push_str(&format!("seed={}\nthreads={}\n", a.seed, rayon::current_num_threads()));
    for (k, p) in [
        ("detections_wb", &bundle.paths.detections_wb),
        ("detections_hs", &bundle.paths.detections_hs),
        ("embeddings_wb", &bundle.paths.embeddings_wb),
        ("embeddings_hs", &bundle.paths.embeddings_hs),
    ] {
        if let Some(p) = p {
            log.push_str(&format!("{k}={}\n", p.display()));
        }
    }
    log.push_str(&format!(
        "frames={}\ntracks={}\nrows={}\n",
        pred.max_frame().unwrap_or(0),
        pred.ids().len(),
        pred.len()
    ));

    let mut out = Outputs::default();
    out.write(&a.out, io::format_tracker_output(&pred).as_bytes())?;
    out.write(&log_path(&a.out), log.as_bytes())?;
    out.commit();
    log::info!("wrote {} rows for {} tracks to {}", pred.len(), pred.ids().len(), a.out.display());
    Ok(())
}

/// Files written by one command; removed again unless committed.
#[derive(Default)]
struct Outputs {
    written: Vec<PathBuf>,
    created_dir: Option<PathBuf>,
    committed: bool,
}

impl Outputs {
    fn write(&mut self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        io::write_atomic(path, bytes)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn track(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    fn commit(&mut self) {
        self.committed = true;
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
        if let Some(d) = &self.created_dir {
            let _ = fs::remove_dir(d);
        }
    }
}

fn read_run_log(res: &Path) -> Vec<(String, String)> {
    let Ok(text) = fs::read_to_string(log_path(res)) else {
        return Vec::new();
    };
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .filter(|(k, _)| !k.starts_with("detections_") && !k.starts_with("embeddings_"))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn cmd_eval(a: &EvalArgs) -> CliResult<()> {
    if a.gt.len() != a.res.len() {
        return Err(usage(format!("{} --gt files but {} --res files", a.gt.len(), a.res.len())));
    }
    if !a.seq.is_empty() && a.seq.len() != a.gt.len() {
        return Err(usage("--seq must be given once per sequence or not at all"));
    }
    let names: Vec<String> =
        (0..a.gt.len()).map(|i| a.seq.get(i).cloned().unwrap_or_else(|| format!("seq{:02}", i + 1))).collect();
    let results: Vec<(String, SequenceMetrics)> =
        a.gt.par_iter()
            .zip(&a.res)
            .zip(&names)
            .map(|((gt, res), name)| -> CliResult<_> {
                let gt = io::load_ground_truth(gt)?;
                let pr = io::load_tracker_output(res)?;
                Ok((name.clone(), evaluate(gt.kind(a.gt_kind), &pr, a.metrics, &a.loc_grid)?))
            })
            .collect::<CliResult<_>>()?;

    let mut config = vec![
        ("metrics".to_string(), a.metrics.to_string()),
        ("loc_grid".to_string(), a.loc_grid.to_string()),
        ("gt_kind".to_string(), a.gt_kind.to_string()),
    ];
    for (name, res) in names.iter().zip(&a.res) {
        for (k, v) in read_run_log(res) {
            let key = if a.res.len() == 1 { k } else { format!("{name}.{k}") };
            config.push((key, v));
        }
    }
    let report = MetricReport::from_sequences(config, a.metrics, &results);
    emit(&report, a.out.as_deref(), a.format)
}

fn emit(report: &MetricReport, out: Option<&Path>, format: ReportFormat) -> CliResult<()> {
    print!("{}", report.to_text());
    if let Some(path) = out {
        write_report(report, path, format)?;
    }
    Ok(())
}

fn resolve_spec(preset: Option<&str>, spec: Option<&Path>, seed: Option<u64>) -> CliResult<ScenarioSpec> {
    let mut s = match (preset, spec) {
        (Some(name), None) => ScenarioSpec::preset(name).map_err(|e| usage(e.to_string()))?,
        (None, Some(path)) => fs::read_to_string(path).map_err(|e| Error::io(path, e))?.parse()?,
        (None, None) => return Err(usage("one of --spec or --preset is required")),
        (Some(_), Some(_)) => return Err(usage("--spec and --preset are mutually exclusive")),
    };
    if let Some(seed) = seed {
        s.seed = seed;
    }
    s.validate()?;
    Ok(s)
}

pub const FIG4_RETURN_FILE: &str = "res_return.txt";
pub const FIG4_ABANDON_FILE: &str = "res_abandon.txt";

fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    let spec = resolve_spec(a.preset.as_deref(), a.spec.as_deref(), a.seed)?;
    let scenario = generate_scenario(&spec)?;
    let mut out = Outputs::default();
    if !a.out.exists() {
        fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
        out.created_dir = Some(a.out.clone());
    }
    for name in [
        synth::GT_FILE,
        synth::DET_WB_FILE,
        synth::DET_HS_FILE,
        synth::EMB_WB_FILE,
        synth::EMB_HS_FILE,
        synth::SPEC_FILE,
    ] {
        out.track(a.out.join(name));
    }
    scenario.write(&a.out)?;
    if a.preset.as_deref() == Some("fig4") {
        let m = synth::FIG4_SEGMENT;
        for (file, script) in [
            (FIG4_RETURN_FILE, IdScript::three_segment_return(1, m, 1, 2)),
            (FIG4_ABANDON_FILE, IdScript::three_segment_abandon(1, m, 1, 2)),
        ] {
            let pred = synth::scripted_tracker_output(&scenario.gt.wb, &script)?;
            out.write(&a.out.join(file), io::format_tracker_output(&pred).as_bytes())?;
        }
    }
    out.commit();
    log::info!(
        "wrote {} gt boxes, {} + {} detections to {}",
        scenario.gt.wb.len(),
        scenario.wb_detections.len(),
        scenario.hs_detections.len(),
        a.out.display()
    );
    Ok(())
}

/// One swept setting and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<String>,
}

impl Sweep {
    pub fn parse(s: &str) -> CliResult<Self> {
        let (key, values) =
            s.split_once('=').ok_or_else(|| usage(format!("--sweep must be name=v1,v2,..., got `{s}`")))?;
        let values: Vec<String> =
            values.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
        if values.is_empty() {
            return Err(usage("--sweep needs at least one value"));
        }
        let sweep = Self { key: key.trim().to_string(), values };
        let base = TrackerConfig::default();
        for v in &sweep.values {
            sweep.apply(&base, v)?;
        }
        Ok(sweep)
    }

    pub fn apply(&self, base: &TrackerConfig, value: &str) -> CliResult<TrackerConfig> {
        fn p<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
            v.parse().map_err(|_| usage(format!("bad value `{v}` for {key}")))
        }
        let mut c = base.clone();
        match self.key.as_str() {
            "tau" => c.tau = p(&self.key, value)?,
            "age" => c.age = p(&self.key, value)?,
            "gallery" => c.gallery_size = p(&self.key, value)?,
            "distance" => c.distance_mode = p(&self.key, value)?,
            "fusion" => c.fusion_mode = p(&self.key, value)?,
            "cascade" => c.cascade = p(&self.key, value)?,
            "n-init" => c.n_init = p(&self.key, value)?,
            "min-containment" => c.min_containment = p(&self.key, value)?,
            "hs-weight" => c.hs_weight = p(&self.key, value)?,
            other => return Err(usage(format!("cannot sweep `{other}`"))),
        }
        validated(c)
    }
}

struct SweepSequence {
    name: String,
    gt: io::GroundTruth,
    wb: Vec<Detection>,
    hs: Vec<Detection>,
    wb_emb: HashMap<u64, crate::types::Embedding>,
    hs_emb: HashMap<u64, crate::types::Embedding>,
    num_frames: Option<u32>,
}

impl SweepSequence {
    fn from_scenario(name: String, s: Scenario) -> Self {
        Self {
            name,
            num_frames: Some(s.spec.num_frames),
            gt: s.gt,
            wb: s.wb_detections,
            hs: s.hs_detections,
            wb_emb: s.wb_embeddings,
            hs_emb: s.hs_embeddings,
        }
    }

    fn load(dir: &Path) -> CliResult<Self> {
        let b = SequenceBundle::load(SequencePaths {
            gt: Some(dir.join(synth::GT_FILE)),
            detections_wb: Some(dir.join(synth::DET_WB_FILE)),
            detections_hs: Some(dir.join(synth::DET_HS_FILE)),
            embeddings_wb: Some(dir.join(synth::EMB_WB_FILE)),
            embeddings_hs: Some(dir.join(synth::EMB_HS_FILE)),
        })?;
        let gt = b.gt.expect("gt path given");
        let num_frames = gt.wb.max_frame().max(gt.hs.max_frame());
        Ok(Self {
            name: dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned()),
            gt,
            wb: b.detections_wb,
            hs: b.detections_hs,
            wb_emb: b.embeddings_wb,
            hs_emb: b.embeddings_hs,
            num_frames,
        })
    }

    fn track(&self, cfg: &TrackerConfig) -> crate::error::Result<TrajectorySet> {
        let input = SequenceInput {
            wb_detections: &self.wb,
            hs_detections: &self.hs,
            wb_embeddings: &self.wb_emb,
            hs_embeddings: &self.hs_emb,
            num_frames: self.num_frames,
        };
        run_sequence(&input, cfg)
    }
}

fn gt_kind_for(setting: &str, fusion: FusionMode) -> CliResult<DetectionKind> {
    match setting {
        "auto" => Ok(if fusion == FusionMode::Hs { DetectionKind::Hs } else { DetectionKind::Wb }),
        other => other.parse().map_err(|_| usage(format!("--gt-kind must be auto, wb or hs, got `{other}`"))),
    }
}

fn cmd_ablate(a: &AblateArgs) -> CliResult<()> {
    let sweep = Sweep::parse(&a.sweep)?;
    let base = validated(a.tracker.config())?;
    gt_kind_for(&a.gt_kind, base.fusion_mode)?;
    let mut sequences = Vec::new();
    if a.data.is_empty() {
        let spec = resolve_spec(a.preset.as_deref(), a.spec.as_deref(), a.seed)?;
        let name = a.preset.clone().unwrap_or_else(|| "spec".into());
        sequences.push(SweepSequence::from_scenario(name, generate_scenario(&spec)?));
    } else {
        for dir in &a.data {
            let mut s = SweepSequence::load(dir)?;
            filter_conf(&mut s.wb, a.tracker.min_conf);
            filter_conf(&mut s.hs, a.tracker.min_conf);
            sequences.push(s);
        }
    }

    let configs: Vec<TrackerConfig> = sweep.values.iter().map(|v| sweep.apply(&base, v)).collect::<CliResult<_>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..configs.len()).flat_map(|c| (0..sequences.len()).map(move |s| (c, s))).collect();
    let results: Vec<SequenceMetrics> = jobs
        .par_iter()
        .map(|&(c, s)| -> CliResult<_> {
            let cfg = &configs[c];
            let seq = &sequences[s];
            let pred = seq.track(cfg)?;
            let kind = gt_kind_for(&a.gt_kind, cfg.fusion_mode)?;
            log::info!("{}={} on {}: {} tracks", sweep.key, sweep.values[c], seq.name, pred.ids().len());
            Ok(evaluate(seq.gt.kind(kind), &pred, a.metrics, &a.loc_grid)?)
        })
        .collect::<CliResult<_>>()?;

    let mut config = vec![("sweep".to_string(), sweep.key.clone())];
    config
        .extend(config_lines(&base, a.tracker.min_conf).into_iter().filter(|(k, _)| *k != sweep.key.replace('-', "_")));
    config.push(("metrics".into(), a.metrics.to_string()));
    config.push(("loc_grid".into(), a.loc_grid.to_string()));
    config.push(("sequences".into(), sequences.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(",")));
    let mut report = MetricReport::new(config);
    for (c, value) in sweep.values.iter().enumerate() {
        let per: Vec<&SequenceMetrics> = results[c * sequences.len()..(c + 1) * sequences.len()].iter().collect();
        report.push_metrics(&format!("{}={value}", sweep.key), &aggregate(&per), a.metrics);
    }
    emit(&report, a.out.as_deref(), a.format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s = Sweep::parse("tau=0.5, 0.6").unwrap();
        assert_eq!(s.values, ["0.5", "0.6"]);
        assert_eq!(s.apply(&TrackerConfig::default(), "0.6").unwrap().tau, 0.6);
        assert!(matches!(Sweep::parse("tau="), Err(CliError::Usage(_))));
        assert!(matches!(Sweep::parse("tau=abc"), Err(CliError::Usage(_))));
        assert!(matches!(Sweep::parse("speed=1"), Err(CliError::Usage(_))));
        assert_eq!(
            Sweep::parse("age=30,inf").unwrap().apply(&TrackerConfig::default(), "inf").unwrap().age,
            Age::Infinite
        );
    }

    #[test]
    fn gt_kind_auto() {
        assert_eq!(gt_kind_for("auto", FusionMode::Hs).unwrap(), DetectionKind::Hs);
        assert_eq!(gt_kind_for("auto", FusionMode::WbHs).unwrap(), DetectionKind::Wb);
        assert!(gt_kind_for("xx", FusionMode::Wb).is_err());
    }
}
