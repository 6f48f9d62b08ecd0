use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roomscope::auralize::convolve;
use roomscope::geometry::{Point3, RoomGeometry};
use roomscope::report::{analyze, emit, render_markdown, AnalyzeOptions, EmitRequest, MetricsReport};
use roomscope::signal::to_mono;
use roomscope::simulate::{
    generate_dataset, simulate_record, validate_batch, write_dataset, DatasetOptions, DatasetRanges,
    SimulationConfig, TailModel,
};
use roomscope::spatial::SchroederFormula;
use roomscope::spectral::DEFAULT_WATERFALL_SLICES;
use roomscope::wav::{load_wav, save_wav};
use roomscope::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_UNREADABLE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_SCHEMA: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "roomscope", version, about = "Room impulse response analysis, simulation and auralization")]
struct Cli {
    /// Seed for every random draw (simulated rooms and noise tails).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Extra output file; the stem selects the data (edc, modes, reflections,
    /// spectrum, spectrogram, waterfall, octave, fingerprint, compliance,
    /// metrics, report) and the extension the format.
    #[arg(long, global = true, value_name = "PATH")]
    emit: Vec<PathBuf>,

    /// Write the command's JSON result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,

    /// Suppress warnings and progress messages.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a WAV impulse response and print the metrics report as JSON.
    Analyze(AnalyzeArgs),
    /// Generate simulated shoebox-room impulse responses.
    Simulate(SimulateArgs),
    /// Convolve a dry recording with an impulse response.
    Auralize(AuralizeArgs),
    /// Render a saved metrics report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct RoomArgs {
    /// Room dimensions as LxWxH in meters.
    #[arg(long, value_name = "LxWxH", value_parser = parse_dims, requires_all = ["source", "receiver"])]
    room: Option<Point3>,
    /// Source position x,y,z in meters.
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, requires = "room")]
    source: Option<Point3>,
    /// Receiver position x,y,z in meters.
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, requires = "room")]
    receiver: Option<Point3>,
}

impl RoomArgs {
    fn geometry(&self) -> Result<Option<RoomGeometry>, Error> {
        match (self.room, self.source, self.receiver) {
            (Some(dims), Some(s), Some(r)) => RoomGeometry::new(dims, s, r).map(Some),
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormulaArg {
    /// 2000 * sqrt(RT60 / V)
    Classic,
    /// 4 * RT60 * V^(1/3)
    CubeRootVolume,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[command(flatten)]
    room: RoomArgs,
    /// Room volume in m^3 when no geometry is given (or to override it).
    #[arg(long, value_name = "M3")]
    volume: Option<f64>,
    /// Signal-to-noise ratio in dB, overriding the estimate.
    #[arg(long, value_name = "DB")]
    snr: Option<f64>,
    /// Upper integration limit for IACC in seconds.
    #[arg(long, value_name = "S", default_value_t = roomscope::spatial::EARLY_IACC_LIMIT_S)]
    iacc_limit: f64,
    #[arg(long, value_enum, default_value = "classic")]
    schroeder_formula: FormulaArg,
    /// Highest room-mode frequency listed, in Hz.
    #[arg(long, value_name = "HZ", default_value_t = 300.0)]
    modes_max: f64,
    /// Spectrogram window length in seconds.
    #[arg(long, value_name = "S", default_value_t = roomscope::spectral::DEFAULT_WINDOW_S)]
    window: f64,
    /// Spectrogram hop in seconds.
    #[arg(long, value_name = "S", default_value_t = roomscope::spectral::DEFAULT_HOP_S)]
    hop: f64,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_WATERFALL_SLICES)]
    waterfall_slices: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    General,
    Classroom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TailArg {
    None,
    ExponentialNoise,
}

impl From<TailArg> for TailModel {
    fn from(t: TailArg) -> Self {
        match t {
            TailArg::None => TailModel::None,
            TailArg::ExponentialNoise => TailModel::ExponentialNoise,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Output directory for WAV files and metadata.jsonl.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Number of random rooms.
    #[arg(long, default_value_t = 1, conflicts_with_all = ["room", "config"])]
    n: usize,
    /// Maximum reflection order.
    #[arg(long, default_value_t = 12)]
    order: u32,
    #[arg(long, default_value_t = 48_000)]
    sample_rate: u32,
    #[arg(long, value_enum, default_value = "exponential-noise")]
    tail: TailArg,
    /// Parameter ranges for random rooms.
    #[arg(long, value_enum, default_value = "general")]
    preset: Preset,
    /// Simulate one fixed room instead of random ones.
    #[command(flatten)]
    room: RoomArgs,
    /// Absorption for a fixed room: one value or six (x0,xL,y0,yW,floor,ceiling).
    #[arg(long, value_name = "A[,A...]", value_parser = parse_absorption, requires = "room")]
    absorption: Option<[f64; 6]>,
    /// JSON file holding a full simulation config.
    #[arg(long, value_name = "PATH", conflicts_with = "room")]
    config: Option<PathBuf>,
    /// Run the plausibility checks and output the validation report.
    #[arg(long)]
    validate: bool,
}

#[derive(Debug, Args)]
struct AuralizeArgs {
    dry: PathBuf,
    rir: PathBuf,
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Markdown,
    Json,
}

#[derive(Debug, Args)]
struct ReportArgs {
    report: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    format: ReportFormat,
    /// Write the document here instead of stdout.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

fn parse_triple(s: &str, sep: char) -> Result<Point3, String> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != 3 {
        return Err(format!("expected three values separated by '{sep}', got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
        if !o.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(out)
}

fn parse_dims(s: &str) -> Result<Point3, String> {
    let dims = parse_triple(&s.to_ascii_lowercase(), 'x')?;
    if dims.iter().any(|d| *d <= 0.0) {
        return Err("dimensions must be positive".into());
    }
    Ok(dims)
}

fn parse_point(s: &str) -> Result<Point3, String> {
    parse_triple(s, ',')
}

fn parse_absorption(s: &str) -> Result<[f64; 6], String> {
    let values = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match values[..] {
        [a] => Ok([a; 6]),
        [a, b, c, d, e, f] => Ok([a, b, c, d, e, f]),
        _ => Err(format!("expected 1 or 6 values, got {}", values.len())),
    }
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } | Error::Format(_) | Error::UnsupportedFormat(_) => EXIT_UNREADABLE,
            Error::EmptyInput(_)
            | Error::DegenerateInput(_)
            | Error::InvalidSignal(_)
            | Error::TooShort { .. }
            | Error::ChannelCount { .. }
            | Error::InsufficientDecayRange { .. } => EXIT_DEGENERATE,
            Error::Schema(_) => EXIT_SCHEMA,
            Error::InvalidArgument(_) | Error::Geometry(_) | Error::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

struct Ctx {
    seed: u64,
    emit: Vec<PathBuf>,
    json_out: Option<PathBuf>,
    quiet: bool,
}

impl Ctx {
    fn warn(&self, msg: &str) {
        if !self.quiet {
            eprintln!("warning: {msg}");
        }
    }

    fn info(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    /// Writes a JSON result to `--json-out`, or prints it.
    fn output_json(&self, text: &str) -> Result<(), Failure> {
        match &self.json_out {
            Some(path) => write_text(path, text),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e).into())
}

fn cmd_analyze(ctx: &Ctx, args: AnalyzeArgs) -> Result<(), Failure> {
    // Check emit names before the analysis so a typo fails fast.
    let requests = ctx
        .emit
        .iter()
        .map(EmitRequest::parse)
        .collect::<Result<Vec<_>, _>>()?;
    let rir = load_wav(&args.input)?;
    let options = AnalyzeOptions {
        geometry: args.room.geometry()?,
        volume_m3: args.volume,
        snr_db: args.snr,
        iacc_limit_s: args.iacc_limit,
        schroeder_formula: match args.schroeder_formula {
            FormulaArg::Classic => SchroederFormula::Classic,
            FormulaArg::CubeRootVolume => SchroederFormula::CubeRootVolume,
        },
        modes_max_hz: args.modes_max,
        window_s: args.window,
        hop_s: args.hop,
    };
    let analysis = analyze(&rir, &args.input.display().to_string(), &options)?;
    for request in &requests {
        emit(&analysis, request, args.waterfall_slices)?;
        ctx.info(&format!("wrote {}", request.path.display()));
    }
    ctx.output_json(&analysis.report.to_json()?)
}

fn cmd_simulate(ctx: &Ctx, args: SimulateArgs) -> Result<(), Failure> {
    if !ctx.emit.is_empty() {
        ctx.warn("--emit applies to analyze and is ignored here");
    }
    let records = if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: SimulationConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        vec![simulate_record(0, config)?]
    } else if let Some(geom) = args.room.geometry()? {
        let config = SimulationConfig {
            geom,
            absorption: args.absorption.unwrap_or([0.3; 6]),
            max_order: args.order,
            sample_rate: args.sample_rate,
            tail: args.tail.into(),
            seed: ctx.seed,
        };
        vec![simulate_record(0, config)?]
    } else {
        let options = DatasetOptions {
            ranges: match args.preset {
                Preset::General => DatasetRanges::default(),
                Preset::Classroom => DatasetRanges::classroom(),
            },
            max_order: args.order,
            sample_rate: args.sample_rate,
            tail: args.tail.into(),
            ..DatasetOptions::new(args.n, ctx.seed)
        };
        generate_dataset(&options)?
    };
    let meta = write_dataset(&records, &args.out)?;
    ctx.info(&format!("wrote {} impulse responses and {}", records.len(), meta.display()));
    if args.validate {
        let report = validate_batch(&records);
        ctx.output_json(&serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn cmd_auralize(ctx: &Ctx, args: AuralizeArgs) -> Result<(), Failure> {
    let dry = load_wav(&args.dry)?;
    let mut rir = load_wav(&args.rir)?;
    if rir.num_channels() > 1 {
        ctx.warn("impulse response has more than one channel; using the mono downmix");
        rir = to_mono(&rir);
    }
    let result = convolve(&dry, &rir)?;
    if let Some(from) = result.resampled_from_hz {
        ctx.warn(&format!(
            "impulse response resampled from {from} Hz to {} Hz",
            dry.sample_rate()
        ));
    }
    save_wav(&args.out, &result.output)?;
    ctx.info(&format!("wrote {} (gain {:.4})", args.out.display(), result.gain));
    Ok(())
}

fn cmd_report(ctx: &Ctx, args: ReportArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.report).map_err(|e| Error::io(&args.report, e))?;
    let report = MetricsReport::from_json(&text)?;
    let doc = match args.format {
        ReportFormat::Markdown => render_markdown(&report),
        ReportFormat::Json => report.to_json()?,
    };
    match args.output.as_ref().or(ctx.json_out.as_ref()) {
        Some(path) => write_text(path, &doc),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let ctx = Ctx {
        seed: cli.seed,
        emit: cli.emit,
        json_out: cli.json_out,
        quiet: cli.quiet,
    };
    let result = match cli.command {
        Command::Analyze(args) => cmd_analyze(&ctx, args),
        Command::Simulate(args) => cmd_simulate(&ctx, args),
        Command::Auralize(args) => cmd_auralize(&ctx, args),
        Command::Report(args) => cmd_report(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
