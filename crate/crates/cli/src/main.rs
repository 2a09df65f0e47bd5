use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddsmetrics_core::report::{
    eval_csv, format_number as num, render_heatmap, render_line_chart, report_json, sweep_csv, ChartStyle, HeatMetric,
    Series,
};
use ddsmetrics_core::{
    bounds, evaluate_capped, snap_multiplier, sweep_bits, sweep_grid, sweep_multiplier, BitsAxis,
    BoundVariant, MultiplierAxis, QuantizationMode, QuantizerConfig, SamplingPlan, SignalSpec,
    SweepKind, SweepResult, SweepSpec, TimingConfig, WaveformModel,
};

/// Error and distortion metrics for quantized and sample-held sine synthesis.
#[derive(Parser, Debug)]
#[command(name = "ddsmetrics", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one model and print its report
    Eval(EvalArgs),
    /// Sweep bit count, multiplier, or both, and write a CSV table
    Sweep(SweepArgs),
    /// Print the closed-form error bounds for one configuration
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Target,
    Quantized,
    Held,
    Digitized,
}

impl ModelArg {
    fn name(self) -> &'static str {
        match self {
            ModelArg::Target => "target",
            ModelArg::Quantized => "quantized",
            ModelArg::Held => "held",
            ModelArg::Digitized => "digitized",
        }
    }

    fn has_bits(self) -> bool {
        matches!(self, ModelArg::Quantized | ModelArg::Digitized)
    }

    fn has_timing(self) -> bool {
        matches!(self, ModelArg::Held | ModelArg::Digitized)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Floor,
    Round,
    Ceiling,
}

impl From<ModeArg> for QuantizationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Floor => QuantizationMode::Floor,
            ModeArg::Round => QuantizationMode::Round,
            ModeArg::Ceiling => QuantizationMode::Ceiling,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Bits,
    Multiplier,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Metric {
    Error,
    Thd,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Target frequency in Hz
    #[arg(long, default_value_t = 1.0)]
    freq: f64,
    #[arg(long)]
    bits: Option<u32>,
    /// Quantizer rounding [default: floor]
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Updates per target period
    #[arg(long, conflicts_with = "dt")]
    multiplier: Option<f64>,
    /// Update gap in seconds
    #[arg(long)]
    dt: Option<f64>,
    /// Denominator limit when snapping the multiplier to a fraction
    #[arg(long, default_value_t = 16)]
    qmax: u64,
    /// Uniform probes per combined period
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// DFT points per hold step
    #[arg(long, default_value_t = 64)]
    samples_per_step: usize,
    #[arg(long, default_value_t = 1 << 24)]
    dft_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path, `-` for stdout
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(value_enum)]
    kind: SweepArg,
    #[arg(long)]
    bits_from: Option<u32>,
    #[arg(long)]
    bits_to: Option<u32>,
    #[arg(long)]
    bits_stride: Option<u32>,
    /// First multiplier as a power of ten
    #[arg(long)]
    decades_from: Option<f64>,
    /// Last multiplier as a power of ten
    #[arg(long)]
    decades_to: Option<f64>,
    #[arg(long)]
    points_per_decade: Option<u32>,
    /// Explicit multiplier list instead of a decade range
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["decades_from", "decades_to", "points_per_decade"])]
    multipliers: Option<Vec<f64>>,
    #[arg(long)]
    qmax: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    samples_per_step: usize,
    #[arg(long, default_value_t = 1 << 24)]
    dft_cap: usize,
    /// CSV output path, `-` for stdout
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Also write a chart
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Metric shown in the chart
    #[arg(long, value_enum, default_value_t = Metric::Error)]
    metric: Metric,
    /// Evaluate rows on one thread
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, default_value_t = 1.0)]
    freq: f64,
    #[arg(long, conflicts_with = "multiplier")]
    dt: Option<f64>,
    #[arg(long)]
    multiplier: Option<f64>,
    #[arg(long)]
    bits: Option<u32>,
}

/// Failure with its exit status.
enum Failure {
    Usage(String),
    Runtime(String),
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn runtime(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

fn config(e: ddsmetrics_core::Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn write_output(path: &Path, text: &str) -> Outcome<()> {
    if path == Path::new("-") {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| runtime(format!("stdout: {e}")))
    } else {
        fs::write(path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
    }
}

fn plan(samples: usize) -> SamplingPlan {
    SamplingPlan {
        samples_per_period: samples,
        ..SamplingPlan::default()
    }
}

fn timing_for(spec: &SignalSpec, multiplier: Option<f64>, dt: Option<f64>, qmax: u64) -> Outcome<Option<TimingConfig>> {
    let m = match (multiplier, dt) {
        (Some(m), _) => m,
        (None, Some(dt)) => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(usage(format!("--dt must be positive, got {dt}")));
            }
            1.0 / (spec.frequency_hz() * dt)
        }
        (None, None) => return Ok(None),
    };
    snap_multiplier(m, qmax).map(Some).map_err(config)
}

fn eval(args: EvalArgs) -> Outcome<()> {
    let model = args.model;
    let name = model.name();
    if args.bits.is_some() && !model.has_bits() {
        return Err(usage(format!("--bits not valid for model '{name}'")));
    }
    if args.mode.is_some() && !model.has_bits() {
        return Err(usage(format!("--mode not valid for model '{name}'")));
    }
    if !model.has_timing() {
        if args.multiplier.is_some() {
            return Err(usage(format!("--multiplier not valid for model '{name}'")));
        }
        if args.dt.is_some() {
            return Err(usage(format!("--dt not valid for model '{name}'")));
        }
    }

    let spec = SignalSpec::new(args.freq).map_err(config)?;
    let quantizer = match (model.has_bits(), args.bits) {
        (true, Some(b)) => Some(
            QuantizerConfig::new(b, args.mode.unwrap_or(ModeArg::Floor).into()).map_err(config)?,
        ),
        (true, None) => return Err(usage(format!("--bits required for model '{name}'"))),
        (false, _) => None,
    };
    let timing = if model.has_timing() {
        let t = timing_for(&spec, args.multiplier, args.dt, args.qmax)?;
        Some(t.ok_or_else(|| usage(format!("--multiplier or --dt required for model '{name}'")))?)
    } else {
        None
    };

    let waveform = match (timing, quantizer) {
        (None, None) => WaveformModel::target(spec),
        (None, Some(q)) => WaveformModel::quantized(spec, q),
        (Some(t), None) => WaveformModel::held(spec, t),
        (Some(t), Some(q)) => WaveformModel::digitized(spec, t, q),
    };
    plan(args.samples).validate().map_err(config)?;
    let report = evaluate_capped(&waveform, &plan(args.samples), args.samples_per_step, args.dft_cap)
        .map_err(|e| match e {
            ddsmetrics_core::Error::InvalidArgument(m) => usage(m),
            e => runtime(e),
        })?;
    let text = match args.format {
        Format::Json => report_json(&report) + "\n",
        Format::Csv => eval_csv(&report),
    };
    write_output(&args.out, &text)
}

fn reject(kind: SweepArg, flag: &str, present: bool) -> Outcome<()> {
    if present {
        let k = match kind {
            SweepArg::Bits => "bits",
            SweepArg::Multiplier => "multiplier",
            SweepArg::Grid => "grid",
        };
        return Err(usage(format!("{flag} not valid for sweep '{k}'")));
    }
    Ok(())
}

fn sweep_spec(args: &SweepArgs) -> Outcome<SweepSpec> {
    let kind = args.kind;
    if kind == SweepArg::Multiplier {
        reject(kind, "--bits-from", args.bits_from.is_some())?;
        reject(kind, "--bits-to", args.bits_to.is_some())?;
        reject(kind, "--bits-stride", args.bits_stride.is_some())?;
        reject(kind, "--mode", args.mode.is_some())?;
    }
    if kind == SweepArg::Bits {
        reject(kind, "--decades-from", args.decades_from.is_some())?;
        reject(kind, "--decades-to", args.decades_to.is_some())?;
        reject(kind, "--points-per-decade", args.points_per_decade.is_some())?;
        reject(kind, "--multipliers", args.multipliers.is_some())?;
        reject(kind, "--qmax", args.qmax.is_some())?;
    }

    let mut spec = SweepSpec::default();
    spec.bits = BitsAxis {
        from: args.bits_from.unwrap_or(spec.bits.from),
        to: args.bits_to.unwrap_or(spec.bits.to),
        stride: args.bits_stride.unwrap_or(spec.bits.stride),
    };
    spec.multiplier = match (&args.multipliers, &spec.multiplier) {
        (Some(list), _) => MultiplierAxis::Explicit(list.clone()),
        (
            None,
            MultiplierAxis::Decades {
                from,
                to,
                points_per_decade,
            },
        ) => MultiplierAxis::Decades {
            from: args.decades_from.unwrap_or(*from),
            to: args.decades_to.unwrap_or(*to),
            points_per_decade: args.points_per_decade.unwrap_or(*points_per_decade),
        },
        (None, axis) => axis.clone(),
    };
    if let Some(m) = args.mode {
        spec.mode = m.into();
    }
    if let Some(q) = args.qmax {
        spec.q_max = q;
    }
    spec.plan = plan(args.samples);
    spec.samples_per_step = args.samples_per_step;
    spec.dft_cap = args.dft_cap;
    spec.parallel = !args.sequential;
    Ok(spec)
}

fn chart(result: &SweepResult, metric: Metric) -> ddsmetrics_core::Result<String> {
    match (result.kind, metric) {
        (SweepKind::Bits, Metric::Error) => {
            render_line_chart(result, &ChartStyle::bits_error(), &[Series::MaxErrorPct])
        }
        (SweepKind::Bits, Metric::Thd) => {
            render_line_chart(result, &ChartStyle::bits_thd(), &[Series::ThdDb])
        }
        (SweepKind::Multiplier, Metric::Error) => render_line_chart(
            result,
            &ChartStyle::multiplier_error(),
            &[Series::MaxError, Series::StrictBound],
        ),
        (SweepKind::Multiplier, Metric::Thd) => {
            render_line_chart(result, &ChartStyle::multiplier_thd(), &[Series::ThdDb])
        }
        (SweepKind::Grid, Metric::Error) => render_heatmap(
            result,
            &ChartStyle::heatmap(HeatMetric::MaxError),
            HeatMetric::MaxError,
        ),
        (SweepKind::Grid, Metric::Thd) => {
            render_heatmap(result, &ChartStyle::heatmap(HeatMetric::ThdDb), HeatMetric::ThdDb)
        }
    }
}

fn sweep(args: SweepArgs) -> Outcome<()> {
    let spec = sweep_spec(&args)?;
    let result = match args.kind {
        SweepArg::Bits => sweep_bits(&spec),
        SweepArg::Multiplier => sweep_multiplier(&spec),
        SweepArg::Grid => sweep_grid(&spec),
    }
    .map_err(|e| match e {
        ddsmetrics_core::Error::InvalidArgument(m) => usage(m),
        e => runtime(e),
    })?;
    let csv = sweep_csv(&result);
    let svg = match &args.svg {
        Some(_) => Some(chart(&result, args.metric).map_err(runtime)?),
        None => None,
    };
    write_output(&args.out, &csv)?;
    if let (Some(path), Some(text)) = (&args.svg, svg) {
        write_output(path, &text)?;
    }
    Ok(())
}

fn print_bounds(args: BoundsArgs) -> Outcome<()> {
    let spec = SignalSpec::new(args.freq).map_err(config)?;
    let mut lines = vec![format!("full_scale_range {}", num(bounds::full_scale_range()))];
    if let Some(b) = args.bits {
        let q = ddsmetrics_core::quantization_error_bound(b).map_err(config)?;
        lines.push(format!("quantization {}", num(q)));
    }
    let dt = match (args.dt, args.multiplier) {
        (Some(dt), _) => Some(dt),
        (None, Some(m)) if m.is_finite() && m > 0.0 => Some(1.0 / (m * spec.frequency_hz())),
        (None, Some(m)) => return Err(usage(format!("--multiplier must be positive, got {m}"))),
        (None, None) => None,
    };
    if let Some(dt) = dt {
        let f = spec.frequency_hz();
        lines.push(format!("min_clock_hz {}", num(bounds::min_clock_frequency(dt).map_err(config)?)));
        lines.push(format!("max_phase_shift_rad {}", num(bounds::max_phase_shift(f, dt).map_err(config)?)));
        for (label, v) in [("paper", BoundVariant::Paper), ("strict", BoundVariant::Strict)] {
            let h = bounds::held_error_bound(f, dt, v).map_err(config)?;
            lines.push(format!("held_{label} {}", num(h)));
            if let Some(b) = args.bits {
                let d = bounds::digitized_error_bound(f, dt, b, v).map_err(config)?;
                lines.push(format!("digitized_{label} {}", num(d)));
            }
        }
    }
    write_output(Path::new("-"), &(lines.join("\n") + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Bounds(a) => print_bounds(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
