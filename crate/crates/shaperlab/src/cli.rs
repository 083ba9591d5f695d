//! `shaperlab` command line. Each subcommand reads files, calls the library
//! and writes its outputs atomically.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shaperlab_core::dynamics::{insensitivity_bandwidth, sensitivity_curve};
use shaperlab_core::{
    design_shaper, identify_parameters, shape_command, EpochRecord, IdentifyConfig,
    SecondOrderParams, ShaperKind,
};

use crate::dataset::{fmt_f64, load_dataset, write_dataset, Dataset, DatasetMeta, Excitation};
use crate::error::{Error, Result};
use crate::eval::{run_comparison, ComparisonConfig, IdentifierChoice, Pipeline};
use crate::fsutil::write_atomic;
use crate::protocol::ProtocolParams;
use crate::report::{convergence_csv, positions_csv, render_table, ParamsOut};
use crate::svg::{LineChart, Series};
use crate::synth::generate_synthetic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "shaperlab",
    version,
    about = "Identify a second-order plant, design zero-vibration shapers and compare them.",
    after_help = "Units: time s, frequency rad/s unless marked Hz, displacement mm.\nSHAPERLAB_SEED is read when --seed is not given."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a plant response and write it as a dataset CSV.
    Simulate(SimulateArgs),
    /// Estimate natural frequency and damping from a dataset.
    Identify(IdentifyArgs),
    /// Design an impulse train and optionally shape a command file.
    Shape(ShapeArgs),
    /// Residual vibration against frequency error.
    Sensitivity(SensitivityArgs),
    /// Compare identification and shaping pipelines over datasets.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExcitationKind {
    Step,
    Pulse,
    Shaped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Zv,
    Zvd,
    Zvdd,
}

impl From<KindArg> for ShaperKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Zv => ShaperKind::Zv,
            KindArg::Zvd => ShaperKind::Zvd,
            KindArg::Zvdd => ShaperKind::Zvdd,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Natural frequency [rad/s]
    #[arg(long)]
    pub omega_n: f64,
    /// Damping ratio [-], 0 <= zeta < 1
    #[arg(long)]
    pub zeta: f64,
    /// Command applied from t = 0
    #[arg(long, value_enum, default_value = "step")]
    pub excitation: ExcitationKind,
    /// Command level [mm]
    #[arg(long, default_value_t = 1.0)]
    pub level: f64,
    /// Pulse length for --excitation pulse [s]
    #[arg(long, default_value_t = 0.5)]
    pub pulse_width: f64,
    /// Shaper for --excitation shaped
    #[arg(long, value_enum, default_value = "zvd")]
    pub shaper: KindArg,
    /// Frequency the shaper is tuned to [rad/s] (default: --omega-n)
    #[arg(long)]
    pub shaper_omega_n: Option<f64>,
    /// Damping the shaper is tuned to [-] (default: --zeta)
    #[arg(long)]
    pub shaper_zeta: Option<f64>,
    /// Record length [s]
    #[arg(long, default_value_t = 5.0)]
    pub duration: f64,
    /// Sample rate [Hz], at most 1000
    #[arg(long, default_value_t = 100.0)]
    pub rate: f64,
    /// Gaussian sensor noise standard deviation [mm]
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Noise seed
    #[arg(long, env = "SHAPERLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Record label written to the metadata
    #[arg(long)]
    pub label: Option<String>,
    /// Payload mass metadata [kg]
    #[arg(long)]
    pub payload_kg: Option<f64>,
    /// Beam length metadata [m]
    #[arg(long)]
    pub beam_m: Option<f64>,
    /// Output dataset CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Also plot the record to this SVG file
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Sensor noise standard deviation used as the filter's R [mm]
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Sigma-point spread alpha [-]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Prior distribution parameter beta [-]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Secondary scaling kappa [-]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Epoch limit
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Tolerance on the summed absolute training error [mm]
    #[arg(long)]
    pub tol: Option<f64>,
}

impl FilterArgs {
    fn config(&self) -> Result<IdentifyConfig> {
        let mut cfg = match self.noise_sigma {
            Some(s) => IdentifyConfig::with_sensor_noise(s)
                .map_err(|e| usage(e, "--noise-sigma must be > 0"))?,
            None => IdentifyConfig::default(),
        };
        let f = &cfg.filter;
        let (a, b, k) = (
            self.alpha.unwrap_or(f.alpha),
            self.beta.unwrap_or(f.beta),
            self.kappa.unwrap_or(f.kappa),
        );
        cfg.filter = cfg
            .filter
            .with_spread(a, b, k)
            .map_err(|e| usage(e, "use --alpha in (0, 1], --beta >= 0 and n + kappa > 0"))?;
        if let Some(m) = self.max_epochs {
            cfg.filter.max_epochs = m;
        }
        if let Some(t) = self.tol {
            cfg.filter.tol = t;
        }
        cfg.validate()
            .map_err(|e| usage(e, "use --max-epochs >= 1 and --tol > 0"))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    /// Input dataset CSV
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Initial natural frequency [rad/s] (default: rough estimate from the data)
    #[arg(long, requires = "guess_zeta")]
    pub guess_omega: Option<f64>,
    /// Initial damping ratio [-]
    #[arg(long, requires = "guess_omega")]
    pub guess_zeta: Option<f64>,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Output estimate JSON
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch training error CSV
    #[arg(long)]
    pub curve_csv: Option<PathBuf>,
    /// Per-epoch training error SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// Shaper family
    #[arg(long, value_enum, default_value = "zvd")]
    pub kind: KindArg,
    /// Design natural frequency [rad/s]
    #[arg(long)]
    pub omega_n: f64,
    /// Design damping ratio [-]
    #[arg(long)]
    pub zeta: f64,
    /// Output impulse train JSON
    #[arg(long)]
    pub out: PathBuf,
    /// Command CSV to shape, in dataset format [mm]
    #[arg(long, requires = "shaped")]
    pub command: Option<PathBuf>,
    /// Output shaped command CSV
    #[arg(long, requires = "command")]
    pub shaped: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    /// Shaper families, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "zv,zvd,zvdd")]
    pub kind: Vec<KindArg>,
    /// Design natural frequency [rad/s]
    #[arg(long)]
    pub omega_n: f64,
    /// Design damping ratio [-]
    #[arg(long)]
    pub zeta: f64,
    /// Lowest actual/design frequency ratio [-]
    #[arg(long, default_value_t = 0.5)]
    pub lo: f64,
    /// Highest actual/design frequency ratio [-]
    #[arg(long, default_value_t = 1.5)]
    pub hi: f64,
    /// Curve points
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Residual vibration level defining the insensitivity bandwidth [-]
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    /// Output curve CSV
    #[arg(long)]
    pub out: PathBuf,
    /// Output curve SVG
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset CSV files, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub datasets: Vec<PathBuf>,
    /// Pipelines, comma separated: uzs, unshaped, or <ident>-<shaper> with
    /// ident in ukf|fixed|rough|grid and shaper in zv|zvd|zvdd
    #[arg(long, value_delimiter = ',', default_value = "uzs,fixed-zvd")]
    pub methods: Vec<String>,
    /// Trials per dataset
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Samples drawn per trial
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// Training share of each trial's samples [-]
    #[arg(long, default_value_t = 0.9)]
    pub train_fraction: f64,
    /// Master seed
    #[arg(long, env = "SHAPERLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// UKF initial natural frequency [rad/s] (default: rough estimate per dataset)
    #[arg(long, requires = "guess_zeta")]
    pub guess_omega: Option<f64>,
    /// UKF initial damping ratio [-]
    #[arg(long, requires = "guess_omega")]
    pub guess_zeta: Option<f64>,
    /// Design frequency of fixed-* shapers [rad/s] (default: rough estimate per dataset)
    #[arg(long, requires = "nominal_zeta")]
    pub nominal_omega: Option<f64>,
    /// Design damping of fixed-* shapers [-]
    #[arg(long, requires = "nominal_omega")]
    pub nominal_zeta: Option<f64>,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Move size [mm] (default: each dataset's final command value)
    #[arg(long)]
    pub step_level: Option<f64>,
    /// Signed-rank pair as candidate,baseline method names (default: first two methods)
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub compare: Option<Vec<String>>,
    /// Output report JSON
    #[arg(long)]
    pub out: PathBuf,
    /// Output text table (default: print to stdout)
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Directory for convergence.csv and positions.csv
    #[arg(long)]
    pub curves_dir: Option<PathBuf>,
    /// Directory for SVG plots
    #[arg(long)]
    pub svg_dir: Option<PathBuf>,
}

fn usage(e: impl std::fmt::Display, remedy: &str) -> Error {
    Error::InvalidArgument(format!("{e}; {remedy}"))
}

fn params(omega_n: f64, zeta: f64, flags: &str) -> Result<SecondOrderParams> {
    SecondOrderParams::new(omega_n, zeta)
        .map_err(|e| usage(e, &format!("{flags} need omega_n > 0 and 0 <= zeta < 1")))
}

fn pair(a: Option<f64>, b: Option<f64>, flags: &str) -> Result<Option<SecondOrderParams>> {
    match (a, b) {
        (Some(w), Some(z)) => params(w, z, flags).map(Some),
        _ => Ok(None),
    }
}

/// Exit status for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    use shaperlab_core::Error as Core;
    match e {
        _ if e.is_divergence() => EXIT_DIVERGED,
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Core(Core::InvalidConfig(_) | Core::InvalidArgument(_)) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Identify(a) => identify(a),
        Command::Shape(a) => shape(a),
        Command::Sensitivity(a) => sensitivity(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let plant = params(a.omega_n, a.zeta, "--omega-n/--zeta")?;
    let excitation = match a.excitation {
        ExcitationKind::Step => Excitation::Step { level: a.level },
        ExcitationKind::Pulse => {
            if !(a.pulse_width > 0.0) {
                return Err(Error::InvalidArgument("--pulse-width must be > 0 s".into()));
            }
            Excitation::Pulse {
                level: a.level,
                width: a.pulse_width,
            }
        }
        ExcitationKind::Shaped => Excitation::Shaped {
            kind: a.shaper.into(),
            design: params(
                a.shaper_omega_n.unwrap_or(a.omega_n),
                a.shaper_zeta.unwrap_or(a.zeta),
                "--shaper-omega-n/--shaper-zeta",
            )?,
            level: a.level,
        },
    };
    if !a.level.is_finite() {
        return Err(Error::InvalidArgument("--level must be finite".into()));
    }
    let mut ds = generate_synthetic(&plant, excitation, a.duration, a.rate, a.noise, a.seed)?;
    if let Some(l) = &a.label {
        ds.meta.label = Some(l.clone());
    }
    ds.meta.payload_kg = a.payload_kg;
    ds.meta.beam_m = a.beam_m;
    write_dataset(&a.out, &ds)?;
    if let Some(svg) = &a.svg {
        let command = ds.command()?;
        let chart = LineChart::new(ds.label(), "time (s)", "displacement (mm)")
            .with_series(Series::new("response", ds.series.iter().collect()))
            .with_series(Series::new(
                "command",
                ds.series
                    .iter()
                    .map(|(t, _)| (t, command.value_at(t)))
                    .collect(),
            ));
        write_text(svg, &chart.render())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EpochOut {
    epoch: usize,
    error: f64,
    omega_n: f64,
    zeta: f64,
}

impl From<&EpochRecord> for EpochOut {
    fn from(e: &EpochRecord) -> Self {
        Self {
            epoch: e.epoch,
            error: e.error,
            omega_n: e.omega_n,
            zeta: e.zeta,
        }
    }
}

#[derive(Serialize)]
struct EstimateOut {
    input: String,
    omega_n: f64,
    zeta: f64,
    omega_d: f64,
    guess: ParamsOut,
    stop: String,
    clamp_warning: bool,
    max_asymmetry: f64,
    min_eigenvalue: f64,
    epochs: Vec<EpochOut>,
    rejected: Option<EpochOut>,
}

fn identify(a: &IdentifyArgs) -> Result<()> {
    let cfg = a.filter.config()?;
    let guess_flag = pair(a.guess_omega, a.guess_zeta, "--guess-omega/--guess-zeta")?;
    let ds = load_dataset(&a.input)?;
    let guess = match guess_flag {
        Some(g) => g,
        None => ds.rough_guess()?,
    };
    let (est, conv) = identify_parameters(&ds.series, &ds.command()?, &guess, &cfg)?;
    let out = EstimateOut {
        input: a.input.display().to_string(),
        omega_n: est.omega_n(),
        zeta: est.zeta(),
        omega_d: est.omega_d(),
        guess: ParamsOut {
            omega_n: guess.omega_n(),
            zeta: guess.zeta(),
        },
        stop: format!("{:?}", conv.stop),
        clamp_warning: conv.clamp_warning,
        max_asymmetry: conv.max_asymmetry,
        min_eigenvalue: conv.min_eigenvalue,
        epochs: conv.epochs.iter().map(EpochOut::from).collect(),
        rejected: conv.rejected.as_ref().map(EpochOut::from),
    };
    write_json(&a.out, &out)?;
    if let Some(path) = &a.curve_csv {
        let mut s = String::from("epoch,error,omega_n,zeta\n");
        for e in &conv.epochs {
            s.push_str(&format!(
                "{},{},{},{}\n",
                e.epoch,
                fmt_f64(e.error),
                fmt_f64(e.omega_n),
                fmt_f64(e.zeta)
            ));
        }
        write_text(path, &s)?;
    }
    if let Some(path) = &a.svg {
        let chart = LineChart::new("training error", "epoch", "summed abs. error (mm)")
            .with_series(Series::new(
                ds.label(),
                conv.epochs
                    .iter()
                    .map(|e| (e.epoch as f64, e.error))
                    .collect(),
            ));
        write_text(path, &chart.render())?;
    }
    if conv.clamp_warning {
        eprintln!("warning: parameter estimate hit a physical bound during filtering");
    }
    println!("omega_n={} zeta={}", est.omega_n(), est.zeta());
    Ok(())
}

#[derive(Serialize)]
struct ImpulseOut {
    amplitude: f64,
    time: f64,
}

#[derive(Serialize)]
struct TrainOut {
    kind: String,
    omega_n: f64,
    zeta: f64,
    k_factor: f64,
    duration: f64,
    impulses: Vec<ImpulseOut>,
}

fn shape(a: &ShapeArgs) -> Result<()> {
    let p = params(a.omega_n, a.zeta, "--omega-n/--zeta")?;
    let design = design_shaper(a.kind.into(), &p);
    let train = design.train();
    write_json(
        &a.out,
        &TrainOut {
            kind: design.kind.to_string(),
            omega_n: p.omega_n(),
            zeta: p.zeta(),
            k_factor: design.k_factor,
            duration: train.duration(),
            impulses: train
                .impulses()
                .iter()
                .map(|i| ImpulseOut {
                    amplitude: i.amplitude,
                    time: i.time,
                })
                .collect(),
        },
    )?;
    if let (Some(input), Some(output)) = (&a.command, &a.shaped) {
        let cmd = load_dataset(input)?;
        let shaped = Dataset {
            series: shape_command(&cmd.series, train),
            meta: DatasetMeta {
                label: Some(format!("{} {}", cmd.label(), design.kind)),
                ..DatasetMeta::default()
            },
            ground_truth: None,
        };
        write_dataset(output, &shaped)?;
    }
    Ok(())
}

fn sensitivity(a: &SensitivityArgs) -> Result<()> {
    let p = params(a.omega_n, a.zeta, "--omega-n/--zeta")?;
    if !(a.threshold > 0.0) {
        return Err(Error::InvalidArgument("--threshold must be > 0".into()));
    }
    let mut kinds: Vec<ShaperKind> = a.kind.iter().map(|&k| k.into()).collect();
    kinds.dedup();
    let mut curves = Vec::new();
    for &k in &kinds {
        let train = design_shaper(k, &p).into_train();
        let curve = sensitivity_curve(&train, &p, (a.lo, a.hi), a.points)
            .map_err(|e| usage(e, "use 0 < --lo < --hi and --points >= 2"))?;
        let bw = insensitivity_bandwidth(&train, &p, a.threshold);
        println!("{k}: bandwidth {bw:.6} at V <= {}", a.threshold);
        curves.push((k, curve));
    }
    let mut s = String::from("ratio");
    for (k, _) in &curves {
        s.push_str(&format!(",{k}"));
    }
    s.push('\n');
    for i in 0..a.points {
        s.push_str(&fmt_f64(curves[0].1[i].0));
        for (_, c) in &curves {
            s.push(',');
            s.push_str(&fmt_f64(c[i].1));
        }
        s.push('\n');
    }
    write_text(&a.out, &s)?;
    if let Some(path) = &a.svg {
        let mut chart = LineChart::new("residual vibration", "actual / design frequency", "V")
            .with_guide(a.threshold, format!("V = {}", a.threshold));
        for (k, c) in curves {
            chart = chart.with_series(Series::new(k.to_string(), c));
        }
        write_text(path, &chart.render())?;
    }
    Ok(())
}

/// Parse one `--methods` entry.
pub fn parse_method(
    name: &str,
    guess: Option<SecondOrderParams>,
    nominal: Option<SecondOrderParams>,
    config: &IdentifyConfig,
) -> Result<Pipeline> {
    let bad = || {
        Error::InvalidArgument(format!(
            "unknown method {name:?}; use uzs, unshaped or <ukf|fixed|rough|grid>-<zv|zvd|zvdd>"
        ))
    };
    let ukf = IdentifierChoice::Ukf {
        guess,
        config: config.clone(),
    };
    let (ident, kind) = match name {
        "uzs" => return Ok(Pipeline::new(name, ukf, Some(ShaperKind::Zvd))),
        "unshaped" => return Ok(Pipeline::new(name, IdentifierChoice::Rough, None)),
        _ => name.split_once('-').ok_or_else(bad)?,
    };
    let kind: ShaperKind = kind.parse().map_err(|_| bad())?;
    let identifier = match ident {
        "ukf" => ukf,
        "fixed" => match nominal {
            Some(p) => IdentifierChoice::Fixed(p),
            None => IdentifierChoice::Rough,
        },
        "rough" => IdentifierChoice::Rough,
        "grid" => IdentifierChoice::Grid,
        _ => return Err(bad()),
    };
    Ok(Pipeline::new(name, identifier, Some(kind)))
}

fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let config = a.filter.config()?;
    let guess = pair(a.guess_omega, a.guess_zeta, "--guess-omega/--guess-zeta")?;
    let nominal = pair(
        a.nominal_omega,
        a.nominal_zeta,
        "--nominal-omega/--nominal-zeta",
    )?;
    let methods = a
        .methods
        .iter()
        .map(|m| parse_method(m, guess, nominal, &config))
        .collect::<Result<Vec<_>>>()?;
    for (i, m) in methods.iter().enumerate() {
        if methods[..i].iter().any(|o| o.name == m.name) {
            return Err(Error::InvalidArgument(format!(
                "method {} listed twice; list each once",
                m.name
            )));
        }
    }
    let compare = match &a.compare {
        None => None,
        Some(names) => {
            let find = |n: &String| {
                methods.iter().position(|m| &m.name == n).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "--compare names {n:?}, which is not in --methods"
                    ))
                })
            };
            match names.as_slice() {
                [c, b] => Some((find(c)?, find(b)?)),
                _ => {
                    return Err(Error::InvalidArgument(
                        "--compare takes candidate,baseline".into(),
                    ))
                }
            }
        }
    };
    if a.jobs == 0 {
        return Err(Error::InvalidArgument("--jobs must be >= 1".into()));
    }
    if let Some(l) = a.step_level {
        if !(l.is_finite() && l != 0.0) {
            return Err(Error::InvalidArgument(
                "--step-level must be finite and nonzero".into(),
            ));
        }
    }
    let datasets = a
        .datasets
        .iter()
        .map(|p| load_dataset(p))
        .collect::<Result<Vec<_>>>()?;
    let cfg = ComparisonConfig {
        protocol: ProtocolParams {
            n_samples: a.samples,
            n_trials: a.trials,
            train_fraction: a.train_fraction,
        },
        seed: a.seed,
        jobs: a.jobs,
        compare,
        step_level: a.step_level,
    };
    let out = run_comparison(&methods, &datasets, &cfg)?;
    write_text(&a.out, &out.report.to_json()?)?;
    let table = render_table(&out.report);
    match &a.table {
        Some(p) => write_text(p, &table)?,
        None => print!("{table}"),
    }
    if let Some(dir) = &a.curves_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_text(&dir.join("convergence.csv"), &convergence_csv(&out.report))?;
        write_text(&dir.join("positions.csv"), &positions_csv(&out.positions))?;
    }
    if let Some(dir) = &a.svg_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (d, ds) in out.report.datasets.iter().enumerate() {
            let mut pos = LineChart::new(
                format!("{} positions", ds.label),
                "time (s)",
                "displacement (mm)",
            )
            .with_guide(ds.step_level, "setpoint");
            for tr in out.positions.iter().filter(|t| t.dataset == ds.label) {
                pos = pos.with_series(Series::new(tr.method.clone(), tr.position.iter().collect()));
            }
            write_text(&dir.join(format!("positions_{d}.svg")), &pos.render())?;
            let mut conv = LineChart::new(
                format!("{} training error, trial 0", ds.label),
                "epoch",
                "summed abs. error (mm)",
            );
            for r in out.report.results.iter().filter(|r| r.dataset == ds.label) {
                if let Some(t) = r.trials.first().filter(|t| !t.epoch_errors.is_empty()) {
                    conv = conv.with_series(Series::new(
                        r.method.clone(),
                        t.epoch_errors
                            .iter()
                            .enumerate()
                            .map(|(e, &v)| ((e + 1) as f64, v))
                            .collect(),
                    ));
                }
            }
            write_text(&dir.join(format!("convergence_{d}.svg")), &conv.render())?;
        }
    }
    Ok(())
}
