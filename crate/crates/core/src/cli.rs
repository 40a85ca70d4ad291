//! Command-line front end.
//!
//! Every subcommand reads the JSON/CSV documents named by the global flags,
//! computes, and writes its artifacts into `--out`. Exit codes are a stable
//! contract: 0 success, 1 domain or validation failure, 2 I/O, parse or
//! usage failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::calibration::{
    calibrate, write_trials, CycleSelection, DeadbandOptions, PipelineOptions, SegmentOptions,
    SynthConfig, TensionProfile, TrialRecord,
};
use crate::error::Error;
use crate::geometry::{neutral_axis_offset, validate_tube, wedge_angle, TubeSpec};
use crate::kinematics::{notch_closure_limit, JointModel, Prediction, TendonFile};
use crate::svg::{line_plot, Series, Style};
use crate::toolpath::{compile_pass_plan, emit_job, emit_pattern_svg, unroll_pattern, LaserRecipe};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "notchkin",
    version,
    about = "Notched-tube joint model, calibration and laser pass planner"
)]
pub struct Cli {
    /// Tube geometry JSON.
    #[arg(long, global = true)]
    pub tube: Option<PathBuf>,
    /// Tendon JSON (modulus optional for `fit`).
    #[arg(long, global = true)]
    pub tendon: Option<PathBuf>,
    /// Laser recipe JSON.
    #[arg(long, global = true)]
    pub recipe: Option<PathBuf>,
    /// Trial CSV.
    #[arg(long, global = true)]
    pub trials: Option<PathBuf>,
    /// Output directory for written artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for synthetic data.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check tube invariants.
    Validate,
    /// Predict joint deflection for a stroke and tension.
    Predict(PredictArgs),
    /// Fit the tendon modulus to a trial.
    Fit(FitArgs),
    /// Compile the laser pass plan and pattern drawing.
    Toolpath(ToolpathArgs),
    /// Generate a synthetic cyclic trial.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Tendon stroke, mm.
    #[arg(long)]
    pub stroke: Option<f64>,
    /// Tendon tension, N.
    #[arg(long, default_value_t = 0.0)]
    pub force: f64,
    /// Also write a stroke sweep as CSV and SVG.
    #[arg(long)]
    pub sweep: bool,
    /// Upper stroke of the sweep, mm (defaults to --stroke, else 2.0).
    #[arg(long)]
    pub sweep_max: Option<f64>,
    /// Number of sweep rows.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Cycles to fit: `steady`, `last`, `all`, or a comma list of numbers.
    #[arg(long, default_value = "steady")]
    pub cycles: String,
    /// Deflection onset threshold for deadband removal, degrees.
    #[arg(long, default_value_t = 0.5)]
    pub threshold_deg: f64,
    /// Hysteresis band for cycle segmentation, mm.
    #[arg(long, default_value_t = crate::calibration::segment::DEFAULT_HYSTERESIS_MM)]
    pub hysteresis: f64,
}

#[derive(Debug, Args)]
pub struct ToolpathArgs {
    /// Override the recipe repeat count.
    #[arg(long)]
    pub repeats: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    pub cycles: usize,
    #[arg(long, default_value_t = 100)]
    pub samples_per_cycle: usize,
    /// Maximum stroke, mm.
    #[arg(long, default_value_t = 2.5)]
    pub max_stroke: f64,
    /// Injected tendon slack, mm.
    #[arg(long, default_value_t = 0.0)]
    pub slack: f64,
    /// Deflection noise standard deviation, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 1.0)]
    pub first_cycle_scale: f64,
    #[arg(long, default_value_t = 0.0)]
    pub drift: f64,
    /// Joint stiffness for the tension profile, N/rad.
    #[arg(long, default_value_t = 1.0)]
    pub stiffness: f64,
    /// Output file name inside --out.
    #[arg(long, default_value = "trials.csv")]
    pub name: String,
}

/// Parsed input documents. Every referenced file is read and parsed before
/// any computation starts.
#[derive(Debug, Default)]
pub struct RunConfig {
    pub tube: Option<TubeSpec>,
    pub tendon: Option<TendonFile>,
    pub recipe: Option<LaserRecipe>,
    pub trials: Option<Vec<TrialRecord>>,
    pub out: PathBuf,
    pub seed: u64,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() {
            EXIT_INPUT
        } else {
            EXIT_DOMAIN
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

fn parse_with<T>(path: &Path, f: impl FnOnce(&str) -> crate::Result<T>) -> Result<T, Failure> {
    let text = read(path)?;
    f(&text).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

impl RunConfig {
    pub fn load(cli: &Cli) -> Result<Self, Failure> {
        Ok(RunConfig {
            tube: cli
                .tube
                .as_deref()
                .map(|p| parse_with(p, TubeSpec::from_json))
                .transpose()?,
            tendon: cli
                .tendon
                .as_deref()
                .map(|p| parse_with(p, TendonFile::from_json))
                .transpose()?,
            recipe: cli
                .recipe
                .as_deref()
                .map(|p| parse_with(p, LaserRecipe::from_json))
                .transpose()?,
            trials: cli
                .trials
                .as_deref()
                .map(|p| parse_with(p, crate::calibration::parse_trials))
                .transpose()?,
            out: cli.out.clone(),
            seed: cli.seed,
        })
    }

    fn tube(&self) -> Result<TubeSpec, Failure> {
        self.tube
            .ok_or_else(|| Failure::usage("--tube is required"))
    }

    fn tendon(&self) -> Result<TendonFile, Failure> {
        self.tendon
            .ok_or_else(|| Failure::usage("--tendon is required"))
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.out).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", self.out.display()),
        })?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| Failure {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        })?;
        Ok(path)
    }
}

type Outcome = Result<i32, Failure>;

pub fn cmd_validate(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let tube = cfg.tube()?;
    let violations = validate_tube(&tube);
    if violations.is_empty() {
        let _ = writeln!(out, "tube: ok");
        let _ = writeln!(out, "wedge_angle_rad: {:.6}", wedge_angle(&tube)?);
        let _ = writeln!(
            out,
            "neutral_axis_offset_mm: {:.6}",
            neutral_axis_offset(&tube)?
        );
        let _ = writeln!(out, "closure_limit_rad: {:.6}", notch_closure_limit(&tube)?);
    } else {
        for v in &violations {
            let _ = writeln!(out, "violation: {v}");
        }
    }
    let mut code = if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_DOMAIN
    };
    if let Some(tendon) = cfg.tendon {
        let geometry_ok = tendon.radius_mm > 0.0 && tendon.radius_mm < tube.inner_radius;
        if !geometry_ok {
            let _ = writeln!(
                out,
                "violation: radius_mm: tendon radius {} mm must lie in (0, r_i = {} mm)",
                tendon.radius_mm, tube.inner_radius
            );
            code = EXIT_DOMAIN;
        }
    }
    Ok(code)
}

pub fn cmd_predict(cfg: &RunConfig, args: &PredictArgs, out: &mut dyn Write) -> Outcome {
    let tube = cfg.tube()?;
    let tendon = cfg.tendon()?.spec()?;
    let model = JointModel::new(&tube, &tendon)?;
    if args.force < 0.0 || !args.force.is_finite() {
        return Err(Error::Domain {
            quantity: "tension",
            value: args.force,
        }
        .into());
    }
    if args.stroke.is_none() && !args.sweep {
        return Err(Failure::usage("predict needs --stroke and/or --sweep"));
    }

    if let Some(stroke) = args.stroke {
        let p = model.invert(stroke, args.force);
        let theta = p.deflection();
        let _ = writeln!(out, "theta_deg: {:.6}", theta.to_degrees());
        let _ = writeln!(out, "theta_rad: {:.6}", theta);
        match p {
            Prediction::NotEngaged { slack_mm } => {
                let _ = writeln!(
                    out,
                    "engaged: false (stroke is {slack_mm:.6} mm short of the tendon elongation)"
                );
            }
            _ => {
                let _ = writeln!(out, "engaged: true");
            }
        }
        if theta > model.closure_limit {
            let _ = writeln!(
                out,
                "warning: deflection exceeds the notch closure limit {:.6} rad",
                model.closure_limit
            );
        }
    }

    if args.sweep {
        let max = args.sweep_max.or(args.stroke).unwrap_or(2.0);
        if args.points < 2 || !(max > 0.0) {
            return Err(Failure::usage(
                "sweep needs --points >= 2 and a positive stroke range",
            ));
        }
        let mut csv = String::from("stroke_mm,force_n,theta_deg,theta_rad,engaged\n");
        let mut curve = Vec::with_capacity(args.points);
        for i in 0..args.points {
            let stroke = max * i as f64 / (args.points - 1) as f64;
            let p = model.invert(stroke, args.force);
            let theta = p.deflection();
            csv.push_str(&format!(
                "{stroke},{},{},{theta},{}\n",
                args.force,
                theta.to_degrees(),
                p.is_engaged()
            ));
            curve.push((stroke, theta.to_degrees()));
        }
        let svg = line_plot(
            &format!("Predicted deflection at F = {} N", args.force),
            "tendon stroke [mm]",
            "deflection [deg]",
            &[Series {
                label: "model",
                points: &curve,
                color: "#1a5fb4",
                style: Style::Line,
            }],
        );
        let csv_path = cfg.write("sweep.csv", &csv)?;
        let svg_path = cfg.write("sweep.svg", &svg)?;
        let _ = writeln!(out, "sweep_rows: {}", args.points);
        let _ = writeln!(out, "wrote {}", csv_path.display());
        let _ = writeln!(out, "wrote {}", svg_path.display());
    }
    Ok(EXIT_OK)
}

fn parse_selection(text: &str) -> Result<CycleSelection, Failure> {
    match text {
        "steady" => Ok(CycleSelection::Steady),
        "last" => Ok(CycleSelection::Last),
        "all" => Ok(CycleSelection::All),
        list => list
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(CycleSelection::Numbers)
            .map_err(|_| Failure::usage(format!("invalid --cycles `{text}`"))),
    }
}

pub fn cmd_fit(cfg: &RunConfig, args: &FitArgs, out: &mut dyn Write) -> Outcome {
    let tube = cfg.tube()?;
    let tendon = cfg.tendon()?.geometry();
    let records = cfg
        .trials
        .as_deref()
        .ok_or_else(|| Failure::usage("--trials is required"))?;
    let opts = PipelineOptions {
        segment: SegmentOptions {
            hysteresis_mm: args.hysteresis,
        },
        deadband: DeadbandOptions {
            threshold_deg: args.threshold_deg,
            ..DeadbandOptions::default()
        },
        cycles: parse_selection(&args.cycles)?,
        ..PipelineOptions::default()
    };
    let cal = calibrate(&tube, tendon, records, &opts)?;

    let json_path = cfg.write("fit.json", &(cal.result.to_json() + "\n"))?;

    let (number, range) = cal
        .sample_ranges
        .last()
        .cloned()
        .expect("at least one fitted cycle");
    let samples = &cal.samples[range];
    let model = JointModel::new(&tube, &tendon.with_modulus(cal.result.e_t_mpa))?;
    let measured: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (s.stroke, s.deflection.to_degrees()))
        .collect();
    let predicted: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| {
            (
                s.stroke,
                model.invert(s.stroke, s.tension).deflection().to_degrees(),
            )
        })
        .collect();
    let svg = line_plot(
        &format!(
            "Cycle {number}: E_t = {:.0} MPa, RMSE = {:.3} deg",
            cal.result.e_t_mpa, cal.result.rmse_deg
        ),
        "tendon stroke, deadband removed [mm]",
        "deflection [deg]",
        &[
            Series {
                label: "experiment",
                points: &measured,
                color: "#c01c28",
                style: Style::Markers,
            },
            Series {
                label: "model",
                points: &predicted,
                color: "#1a5fb4",
                style: Style::Line,
            },
        ],
    );
    let svg_path = cfg.write("fit.svg", &svg)?;

    let r = cal.result;
    let _ = writeln!(out, "cycles_found: {}", cal.cycle_set.len());
    let _ = writeln!(out, "cycles_fitted: {}", cal.offsets.len());
    let _ = writeln!(out, "e_t_mpa: {:.3}", r.e_t_mpa);
    let _ = writeln!(out, "rmse_deg: {:.6}", r.rmse_deg);
    let _ = writeln!(out, "deadband_mm: {:.6}", r.deadband_mm);
    let _ = writeln!(out, "samples_used: {}", r.samples_used);
    if !cal.fit.unimodal {
        let _ = writeln!(out, "warning: objective scan is not unimodal");
    }
    let _ = writeln!(out, "wrote {}", json_path.display());
    let _ = writeln!(out, "wrote {}", svg_path.display());
    Ok(EXIT_OK)
}

pub fn cmd_toolpath(cfg: &RunConfig, args: &ToolpathArgs, out: &mut dyn Write) -> Outcome {
    let tube = cfg.tube()?;
    let mut recipe = cfg
        .recipe
        .ok_or_else(|| Failure::usage("--recipe is required"))?;
    if let Some(n) = args.repeats {
        recipe.repeat_count = n;
    }
    let pattern = unroll_pattern(&tube)?;
    let plan = compile_pass_plan(&tube, &recipe)?;
    let job = cfg.write("job.json", &emit_job(&plan, &recipe))?;
    let svg = cfg.write("pattern.svg", &emit_pattern_svg(&pattern))?;
    let _ = writeln!(out, "trace_count: {}", plan.traces.len());
    let _ = writeln!(out, "wrote {}", job.display());
    let _ = writeln!(out, "wrote {}", svg.display());
    Ok(EXIT_OK)
}

pub fn cmd_synth(cfg: &RunConfig, args: &SynthArgs, out: &mut dyn Write) -> Outcome {
    let tube = cfg.tube()?;
    let tendon = cfg.tendon()?.spec()?;
    let synth = SynthConfig {
        cycles: args.cycles,
        samples_per_cycle: args.samples_per_cycle,
        max_stroke_mm: args.max_stroke,
        slack_mm: args.slack,
        first_cycle_scale: args.first_cycle_scale,
        drift: args.drift,
        noise_deg: args.noise,
        tension: TensionProfile::Linear {
            stiffness: args.stiffness,
        },
        seed: cfg.seed,
        ..SynthConfig::default()
    };
    let records = crate::calibration::synthesize_trials(&tube, &tendon, &synth)?;
    let mut buf = Vec::new();
    write_trials(&mut buf, &records)?;
    let path = cfg.write(&args.name, &String::from_utf8(buf).expect("ascii csv"))?;
    let _ = writeln!(out, "records: {}", records.len());
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(EXIT_OK)
}

/// Parses `argv` and runs the selected subcommand, returning the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let result = RunConfig::load(&cli).and_then(|cfg| match &cli.command {
        Command::Validate => cmd_validate(&cfg, out),
        Command::Predict(a) => cmd_predict(&cfg, a, out),
        Command::Fit(a) => cmd_fit(&cfg, a, out),
        Command::Toolpath(a) => cmd_toolpath(&cfg, a, out),
        Command::Synth(a) => cmd_synth(&cfg, a, out),
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
