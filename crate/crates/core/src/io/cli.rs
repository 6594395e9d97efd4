//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage, configuration and I/O errors, 2
//! when the requested design cannot be folded.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{GraspError, KinematicsError, MechanicsError, OptimizeError};
use crate::grasp::{GraspAnalyzer, GraspOptions, ObjectSpec};
use crate::io::config::{load_config, DesignConfig};
use crate::io::fs::write_atomic;
use crate::io::{obj, svg, tables};
use crate::kinematics::{fold_curve, FoldPath, FoldedGeometry};
use crate::mechanics::{force_curves_on, EnergyModel};
use crate::optimize::grid_sweep;
use crate::pattern::build_pattern;

/// Intermediate states used to carry branch continuity to a single fold state.
const FOLD_STEPS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "yoshimura-gripper", version, about = "Design and analysis of Yoshimura origami grippers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON design configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
    Obj,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the flat crease pattern as SVG.
    Pattern(Common),
    /// Write a folded state as OBJ.
    Fold {
        #[command(flatten)]
        common: Common,
        /// Normalized fold fraction, 0 = flat, 1 = closed.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
    },
    /// Write the kinematic curve.
    Curve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Write pull force, pinch force and stiffness along the fold.
    Mechanics {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Classify a grasp and write the report as JSON.
    Grasp {
        #[command(flatten)]
        common: Common,
        /// Sphere diameter; overrides the configured object.
        #[arg(long)]
        diameter: Option<f64>,
    },
    /// Run the configured design sweep.
    Sweep(Common),
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn infeasible(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<KinematicsError> for Failure {
    fn from(e: KinematicsError) -> Self {
        match e {
            KinematicsError::Pattern(_) | KinematicsError::FractionOutOfRange(_) | KinematicsError::TooFewSamples { .. } => {
                Failure::usage(e.to_string())
            }
            _ => Failure::infeasible(e.to_string()),
        }
    }
}

impl From<MechanicsError> for Failure {
    fn from(e: MechanicsError) -> Self {
        match e {
            MechanicsError::Kinematics(k) => k.into(),
            MechanicsError::DegenerateTransmission { .. } => Failure::infeasible(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<GraspError> for Failure {
    fn from(e: GraspError) -> Self {
        match e {
            GraspError::Kinematics(k) => k.into(),
            GraspError::InvalidObject(_) => Failure::usage(e.to_string()),
            _ => Failure::infeasible(e.to_string()),
        }
    }
}

impl From<OptimizeError> for Failure {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::AllInfeasible => Failure::infeasible(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(written) => {
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load(common: &Common) -> Result<(DesignConfig, PathBuf), Failure> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", common.config.display())))?;
    let config = load_config(&text).map_err(|e| Failure::usage(format!("{}: {e}", common.config.display())))?;
    let out = common.out.clone().unwrap_or_else(|| config.output_dir.clone());
    Ok((config, out))
}

fn check_format(common: &Common, allowed: &[Format]) -> Result<Format, Failure> {
    match common.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(Failure::usage(format!(
            "format {:?} is not available for this command",
            f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
        ))),
    }
}

fn emit(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    write_atomic(&path, contents.as_bytes()).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Solves the state at `fraction`, stepping from the flat sheet so the
/// branch is carried continuously.
fn fold_state(path: &FoldPath, fraction: f64) -> Result<FoldedGeometry, KinematicsError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(KinematicsError::FractionOutOfRange(fraction));
    }
    let mut prev: Option<FoldedGeometry> = None;
    for k in 1..=FOLD_STEPS {
        let f = fraction * k as f64 / FOLD_STEPS as f64;
        prev = Some(path.at_fraction(f, prev.as_ref())?);
    }
    Ok(prev.expect("at least one step"))
}

fn execute(command: Command) -> Result<Vec<PathBuf>, Failure> {
    match command {
        Command::Pattern(common) => {
            check_format(&common, &[Format::Svg])?;
            let (config, out) = load(&common)?;
            let pattern = build_pattern(&config.params).map_err(KinematicsError::from)?;
            Ok(vec![emit(&out, "pattern.svg", &svg::export_svg(&pattern, &svg::SvgStyle::default()))?])
        }
        Command::Fold { common, fraction } => {
            check_format(&common, &[Format::Obj])?;
            let (config, out) = load(&common)?;
            let path = FoldPath::new(&config.params)?;
            let geom = fold_state(&path, fraction)?;
            Ok(vec![emit(&out, "fold.obj", &obj::export_obj(&geom))?])
        }
        Command::Curve { common, samples } => {
            let format = check_format(&common, &[Format::Csv, Format::Json])?;
            let (config, out) = load(&common)?;
            let n = samples.unwrap_or(config.curve_samples);
            let curve = fold_curve(&config.params, n)?;
            Ok(vec![match format {
                Format::Json => emit(&out, "curve.json", &tables::json_of(&curve))?,
                _ => emit(&out, "curve.csv", &tables::fold_curve_csv(&curve))?,
            }])
        }
        Command::Mechanics { common, samples } => {
            let format = check_format(&common, &[Format::Csv, Format::Json])?;
            let (config, out) = load(&common)?;
            let n = samples.unwrap_or(config.force_samples);
            let path = FoldPath::new(&config.params)?;
            let model = EnergyModel::new(&path, config.energy.stiffness_per_length, config.energy.rest_fraction)?;
            let curve = force_curves_on(&model, &path, n)?;
            Ok(vec![match format {
                Format::Json => emit(&out, "mechanics.json", &tables::json_of(&curve))?,
                _ => emit(&out, "mechanics.csv", &tables::force_curve_csv(&curve))?,
            }])
        }
        Command::Grasp { common, diameter } => {
            check_format(&common, &[Format::Json])?;
            let (config, out) = load(&common)?;
            let object = match (diameter, config.object) {
                (Some(d), _) => ObjectSpec::sphere(d),
                (None, Some(o)) => o,
                (None, None) => return Err(Failure::usage("grasp needs --diameter or an `object` in the configuration")),
            };
            object.validate()?;
            let analyzer = GraspAnalyzer::new(&config.params, GraspOptions::default())?;
            let report = analyzer.classify(&object)?;
            Ok(vec![emit(&out, "grasp.json", &tables::grasp_report_json(&report))?])
        }
        Command::Sweep(common) => {
            check_format(&common, &[Format::Csv])?;
            let (config, out) = load(&common)?;
            let spec = config
                .sweep
                .ok_or_else(|| Failure::usage("sweep needs a `sweep` section in the configuration"))?;
            let result = grid_sweep(&spec)?;
            Ok(vec![
                emit(&out, "sweep.csv", &tables::sweep_csv(&result))?,
                emit(&out, "sweep_argmax.json", &tables::sweep_argmax_json(&result))?,
            ])
        }
    }
}

