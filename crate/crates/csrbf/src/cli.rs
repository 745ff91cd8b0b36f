//! Command-line surface: `fit`, `eval`, `diagnose` and
//! `experiment translation`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use csrbf_core::diagnostics::{diagnose, translation_experiment};
use csrbf_core::{fit, prepare_system, FitOptions, GridAxis, GridSpec, Kernel, KernelKind, PolyBasis, SolverKind};

use crate::error::exit;
use crate::{csv_io, model_json, report, Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "csrbf",
    version,
    about = "Scattered-data interpolation with radial basis functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an interpolant to a point CSV and save it as JSON.
    Fit(FitArgs),
    /// Evaluate a saved model on a grid or at query points.
    Eval(EvalArgs),
    /// Report conditioning, determinants and sparsity of one system.
    Diagnose(DiagnoseArgs),
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Shift the cloud by increasing offsets and record conditioning.
    Translation(TranslationArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Points CSV with header `x,h`, `x,y,h` or `x,y,z,h`.
    #[arg(long)]
    pub input: PathBuf,
    /// tps, gaussian, multiquadric, wendland-c0, wendland-c2 or wendland-c4.
    #[arg(long)]
    pub kernel: String,
    #[arg(long, default_value_t = 1.0)]
    pub shape: f64,
    /// Polynomial tail degree: none, 0, 1 or 2.
    #[arg(long, default_value = "1")]
    pub degree: String,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "direct")]
    pub solver: String,
    #[arg(long, default_value_t = csrbf_core::solve::DEFAULT_CG_TOL)]
    pub cg_tol: f64,
    /// Defaults to ten times the number of sites.
    #[arg(long)]
    pub cg_max_iter: Option<usize>,
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("queries").required(true).args(["grid", "points"])))]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// One `min:max:count` per axis, comma separated.
    #[arg(long)]
    pub grid: Option<String>,
    /// Query CSV with header `x`, `x,y` or `x,y,z`.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub no_normalize: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TranslationArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,10,100,1000,10000")]
    pub offsets: Vec<f64>,
    #[arg(long)]
    pub report: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are printed to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Fit(args) => run_fit(args),
        Command::Eval(args) => run_eval(args),
        Command::Diagnose(args) => run_diagnose(args),
        Command::Experiment(Experiment::Translation(args)) => run_translation(args),
    }
}

fn parse_degree(s: &str) -> Result<Option<u8>> {
    match s {
        "none" => Ok(None),
        "0" => Ok(Some(0)),
        "1" => Ok(Some(1)),
        "2" => Ok(Some(2)),
        other => Err(Error::Usage(format!(
            "invalid degree `{other}` (expected none, 0, 1 or 2)"
        ))),
    }
}

fn parse_usage<T: std::str::FromStr<Err = csrbf_core::Error>>(s: &str) -> Result<T> {
    s.parse().map_err(|e: csrbf_core::Error| Error::Usage(e.to_string()))
}

impl ModelArgs {
    fn kernel(&self) -> Result<Kernel> {
        let kind: KernelKind = parse_usage(&self.kernel)?;
        Kernel::new(kind, self.shape).map_err(|e| Error::Usage(e.to_string()))
    }

    /// Reads the points and builds the kernel and tail; the configuration
    /// is checked before the file is opened.
    fn load(&self) -> Result<(csrbf_core::PointCloud, Kernel, PolyBasis)> {
        let kernel = self.kernel()?;
        let degree = parse_degree(&self.degree)?;
        let cloud = csv_io::read_points_csv(&self.input)?;
        let poly = PolyBasis::new(cloud.dim(), degree)?;
        csrbf_core::assembly::check_compatibility(&kernel, &poly)?;
        Ok((cloud, kernel, poly))
    }
}

fn run_fit(args: FitArgs) -> Result<()> {
    let solver: SolverKind = parse_usage(&args.solver)?;
    if !(args.cg_tol > 0.0 && args.cg_tol < 1.0) {
        return Err(Error::Usage(format!(
            "--cg-tol must lie in (0, 1), got {}",
            args.cg_tol
        )));
    }
    if solver == SolverKind::Cg && !args.model.kernel()?.is_compact() {
        return Err(Error::Usage("the cg solver needs a compactly supported kernel".into()));
    }
    let (cloud, kernel, poly) = args.model.load()?;
    let options = FitOptions {
        solver,
        normalize: !args.no_normalize,
        cg_tol: args.cg_tol,
        cg_max_iter: args.cg_max_iter,
    };
    let model = fit(&cloud, &kernel, &poly, &options)?;
    model_json::write_model_json(&model, &args.output)?;
    println!(
        "fitted {} sites ({} solver, residual {:e}) -> {}",
        model.len(),
        solver,
        model.fit_report().residual,
        args.output.display()
    );
    Ok(())
}

/// Parses `min:max:count[,min:max:count...]`.
pub fn parse_grid(spec: &str) -> Result<GridSpec> {
    let axes = spec
        .split(',')
        .map(|axis| {
            let parts: Vec<&str> = axis.trim().split(':').collect();
            let bad = || Error::Usage(format!("invalid grid axis `{axis}` (expected min:max:count)"));
            let [min, max, count] = parts.as_slice() else {
                return Err(bad());
            };
            Ok(GridAxis {
                min: min.parse().map_err(|_| bad())?,
                max: max.parse().map_err(|_| bad())?,
                count: count.parse().map_err(|_| bad())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GridSpec::new(axes).map_err(|e| Error::Usage(e.to_string()))
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let grid = args.grid.as_deref().map(parse_grid).transpose()?;
    let model = model_json::read_model_json(&args.model)?;
    if let Some(grid) = grid {
        if grid.dim() != model.dim() {
            return Err(Error::Usage(format!(
                "grid has {} axes but the model is {}-D",
                grid.dim(),
                model.dim()
            )));
        }
        let values = model.evaluate_grid(&grid)?;
        csv_io::write_grid_csv(&values, &grid, &args.output)?;
        println!("evaluated {} grid nodes -> {}", values.len(), args.output.display());
    } else if let Some(points) = &args.points {
        let (dim, coords) = csv_io::read_queries_csv(points)?;
        if dim != model.dim() {
            return Err(csrbf_core::Error::InvalidInput(format!(
                "query points are {dim}-D but the model is {}-D",
                model.dim()
            ))
            .into());
        }
        let values = coords
            .chunks_exact(dim)
            .map(|q| model.evaluate(q))
            .collect::<Result<Vec<_>, _>>()?;
        csv_io::write_values_csv(dim, &coords, &values, &args.output)?;
        println!("evaluated {} points -> {}", values.len(), args.output.display());
    }
    Ok(())
}

fn run_diagnose(args: DiagnoseArgs) -> Result<()> {
    let (cloud, kernel, poly) = args.model.load()?;
    let options = FitOptions {
        // the cg path assembles the kernel block sparsely
        solver: if kernel.is_compact() {
            SolverKind::Cg
        } else {
            SolverKind::Direct
        },
        normalize: !args.no_normalize,
        ..FitOptions::default()
    };
    let system = prepare_system(&cloud, &kernel, &poly, &options)?;
    let value = report::diagnostics_json(&diagnose(&system));
    match &args.report {
        Some(path) => report::write_json(&value, path)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("JSON values always serialize")
        ),
    }
    Ok(())
}

fn run_translation(args: TranslationArgs) -> Result<()> {
    let (cloud, kernel, poly) = args.model.load()?;
    let records = translation_experiment(&cloud, &kernel, &poly, &args.offsets).map_err(|e| match e {
        csrbf_core::Error::InvalidInput(msg) => Error::Usage(msg),
        other => other.into(),
    })?;
    report::write_json(&report::translation_json(&records), &args.report)?;
    for r in &records {
        println!(
            "offset {:>10}: cond_raw {:.3e}  cond_normalized {:.3e}  max|PtP| {:.3e}",
            r.offset, r.cond_raw, r.cond_normalized, r.max_ptp_entry
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        let g = parse_grid("0:1:3,-1:1:2").unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.len(), 6);
        assert_eq!(g.node(1), vec![0.0, 1.0]);
        for bad in ["", "0:1", "0:1:x", "1:0:3", "0:1:0", "0:1:2,0:1:2,0:1:2,0:1:2"] {
            assert!(matches!(parse_grid(bad), Err(Error::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(parse_degree("none").unwrap(), None);
        assert_eq!(parse_degree("2").unwrap(), Some(2));
        assert!(parse_degree("3").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["csrbf"]), exit::USAGE);
        assert_eq!(run(["csrbf", "frobnicate"]), exit::USAGE);
        assert_eq!(run(["csrbf", "fit", "--input", "a.csv"]), exit::USAGE);
        assert_eq!(run(["csrbf", "--help"]), exit::SUCCESS);
    }
}
