//! Batch command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or model errors.
//! Results go to the output stream, diagnostics to the error stream.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::classifier::{
    accuracy, empirical_quality, indicator_quality, region_energy, ClassSpec, EnergyClassifier,
    NormalizationMode,
};
use crate::datasets::{fmt_real, gen_example1, gen_example2, load_csv, save_csv, ClassLabel};
use crate::error::{Error, Result};
use crate::model::{load_model, save_model};
use crate::moments::estimate_moments;
use crate::{Dataset, SymMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qenergy",
    version,
    about = "Energy discriminant classifier over orthogonal projections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two Gaussian classes with orthogonal means and covariance sigma2·I.
    #[command(name = "gen-example1")]
    GenExample1(GenExample1Args),
    /// Class 1 = a + white noise, class 2 = white noise of variance sigma2.
    #[command(name = "gen-example2")]
    GenExample2(GenExample2Args),
    /// Fit a classifier from labeled CSV data and write the model file.
    Fit(FitArgs),
    /// Print one decided label per data row.
    Predict(ModelDataArgs),
    /// Print the energy and quality report of a model on labeled data.
    Eval(ModelDataArgs),
    /// Print the eigenvalues of the fitted difference operator, descending.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
struct GenCommon {
    #[arg(long)]
    per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenExample1Args {
    /// Dimension; inferred from --m1 when omitted.
    #[arg(long)]
    n: Option<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    m1: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    m2: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Debug, Args)]
struct GenExample2Args {
    #[arg(long)]
    n: Option<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    a: Vec<f64>,
    #[arg(long)]
    sigma2: f64,
    #[command(flatten)]
    common: GenCommon,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    /// raw | trace | unit | centered
    #[arg(long, default_value = "raw", value_parser = parse_mode)]
    mode: NormalizationMode,
    /// Prior of class 1; class 2 gets 1 - p1.
    #[arg(long, conflicts_with = "priors_from_data")]
    p1: Option<f64>,
    /// Estimate priors from class frequencies.
    #[arg(long)]
    priors_from_data: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ModelDataArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long)]
    model: PathBuf,
}

fn parse_mode(s: &str) -> std::result::Result<NormalizationMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure that maps onto an exit code.
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, S, O, E>(argv: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::Data(e.to_string())
}

fn execute<O: Write>(command: Command, out: &mut O) -> std::result::Result<(), Failure> {
    match command {
        Command::GenExample1(args) => {
            check_declared_dim(args.n, args.m1.len())?;
            let cov = SymMatrix::identity(args.m1.len()).scale(args.sigma2);
            let data = gen_example1(
                &args.m1,
                &args.m2,
                &cov,
                args.common.per_class,
                args.common.seed,
            )?;
            save_csv(&data, &args.common.out)?;
            writeln!(out, "wrote {} rows", data.len()).map_err(io)?;
        }
        Command::GenExample2(args) => {
            check_declared_dim(args.n, args.a.len())?;
            let data = gen_example2(
                &args.a,
                args.sigma2,
                args.common.per_class,
                args.common.seed,
            )?;
            save_csv(&data, &args.common.out)?;
            writeln!(out, "wrote {} rows", data.len()).map_err(io)?;
        }
        Command::Fit(args) => {
            if args.p1.is_none() && !args.priors_from_data {
                return Err(Failure::Usage(
                    "fit needs --p1 or --priors-from-data".into(),
                ));
            }
            let data: Dataset = load_csv(&args.data)?;
            let priors = match args.p1 {
                Some(p1) => [p1, 1.0 - p1],
                None => data.class_frequencies()?,
            };
            let [c1, c2] = class_specs(&data, args.mode, priors)?;
            let clf = EnergyClassifier::fit(&c1, &c2, args.mode)?;
            save_model(&clf, &args.out)?;
            writeln!(
                out,
                "wrote model to {} (mode={}, rank_P1={}, rank_P2={})",
                args.out.display(),
                clf.mode(),
                clf.projector(ClassLabel::One).rank(),
                clf.projector(ClassLabel::Two).rank()
            )
            .map_err(io)?;
        }
        Command::Predict(args) => {
            let clf: EnergyClassifier<f64> = load_model(&args.model)?;
            let data: Dataset = load_csv(&args.data)?;
            check_model_dim(&clf, &data)?;
            let mut buf = String::with_capacity(data.len() * 2);
            for (i, (_, x)) in data.rows().iter().enumerate() {
                let label = clf.decide(x).map_err(|e| at_line(e, i + 2))?;
                buf.push_str(&label.to_string());
                buf.push('\n');
            }
            out.write_all(buf.as_bytes()).map_err(io)?;
        }
        Command::Eval(args) => {
            let clf: EnergyClassifier<f64> = load_model(&args.model)?;
            let data: Dataset = load_csv(&args.data)?;
            check_model_dim(&clf, &data)?;
            write!(out, "{}", eval_report(&clf, &data)?).map_err(io)?;
        }
        Command::Spectrum(args) => {
            let clf: EnergyClassifier<f64> = load_model(&args.model)?;
            for &l in clf.spectrum() {
                writeln!(out, "{}", fmt_real(l)).map_err(io)?;
            }
        }
    }
    Ok(())
}

fn check_declared_dim(declared: Option<usize>, actual: usize) -> std::result::Result<(), Failure> {
    match declared {
        Some(n) if n != actual => Err(Failure::Usage(format!(
            "--n {n} does not match vector length {actual}"
        ))),
        _ => Ok(()),
    }
}

fn check_model_dim(clf: &EnergyClassifier<f64>, data: &Dataset) -> Result<()> {
    if clf.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: clf.dim(),
            found: data.dim(),
        });
    }
    Ok(())
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::ZeroSignal { .. } => Error::ZeroSignal { line: Some(line) },
        other => other,
    }
}

/// Class moments as `fit` and `eval` use them: samples are unit-normalized
/// first in `UnitNorm` mode.
fn class_specs(
    data: &Dataset,
    mode: NormalizationMode,
    priors: [f64; 2],
) -> Result<[ClassSpec<f64>; 2]> {
    let prepared;
    let data = if mode == NormalizationMode::UnitNorm {
        prepared = data.unit_normalized().map_err(|e| match e {
            Error::ZeroSignal { line: Some(row) } => Error::ZeroSignal {
                line: Some(row + 1),
            },
            other => other,
        })?;
        &prepared
    } else {
        data
    };
    let spec = |label: ClassLabel| -> Result<ClassSpec<f64>> {
        let samples = data.samples(label);
        if samples.is_empty() {
            return Err(Error::EmptyClass(label.number()));
        }
        Ok(ClassSpec::new(
            priors[label.index()],
            estimate_moments(&samples)?,
        ))
    };
    Ok([spec(ClassLabel::One)?, spec(ClassLabel::Two)?])
}

/// `key=value` report of a model on labeled data.
///
/// Analytic energies use the moments of `data` and the model's priors. The
/// sandwich check compares the decision-region energy against
/// `0 ≤ Enr_C(P₁,P₂) − Enr_C(A₁,A₂) ≤ Enr_E(P₁,P₂)` with three standard errors
/// of slack on each side.
pub fn eval_report(clf: &EnergyClassifier<f64>, data: &Dataset) -> Result<String> {
    let priors = clf.priors();
    let [c1, c2] = class_specs(data, clf.mode(), priors)?;
    let rep = clf.energy_report(&c1, &c2)?;
    let quality = empirical_quality(clf, data, priors)?;
    let indicator = indicator_quality(clf, data, priors)?;
    let acc = accuracy(clf, data)?;
    let region = region_energy(clf, data)?;
    let gap = rep.enr_correct - region.value;
    let slack = 3.0 * region.std_error;
    let bound_ok = gap >= -slack && gap <= rep.enr_error + slack;

    let mut lines: Vec<(&str, String)> = vec![
        ("n", clf.dim().to_string()),
        ("mode", clf.mode().to_string()),
        ("rows", data.len().to_string()),
        ("p1", fmt_real(priors[0])),
        ("p2", fmt_real(priors[1])),
    ];
    for (j, row) in rep.r.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            lines.push((["r1_1", "r1_2", "r2_1", "r2_2"][2 * j + i], fmt_real(*v)));
        }
    }
    lines.extend([
        ("enr_correct", fmt_real(rep.enr_correct)),
        ("enr_error", fmt_real(rep.enr_error)),
        ("total", fmt_real(rep.total)),
        (
            "conservation_residual",
            fmt_real(rep.conservation_residual()),
        ),
        ("empirical_quality", fmt_real(quality)),
        ("indicator_quality", fmt_real(indicator)),
        ("accuracy", fmt_real(acc)),
        ("region_energy", fmt_real(region.value)),
        ("region_energy_se", fmt_real(region.std_error)),
        ("bound_gap", fmt_real(gap)),
        (
            "bound_check",
            if bound_ok { "pass" } else { "fail" }.to_string(),
        ),
    ]);
    Ok(lines
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect())
}
