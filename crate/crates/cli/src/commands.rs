//! Subcommand definitions and their implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use diffmat::verify::{fit_order, measure_errors, ErrorTable};
use diffmat::{assemble, MeshKind, StencilWidth};

use crate::error::CliError;
use crate::functions::TestFunction;
use crate::io::{self, fmt_f64};

#[derive(Parser, Debug)]
#[command(name = "diffmat", version, about = "Differentiation matrices on arbitrary 1-D meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a mesh file.
    Mesh(MeshArgs),
    /// Assemble D_1..D_S for a mesh file and write them as Matrix Market files.
    Assemble(AssembleArgs),
    /// Apply a Matrix Market matrix to a samples file.
    Apply(ApplyArgs),
    /// Measure the convergence order of a derivative on a mesh family.
    Converge(ConvergeArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Uniform,
    Chebyshev,
    Legendre,
}

impl From<Kind> for MeshKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Uniform => MeshKind::Uniform,
            Kind::Chebyshev => MeshKind::Chebyshev,
            Kind::Legendre => MeshKind::Legendre,
        }
    }
}

/// `--stencil` value: a point count or `full` for the whole mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StencilArg(pub StencilWidth);

impl FromStr for StencilArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(StencilArg(StencilWidth::Full));
        }
        s.parse()
            .map(|m| StencilArg(StencilWidth::Fixed(m)))
            .map_err(|_| format!("'{s}' is neither a point count nor 'full'"))
    }
}

#[derive(clap::Args, Debug)]
pub struct MeshArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// Output file; the points go to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct AssembleArgs {
    /// Mesh file, one coordinate per line.
    #[arg(long)]
    pub mesh: PathBuf,
    /// Stencil width M, or `full` for M = N.
    #[arg(long)]
    pub stencil: StencilArg,
    /// Highest derivative order S.
    #[arg(long)]
    pub orders: usize,
    /// Files are written as `<prefix>_D1.mtx` .. `<prefix>_DS.mtx`.
    #[arg(long, alias = "out", default_value = "diffmat")]
    pub out_prefix: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct ApplyArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct ConvergeArgs {
    /// exp, sin, runge, or poly<d> for x^d.
    #[arg(long)]
    pub function: TestFunction,
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub stencil: StencilArg,
    /// Derivative order s.
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    /// Comma-separated mesh sizes, increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub resolutions: Vec<usize>,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub b: f64,
    /// Plain-text report; a CSV copy is written next to it with extension `.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Mesh(args) => cmd_mesh(&args),
        Command::Assemble(args) => cmd_assemble(&args),
        Command::Apply(args) => cmd_apply(&args),
        Command::Converge(args) => cmd_converge(&args),
    }
}

pub fn cmd_mesh(args: &MeshArgs) -> Result<(), CliError> {
    let kind = MeshKind::from(args.kind);
    let mesh = kind
        .generate(args.n, args.a, args.b)
        .map_err(CliError::input)?;
    let comment = format!("{} mesh, {} points on [{}, {}]", kind.name(), args.n, args.a, args.b);
    match &args.out {
        Some(path) => {
            io::write_mesh(path, &mesh, Some(&comment))?;
            let (lo, hi) = mesh.spacing_range();
            println!("N = {}  min spacing = {}  max spacing = {}", mesh.len(), fmt_f64(lo), fmt_f64(hi));
        }
        None => print!("{}", io::format_values(mesh.points(), Some(&comment))),
    }
    Ok(())
}

/// `<prefix>_D<order>.mtx`.
pub fn matrix_path(prefix: &Path, order: usize) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!("_D{order}.mtx"));
    PathBuf::from(name)
}

pub fn cmd_assemble(args: &AssembleArgs) -> Result<(), CliError> {
    let mesh = io::read_mesh(&args.mesh)?;
    let width = args.stencil.0.resolve(mesh.len());
    let set = assemble(&mesh, width, args.orders).map_err(CliError::numerical)?;
    println!("N = {}  M = {}  S = {}", mesh.len(), width, args.orders);
    for (k, matrix) in set.matrices().iter().enumerate() {
        let order = k + 1;
        let path = matrix_path(&args.out_prefix, order);
        let comment = format!("D_{order}: derivative order {order}, stencil width {width}");
        io::write_matrix_market(&path, matrix, Some(&comment))?;
        println!("D{order}: nnz = {}  -> {}", matrix.nnz(), path.display());
    }
    Ok(())
}

pub fn cmd_apply(args: &ApplyArgs) -> Result<(), CliError> {
    let matrix = io::read_matrix_market(&args.matrix)?;
    let samples = io::read_values(&args.samples)?;
    let out = matrix.apply(&samples).map_err(CliError::numerical)?;
    io::write_values(&args.out, &out, None)
}

/// Outcome of a convergence study: the error table and the fitted order, or
/// the reason no order could be fitted.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeOutcome {
    pub table: ErrorTable,
    pub fitted_order: Result<f64, diffmat::Error>,
}

pub fn run_convergence(args: &ConvergeArgs) -> Result<ConvergeOutcome, CliError> {
    let f = args.function;
    let kind = MeshKind::from(args.kind);
    let (a, b) = (args.a, args.b);
    let order = args.order;
    let table = measure_errors(
        |x| f.value(x),
        |x| f.derivative(order, x),
        |n| kind.generate(n, a, b),
        args.stencil.0,
        order,
        &args.resolutions,
    )?;
    let fitted_order = fit_order(&table);
    Ok(ConvergeOutcome {
        table,
        fitted_order,
    })
}

fn stencil_label(width: StencilWidth) -> String {
    match width {
        StencilWidth::Fixed(m) => m.to_string(),
        StencilWidth::Full => "full".to_string(),
    }
}

fn fitted_label(fitted: &Result<f64, diffmat::Error>) -> String {
    match fitted {
        Ok(p) => format!("{p:.4}"),
        Err(diffmat::Error::DegenerateFit { .. }) => "DegenerateFit".to_string(),
        Err(e) => e.to_string(),
    }
}

pub fn format_report(args: &ConvergeArgs, outcome: &ConvergeOutcome) -> String {
    let t = &outcome.table;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# function={} kind={} stencil={} order={} interval=[{}, {}]",
        args.function,
        MeshKind::from(args.kind).name(),
        stencil_label(args.stencil.0),
        args.order,
        args.a,
        args.b
    );
    if t.nonuniform {
        let _ = writeln!(out, "# h = (b - a)/(N - 1) is a nominal scale; the meshes are not uniform");
    }
    let _ = writeln!(out, "{:>8}  {:>24}  {:>24}", "N", "h", "max_error");
    for (k, ((n, h), e)) in t.resolutions.iter().zip(&t.spacings).zip(&t.errors).enumerate() {
        let mark = if t.is_saturated(k) { "  saturated" } else { "" };
        let _ = writeln!(out, "{n:>8}  {:>24}  {:>24}{mark}", fmt_f64(*h), fmt_f64(*e));
    }
    let _ = writeln!(out, "fitted_order {}", fitted_label(&outcome.fitted_order));
    out
}

pub fn format_report_csv(outcome: &ConvergeOutcome) -> String {
    let t = &outcome.table;
    let fitted = fitted_label(&outcome.fitted_order);
    let mut out = String::from("n,h,max_error,saturated,fitted_order\n");
    for (k, ((n, h), e)) in t.resolutions.iter().zip(&t.spacings).zip(&t.errors).enumerate() {
        let _ = writeln!(out, "{n},{},{},{},{fitted}", fmt_f64(*h), fmt_f64(*e), t.is_saturated(k));
    }
    out
}

/// Path of the CSV copy of a convergence report.
pub fn csv_path(out: &Path) -> Result<PathBuf, CliError> {
    let csv = out.with_extension("csv");
    if csv == out {
        return Err(CliError::Input(
            "report path must not end in .csv; the CSV copy is written next to it".to_string(),
        ));
    }
    Ok(csv)
}

pub fn cmd_converge(args: &ConvergeArgs) -> Result<(), CliError> {
    let csv = csv_path(&args.out)?;
    let outcome = run_convergence(args)?;
    let write = |path: &Path, text: String| {
        fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
    };
    write(&args.out, format_report(args, &outcome))?;
    write(&csv, format_report_csv(&outcome))?;
    // saturation is a result, not a failure: the report carries the flag
    match outcome.fitted_order {
        Ok(p) => println!("fitted order {p:.4}"),
        Err(diffmat::Error::DegenerateFit { .. }) => println!("fitted order DegenerateFit"),
        Err(e) => return Err(CliError::numerical(e)),
    }
    Ok(())
}
