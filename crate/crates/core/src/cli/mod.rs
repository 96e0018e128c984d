//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 solver failure,
//! 3 a verification verdict came out `violated`.

pub mod svg;
pub mod table_io;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{
    self, classify_profile, critical_lambda_probe, lambda_sweep, run_sweep, summarize,
    verify_scenario, AnalysisError, ProfileClass, SweepTable, Verdict, VerdictReport,
    DEFAULT_LAMBDAS,
};
use crate::grid::integrate;
use crate::scenario::{builtin_example, load_scenario, GrowthRate, Scenario, ScenarioError};
use crate::solver::{newton_solve, pseudo_transient, residual, Problem, SolverError};
use svg::Panel;
use table_io::{fmt_num, write_atomic, CsvDoc, CsvError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExitStatus(pub u8);

impl ExitStatus {
    pub const SUCCESS: Self = Self(0);
    pub const CONFIG: Self = Self(1);
    pub const SOLVER: Self = Self(2);
    pub const VIOLATED: Self = Self(3);

    pub fn code(self) -> u8 {
        self.0
    }
}

impl From<ExitStatus> for std::process::ExitCode {
    fn from(s: ExitStatus) -> Self {
        std::process::ExitCode::from(s.0)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Solver(_) => ExitStatus::SOLVER,
            _ => ExitStatus::CONFIG,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Scenario(s) => CliError::Scenario(s),
            AnalysisError::TooFewPoints { .. } | AnalysisError::Inconsistent(_) => {
                CliError::Config(e.to_string())
            }
            AnalysisError::Solver(_) | AnalysisError::LambdaSweep { .. } => {
                CliError::Solver(e.to_string())
            }
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::InvalidProblem(msg) => CliError::Config(msg),
            other => CliError::Solver(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dispersal", version, about = "Steady states and total-population sweeps for logistic diffusion with directed dispersal")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve at a single diffusion rate and write the profile as CSV.
    Solve {
        #[command(flatten)]
        source: Source,
        /// Diffusion coefficient.
        #[arg(long = "d", allow_negative_numbers = true)]
        d: f64,
        /// Output CSV with one row per grid node.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the diffusion rate and tabulate the total population.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Output CSV with one row per diffusion rate.
        #[arg(long)]
        out: PathBuf,
        /// Also draw M(d) as SVG.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Sweep the power-family exponent, one d-sweep per exponent.
    LambdaSweep {
        #[command(flatten)]
        source: Source,
        /// Comma-separated exponents.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambdas: Option<Vec<f64>>,
        /// Output directory for the per-exponent tables and the summary.
        #[arg(long)]
        out: PathBuf,
        /// Also draw all M(d) curves as one multi-panel SVG.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Evaluate every claim on built-in scenarios.
    Verify {
        /// Run the whole built-in suite.
        #[arg(long, conflicts_with = "example", required_unless_present = "example")]
        all: bool,
        /// Built-in scenario id.
        #[arg(long)]
        example: Option<String>,
        /// Power-family exponent, for `--example ex4.4`.
        #[arg(long, allow_negative_numbers = true, requires = "example")]
        lambda: Option<f64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw a sweep CSV as SVG.
    Plot {
        /// Sweep CSV written by `sweep` or `lambda-sweep`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output SVG.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Where a scenario comes from: a file or a built-in id.
#[derive(Debug, Args)]
pub struct Source {
    /// Scenario file.
    #[arg(conflicts_with = "example", required_unless_present = "example")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario id.
    #[arg(long)]
    pub example: Option<String>,
    /// Replace the growth rate by the power family with this exponent.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Override the number of grid cells.
    #[arg(long)]
    pub cells: Option<usize>,
}

impl Source {
    pub fn load(&self) -> Result<Scenario, CliError> {
        let mut s = match (&self.scenario, &self.example) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                load_scenario(&text)?
            }
            (None, Some(id)) => builtin_example(id)?,
            (None, None) => return Err(CliError::Config("no scenario given".into())),
        };
        if let Some(lambda) = self.lambda {
            s = s.with_lambda(lambda);
        }
        if let Some(n) = self.cells {
            s = s.with_cells(n)?;
        }
        s.validate()?;
        Ok(s)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitStatus::CONFIG
            } else {
                ExitStatus::SUCCESS
            };
        }
    };
    match execute(&cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.status()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<ExitStatus, CliError> {
    match cmd {
        Command::Solve { source, d, out } => cmd_solve(source, *d, out),
        Command::Sweep { source, out, plot } => cmd_sweep(source, out, plot.as_deref()),
        Command::LambdaSweep {
            source,
            lambdas,
            out,
            plot,
        } => cmd_lambda_sweep(source, lambdas.as_deref(), out, plot.as_deref()),
        Command::Verify {
            all,
            example,
            lambda,
            report,
        } => cmd_verify(*all, example.as_deref(), *lambda, report.as_deref()),
        Command::Plot { input, out } => cmd_plot(input, out),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents).map_err(|e| CliError::io(path, e))
}

fn lambda_label(s: &Scenario) -> String {
    match &s.growth {
        GrowthRate::Power { lambda, alpha } => format!("alpha*(K/P)^lambda, lambda={lambda}, alpha={alpha}"),
        GrowthRate::Formula(f) => f.text().to_string(),
    }
}

pub fn cmd_solve(source: &Source, d: f64, out: &Path) -> Result<ExitStatus, CliError> {
    if !(d.is_finite() && d > 0.0) {
        return Err(CliError::Config("d must be positive".into()));
    }
    let s = source.load()?;
    let f = s.fields()?;
    let problem = Problem::new(d, f.k.clone(), f.p.clone(), f.r.clone())?;
    let res = match newton_solve(&problem, &f.k, &s.opts) {
        Ok(r) => r,
        Err(_) => pseudo_transient(&problem, &f.k, &s.opts)?,
    };
    let resid = residual(&res.u, &problem);
    let int_k = integrate(&f.k);
    let m = integrate(&res.u);

    let mut doc = CsvDoc::new(&["x", "u", "K", "P", "r", "residual"]);
    doc.meta("scenario", &s.name)
        .meta("K", s.k.text())
        .meta("P", s.p.text())
        .meta("r", lambda_label(&s))
        .meta("d", fmt_num(d))
        .meta("M", fmt_num(m))
        .meta("intK", fmt_num(int_k))
        .meta("iterations", res.iterations)
        .meta("method", res.method.as_str())
        .meta("residual_norm", fmt_num(res.residual_norm));
    for i in 0..res.u.len() {
        doc.row(vec![
            fmt_num(s.grid.node(i)),
            fmt_num(res.u.values()[i]),
            fmt_num(f.k.values()[i]),
            fmt_num(f.p.values()[i]),
            fmt_num(f.r.values()[i]),
            fmt_num(resid.values()[i]),
        ]);
    }
    write(out, &doc.render())?;
    println!(
        "{}: d={d} M={m:.10} intK={int_k:.10} iterations={} method={}",
        s.name,
        res.iterations,
        res.method.as_str()
    );
    Ok(ExitStatus::SUCCESS)
}

fn sweep_doc(scenario_name: &str, t: &SweepTable, profile: Option<&ProfileClass>) -> CsvDoc {
    let mut doc = CsvDoc::new(&["d", "M", "M_minus_intK", "iterations", "residual", "method"]);
    doc.meta("scenario", scenario_name);
    if let Some(l) = t.lambda {
        doc.meta("lambda", l);
    }
    doc.meta("intK", fmt_num(t.int_k))
        .meta("beta", fmt_num(t.beta))
        .meta("m_infinity", fmt_num(t.m_infinity));
    match profile {
        Some(p) => {
            doc.meta("profile_shape", p.shape)
                .meta("n_interior_maxima", p.n_interior_maxima)
                .meta("n_sign_changes_of_slope", p.n_sign_changes_of_slope)
                .meta("argmax_d", fmt_num(p.argmax_d));
        }
        None => {
            doc.meta("profile_shape", "undetermined");
        }
    }
    for row in &t.rows {
        doc.row(vec![
            fmt_num(row.d),
            fmt_num(row.m),
            fmt_num(row.m_minus_int_k),
            row.iterations.to_string(),
            fmt_num(row.residual),
            row.method.as_str().to_string(),
        ]);
    }
    doc
}

fn profile_of(t: &SweepTable) -> Result<Option<ProfileClass>, CliError> {
    match classify_profile(t) {
        Ok(p) => Ok(Some(p)),
        Err(AnalysisError::TooFewPoints { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn panel_of(title: String, t: &SweepTable) -> Panel {
    Panel {
        title,
        d: t.d_values(),
        m: t.m_values(),
        reference: Some(t.int_k),
    }
}

pub fn cmd_sweep(source: &Source, out: &Path, plot: Option<&Path>) -> Result<ExitStatus, CliError> {
    let s = source.load()?;
    let run = run_sweep(&s)?;
    let profile = profile_of(&run.table)?;
    write(out, &sweep_doc(&s.name, &run.table, profile.as_ref()).render())?;
    if let Some(path) = plot {
        write(path, &svg::render(&[panel_of(s.name.clone(), &run.table)], 1))?;
    }
    println!(
        "{}: {} rows, intK={:.10}, profile={}",
        s.name,
        run.table.rows.len(),
        run.table.int_k,
        profile.map_or("undetermined".to_string(), |p| p.shape.to_string())
    );
    Ok(ExitStatus::SUCCESS)
}

pub fn cmd_lambda_sweep(
    source: &Source,
    lambdas: Option<&[f64]>,
    out: &Path,
    plot: Option<&Path>,
) -> Result<ExitStatus, CliError> {
    let lambdas = lambdas.unwrap_or(&DEFAULT_LAMBDAS);
    if lambdas.is_empty() {
        return Err(CliError::Config("lambda list is empty".into()));
    }
    let s = source.load()?;
    let alpha = match s.growth {
        GrowthRate::Power { alpha, .. } => alpha,
        GrowthRate::Formula(_) => 1.0,
    };
    for &l in lambdas {
        s.with_lambda(l).validate()?;
    }
    let f = s.fields()?;
    let tables = lambda_sweep(&f.k, &f.p, alpha, lambdas, &s.d_values(), &s.opts)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;

    let mut panels = Vec::new();
    for (lambda, t) in &tables {
        let profile = profile_of(t)?;
        let name = format!("{}, lambda={lambda}", s.name);
        write(
            &out.join(format!("sweep_lambda_{lambda}.csv")),
            &sweep_doc(&name, t, profile.as_ref()).render(),
        )?;
        panels.push(panel_of(format!("lambda = {lambda}"), t));
    }

    let mut doc = CsvDoc::new(&["lambda", "m_infinity", "max_M", "argmax_d", "profile_shape"]);
    doc.meta("scenario", &s.name)
        .meta("alpha", alpha)
        .meta("intK", fmt_num(integrate(&f.k)));
    let summary = if tables.iter().all(|(_, t)| t.rows.len() >= 5) {
        let rows = summarize(&tables)?;
        let probe = critical_lambda_probe(&rows);
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
        doc.meta("last_lambda_with_interior_max", opt(probe.last_interior_max))
            .meta("first_lambda_increasing", opt(probe.first_increasing))
            .meta("single_threshold_consistent", probe.consistent)
            .meta("max_M_nondecreasing_in_lambda", probe.max_m_nondecreasing);
        for r in &rows {
            doc.row(vec![
                r.lambda.to_string(),
                fmt_num(r.m_infinity),
                fmt_num(r.max_m),
                fmt_num(r.argmax_d),
                r.shape.to_string(),
            ]);
        }
        rows
    } else {
        return Err(CliError::Config(
            "lambda summary needs at least 5 d points".into(),
        ));
    };
    write(&out.join("summary.csv"), &doc.render())?;
    if let Some(path) = plot {
        write(path, &svg::render(&panels, 3))?;
    }
    for r in &summary {
        println!(
            "lambda={:<6} m_infinity={:.8} max_M={:.8} profile={}",
            r.lambda, r.m_infinity, r.max_m, r.shape
        );
    }
    Ok(ExitStatus::SUCCESS)
}

/// The scenarios covered by `verify --all`: every built-in plus the
/// constant-growth and negatively correlated members of the power family.
pub fn verification_suite() -> Vec<Scenario> {
    let mut out: Vec<Scenario> = crate::scenario::BUILTIN_IDS
        .iter()
        .map(|id| builtin_example(id).expect("built-in"))
        .collect();
    let base = builtin_example("ex4.4").expect("built-in");
    for lambda in [0.0, -1.0] {
        let mut s = base.with_lambda(lambda);
        s.name = format!("ex4.4(lambda={lambda})");
        out.push(s);
    }
    out
}

pub fn verification_report(reports: &[VerdictReport]) -> String {
    let mut text = String::new();
    for r in reports {
        let _ = writeln!(text, "{r}");
    }
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let _ = writeln!(
        text,
        "# summary: {} confirmed, {} violated, {} indeterminate, {} inapplicable",
        count(Verdict::Confirmed),
        count(Verdict::Violated),
        count(Verdict::Indeterminate),
        count(Verdict::Inapplicable)
    );
    text
}

pub fn cmd_verify(
    all: bool,
    example: Option<&str>,
    lambda: Option<f64>,
    report: Option<&Path>,
) -> Result<ExitStatus, CliError> {
    let scenarios = if all {
        verification_suite()
    } else {
        let id = example.ok_or_else(|| CliError::Config("give --all or --example".into()))?;
        let mut s = builtin_example(id)?;
        if let Some(l) = lambda {
            s = s.with_lambda(l);
            s.name = format!("{id}(lambda={l})");
        }
        vec![s]
    };
    let per_scenario: Vec<Vec<VerdictReport>> = scenarios
        .par_iter()
        .map(|s| verify_scenario(s).map(|(_, reps)| reps))
        .collect::<Result<_, analysis::AnalysisError>>()?;
    let reports: Vec<VerdictReport> = per_scenario.into_iter().flatten().collect();
    let text = verification_report(&reports);
    match report {
        Some(path) => {
            write(path, &text)?;
            print!("{}", text.lines().last().map(|l| format!("{l}\n")).unwrap_or_default());
        }
        None => print!("{text}"),
    }
    if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        Ok(ExitStatus::VIOLATED)
    } else {
        Ok(ExitStatus::SUCCESS)
    }
}

pub fn cmd_plot(input: &Path, out: &Path) -> Result<ExitStatus, CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let doc = CsvDoc::parse(&text)?;
    let d = doc.column("d")?;
    let m = doc.column("M")?;
    if d.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(CsvError::Malformed("d values must be positive".into()).into());
    }
    let reference = doc
        .get_meta("intK")
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| CsvError::Malformed(format!("intK '{v}' is not a number")))
        })
        .transpose()?;
    let mut title = doc.get_meta("scenario").unwrap_or("sweep").to_string();
    if let Some(l) = doc.get_meta("lambda") {
        if !title.contains("lambda") {
            title = format!("{title}, lambda={l}");
        }
    }
    let panel = Panel {
        title,
        d,
        m,
        reference,
    };
    write(out, &svg::render(&[panel], 1))?;
    Ok(ExitStatus::SUCCESS)
}
